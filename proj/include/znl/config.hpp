#pragma once

#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "znl/model.hpp"
#include "znl/sfde.hpp"
#include "znl/types.hpp"
#include "znl/zoo.hpp"

namespace znl::cli {

using Json = nlohmann::json;

// A model selected by the config: a zoo entry or a custom FieldExpr model.
struct LoadedModel {
    std::string name;
    std::optional<zoo::ZooSelection> selection;  // absent for custom models
    std::optional<ModelSpec> ode;
    std::optional<DelayModel> delay;
    Vec default_x0;
};

// Declarative experiment description. `effective` holds the fully
// materialized config (all defaults filled in), suitable for the run
// manifest; the typed fields below are parsed from it.
struct ExperimentConfig {
    Json effective;

    LoadedModel model;
    double epsilon = 0.1;
    std::vector<double> epsilons;

    double dt = 1e-3;
    double t_final = 100.0;
    double burn_in = 10.0;
    std::size_t n_paths = 8;
    std::uint64_t master_seed = 1;
    Vec x0;
    std::vector<Vec> x0_set;

    int bins = 128;
    std::size_t reservoir = 4096;
    std::optional<std::pair<Vec, Vec>> box;
    bool use_grid = true;

    bool candidates_auto = true;
    std::vector<Vec> candidate_points;
    double delta = 0.3;
    double support_scale = 1.0;
    std::vector<double> radii = {2.0, 4.0};

    std::string lyapunov_v = "";
    std::vector<double> lyapunov_radii = {2.0, 4.0, 8.0};
    int lyapunov_samples = 256;
    double growth_q = 2.0;

    double converge_delta = 0.5;

    std::string grad_phi = "x1";
    double grad_t = 1.0;
    Vec grad_h;
    double grad_delta = 1e-3;

    double decompose_g0 = 1.0;
    int decompose_seeds = 20;
    double decompose_tolerance = 1e-6;
    double decompose_min_ratio = 1.3;

    double hopfield_kappa = 4.0;

    std::string out_dir = "out";
};

// Parses and validates a config object: unknown keys are rejected, every
// default is materialized, and all messages name the offending config path.
ExperimentConfig parse_config(const Json& raw);

// Applies one `dotted.path=value` override (values parsed as JSON when
// possible, as strings otherwise).
void apply_override(Json& config, const std::string& assignment);

Json load_config_file(const std::string& path);

}  // namespace znl::cli
