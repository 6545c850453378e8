#include "znl/commands.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "znl/calculus.hpp"
#include "znl/ensemble.hpp"
#include "znl/expr.hpp"
#include "znl/generator.hpp"
#include "znl/sensitivity.hpp"
#include "znl/wasserstein.hpp"

namespace znl::cli {

namespace {

namespace fs = std::filesystem;

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt_eps(double eps) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", eps);
    return buf;
}

class CsvWriter {
public:
    CsvWriter(const fs::path& path, const std::vector<std::string>& header) : out_(path) {
        if (!out_) fail(Errc::IoError, "cannot open '" + path.string() + "' for writing");
        for (std::size_t i = 0; i < header.size(); ++i) out_ << (i ? "," : "") << header[i];
        out_ << "\n";
    }
    void row(const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
        out_ << "\n";
    }

private:
    std::ofstream out_;
};

void write_manifest(const fs::path& dir, const std::string& subcommand, const Json& effective) {
    Json manifest;
    manifest["subcommand"] = subcommand;
    manifest["config"] = effective;
    manifest["version"] = "znl 0.1.0";
    std::ofstream out(dir / "run_manifest.json");
    if (!out) fail(Errc::IoError, "cannot write run manifest");
    out << manifest.dump(2) << "\n";
}

void write_path_csv(const fs::path& path, const PathSample& sample, std::size_t max_rows = 20000) {
    const int m = static_cast<int>(sample.states.front().size());
    std::vector<std::string> header = {"t"};
    for (int d = 0; d < m; ++d) header.push_back("x" + std::to_string(d + 1));
    CsvWriter csv(path, header);
    const std::size_t stride = std::max<std::size_t>(1, sample.size() / max_rows);
    for (std::size_t i = 0; i < sample.size(); i += stride) {
        std::vector<std::string> cells = {fmt(sample.times[i])};
        for (int d = 0; d < m; ++d) cells.push_back(fmt(sample.states[i][d]));
        csv.row(cells);
    }
}

void write_histogram_csv(const fs::path& path, const EmpiricalMeasure& measure) {
    if (!measure.grid()) return;  // reservoir-only measures emit no histogram
    const GridSpec& grid = *measure.grid();
    const int m = grid.dim();
    std::vector<std::string> header;
    for (int d = 0; d < m; ++d) header.push_back("bin_" + std::to_string(d + 1));
    for (int d = 0; d < m; ++d) header.push_back("center_" + std::to_string(d + 1));
    header.push_back("mass");
    CsvWriter csv(path, header);
    for (std::size_t i = 0; i < grid.total_bins(); ++i) {
        const std::vector<int> coords = grid.coords_of(i);
        const Vec center = grid.center_of(i);
        std::vector<std::string> cells;
        for (int d = 0; d < m; ++d) cells.push_back(std::to_string(coords[d]));
        for (int d = 0; d < m; ++d) cells.push_back(fmt(center[d]));
        cells.push_back(fmt(measure.mass_at(i)));
        csv.row(cells);
    }
}

void write_candidates_csv(const fs::path& path, const dynamics::CandidateSet& candidates, int dim) {
    std::vector<std::string> header = {"label", "kind", "classification"};
    for (int d = 0; d < dim; ++d) header.push_back("x" + std::to_string(d + 1));
    CsvWriter csv(path, header);
    for (const auto& p : candidates.points) {
        std::vector<std::string> cells = {p.label, "point", dynamics::classification_name(p.cls)};
        for (int d = 0; d < dim; ++d) cells.push_back(fmt(p.x[d]));
        csv.row(cells);
    }
    for (const auto& c : candidates.curves) {
        for (const auto& q : c.points) {
            std::vector<std::string> cells = {c.label, "curve", "periodic"};
            for (int d = 0; d < dim; ++d) cells.push_back(fmt(q[d]));
            csv.row(cells);
        }
    }
}

dynamics::CandidateSet resolve_candidates(const ExperimentConfig& cfg) {
    if (!cfg.candidates_auto && !cfg.candidate_points.empty()) {
        dynamics::CandidateSet set;
        for (std::size_t i = 0; i < cfg.candidate_points.size(); ++i) {
            dynamics::LabeledPoint p;
            p.x = cfg.candidate_points[i];
            p.label = "C" + std::to_string(i);
            set.points.push_back(std::move(p));
        }
        return set;
    }
    if (cfg.model.selection) return dynamics::birkhoff_candidates(*cfg.model.selection);
    fail(Errc::ConfigError, "candidates.auto needs a zoo model; give candidates.points for custom models");
}

SimParams sim_params(const ExperimentConfig& cfg, double epsilon) {
    SimParams p;
    p.dt = cfg.dt;
    p.t_final = cfg.t_final;
    p.burn_in = cfg.burn_in;
    p.epsilon = epsilon;
    return p;
}

measures::OccupationOptions occupation_options(const ExperimentConfig& cfg, int threads) {
    measures::OccupationOptions opts;
    opts.master_seed = cfg.master_seed;
    opts.n_paths = cfg.n_paths;
    opts.threads = threads;
    opts.reservoir = cfg.reservoir;
    opts.use_grid = cfg.use_grid;
    if (cfg.box) opts.grid = GridSpec::uniform(cfg.box->first, cfg.box->second, cfg.bins);
    return opts;
}

const ModelSpec& require_ode(const ExperimentConfig& cfg) {
    if (!cfg.model.ode) fail(Errc::ConfigError, "model: this subcommand needs an ODE/SDE model");
    return *cfg.model.ode;
}

ModelSpec ito_model(const ExperimentConfig& cfg) {
    const ModelSpec& model = require_ode(cfg);
    return model.noise_kind == NoiseKind::Stratonovich ? stratonovich_to_ito(model) : model;
}

int cmd_flow(const ExperimentConfig& cfg, const fs::path& dir, int) {
    PathSample path = flow(require_ode(cfg), cfg.x0, sim_params(cfg, 0.0));
    write_path_csv(dir / "flow.csv", path);
    return kOk;
}

int cmd_simulate(const ExperimentConfig& cfg, const fs::path& dir, int) {
    RngStream stream = derive_stream(cfg.master_seed, 0);
    PathSample path = em_path(ito_model(cfg), cfg.x0, sim_params(cfg, cfg.epsilon), stream);
    write_path_csv(dir / "path.csv", path);
    return kOk;
}

int cmd_occupy(const ExperimentConfig& cfg, const fs::path& dir, int threads) {
    const ModelSpec model = ito_model(cfg);
    EmpiricalMeasure measure =
        measures::occupation_estimate(model, cfg.x0, sim_params(cfg, cfg.epsilon), occupation_options(cfg, threads));
    write_histogram_csv(dir / "histogram.csv", measure);
    CsvWriter csv(dir / "occupy_summary.csv", {"epsilon", "total_samples", "leak_mass", "reservoir"});
    csv.row({fmt(cfg.epsilon), std::to_string(measure.total_samples()), fmt(measure.leak_mass()),
             std::to_string(measure.reservoir().size())});
    if (measure.leak_mass() > 0.05)
        std::cerr << "warning: leak_mass = " << measure.leak_mass() << " exceeds 0.05; widen measure.box\n";
    return kOk;
}

int cmd_converge(const ExperimentConfig& cfg, const fs::path& dir, int threads) {
    const ModelSpec model = ito_model(cfg);
    if (cfg.epsilons.size() < 2) fail(Errc::ConfigError, "noise.epsilons: converge needs >= 2 entries");
    std::vector<Vec> points = cfg.x0_set;
    if (points.empty()) points.push_back(cfg.x0);

    CsvWriter rows(dir / "converge.csv", {"epsilon", "point_index", "p_exceed"});
    CsvWriter summary(dir / "converge_summary.csv", {"epsilon", "sup_p_exceed"});
    const double delta = cfg.converge_delta;
    std::vector<double> sups;
    for (double eps : cfg.epsilons) {
        double sup = 0.0;
        for (std::size_t pi = 0; pi < points.size(); ++pi) {
            const Vec x0 = points[pi];
            SimParams p = sim_params(cfg, eps);
            p.burn_in = 0.0;
            EnsembleOptions ens{cfg.master_seed, cfg.n_paths, threads, 0, 64};
            auto per_path = [&](std::size_t, RngStream& stream) {
                Vec xe, xd;
                coupled_run(model, x0, p, stream, [&](std::size_t, double, const Vec& a, const Vec& b) {
                    xe = a;
                    xd = b;
                });
                return (xe - xd).norm() >= delta ? 1.0 : 0.0;
            };
            struct Acc {
                double hits = 0;
                std::uint64_t n = 0;
            };
            Acc acc = run_ensemble<Acc>(
                ens, per_path, Acc{},
                [](Acc& a, std::size_t, double v) {
                    a.hits += v;
                    ++a.n;
                },
                [](Acc& a, Acc&& b) {
                    a.hits += b.hits;
                    a.n += b.n;
                });
            const double prob = acc.n ? acc.hits / static_cast<double>(acc.n) : 0.0;
            rows.row({fmt(eps), std::to_string(pi), fmt(prob)});
            sup = std::max(sup, prob);
        }
        summary.row({fmt(eps), fmt(sup)});
        sups.push_back(sup);
    }
    for (std::size_t i = 1; i < sups.size(); ++i)
        if (sups[i] > sups[i - 1] + 1e-12) return kCheckFailed;
    return kOk;
}

int cmd_sweep(const ExperimentConfig& cfg, const fs::path& dir, int threads) {
    const ModelSpec model = ito_model(cfg);
    if (cfg.epsilons.size() < 2) fail(Errc::ConfigError, "noise.epsilons: sweep needs >= 2 entries");
    const dynamics::CandidateSet candidates = resolve_candidates(cfg);

    measures::SweepOptions opts;
    opts.occupation = occupation_options(cfg, threads);
    opts.delta = cfg.delta;
    opts.support_scale = cfg.support_scale;
    opts.radii = cfg.radii;
    measures::SweepReport report =
        measures::convergence_sweep(model, cfg.x0, cfg.epsilons, sim_params(cfg, 0.0), candidates, opts);

    SimParams overlay = sim_params(cfg, 0.0);
    PathSample det = flow(require_ode(cfg), cfg.x0, overlay);
    const std::size_t stride = std::max<std::size_t>(1, det.size() / 5000);
    std::vector<Vec> overlay_samples;
    for (std::size_t i = 0; i < det.size(); i += stride) overlay_samples.push_back(det.states[i]);

    emit_plotdata(report, candidates, overlay_samples, dir.string());
    return report.support_trend_ok ? kOk : kCheckFailed;
}

int cmd_lyapunov(const ExperimentConfig& cfg, const fs::path& dir, int) {
    const ModelSpec model = ito_model(cfg);
    if (cfg.lyapunov_v.empty()) fail(Errc::ConfigError, "lyapunov.v: required expression");
    FieldExpr expr = FieldExpr::parse(cfg.lyapunov_v, model.dim);
    LyapunovSpec V = LyapunovSpec::from_value([expr](const Vec& x) { return expr.eval(x); });

    RngStream stream = derive_stream(cfg.master_seed, 0);
    LyapunovScan scan =
        lyapunov_scan(V, model, cfg.epsilon, cfg.lyapunov_radii, cfg.lyapunov_samples, stream);
    CsvWriter csv(dir / "lyapunov.csv", {"R", "infV", "supLV", "A_R"});
    for (const auto& row : scan.rows)
        csv.row({fmt(row.radius), fmt(row.inf_v), fmt(row.sup_lv), fmt(row.a_r)});

    RngStream growth_stream = derive_stream(cfg.master_seed, 1);
    GrowthReport growth = polynomial_growth_check(model, cfg.growth_q, cfg.lyapunov_radii,
                                                  cfg.lyapunov_samples, growth_stream);
    CsvWriter gcsv(dir / "growth.csv", {"q", "c1", "c2", "pass"});
    gcsv.row({fmt(cfg.growth_q), fmt(growth.c1), fmt(growth.c2), growth.pass ? "1" : "0"});

    return scan.violation ? kCheckFailed : kOk;
}

int cmd_equilibria(const ExperimentConfig& cfg, const fs::path& dir, int) {
    const ModelSpec& model = require_ode(cfg);
    Vec lo, hi;
    if (cfg.box) {
        lo = cfg.box->first;
        hi = cfg.box->second;
    } else {
        lo = Vec::Constant(model.dim, -2.0);
        hi = Vec::Constant(model.dim, 2.0);
    }
    const int per_dim = model.dim <= 2 ? 5 : (model.dim == 3 ? 4 : 1);
    dynamics::EquilibriumSearch search =
        dynamics::find_equilibria(model, dynamics::seed_grid(lo, hi, per_dim));

    std::vector<std::string> header;
    for (int d = 0; d < model.dim; ++d) header.push_back("x" + std::to_string(d + 1));
    header.push_back("classification");
    for (int d = 0; d < model.dim; ++d) {
        header.push_back("eig_re_" + std::to_string(d + 1));
        header.push_back("eig_im_" + std::to_string(d + 1));
    }
    CsvWriter csv(dir / "equilibria.csv", header);
    for (const Vec& root : search.roots) {
        dynamics::ClassifyResult cls = dynamics::classify_equilibrium(model, root);
        std::vector<std::string> cells;
        for (int d = 0; d < model.dim; ++d) cells.push_back(fmt(root[d]));
        cells.push_back(dynamics::classification_name(cls.cls));
        for (int d = 0; d < model.dim; ++d) {
            cells.push_back(fmt(cls.eigenvalues[d].real()));
            cells.push_back(fmt(cls.eigenvalues[d].imag()));
        }
        csv.row(cells);
    }
    return kOk;
}

int cmd_decompose(const ExperimentConfig& cfg, const fs::path& dir, int) {
    if (cfg.model.name != "may_leonard")
        fail(Errc::ConfigError, "model.name: decompose applies to may_leonard");
    const auto& p = std::get<zoo::MayLeonardParams>(*cfg.model.selection);

    CsvWriter csv(dir / "decompose.csv", {"seed", "dt", "sup_error"});
    double coarse_sum = 0.0, fine_sum = 0.0;
    SimParams base = sim_params(cfg, cfg.epsilon);
    base.burn_in = 0.0;
    const std::size_t n = base.n_steps();
    bool eps0_pass = true;
    if (cfg.epsilon == 0.0) {
        RngStream stream = derive_stream(cfg.master_seed, 0);
        auto res = zoo::decomposition_check(p, cfg.decompose_g0, cfg.x0, base, stream,
                                            cfg.decompose_tolerance);
        csv.row({"0", fmt(base.dt), fmt(res.sup_error)});
        return res.pass ? kOk : kCheckFailed;
    }
    for (int seed = 0; seed < cfg.decompose_seeds; ++seed) {
        RngStream stream = derive_stream(cfg.master_seed, static_cast<std::uint64_t>(seed));
        std::vector<Vec> fine = brownian_increments(stream, 1, 2 * n, base.dt / 2.0);
        std::vector<double> fine_dw(2 * n), coarse_dw(n);
        for (std::size_t i = 0; i < 2 * n; ++i) fine_dw[i] = fine[i][0];
        for (std::size_t i = 0; i < n; ++i) coarse_dw[i] = fine_dw[2 * i] + fine_dw[2 * i + 1];
        auto coarse = zoo::decomposition_check_given(p, cfg.decompose_g0, cfg.x0, cfg.epsilon, base.dt,
                                                     n, coarse_dw, cfg.decompose_tolerance);
        auto finer = zoo::decomposition_check_given(p, cfg.decompose_g0, cfg.x0, cfg.epsilon,
                                                    base.dt / 2.0, 2 * n, fine_dw,
                                                    cfg.decompose_tolerance);
        csv.row({std::to_string(seed), fmt(base.dt), fmt(coarse.sup_error)});
        csv.row({std::to_string(seed), fmt(base.dt / 2.0), fmt(finer.sup_error)});
        coarse_sum += coarse.sup_error;
        fine_sum += finer.sup_error;
    }
    const double ratio = fine_sum > 0.0 ? coarse_sum / fine_sum : 0.0;
    CsvWriter summary(dir / "decompose_summary.csv", {"epsilon", "mean_coarse", "mean_fine", "ratio"});
    summary.row({fmt(cfg.epsilon), fmt(coarse_sum / cfg.decompose_seeds),
                 fmt(fine_sum / cfg.decompose_seeds), fmt(ratio)});
    return (eps0_pass && ratio >= cfg.decompose_min_ratio) ? kOk : kCheckFailed;
}

int cmd_grad(const ExperimentConfig& cfg, const fs::path& dir, int threads) {
    const ModelSpec model = ito_model(cfg);
    FieldExpr expr = FieldExpr::parse(cfg.grad_phi, model.dim);
    auto phi = [expr](const Vec& x) { return expr.eval(x); };
    SimParams p = sim_params(cfg, cfg.epsilon);
    p.burn_in = 0.0;

    auto bel = sensitivity::bel_gradient(model, phi, cfg.grad_t, cfg.x0, cfg.grad_h, cfg.n_paths, p,
                                         cfg.master_seed, threads);
    auto fd = sensitivity::fd_gradient(model, phi, cfg.grad_t, cfg.x0, cfg.grad_h, cfg.grad_delta,
                                       cfg.n_paths, p, cfg.master_seed, threads);
    CsvWriter csv(dir / "grad.csv", {"estimate", "std_error", "n_paths", "dt", "method"});
    csv.row({fmt(bel.estimate), fmt(bel.std_error), std::to_string(bel.n_paths), fmt(cfg.dt), "bel"});
    csv.row({fmt(fd.estimate), fmt(fd.std_error), std::to_string(fd.n_paths), fmt(cfg.dt), "fd"});

    const double combined = 3.0 * std::sqrt(bel.std_error * bel.std_error + fd.std_error * fd.std_error);
    return std::abs(bel.estimate - fd.estimate) <= combined ? kOk : kCheckFailed;
}

int cmd_hopfield_check(const ExperimentConfig& cfg, const fs::path& dir, int) {
    if (cfg.model.name != "hopfield")
        fail(Errc::ConfigError, "model.name: hopfield-check applies to hopfield");
    const auto& p = std::get<zoo::HopfieldParams>(*cfg.model.selection);
    HopfieldCondition cond;
    bool kappa_ok = true;
    try {
        cond = hopfield_condition(p.b_min(), p.tau, cfg.hopfield_kappa, p.lipschitz_g(),
                                  p.coupling_norm());
    } catch (const Error& e) {
        if (e.code() != Errc::KappaOutOfRange) throw;
        kappa_ok = false;
        std::cout << "kappa out of range: " << e.what() << "\n";
    }
    CsvWriter csv(dir / "hopfield_check.csv",
                  {"b_min", "tau", "kappa", "lipschitz_g", "a_norm", "gamma", "threshold", "satisfied"});
    csv.row({fmt(p.b_min()), fmt(p.tau), fmt(cfg.hopfield_kappa), fmt(p.lipschitz_g()),
             fmt(p.coupling_norm()), fmt(cond.gamma), fmt(cond.threshold),
             (kappa_ok && cond.satisfied) ? "1" : "0"});
    std::cout << "gamma = " << cond.gamma << ", threshold = " << cond.threshold
              << ", b_min = " << p.b_min() << "\n";
    return (kappa_ok && cond.satisfied) ? kOk : kCheckFailed;
}

}  // namespace

const std::vector<std::string>& subcommand_names() {
    static const std::vector<std::string> names = {
        "flow",      "simulate", "converge", "occupy",         "sweep", "lyapunov",
        "equilibria", "decompose", "grad",    "hopfield-check"};
    return names;
}

void emit_plotdata(const measures::SweepReport& report, const dynamics::CandidateSet& candidates,
                   const std::vector<Vec>& flow_samples, const std::string& directory) {
    const fs::path dir(directory);
    fs::create_directories(dir);
    if (report.entries.empty()) fail(Errc::BadParams, "sweep report is empty");
    const int dim = report.entries.front().measure.dim();

    for (const auto& entry : report.entries)
        write_histogram_csv(dir / ("histogram_eps" + fmt_eps(entry.epsilon) + ".csv"), entry.measure);

    std::vector<std::string> header = {"epsilon", "w1_to_previous", "support_mass", "leak_mass"};
    for (double radius : report.radii) {
        char buf[32];
        std::snprintf(buf, sizeof(buf), "outside_mass_R%g", radius);
        header.push_back(buf);
    }
    CsvWriter summary(dir / "sweep_summary.csv", header);
    for (const auto& entry : report.entries) {
        std::vector<std::string> cells = {fmt(entry.epsilon), fmt(entry.w1_to_previous),
                                          fmt(entry.support), fmt(entry.leak)};
        for (double outside : entry.outside) cells.push_back(fmt(outside));
        summary.row(cells);
    }

    write_candidates_csv(dir / "candidates.csv", candidates, dim);

    std::vector<std::string> flow_header;
    for (int d = 0; d < dim; ++d) flow_header.push_back("x" + std::to_string(d + 1));
    CsvWriter overlay(dir / "flow_overlay.csv", flow_header);
    for (const Vec& x : flow_samples) {
        std::vector<std::string> cells;
        for (int d = 0; d < dim; ++d) cells.push_back(fmt(x[d]));
        overlay.row(cells);
    }
}

int run_subcommand(const std::string& name, const Json& raw_config, const CliOptions& options) {
    try {
        Json raw = raw_config;
        for (const std::string& assignment : options.sets) apply_override(raw, assignment);
        if (options.seed) raw["sim"]["master_seed"] = *options.seed;
        if (!options.out_dir.empty()) raw["output"]["directory"] = options.out_dir;

        ExperimentConfig cfg = parse_config(raw);
        const fs::path dir(cfg.out_dir);
        fs::create_directories(dir);
        write_manifest(dir, name, cfg.effective);

        if (name == "flow") return cmd_flow(cfg, dir, options.threads);
        if (name == "simulate") return cmd_simulate(cfg, dir, options.threads);
        if (name == "occupy") return cmd_occupy(cfg, dir, options.threads);
        if (name == "converge") return cmd_converge(cfg, dir, options.threads);
        if (name == "sweep") return cmd_sweep(cfg, dir, options.threads);
        if (name == "lyapunov") return cmd_lyapunov(cfg, dir, options.threads);
        if (name == "equilibria") return cmd_equilibria(cfg, dir, options.threads);
        if (name == "decompose") return cmd_decompose(cfg, dir, options.threads);
        if (name == "grad") return cmd_grad(cfg, dir, options.threads);
        if (name == "hopfield-check") return cmd_hopfield_check(cfg, dir, options.threads);
        fail(Errc::ConfigError, "unknown subcommand '" + name + "'");
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        switch (e.code()) {
            case Errc::BlowUp:
            case Errc::NonFiniteOutput:
            case Errc::DegenerateDiffusion:
                return kNumericalError;
            case Errc::KappaOutOfRange:
                return kCheckFailed;
            default:
                return kConfigError;
        }
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kNumericalError;
    }
}

}  // namespace znl::cli
