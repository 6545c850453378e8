#include "znl/config.hpp"

#include <fstream>

#include "znl/expr.hpp"

namespace znl::cli {

namespace {

[[noreturn]] void config_fail(const std::string& path, const std::string& message) {
    fail(Errc::ConfigError, path + ": " + message);
}

void check_keys(const Json& obj, const std::string& path, std::initializer_list<const char*> allowed) {
    if (!obj.is_object()) config_fail(path, "must be an object");
    for (const auto& [key, value] : obj.items()) {
        (void)value;
        bool ok = false;
        for (const char* name : allowed) ok = ok || key == name;
        if (!ok) config_fail(path + "." + key, "unknown key");
    }
}

double get_double(const Json& obj, const std::string& path, const char* key, double fallback) {
    if (!obj.contains(key)) return fallback;
    const Json& v = obj.at(key);
    if (!v.is_number()) config_fail(path + "." + key, "must be a number");
    return v.get<double>();
}

std::int64_t get_int(const Json& obj, const std::string& path, const char* key, std::int64_t fallback) {
    if (!obj.contains(key)) return fallback;
    const Json& v = obj.at(key);
    if (!v.is_number_integer()) config_fail(path + "." + key, "must be an integer");
    return v.get<std::int64_t>();
}

std::string get_string(const Json& obj, const std::string& path, const char* key,
                       const std::string& fallback) {
    if (!obj.contains(key)) return fallback;
    const Json& v = obj.at(key);
    if (!v.is_string()) config_fail(path + "." + key, "must be a string");
    return v.get<std::string>();
}

std::vector<double> get_double_list(const Json& obj, const std::string& path, const char* key,
                                    std::vector<double> fallback) {
    if (!obj.contains(key)) return fallback;
    const Json& v = obj.at(key);
    if (!v.is_array()) config_fail(path + "." + key, "must be an array of numbers");
    std::vector<double> out;
    for (const auto& e : v) {
        if (!e.is_number()) config_fail(path + "." + key, "must be an array of numbers");
        out.push_back(e.get<double>());
    }
    return out;
}

Vec to_vec(const std::vector<double>& v) {
    Vec out(static_cast<Eigen::Index>(v.size()));
    for (std::size_t i = 0; i < v.size(); ++i) out[static_cast<Eigen::Index>(i)] = v[i];
    return out;
}

std::vector<Vec> get_point_list(const Json& obj, const std::string& path, const char* key) {
    std::vector<Vec> out;
    if (!obj.contains(key)) return out;
    const Json& v = obj.at(key);
    if (!v.is_array()) config_fail(path + "." + key, "must be an array of points");
    for (const auto& e : v) {
        if (!e.is_array()) config_fail(path + "." + key, "each point must be an array of numbers");
        std::vector<double> coords;
        for (const auto& c : e) {
            if (!c.is_number()) config_fail(path + "." + key, "each point must be an array of numbers");
            coords.push_back(c.get<double>());
        }
        out.push_back(to_vec(coords));
    }
    return out;
}

Mat get_matrix(const Json& obj, const std::string& path, const char* key) {
    const Json& v = obj.at(key);
    if (!v.is_array() || v.empty()) config_fail(path + "." + key, "must be a non-empty matrix");
    const std::size_t rows = v.size();
    std::size_t cols = 0;
    Mat out;
    for (std::size_t i = 0; i < rows; ++i) {
        const Json& row = v.at(i);
        if (!row.is_array()) config_fail(path + "." + key, "must be a matrix (array of rows)");
        if (i == 0) {
            cols = row.size();
            out = Mat(rows, cols);
        } else if (row.size() != cols) {
            config_fail(path + "." + key, "rows have inconsistent lengths");
        }
        for (std::size_t j = 0; j < cols; ++j) {
            if (!row.at(j).is_number()) config_fail(path + "." + key, "matrix entries must be numbers");
            out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = row.at(j).get<double>();
        }
    }
    return out;
}

LoadedModel parse_model(const Json& section, Json& effective) {
    check_keys(section, "model", {"name", "params"});
    LoadedModel loaded;
    loaded.name = get_string(section, "model", "name", "");
    if (loaded.name.empty()) config_fail("model.name", "required");
    const Json params = section.contains("params") ? section.at("params") : Json::object();
    const std::string ppath = "model.params";

    Json eff_params = Json::object();
    if (loaded.name == "ou") {
        check_keys(params, ppath, {"dim"});
        zoo::OuParams p;
        p.dim = static_cast<int>(get_int(params, ppath, "dim", 1));
        loaded.selection = p;
        eff_params["dim"] = p.dim;
    } else if (loaded.name == "limit_cycle") {
        check_keys(params, ppath, {});
        loaded.selection = zoo::LimitCycleParams{};
    } else if (loaded.name == "lemniscate") {
        check_keys(params, ppath, {});
        loaded.selection = zoo::LemniscateParams{};
    } else if (loaded.name == "logistic") {
        check_keys(params, ppath, {});
        loaded.selection = zoo::LogisticParams{};
    } else if (loaded.name == "may_leonard") {
        check_keys(params, ppath, {"beta", "gamma"});
        zoo::MayLeonardParams p;
        p.beta = get_double(params, ppath, "beta", p.beta);
        p.gamma = get_double(params, ppath, "gamma", p.gamma);
        loaded.selection = p;
        eff_params["beta"] = p.beta;
        eff_params["gamma"] = p.gamma;
    } else if (loaded.name == "goodwin") {
        check_keys(params, ppath, {"decay", "gain", "delta"});
        zoo::GoodwinParams p;
        p.decay = get_double_list(params, ppath, "decay", {1.0, 1.0, 1.0});
        p.gain = get_double_list(params, ppath, "gain", std::vector<double>(p.decay.size(), 2.0));
        p.delta = static_cast<int>(get_int(params, ppath, "delta", -1));
        loaded.selection = p;
        eff_params["decay"] = p.decay;
        eff_params["gain"] = p.gain;
        eff_params["delta"] = p.delta;
    } else if (loaded.name == "chafee_infante") {
        check_keys(params, ppath, {"lambda", "n_grid"});
        zoo::ChafeeInfanteParams p;
        p.lambda = get_double(params, ppath, "lambda", p.lambda);
        p.n_grid = static_cast<int>(get_int(params, ppath, "n_grid", p.n_grid));
        loaded.selection = p;
        eff_params["lambda"] = p.lambda;
        eff_params["n_grid"] = p.n_grid;
    } else if (loaded.name == "hopfield") {
        check_keys(params, ppath, {"decay", "coupling", "tau", "g_scale", "g_shift"});
        zoo::HopfieldParams p = zoo::HopfieldParams::defaults();
        if (params.contains("decay")) p.decay_diag = to_vec(get_double_list(params, ppath, "decay", {}));
        if (params.contains("coupling")) p.coupling = get_matrix(params, ppath, "coupling");
        p.tau = get_double(params, ppath, "tau", p.tau);
        p.g_scale = get_double(params, ppath, "g_scale", p.g_scale);
        p.g_shift = get_double(params, ppath, "g_shift", p.g_shift);
        loaded.selection = p;
        eff_params["decay"] = std::vector<double>(p.decay_diag.data(), p.decay_diag.data() + p.decay_diag.size());
        Json coupling = Json::array();
        for (Eigen::Index i = 0; i < p.coupling.rows(); ++i) {
            Json row = Json::array();
            for (Eigen::Index j = 0; j < p.coupling.cols(); ++j) row.push_back(p.coupling(i, j));
            coupling.push_back(row);
        }
        eff_params["coupling"] = coupling;
        eff_params["tau"] = p.tau;
        eff_params["g_scale"] = p.g_scale;
        eff_params["g_shift"] = p.g_shift;
    } else if (loaded.name == "custom") {
        check_keys(params, ppath, {"dim", "brownian_dim", "drift", "sigma"});
        const int dim = static_cast<int>(get_int(params, ppath, "dim", 0));
        if (dim < 1) config_fail(ppath + ".dim", "required and must be >= 1");
        if (!params.contains("drift")) config_fail(ppath + ".drift", "required");
        const Json& drift = params.at("drift");
        if (!drift.is_array() || static_cast<int>(drift.size()) != dim)
            config_fail(ppath + ".drift", "must list one expression per dimension");
        std::vector<FieldExpr> drift_exprs;
        for (int i = 0; i < dim; ++i) {
            if (!drift.at(i).is_string()) config_fail(ppath + ".drift", "entries must be strings");
            drift_exprs.push_back(FieldExpr::parse(drift.at(i).get<std::string>(), dim));
        }

        int k = static_cast<int>(get_int(params, ppath, "brownian_dim", dim));
        std::vector<std::vector<FieldExpr>> sigma_exprs;
        if (params.contains("sigma")) {
            const Json& sigma = params.at("sigma");
            if (!sigma.is_array() || static_cast<int>(sigma.size()) != dim)
                config_fail(ppath + ".sigma", "must have one row per dimension");
            for (int i = 0; i < dim; ++i) {
                const Json& row = sigma.at(i);
                if (!row.is_array()) config_fail(ppath + ".sigma", "rows must be arrays");
                if (i == 0)
                    k = static_cast<int>(row.size());
                else if (static_cast<int>(row.size()) != k)
                    config_fail(ppath + ".sigma", "rows have inconsistent lengths");
                std::vector<FieldExpr> row_exprs;
                for (int j = 0; j < k; ++j) {
                    if (!row.at(j).is_string()) config_fail(ppath + ".sigma", "entries must be strings");
                    row_exprs.push_back(FieldExpr::parse(row.at(j).get<std::string>(), dim));
                }
                sigma_exprs.push_back(std::move(row_exprs));
            }
        }

        ModelSpec model;
        model.dim = dim;
        model.brownian_dim = k;
        model.label = "custom";
        model.drift = [drift_exprs, dim](const Vec& x) {
            Vec b(dim);
            for (int i = 0; i < dim; ++i) b[i] = drift_exprs[static_cast<std::size_t>(i)].eval(x);
            return b;
        };
        if (sigma_exprs.empty()) {
            model.diffusion = [dim, k](const Vec&) { return Mat(Mat::Identity(dim, k)); };
        } else {
            model.diffusion = [sigma_exprs, dim, k](const Vec& x) {
                Mat s(dim, k);
                for (int i = 0; i < dim; ++i)
                    for (int j = 0; j < k; ++j)
                        s(i, j) = sigma_exprs[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)].eval(x);
                return s;
            };
        }
        loaded.ode = std::move(model);
        loaded.default_x0 = Vec::Ones(dim);
        eff_params = params;
    } else {
        config_fail("model.name", "unknown model '" + loaded.name + "'");
    }

    if (loaded.selection) {
        zoo::BuiltModel built = zoo::build(*loaded.selection);
        loaded.ode = std::move(built.ode);
        loaded.delay = std::move(built.delay);
        loaded.default_x0 = built.default_x0;
    }
    effective["model"] = Json{{"name", loaded.name}, {"params", eff_params}};
    return loaded;
}

}  // namespace

ExperimentConfig parse_config(const Json& raw) {
    check_keys(raw, "config",
               {"model", "noise", "sim", "measure", "candidates", "lyapunov", "converge", "grad",
                "decompose", "hopfield_check", "output"});
    if (!raw.contains("model")) config_fail("model", "required section");

    ExperimentConfig cfg;
    cfg.effective = Json::object();
    cfg.model = parse_model(raw.at("model"), cfg.effective);
    const int dim = cfg.model.ode ? cfg.model.ode->dim
                                  : (cfg.model.delay ? cfg.model.delay->dim() : 0);

    const Json noise = raw.contains("noise") ? raw.at("noise") : Json::object();
    check_keys(noise, "noise", {"epsilon", "epsilons"});
    cfg.epsilon = get_double(noise, "noise", "epsilon", 0.1);
    if (cfg.epsilon < 0.0) config_fail("noise.epsilon", "must be nonnegative");
    cfg.epsilons = get_double_list(noise, "noise", "epsilons", {});
    for (std::size_t i = 1; i < cfg.epsilons.size(); ++i)
        if (!(cfg.epsilons[i] < cfg.epsilons[i - 1]))
            config_fail("noise.epsilons", "must be strictly decreasing");
    cfg.effective["noise"] = Json{{"epsilon", cfg.epsilon}, {"epsilons", cfg.epsilons}};

    const Json sim = raw.contains("sim") ? raw.at("sim") : Json::object();
    check_keys(sim, "sim", {"dt", "t_final", "burn_in", "n_paths", "master_seed", "x0", "x0_set"});
    cfg.dt = get_double(sim, "sim", "dt", cfg.dt);
    if (!(cfg.dt > 0.0)) config_fail("sim.dt", "must be positive");
    cfg.t_final = get_double(sim, "sim", "t_final", cfg.t_final);
    if (!(cfg.t_final >= cfg.dt)) config_fail("sim.t_final", "must be at least sim.dt");
    cfg.burn_in = get_double(sim, "sim", "burn_in", cfg.burn_in);
    if (cfg.burn_in < 0.0 || cfg.burn_in >= cfg.t_final)
        config_fail("sim.burn_in", "must lie in [0, t_final)");
    const std::int64_t n_paths = get_int(sim, "sim", "n_paths", static_cast<std::int64_t>(cfg.n_paths));
    if (n_paths < 1) config_fail("sim.n_paths", "must be >= 1");
    cfg.n_paths = static_cast<std::size_t>(n_paths);
    cfg.master_seed = static_cast<std::uint64_t>(get_int(sim, "sim", "master_seed", 1));
    std::vector<double> x0 = get_double_list(sim, "sim", "x0", {});
    if (x0.empty()) {
        cfg.x0 = cfg.model.default_x0;
    } else {
        if (static_cast<int>(x0.size()) != dim) config_fail("sim.x0", "length must match the model dimension");
        cfg.x0 = to_vec(x0);
    }
    cfg.x0_set = get_point_list(sim, "sim", "x0_set");
    for (const Vec& p : cfg.x0_set)
        if (p.size() != dim) config_fail("sim.x0_set", "point length must match the model dimension");
    {
        Json eff = Json{{"dt", cfg.dt},           {"t_final", cfg.t_final},
                        {"burn_in", cfg.burn_in}, {"n_paths", cfg.n_paths},
                        {"master_seed", cfg.master_seed},
                        {"x0", std::vector<double>(cfg.x0.data(), cfg.x0.data() + cfg.x0.size())}};
        Json set = Json::array();
        for (const Vec& p : cfg.x0_set)
            set.push_back(std::vector<double>(p.data(), p.data() + p.size()));
        eff["x0_set"] = set;
        cfg.effective["sim"] = eff;
    }

    const Json measure = raw.contains("measure") ? raw.at("measure") : Json::object();
    check_keys(measure, "measure", {"bins", "reservoir", "box", "use_grid"});
    cfg.bins = static_cast<int>(get_int(measure, "measure", "bins", cfg.bins));
    if (cfg.bins < 1) config_fail("measure.bins", "must be >= 1");
    const std::int64_t reservoir = get_int(measure, "measure", "reservoir",
                                           static_cast<std::int64_t>(cfg.reservoir));
    if (reservoir < 1) config_fail("measure.reservoir", "must be >= 1");
    cfg.reservoir = static_cast<std::size_t>(reservoir);
    cfg.use_grid = dim <= 3;
    if (measure.contains("use_grid")) {
        if (!measure.at("use_grid").is_boolean()) config_fail("measure.use_grid", "must be a boolean");
        cfg.use_grid = measure.at("use_grid").get<bool>();
    }
    if (measure.contains("box")) {
        const Json& box = measure.at("box");
        check_keys(box, "measure.box", {"lo", "hi"});
        Vec lo = to_vec(get_double_list(box, "measure.box", "lo", {}));
        Vec hi = to_vec(get_double_list(box, "measure.box", "hi", {}));
        if (lo.size() != dim || hi.size() != dim)
            config_fail("measure.box", "lo/hi lengths must match the model dimension");
        cfg.box = std::make_pair(lo, hi);
    }
    {
        Json eff = Json{{"bins", cfg.bins}, {"reservoir", cfg.reservoir}, {"use_grid", cfg.use_grid}};
        if (cfg.box) {
            eff["box"] = Json{
                {"lo", std::vector<double>(cfg.box->first.data(), cfg.box->first.data() + dim)},
                {"hi", std::vector<double>(cfg.box->second.data(), cfg.box->second.data() + dim)}};
        }
        cfg.effective["measure"] = eff;
    }

    const Json cand = raw.contains("candidates") ? raw.at("candidates") : Json::object();
    check_keys(cand, "candidates", {"auto", "points", "delta", "scale", "radii"});
    if (cand.contains("auto")) {
        if (!cand.at("auto").is_boolean()) config_fail("candidates.auto", "must be a boolean");
        cfg.candidates_auto = cand.at("auto").get<bool>();
    }
    cfg.candidate_points = get_point_list(cand, "candidates", "points");
    for (const Vec& p : cfg.candidate_points)
        if (p.size() != dim) config_fail("candidates.points", "point length must match the model dimension");
    if (!cfg.candidate_points.empty()) cfg.candidates_auto = false;
    cfg.delta = get_double(cand, "candidates", "delta", cfg.delta);
    if (!(cfg.delta > 0.0)) config_fail("candidates.delta", "must be positive");
    cfg.support_scale = get_double(cand, "candidates", "scale", cfg.support_scale);
    cfg.radii = get_double_list(cand, "candidates", "radii", cfg.radii);
    {
        Json eff = Json{{"auto", cfg.candidates_auto},
                        {"delta", cfg.delta},
                        {"scale", cfg.support_scale},
                        {"radii", cfg.radii}};
        Json pts = Json::array();
        for (const Vec& p : cfg.candidate_points)
            pts.push_back(std::vector<double>(p.data(), p.data() + p.size()));
        eff["points"] = pts;
        cfg.effective["candidates"] = eff;
    }

    const Json lyap = raw.contains("lyapunov") ? raw.at("lyapunov") : Json::object();
    check_keys(lyap, "lyapunov", {"v", "radii", "samples", "q"});
    cfg.lyapunov_v = get_string(lyap, "lyapunov", "v", "");
    cfg.lyapunov_radii = get_double_list(lyap, "lyapunov", "radii", cfg.lyapunov_radii);
    cfg.lyapunov_samples = static_cast<int>(get_int(lyap, "lyapunov", "samples", cfg.lyapunov_samples));
    cfg.growth_q = get_double(lyap, "lyapunov", "q", cfg.growth_q);
    cfg.effective["lyapunov"] = Json{{"v", cfg.lyapunov_v},
                                     {"radii", cfg.lyapunov_radii},
                                     {"samples", cfg.lyapunov_samples},
                                     {"q", cfg.growth_q}};

    const Json conv = raw.contains("converge") ? raw.at("converge") : Json::object();
    check_keys(conv, "converge", {"delta"});
    cfg.converge_delta = get_double(conv, "converge", "delta", cfg.converge_delta);
    if (!(cfg.converge_delta > 0.0)) config_fail("converge.delta", "must be positive");
    cfg.effective["converge"] = Json{{"delta", cfg.converge_delta}};

    const Json grad = raw.contains("grad") ? raw.at("grad") : Json::object();
    check_keys(grad, "grad", {"phi", "t", "h", "delta"});
    cfg.grad_phi = get_string(grad, "grad", "phi", cfg.grad_phi);
    cfg.grad_t = get_double(grad, "grad", "t", cfg.grad_t);
    if (!(cfg.grad_t > 0.0)) config_fail("grad.t", "must be positive");
    std::vector<double> h = get_double_list(grad, "grad", "h", {});
    if (h.empty()) {
        cfg.grad_h = Vec::Zero(std::max(dim, 1));
        cfg.grad_h[0] = 1.0;
    } else {
        if (static_cast<int>(h.size()) != dim) config_fail("grad.h", "length must match the model dimension");
        cfg.grad_h = to_vec(h);
    }
    cfg.grad_delta = get_double(grad, "grad", "delta", cfg.grad_delta);
    if (!(cfg.grad_delta > 0.0)) config_fail("grad.delta", "must be positive");
    cfg.effective["grad"] = Json{
        {"phi", cfg.grad_phi},
        {"t", cfg.grad_t},
        {"h", std::vector<double>(cfg.grad_h.data(), cfg.grad_h.data() + cfg.grad_h.size())},
        {"delta", cfg.grad_delta}};

    const Json dec = raw.contains("decompose") ? raw.at("decompose") : Json::object();
    check_keys(dec, "decompose", {"g0", "seeds", "tolerance", "min_ratio"});
    cfg.decompose_g0 = get_double(dec, "decompose", "g0", cfg.decompose_g0);
    if (!(cfg.decompose_g0 > 0.0)) config_fail("decompose.g0", "must be positive");
    cfg.decompose_seeds = static_cast<int>(get_int(dec, "decompose", "seeds", cfg.decompose_seeds));
    if (cfg.decompose_seeds < 1) config_fail("decompose.seeds", "must be >= 1");
    cfg.decompose_tolerance = get_double(dec, "decompose", "tolerance", cfg.decompose_tolerance);
    cfg.decompose_min_ratio = get_double(dec, "decompose", "min_ratio", cfg.decompose_min_ratio);
    cfg.effective["decompose"] = Json{{"g0", cfg.decompose_g0},
                                      {"seeds", cfg.decompose_seeds},
                                      {"tolerance", cfg.decompose_tolerance},
                                      {"min_ratio", cfg.decompose_min_ratio}};

    const Json hop = raw.contains("hopfield_check") ? raw.at("hopfield_check") : Json::object();
    check_keys(hop, "hopfield_check", {"kappa"});
    cfg.hopfield_kappa = get_double(hop, "hopfield_check", "kappa", cfg.hopfield_kappa);
    cfg.effective["hopfield_check"] = Json{{"kappa", cfg.hopfield_kappa}};

    const Json output = raw.contains("output") ? raw.at("output") : Json::object();
    check_keys(output, "output", {"directory", "formats"});
    cfg.out_dir = get_string(output, "output", "directory", cfg.out_dir);
    std::vector<std::string> formats = {"csv"};
    if (output.contains("formats")) {
        if (!output.at("formats").is_array()) config_fail("output.formats", "must be an array");
        formats.clear();
        for (const auto& f : output.at("formats")) {
            if (!f.is_string() || f.get<std::string>() != "csv")
                config_fail("output.formats", "only 'csv' is supported");
            formats.push_back(f.get<std::string>());
        }
    }
    cfg.effective["output"] = Json{{"directory", cfg.out_dir}, {"formats", formats}};

    return cfg;
}

void apply_override(Json& config, const std::string& assignment) {
    const std::size_t eq = assignment.find('=');
    if (eq == std::string::npos || eq == 0)
        fail(Errc::ConfigError, "override '" + assignment + "' must look like dotted.path=value");
    const std::string path = assignment.substr(0, eq);
    const std::string value = assignment.substr(eq + 1);

    Json* node = &config;
    std::size_t start = 0;
    for (;;) {
        const std::size_t dot = path.find('.', start);
        const std::string key = path.substr(start, dot == std::string::npos ? dot : dot - start);
        if (key.empty()) fail(Errc::ConfigError, "override path '" + path + "' has an empty segment");
        if (dot == std::string::npos) {
            Json parsed = Json::parse(value, nullptr, false);
            (*node)[key] = parsed.is_discarded() ? Json(value) : parsed;
            return;
        }
        node = &(*node)[key];
        if (!node->is_object() && !node->is_null()) fail(Errc::ConfigError, "override path '" + path + "' crosses a non-object");
        start = dot + 1;
    }
}

Json load_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail(Errc::ConfigError, "cannot open config file '" + path + "'");
    Json parsed = Json::parse(in, nullptr, false);
    if (parsed.is_discarded()) fail(Errc::ConfigError, "config file '" + path + "' is not valid JSON");
    return parsed;
}

}  // namespace znl::cli
