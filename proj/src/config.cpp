#include "gso/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

namespace gso {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& msg) { throw ConfigError("config: " + msg); }

void require_keys(const json& obj, const std::string& prefix,
                  const std::set<std::string>& known) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        if (!known.count(it.key()))
            fail("unknown key \"" + (prefix.empty() ? it.key() : prefix + "." + it.key()) + "\"");
    }
}

double get_num(const json& obj, const std::string& path, const std::string& key, double fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number()) fail("\"" + path + key + "\" must be a number");
    return v.get<double>();
}

int get_int(const json& obj, const std::string& path, const std::string& key, int fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_number_integer()) fail("\"" + path + key + "\" must be an integer");
    return v.get<int>();
}

bool get_bool(const json& obj, const std::string& path, const std::string& key, bool fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_boolean()) fail("\"" + path + key + "\" must be a boolean");
    return v.get<bool>();
}

std::string get_str(const json& obj, const std::string& path, const std::string& key,
                    const std::string& fallback) {
    if (!obj.contains(key)) return fallback;
    const json& v = obj.at(key);
    if (!v.is_string()) fail("\"" + path + key + "\" must be a string");
    return v.get<std::string>();
}

Eigen::VectorXd get_vec(const json& obj, const std::string& path, const std::string& key) {
    if (!obj.contains(key)) return Eigen::VectorXd();
    const json& v = obj.at(key);
    if (!v.is_array()) fail("\"" + path + key + "\" must be an array of numbers");
    Eigen::VectorXd out(v.size());
    for (size_t i = 0; i < v.size(); ++i) {
        if (!v[i].is_number()) fail("\"" + path + key + "\" must be an array of numbers");
        out[static_cast<Eigen::Index>(i)] = v[i].get<double>();
    }
    return out;
}

KernelSpec parse_kernel(const json& obj, const std::string& path) {
    if (!obj.is_object()) fail("\"" + path + "\" must be an object");
    require_keys(obj, path, {"family", "lengthscales", "output_scale"});
    KernelSpec spec;
    std::string family = get_str(obj, path + ".", "family", "se");
    if (family == "se")
        spec.family = KernelFamily::SquaredExponential;
    else if (family == "matern32")
        spec.family = KernelFamily::Matern32;
    else
        fail("\"" + path + ".family\" must be \"se\" or \"matern32\"");
    spec.lengthscales = get_vec(obj, path + ".", "lengthscales");
    if (spec.lengthscales.size() == 0) fail("\"" + path + ".lengthscales\" is required");
    if (spec.lengthscales.minCoeff() <= 0.0)
        fail("\"" + path + ".lengthscales\" must be positive");
    spec.output_scale = get_num(obj, path + ".", "output_scale", 1.0);
    if (spec.output_scale <= 0.0) fail("\"" + path + ".output_scale\" must be positive");
    return spec;
}

struct EnvDefaults {
    double lipschitz_a, lipschitz_x;
    Eigen::VectorXd noise_std;
    std::vector<KernelSpec> kernels;
    Eigen::VectorXd state_lengthscales;
    std::vector<Eigen::VectorXd> safe_seed_coords;
};

EnvDefaults toy_defaults() {
    EnvDefaults d;
    d.lipschitz_a = 1.0;
    d.lipschitz_x = 0.62;
    d.noise_std = Eigen::Vector2d(0.04, 0.04);
    KernelSpec k;
    k.family = KernelFamily::SquaredExponential;
    k.lengthscales = Eigen::VectorXd::Constant(1, 0.5);
    k.output_scale = 1.0;
    d.kernels = {k, k};
    d.state_lengthscales = Eigen::VectorXd::Constant(1, 0.2);
    d.safe_seed_coords = {Eigen::VectorXd::Constant(1, 2.0)};
    return d;
}

EnvDefaults plant_defaults(int state_dim) {
    EnvDefaults d;
    d.lipschitz_a = 9.0;
    d.lipschitz_x = 1.0;
    d.noise_std = Eigen::Vector2d(0.01, 0.05);
    KernelSpec k;
    k.family = KernelFamily::SquaredExponential;
    k.lengthscales = Eigen::VectorXd::Constant(2, 0.1);
    k.output_scale = 1.0;
    d.kernels = {k, k};
    d.state_lengthscales = Eigen::VectorXd::Constant(state_dim, 0.5);
    d.safe_seed_coords = {Eigen::Vector2d(0.05, 0.5)};
    return d;
}

}  // namespace

RunConfig parse_config(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        fail(std::string("parse error: ") + e.what());
    }
    if (!root.is_object()) fail("top level must be a single object");

    require_keys(root, "",
                 {"env",        "grid",          "algorithm",     "kernels",
                  "noise_std",  "beta_sqrt",     "lipschitz_a",   "lipschitz_x",
                  "jump_bound", "noise_margin",  "epsilon",       "n_lse",
                  "n_ge",       "lse_reduction", "lse_min",       "boundary_mode",
                  "eta_l",      "eta_u",         "kappa_l",       "kappa_u",
                  "state_lengthscales",          "n_max",         "m",
                  "subset_selection",            "harvest_stride", "budget",
                  "seeds",      "safe_seed_coords",               "out_dir",
                  "normalize_objective",         "oracle_repeats"});

    RunConfig cfg;

    if (!root.contains("env")) fail("missing key \"env\"");
    const json& env = root.at("env");
    if (!env.is_object()) fail("\"env\" must be an object");
    const std::set<std::string> plant_only = {
        "dim",  "dt",   "zeta",  "control_period", "kp_center", "kp_edge", "kd_peak",
        "neg_stiffness", "anti_damping", "coupling", "anchor_stiffness",
        "anchor_damping", "load", "u_max", "x0_pos", "sense_cap"};
    std::set<std::string> env_keys = {"name", "horizon", "process_noise", "process_noise_std",
                                      "probe_seed"};
    env_keys.insert(plant_only.begin(), plant_only.end());
    require_keys(env, "env", env_keys);
    cfg.env_name = get_str(env, "env.", "name", "");
    if (cfg.env_name == "toy1d") {
        cfg.toy.horizon = get_int(env, "env.", "horizon", cfg.toy.horizon);
        cfg.toy.process_noise = get_bool(env, "env.", "process_noise", cfg.toy.process_noise);
        cfg.toy.noise_std = get_num(env, "env.", "process_noise_std", cfg.toy.noise_std);
        cfg.toy.seed = static_cast<uint64_t>(get_int(env, "env.", "probe_seed", 0));
        for (const std::string& k : plant_only)
            if (env.contains(k)) fail("\"env." + k + "\" does not apply to toy1d");
        if (cfg.toy.horizon < 1) fail("\"env.horizon\" must be >= 1");
        if (cfg.toy.noise_std < 0.0) fail("\"env.process_noise_std\" must be >= 0");
    } else if (cfg.env_name == "linear_plant") {
        cfg.plant.dim = get_int(env, "env.", "dim", cfg.plant.dim);
        cfg.plant.horizon = get_int(env, "env.", "horizon", cfg.plant.horizon);
        cfg.plant.dt = get_num(env, "env.", "dt", cfg.plant.dt);
        cfg.plant.control_period = get_int(env, "env.", "control_period", cfg.plant.control_period);
        cfg.plant.zeta = get_num(env, "env.", "zeta", cfg.plant.zeta);
        cfg.plant.kp_center = get_num(env, "env.", "kp_center", cfg.plant.kp_center);
        cfg.plant.kp_edge = get_num(env, "env.", "kp_edge", cfg.plant.kp_edge);
        cfg.plant.kd_peak = get_num(env, "env.", "kd_peak", cfg.plant.kd_peak);
        cfg.plant.neg_stiffness = get_num(env, "env.", "neg_stiffness", cfg.plant.neg_stiffness);
        cfg.plant.anti_damping = get_num(env, "env.", "anti_damping", cfg.plant.anti_damping);
        cfg.plant.coupling = get_num(env, "env.", "coupling", cfg.plant.coupling);
        cfg.plant.anchor_stiffness =
            get_num(env, "env.", "anchor_stiffness", cfg.plant.anchor_stiffness);
        cfg.plant.anchor_damping =
            get_num(env, "env.", "anchor_damping", cfg.plant.anchor_damping);
        cfg.plant.load = get_num(env, "env.", "load", cfg.plant.load);
        cfg.plant.u_max = get_num(env, "env.", "u_max", cfg.plant.u_max);
        cfg.plant.x0_pos = get_num(env, "env.", "x0_pos", cfg.plant.x0_pos);
        cfg.plant.sense_cap = get_num(env, "env.", "sense_cap", cfg.plant.sense_cap);
        cfg.plant.process_noise = get_bool(env, "env.", "process_noise", cfg.plant.process_noise);
        cfg.plant.noise_std = get_num(env, "env.", "process_noise_std", cfg.plant.noise_std);
        cfg.plant.seed = static_cast<uint64_t>(get_int(env, "env.", "probe_seed", 0));
        if (cfg.plant.dim != 2 && cfg.plant.dim != 4 && cfg.plant.dim != 6)
            fail("\"env.dim\" must be 2, 4, or 6");
        if (cfg.plant.horizon < 1) fail("\"env.horizon\" must be >= 1");
        if (cfg.plant.dt <= 0.0) fail("\"env.dt\" must be positive");
        if (cfg.plant.control_period < 1) fail("\"env.control_period\" must be >= 1");
        if (cfg.plant.zeta <= 0.0) fail("\"env.zeta\" must be positive");
        if (cfg.plant.kp_center <= 0.0) fail("\"env.kp_center\" must be positive");
        if (cfg.plant.kp_edge <= 0.0) fail("\"env.kp_edge\" must be positive");
        if (cfg.plant.kp_edge > cfg.plant.kp_center)
            fail("\"env.kp_edge\" must not exceed \"env.kp_center\"");
        if (cfg.plant.kd_peak <= 0.0) fail("\"env.kd_peak\" must be positive");
        if (cfg.plant.u_max <= 0.0) fail("\"env.u_max\" must be positive");
        if (cfg.plant.sense_cap <= 0.0) fail("\"env.sense_cap\" must be positive");
        if (cfg.plant.noise_std < 0.0) fail("\"env.process_noise_std\" must be >= 0");
    } else {
        fail("\"env.name\" must be \"toy1d\" or \"linear_plant\"");
    }

    if (root.contains("grid")) {
        const json& grid = root.at("grid");
        if (!grid.is_object()) fail("\"grid\" must be an object");
        require_keys(grid, "grid", {"lo", "hi", "counts"});
        cfg.grid_lo = get_vec(grid, "grid.", "lo");
        cfg.grid_hi = get_vec(grid, "grid.", "hi");
        if (grid.contains("counts")) {
            const json& c = grid.at("counts");
            if (!c.is_array()) fail("\"grid.counts\" must be an array of integers");
            for (const auto& v : c) {
                if (!v.is_number_integer()) fail("\"grid.counts\" must be an array of integers");
                cfg.grid_counts.push_back(v.get<int>());
            }
        }
        if (cfg.grid_lo.size() == 0 || cfg.grid_lo.size() != cfg.grid_hi.size() ||
            static_cast<size_t>(cfg.grid_lo.size()) != cfg.grid_counts.size())
            fail("\"grid\" needs lo, hi, counts of equal nonzero length");
        for (int c : cfg.grid_counts)
            if (c < 2) fail("\"grid.counts\" entries must be >= 2");
        for (Eigen::Index i = 0; i < cfg.grid_lo.size(); ++i)
            if (!(cfg.grid_lo[i] < cfg.grid_hi[i])) fail("\"grid.lo\" must be elementwise < \"grid.hi\"");
    }

    cfg.algorithm = get_str(root, "", "algorithm", cfg.algorithm);
    if (cfg.algorithm != "gosafeopt" && cfg.algorithm != "safeopt")
        fail("\"algorithm\" must be \"gosafeopt\" or \"safeopt\"");

    if (root.contains("kernels")) {
        const json& ks = root.at("kernels");
        if (!ks.is_array() || ks.empty()) fail("\"kernels\" must be a nonempty array");
        for (size_t i = 0; i < ks.size(); ++i)
            cfg.kernels.push_back(parse_kernel(ks[i], "kernels[" + std::to_string(i) + "]"));
    }
    cfg.noise_std = get_vec(root, "", "noise_std");
    if (root.contains("noise_std") && cfg.noise_std.minCoeff() < 0.0)
        fail("\"noise_std\" entries must be >= 0");

    cfg.beta_sqrt = get_num(root, "", "beta_sqrt", cfg.beta_sqrt);
    if (cfg.beta_sqrt <= 0.0) fail("\"beta_sqrt\" must be positive");
    cfg.lipschitz_a = get_num(root, "", "lipschitz_a", cfg.lipschitz_a);
    cfg.lipschitz_x = get_num(root, "", "lipschitz_x", cfg.lipschitz_x);
    if (root.contains("lipschitz_a") && cfg.lipschitz_a <= 0.0) fail("\"lipschitz_a\" must be positive");
    if (root.contains("lipschitz_x") && cfg.lipschitz_x <= 0.0) fail("\"lipschitz_x\" must be positive");
    cfg.jump_bound = get_num(root, "", "jump_bound", cfg.jump_bound);
    cfg.noise_margin = get_num(root, "", "noise_margin", cfg.noise_margin);
    if (cfg.noise_margin < 0.0) fail("\"noise_margin\" must be >= 0");
    cfg.epsilon = get_num(root, "", "epsilon", cfg.epsilon);
    if (cfg.epsilon <= 0.0) fail("\"epsilon\" must be positive");

    cfg.stages.n_lse = get_int(root, "", "n_lse", cfg.stages.n_lse);
    cfg.stages.n_ge = get_int(root, "", "n_ge", cfg.stages.n_ge);
    cfg.stages.lse_reduction = get_num(root, "", "lse_reduction", cfg.stages.lse_reduction);
    cfg.stages.lse_min = get_int(root, "", "lse_min", cfg.stages.lse_min);
    if (cfg.stages.n_lse < 1) fail("\"n_lse\" must be >= 1");
    if (cfg.stages.n_ge < 1) fail("\"n_ge\" must be >= 1");
    if (!(cfg.stages.lse_reduction > 0.0 && cfg.stages.lse_reduction <= 1.0))
        fail("\"lse_reduction\" must be in (0, 1]");
    if (cfg.stages.lse_min < 1) fail("\"lse_min\" must be >= 1");

    cfg.boundary_mode = get_str(root, "", "boundary_mode", cfg.boundary_mode);
    if (cfg.boundary_mode != "exact" && cfg.boundary_mode != "tiered")
        fail("\"boundary_mode\" must be \"exact\" or \"tiered\"");
    cfg.eta_l = get_num(root, "", "eta_l", cfg.eta_l);
    cfg.eta_u = get_num(root, "", "eta_u", cfg.eta_u);
    if (!(cfg.eta_l < cfg.eta_u)) fail("\"eta_l\" must be < \"eta_u\"");
    cfg.kappa_l = get_num(root, "", "kappa_l", cfg.kappa_l);
    cfg.kappa_u = get_num(root, "", "kappa_u", cfg.kappa_u);
    if (!(cfg.kappa_l > 0.0 && cfg.kappa_l < cfg.kappa_u && cfg.kappa_u < 1.0))
        fail("\"kappa_l\"/\"kappa_u\" must satisfy 0 < kappa_l < kappa_u < 1");
    cfg.state_lengthscales = get_vec(root, "", "state_lengthscales");
    if (root.contains("state_lengthscales") && cfg.state_lengthscales.minCoeff() <= 0.0)
        fail("\"state_lengthscales\" must be positive");

    cfg.n_max = get_int(root, "", "n_max", cfg.n_max);
    cfg.m = get_int(root, "", "m", cfg.m);
    if (cfg.n_max < 1) fail("\"n_max\" must be >= 1");
    if (cfg.m < 1 || cfg.m > cfg.n_max) fail("\"m\" must be in [1, n_max]");
    cfg.subset_selection = get_bool(root, "", "subset_selection", cfg.subset_selection);
    cfg.harvest_stride = get_int(root, "", "harvest_stride", cfg.harvest_stride);

    cfg.budget = get_int(root, "", "budget", cfg.budget);
    if (cfg.budget < 1) fail("\"budget\" must be >= 1");

    if (root.contains("seeds")) {
        const json& s = root.at("seeds");
        if (!s.is_array()) fail("\"seeds\" must be an array of integers");
        for (const auto& v : s) {
            if (!v.is_number_integer() || v.get<int64_t>() < 0)
                fail("\"seeds\" must be nonnegative integers");
            cfg.seeds.push_back(v.get<uint64_t>());
        }
    }
    if (cfg.seeds.empty()) cfg.seeds = {0};

    if (root.contains("safe_seed_coords")) {
        const json& s = root.at("safe_seed_coords");
        if (!s.is_array() || s.empty()) fail("\"safe_seed_coords\" must be a nonempty array");
        for (size_t i = 0; i < s.size(); ++i) {
            const json& row = s[i];
            if (!row.is_array() || row.empty())
                fail("\"safe_seed_coords[" + std::to_string(i) + "]\" must be a coordinate array");
            Eigen::VectorXd c(row.size());
            for (size_t j = 0; j < row.size(); ++j) {
                if (!row[j].is_number())
                    fail("\"safe_seed_coords[" + std::to_string(i) + "]\" must be numbers");
                c[static_cast<Eigen::Index>(j)] = row[j].get<double>();
            }
            cfg.safe_seed_coords.push_back(std::move(c));
        }
    }

    cfg.out_dir = get_str(root, "", "out_dir", cfg.out_dir);
    cfg.normalize_objective = get_bool(root, "", "normalize_objective", cfg.normalize_objective);
    cfg.oracle_repeats = get_int(root, "", "oracle_repeats", cfg.oracle_repeats);

    // Fill remaining holes from the environment defaults.
    EnvDefaults d = cfg.env_name == "toy1d" ? toy_defaults() : plant_defaults(cfg.plant.dim);
    if (cfg.lipschitz_a < 0.0) cfg.lipschitz_a = d.lipschitz_a;
    if (cfg.lipschitz_x < 0.0) cfg.lipschitz_x = d.lipschitz_x;
    if (cfg.noise_std.size() == 0) cfg.noise_std = d.noise_std;
    if (cfg.kernels.empty()) cfg.kernels = d.kernels;
    if (cfg.state_lengthscales.size() == 0) cfg.state_lengthscales = d.state_lengthscales;
    if (cfg.safe_seed_coords.empty()) cfg.safe_seed_coords = d.safe_seed_coords;

    if (cfg.kernels.size() != static_cast<size_t>(cfg.noise_std.size()))
        fail("\"kernels\" and \"noise_std\" must have the same length");
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) fail("cannot open \"" + path + "\"");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::unique_ptr<Env> make_env(const RunConfig& config) {
    if (config.env_name == "toy1d") return toy1d_make(config.toy);
    return linear_plant_make(config.plant);
}

ParamGrid make_grid(const RunConfig& config) {
    if (config.grid_counts.empty())
        return config.env_name == "toy1d" ? toy1d_default_grid() : linear_plant_default_grid();
    return make_uniform_grid(config.grid_lo, config.grid_hi, config.grid_counts);
}

EngineOptions engine_options(const RunConfig& config, const Env& env, const ParamGrid& grid) {
    const int q = env.num_constraints();
    if (static_cast<int>(config.kernels.size()) != q + 1)
        fail("\"kernels\" must list " + std::to_string(q + 1) + " entries for this environment");
    for (size_t i = 0; i < config.kernels.size(); ++i)
        if (config.kernels[i].lengthscales.size() != static_cast<Eigen::Index>(grid.dim))
            fail("\"kernels[" + std::to_string(i) + "].lengthscales\" must match the grid dimension");

    EngineOptions opts;
    opts.beta.beta_sqrt = config.beta_sqrt;
    opts.epsilon = config.epsilon;
    opts.stages = config.stages;
    opts.lipschitz_a = config.lipschitz_a;
    opts.lipschitz_x = config.lipschitz_x;
    opts.jump_bound = config.jump_bound;
    opts.noise_margin = config.noise_margin;
    opts.kernels = config.kernels;
    opts.noise_std = config.noise_std;
    opts.budget = config.budget;
    opts.ge_enabled = config.algorithm == "gosafeopt";
    opts.boundary_mode =
        config.boundary_mode == "tiered" ? BoundaryMode::Tiered : BoundaryMode::Exact;
    if (opts.boundary_mode == BoundaryMode::Tiered) {
        if (config.state_lengthscales.size() != static_cast<Eigen::Index>(env.state_dim()))
            fail("\"state_lengthscales\" must match the environment state dimension");
        KernelSpec state_kernel;
        state_kernel.family = config.kernels.back().family;
        state_kernel.lengthscales = config.state_lengthscales;
        state_kernel.output_scale = 1.0;
        opts.tiers = tiers_from_covariance(state_kernel, config.kappa_l, config.kappa_u,
                                           config.eta_l, config.eta_u);
    }
    opts.harvest_stride = config.harvest_stride;
    opts.subset_selection = config.subset_selection;
    opts.n_max = config.n_max;
    opts.m = config.m;

    for (const Eigen::VectorXd& c : config.safe_seed_coords) {
        if (c.size() != static_cast<Eigen::Index>(grid.dim))
            fail("\"safe_seed_coords\" entries must match the grid dimension");
        opts.safe_seed.push_back(nearest_grid_index(grid, c));
    }
    return opts;
}

}  // namespace gso
