#pragma once

#include <memory>
#include <stdexcept>
#include <string>
#include <vector>

#include "gso/engine.hpp"
#include "gso/env.hpp"

namespace gso {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// One JSON object; unknown keys are rejected and every validation error
// names the offending key path. Fields left out fall back to per-environment
// defaults, so {"env": {"name": "toy1d"}, "seeds": [0]} is a complete config.
struct RunConfig {
    std::string env_name = "toy1d";
    Toy1dOptions toy;
    LinearPlantOptions plant;

    // Empty grid spec uses the environment's default discretization.
    Eigen::VectorXd grid_lo, grid_hi;
    std::vector<int> grid_counts;

    std::string algorithm = "gosafeopt";  // or "safeopt"

    std::vector<KernelSpec> kernels;  // one per output; empty uses env defaults
    Eigen::VectorXd noise_std;        // one per output; empty uses env defaults

    double beta_sqrt = 3.0;
    double lipschitz_a = -1.0;  // < 0 uses env defaults
    double lipschitz_x = -1.0;
    double jump_bound = -1.0;  // <= 0 uses the env's probed estimate
    double noise_margin = 0.0;
    double epsilon = 0.1;

    StageBudget stages;

    std::string boundary_mode = "exact";  // or "tiered"
    double eta_l = 0.4, eta_u = 0.6;
    double kappa_l = 0.90, kappa_u = 0.94;
    Eigen::VectorXd state_lengthscales;  // tier distances; empty uses env defaults

    int n_max = 1000;
    int m = 500;
    bool subset_selection = true;
    int harvest_stride = 0;  // <= 0 picks max(1, horizon/50)

    int budget = 100;
    std::vector<uint64_t> seeds;
    std::vector<Eigen::VectorXd> safe_seed_coords;  // empty uses env defaults

    std::string out_dir = "results";
    bool normalize_objective = true;
    int oracle_repeats = 0;  // <= 0 picks 16 for stochastic envs, 1 otherwise
};

RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);

std::unique_ptr<Env> make_env(const RunConfig& config);
ParamGrid make_grid(const RunConfig& config);

// Everything except the objective normalization, which the campaign fills in
// from the oracle table when normalize_objective is set.
EngineOptions engine_options(const RunConfig& config, const Env& env, const ParamGrid& grid);

}  // namespace gso
