#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "gso/config.hpp"
#include "gso/engine.hpp"

namespace gso {

// Engine RNG stream for a campaign seed (splitmix64 of the seed).
uint64_t engine_seed(uint64_t run_seed);

std::string format_double(double v);  // %.9g, shared by all CSV writers

struct SeedRun {
    uint64_t seed = 0;
    std::vector<RunRecord> records;
    std::vector<double> episode_min_gbar;  // seed episodes first
    std::vector<std::uint8_t> final_safe;
    int recommended_index = -1;
};

SeedRun run_single(const Env& env, const ParamGrid& grid, const EngineOptions& opts,
                   uint64_t seed);

struct SeedSummary {
    uint64_t seed = 0;
    int iters = 0;
    int violations = 0;
    int triggers = 0;
    int discovered_regions = 0;
    int recommended_index = -1;
    double recommended_obj = 0.0;  // oracle objective, normalized when enabled
    int final_safe_count = 0;
};

struct CampaignResult {
    std::vector<SeedSummary> per_seed;
    std::vector<SeedRun> runs;
    Eigen::MatrixXd oracle;  // ground-truth table (col 0 objective)
    double obj_shift = 0.0, obj_scale = 1.0;
    int total_violations() const;
};

// Per-seed engine runs plus pure aggregation; no file output.
CampaignResult run_campaign_memory(const RunConfig& config);

// run_campaign_memory plus records_<algo>_seed<k>.csv, summary_<algo>.csv and
// curve_<algo>.csv under config.out_dir. Returns a process exit status.
int run_campaign(const RunConfig& config);

// Ground-truth table dump: param_index,coords,f,g1..gq.
int write_oracle_csv(const RunConfig& config, const std::string& out_dir);

// A region counts as discovered when a non-triggered episode evaluated a
// parameter whose oracle constraint row is nonnegative; regions are the
// connected components of the oracle-safe mask.
int discovered_regions(const std::vector<RunRecord>& records, const ParamGrid& grid,
                       const Eigen::MatrixXd& oracle);

}  // namespace gso
