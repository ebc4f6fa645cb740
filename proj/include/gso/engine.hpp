#pragma once

#include <optional>
#include <random>
#include <vector>

#include "gso/backups.hpp"
#include "gso/confidence.hpp"
#include "gso/env.hpp"
#include "gso/gp.hpp"
#include "gso/safe_set.hpp"

namespace gso {

// Parameters whose global-exploration rollout triggered a backup, together
// with the state at which it happened; re-examined as the backups improve.
struct FailSets {
    std::vector<int> params;
    std::vector<Eigen::VectorXd> states;

    bool contains(int a) const {
        for (int p : params)
            if (p == a) return true;
        return false;
    }
};

struct StageBudget {
    int n_lse = 30;
    int n_ge = 10;
    double lse_reduction = 0.5;
    int lse_min = 1;
};

enum class Stage { Lse, Ge };
enum class BoundaryMode { Exact, Tiered };

struct RunRecord {
    int iter = 0;
    Stage stage = Stage::Lse;
    int param_index = -1;
    Eigen::VectorXd measurements;  // raw scale; NaN when the episode triggered
    bool triggered = false;
    bool safe = true;  // oracle verdict over the sampled trajectory
    int recommended_index = -1;
    double best_lower_bound = 0.0;
    // Audit fields beyond the CSV columns.
    double episode_min_gbar = 0.0;
    double post_trigger_min_gbar = std::numeric_limits<double>::quiet_NaN();
    int backup_param = -1;
};

struct EngineOptions {
    BetaSchedule beta{3.0};
    double epsilon = 0.1;
    StageBudget stages;
    double lipschitz_a = 1.0;
    double lipschitz_x = 1.0;
    double jump_bound = -1.0;  // <= 0 uses the environment's estimate
    double noise_margin = 0.0;
    std::vector<KernelSpec> kernels;  // one per output index (objective first)
    Eigen::VectorXd noise_std;        // one per output index
    std::vector<int> safe_seed;       // grid indices
    int budget = 100;
    bool ge_enabled = true;  // false runs the LSE-only baseline
    BoundaryMode boundary_mode = BoundaryMode::Exact;
    TierSpec tiers;
    int harvest_stride = 0;  // <= 0 uses max(1, horizon/50)
    bool subset_selection = true;
    int n_max = 1000;
    int m = 500;
    // Objective observations enter the GP as (y - obj_shift) / obj_scale.
    double obj_shift = 0.0;
    double obj_scale = 1.0;
};

class Engine {
  public:
    Engine(const Env& env, ParamGrid grid, EngineOptions opts, uint64_t seed);

    // Runs one safety-verified episode per seed parameter, populating the
    // GP datasets and the backup store. Throws on an unsafe seed rollout.
    void initialize();

    // One engine iteration (fail-set upkeep, stage scheduling, one episode).
    // Empty when no stage can act, which also marks the run finished.
    std::optional<RunRecord> step();

    std::vector<RunRecord> run();

    bool initialized() const { return initialized_; }
    bool finished() const { return finished_; }

    int recommend() const;
    void reevaluate_fail_sets();

    const BoundsTable& table() const { return table_; }
    const SafeSet& safe_set() const { return safe_; }
    const BackupStore& store() const { return store_; }
    const FailSets& fail_sets() const { return fail_; }
    const std::vector<GpModel>& models() const { return models_; }
    const ParamGrid& grid() const { return grid_; }
    const LseSets& lse_sets() const { return sets_; }
    bool lse_convergence() const { return converged_; }
    int current_n_lse() const { return cur_n_lse_; }
    // Minimum oracle gbar over every episode run so far, seed episodes first.
    const std::vector<double>& episode_min_gbar() const { return episode_min_gbar_; }

    BoundaryDecision check_boundary(const Eigen::VectorXd& x) const;

  private:
    RunRecord run_lse_step();
    RunRecord run_ge_step(int candidate);
    Eigen::VectorXd absorb_clean_episode(int a_index, const RolloutTrace& trace);
    void update_bounds();
    void refresh_lse_sets();
    std::vector<int> ge_candidates() const;
    int ge_acquire(const std::vector<int>& candidates) const;
    static double trace_min_gbar(const RolloutTrace& trace, int from_state);

    const Env& env_;
    ParamGrid grid_;
    EngineOptions opts_;
    std::mt19937_64 rng_;

    std::vector<GpModel> models_;
    BoundsTable table_;
    SafeSet safe_;
    BackupStore store_;
    FailSets fail_;
    LseSets sets_;

    Stage stage_ = Stage::Lse;
    int iter_ = 0;
    int cur_n_lse_ = 1;
    int lse_steps_done_ = 0;
    int ge_steps_done_ = 0;
    bool converged_ = false;
    bool initialized_ = false;
    bool finished_ = false;
    int stride_ = 1;

    std::vector<double> episode_min_gbar_;
};

std::vector<RunRecord> run_gosafeopt(const Env& env, const ParamGrid& grid,
                                     const EngineOptions& opts, uint64_t seed);

}  // namespace gso
