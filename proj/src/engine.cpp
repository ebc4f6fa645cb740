#include "gso/engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace gso {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

Engine::Engine(const Env& env, ParamGrid grid, EngineOptions opts, uint64_t seed)
    : env_(env), grid_(std::move(grid)), opts_(std::move(opts)), rng_(seed) {
    const int q = env_.num_constraints();
    if (static_cast<int>(opts_.kernels.size()) != q + 1)
        throw std::invalid_argument("engine: need one kernel per output");
    if (opts_.noise_std.size() != q + 1)
        throw std::invalid_argument("engine: need one noise level per output");
    if (opts_.safe_seed.empty())
        throw std::invalid_argument("engine: safe seed is empty");
    if (!(opts_.obj_scale > 0.0))
        throw std::invalid_argument("engine: obj_scale must be positive");

    for (int i = 0; i <= q; ++i)
        models_.push_back(gp_fit(opts_.kernels[static_cast<size_t>(i)], opts_.noise_std[i],
                                 std::vector<Eigen::VectorXd>{}, Eigen::VectorXd()));

    safe_ = make_safe_set(grid_.points.size(), opts_.safe_seed, opts_.lipschitz_a);
    table_ = bounds_init(grid_, opts_.safe_seed, q);

    store_.lipschitz_x = opts_.lipschitz_x;
    store_.jump_bound = opts_.jump_bound > 0.0 ? opts_.jump_bound : env_.jump_bound();
    store_.noise_margin = opts_.noise_margin;

    stride_ = opts_.harvest_stride > 0 ? opts_.harvest_stride
                                       : std::max(1, env_.horizon() / 50);
    cur_n_lse_ = opts_.stages.n_lse;
}

BoundaryDecision Engine::check_boundary(const Eigen::VectorXd& x) const {
    if (opts_.boundary_mode == BoundaryMode::Tiered)
        return boundary_check_tiered(store_, table_, x, opts_.tiers);
    return boundary_check(store_, table_, x);
}

double Engine::trace_min_gbar(const RolloutTrace& trace, int from_state) {
    double lo = kInf;
    for (size_t k = static_cast<size_t>(from_state); k < trace.constraint_values.size(); ++k)
        lo = std::min(lo, trace.constraint_values[k].minCoeff());
    return lo;
}

Eigen::VectorXd Engine::absorb_clean_episode(int a_index, const RolloutTrace& trace) {
    const int q = env_.num_constraints();
    // Constraint observations carry their configured noise; objective noise is
    // added on the normalized scale after the affine map.
    Eigen::VectorXd sigma = opts_.noise_std;
    sigma[0] = 0.0;
    Eigen::VectorXd y = episode_measurements(trace, sigma, rng_);
    double y0_norm = (y[0] - opts_.obj_shift) / opts_.obj_scale;
    if (opts_.noise_std[0] > 0.0) {
        std::normal_distribution<double> gauss(0.0, opts_.noise_std[0]);
        y0_norm += gauss(rng_);
    }
    y[0] = y0_norm * opts_.obj_scale + opts_.obj_shift;

    const Eigen::VectorXd& a = grid_.points[static_cast<size_t>(a_index)];
    models_[0] = gp_add(models_[0], a, y0_norm);
    for (int i = 1; i <= q; ++i) models_[static_cast<size_t>(i)] = gp_add(models_[static_cast<size_t>(i)], a, y[i]);

    store_ = harvest_rollout(store_, a_index, trace, stride_);
    if (opts_.subset_selection && static_cast<int>(store_.entries.size()) > opts_.n_max)
        store_ = subset_select(store_, table_, opts_.n_max, opts_.m, rng_);
    return y;
}

void Engine::update_bounds() {
    table_ = bounds_update(table_, models_, grid_, opts_.beta);
}

void Engine::refresh_lse_sets() {
    sets_.expanders = compute_expanders(safe_, table_, grid_);
    sets_.maximizers = compute_maximizers(safe_, table_);
}

void Engine::initialize() {
    if (initialized_) throw std::logic_error("engine: already initialized");
    for (int a : opts_.safe_seed) {
        RolloutTrace trace = rollout(env_, a, grid_, nullptr, rng_);
        double lo = trace_min_gbar(trace, 0);
        episode_min_gbar_.push_back(lo);
        if (lo < 0.0) throw std::runtime_error("engine: seed parameter rollout violated a constraint");
        absorb_clean_episode(a, trace);
    }
    update_bounds();
    refresh_lse_sets();
    initialized_ = true;
}

int Engine::recommend() const {
    int best = -1;
    double best_l = -kInf;
    for (size_t a = 0; a < safe_.member.size(); ++a) {
        if (!safe_.member[a]) continue;
        double l = table_.lower(static_cast<int>(a), 0);
        if (best < 0 || l > best_l) {
            best = static_cast<int>(a);
            best_l = l;
        }
    }
    return best;
}

void Engine::reevaluate_fail_sets() {
    FailSets kept;
    for (size_t i = 0; i < fail_.params.size(); ++i) {
        BoundaryDecision d = check_boundary(fail_.states[i]);
        if (!d.continue_ok) {
            kept.params.push_back(fail_.params[i]);
            kept.states.push_back(fail_.states[i]);
        }
    }
    fail_ = std::move(kept);
}

std::vector<int> Engine::ge_candidates() const {
    std::vector<int> out;
    for (size_t a = 0; a < safe_.member.size(); ++a) {
        if (safe_.member[a]) continue;
        if (fail_.contains(static_cast<int>(a))) continue;
        out.push_back(static_cast<int>(a));
    }
    return out;
}

int Engine::ge_acquire(const std::vector<int>& candidates) const {
    // Widest constraint uncertainty among parameters outside the safe and
    // fail sets; the objective output does not participate here.
    int best = -1;
    double best_w = -kInf;
    for (int a : candidates) {
        double w = -kInf;
        for (int i = 1; i <= table_.q; ++i) w = std::max(w, table_.width(a, i));
        if (best < 0 || w > best_w) {
            best = a;
            best_w = w;
        }
    }
    return best;
}

RunRecord Engine::run_lse_step() {
    RunRecord rec;
    rec.stage = Stage::Lse;
    int a = lse_acquire(sets_, table_);
    rec.param_index = a;

    RolloutTrace trace = rollout(env_, a, grid_, nullptr, rng_);
    rec.episode_min_gbar = trace_min_gbar(trace, 0);
    episode_min_gbar_.push_back(rec.episode_min_gbar);
    rec.safe = rec.episode_min_gbar >= 0.0;
    rec.measurements = absorb_clean_episode(a, trace);

    update_bounds();
    SafeSet prev = safe_;
    safe_ = safe_set_expand(safe_, table_, grid_);
    refresh_lse_sets();
    converged_ = lse_converged(sets_, table_, prev, safe_, opts_.epsilon);
    return rec;
}

RunRecord Engine::run_ge_step(int candidate) {
    RunRecord rec;
    rec.stage = Stage::Ge;
    rec.param_index = candidate;

    Monitor monitor = [this](const Eigen::VectorXd& x) {
        BoundaryDecision d = check_boundary(x);
        MonitorDecision md;
        md.trigger = !d.continue_ok;
        md.backup_param = d.backup_param;
        return md;
    };
    RolloutTrace trace = rollout(env_, candidate, grid_, &monitor, rng_);
    rec.episode_min_gbar = trace_min_gbar(trace, 0);
    episode_min_gbar_.push_back(rec.episode_min_gbar);
    rec.safe = rec.episode_min_gbar >= 0.0;

    if (trace.switched_at.has_value()) {
        int k = *trace.switched_at;
        rec.triggered = true;
        rec.backup_param = trace.applied_params.empty() ? -1 : trace.applied_params.back();
        rec.post_trigger_min_gbar = trace_min_gbar(trace, k + 1);
        rec.measurements = Eigen::VectorXd::Constant(env_.num_constraints() + 1, kNaN);
        fail_.params.push_back(candidate);
        fail_.states.push_back(trace.states[static_cast<size_t>(k)]);
        // No measurements and no harvesting: the tail ran a different policy,
        // so the episode sums do not describe the candidate parameter.
    } else {
        rec.measurements = absorb_clean_episode(candidate, trace);
        safe_.member[static_cast<size_t>(candidate)] = 1;
        update_bounds();
        table_ = ge_clamp(table_, candidate, table_.q);
        refresh_lse_sets();
        converged_ = false;
    }
    return rec;
}

std::optional<RunRecord> Engine::step() {
    if (!initialized_) throw std::logic_error("engine: step before initialize");
    if (finished_) return std::nullopt;
    ++iter_;
    reevaluate_fail_sets();

    bool lse_exhausted = converged_ || lse_acquire(sets_, table_) < 0;
    std::vector<int> candidates;
    bool ge_available = false;
    if (opts_.ge_enabled) {
        candidates = ge_candidates();
        ge_available = !candidates.empty();
    }

    if (stage_ == Stage::Lse) {
        bool budget_spent = lse_steps_done_ >= cur_n_lse_;
        if ((budget_spent || lse_exhausted) && ge_available) {
            stage_ = Stage::Ge;
            ge_steps_done_ = 0;
        } else if (lse_exhausted && !ge_available) {
            finished_ = true;
            --iter_;
            return std::nullopt;
        }
    } else if (!ge_available) {
        stage_ = Stage::Lse;
        lse_steps_done_ = 0;
        if (lse_exhausted) {
            finished_ = true;
            --iter_;
            return std::nullopt;
        }
    }

    RunRecord rec;
    if (stage_ == Stage::Ge) {
        rec = run_ge_step(ge_acquire(candidates));
        ++ge_steps_done_;
        if (!rec.triggered) {
            // A new safe parameter was discovered: restart local exploration
            // at full budget around the enlarged safe set.
            stage_ = Stage::Lse;
            cur_n_lse_ = opts_.stages.n_lse;
            lse_steps_done_ = 0;
        } else if (ge_steps_done_ >= opts_.stages.n_ge) {
            stage_ = Stage::Lse;
            cur_n_lse_ = std::max(opts_.stages.lse_min,
                                  static_cast<int>(std::floor(cur_n_lse_ * opts_.stages.lse_reduction)));
            lse_steps_done_ = 0;
        }
    } else {
        rec = run_lse_step();
        ++lse_steps_done_;
    }

    rec.iter = iter_;
    rec.recommended_index = recommend();
    rec.best_lower_bound = rec.recommended_index >= 0
                               ? table_.lower(rec.recommended_index, 0)
                               : -kInf;
    return rec;
}

std::vector<RunRecord> Engine::run() {
    if (!initialized_) initialize();
    std::vector<RunRecord> records;
    while (iter_ < opts_.budget && !finished_) {
        std::optional<RunRecord> rec = step();
        if (!rec.has_value()) break;
        records.push_back(std::move(*rec));
    }
    return records;
}

std::vector<RunRecord> run_gosafeopt(const Env& env, const ParamGrid& grid,
                                     const EngineOptions& opts, uint64_t seed) {
    Engine engine(env, grid, opts, seed);
    return engine.run();
}

}  // namespace gso
