#include "gso/env.hpp"

#include <cmath>
#include <stdexcept>

namespace gso {

RolloutTrace rollout(const Env& env, int a_index, const ParamGrid& grid, const Monitor* monitor,
                     std::mt19937_64& rng, const Eigen::VectorXd* start_state) {
    RolloutTrace trace;
    const int T = env.horizon();
    trace.states.reserve(T + 1);
    trace.rewards.reserve(T + 1);
    trace.constraint_values.reserve(T + 1);
    trace.applied_params.reserve(T);

    Eigen::VectorXd x = start_state ? *start_state : env.x0();
    int active = a_index;
    auto record_state = [&](const Eigen::VectorXd& s) {
        if (!s.allFinite()) throw std::runtime_error("rollout: non-finite state");
        trace.states.push_back(s);
        trace.rewards.push_back(env.stage_reward(s));
        trace.constraint_values.push_back(env.gbar(s));
    };
    record_state(x);

    for (int k = 0; k < T; ++k) {
        if (monitor && !trace.switched_at) {
            const MonitorDecision d = (*monitor)(x);
            if (d.trigger) {
                trace.switched_at = k;
                active = d.backup_param;
            }
        }
        x = env.step(x, grid[active], k, rng);
        trace.applied_params.push_back(active);
        record_state(x);
    }
    return trace;
}

Eigen::VectorXd episode_measurements(const RolloutTrace& trace, const Eigen::VectorXd& noise_std,
                                     std::mt19937_64& rng) {
    const int q = static_cast<int>(trace.constraint_values.front().size());
    if (noise_std.size() != q + 1)
        throw std::invalid_argument("episode_measurements: noise vector size mismatch");
    Eigen::VectorXd y(q + 1);
    double total = 0.0;
    for (double r : trace.rewards) total += r;
    y[0] = total;
    for (int i = 0; i < q; ++i) {
        double mn = std::numeric_limits<double>::infinity();
        for (const auto& g : trace.constraint_values) mn = std::min(mn, g[i]);
        y[i + 1] = mn;
    }
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int i = 0; i <= q; ++i)
        if (noise_std[i] > 0.0) y[i] += noise_std[i] * gauss(rng);
    return y;
}

// ---------------------------------------------------------------------------
// Toy benchmark: scalar system s+ = 1.01*sqrt(|s|) - 0.2*sqrt(|a*y|) + v with
// sensor y = s + w. The process noise is what moves the system away from the
// x0 = 0 rest point, so the stochastic mode is the meaningful one.
// ---------------------------------------------------------------------------

namespace {

class Toy1dEnv final : public Env {
  public:
    explicit Toy1dEnv(const Toy1dOptions& opts) : opts_(opts), x0_(1) {
        x0_[0] = 0.0;
        jump_bound_ = estimate_jump_bound();
    }

    int state_dim() const override { return 1; }
    int num_constraints() const override { return 1; }
    int horizon() const override { return opts_.horizon; }
    double dt() const override { return 1.0; }
    const Eigen::VectorXd& x0() const override { return x0_; }
    double jump_bound() const override { return jump_bound_; }
    bool stochastic() const override { return opts_.process_noise; }

    double stage_reward(const Eigen::VectorXd& x) const override { return -x[0] * x[0]; }

    Eigen::VectorXd gbar(const Eigen::VectorXd& x) const override {
        Eigen::VectorXd g(1);
        g[0] = 0.81 - x[0] * x[0];
        return g;
    }

    Eigen::VectorXd step(const Eigen::VectorXd& x, const Eigen::VectorXd& a, int /*k*/,
                         std::mt19937_64& rng) const override {
        double v = 0.0, w = 0.0;
        if (opts_.process_noise) {
            std::normal_distribution<double> gauss(0.0, opts_.noise_std);
            v = gauss(rng);
            w = gauss(rng);
        }
        Eigen::VectorXd out(1);
        out[0] = next_state(x[0], a[0], v, w);
        return out;
    }

  private:
    static double next_state(double s, double a, double v, double w) {
        const double y = s + w;
        return 1.01 * std::sqrt(std::abs(s)) - 0.2 * std::sqrt(std::abs(a * y)) + v;
    }

    // Largest one-step displacement over the monitored operating envelope
    // (|s| within the constraint radius plus one overshoot) and the full
    // parameter interval, inflated 10%.
    double estimate_jump_bound() const {
        const double s_lo = -0.2, s_hi = 1.05;
        const double a_lo = -6.0, a_hi = 5.0;
        double max_jump = 0.0;
        for (int i = 0; i <= 250; ++i) {
            const double s = s_lo + (s_hi - s_lo) * i / 250.0;
            for (int j = 0; j <= 220; ++j) {
                const double a = a_lo + (a_hi - a_lo) * j / 220.0;
                max_jump = std::max(max_jump, std::abs(next_state(s, a, 0.0, 0.0) - s));
            }
        }
        if (opts_.process_noise) {
            std::mt19937_64 rng(opts_.seed ^ 0x746f793164ULL);
            std::uniform_real_distribution<double> us(s_lo, s_hi), ua(a_lo, a_hi);
            std::normal_distribution<double> gauss(0.0, opts_.noise_std);
            for (int p = 0; p < 10000; ++p) {
                const double s = us(rng), a = ua(rng);
                const double jump = std::abs(next_state(s, a, gauss(rng), gauss(rng)) - s);
                max_jump = std::max(max_jump, jump);
            }
        }
        return 1.1 * max_jump;
    }

    Toy1dOptions opts_;
    Eigen::VectorXd x0_;
    double jump_bound_ = 0.0;
};

}  // namespace

std::unique_ptr<Env> toy1d_make(const Toy1dOptions& opts) {
    return std::make_unique<Toy1dEnv>(opts);
}

std::unique_ptr<Env> toy1d_make(uint64_t seed) {
    Toy1dOptions opts;
    opts.seed = seed;
    return toy1d_make(opts);
}

ParamGrid toy1d_default_grid() {
    Eigen::VectorXd lo(1), hi(1);
    lo[0] = -6.0;
    hi[0] = 5.0;
    return make_uniform_grid(lo, hi, {56});
}

// ---------------------------------------------------------------------------
// Linear plant: a chain of dim/2 unit masses. The first mass sits on a
// destabilizing spring with negative damping and a constant load; the last
// one is anchored to ground; neighbors are coupled by springs. A saturated
// PD loop u = -K(a) x acts on the first mass and is recomputed every
// control_period sampling steps (a sampled controller slower than the safety
// monitor), so large position gains go unstable through the hold lag while
// small ones lose to the destabilizing spring. Both dial axes fold about 0.5
// onto the gain range, which makes the true safe set two mirror-image islands
// that merge once zeta is raised past the ridge between them.
//
// Exposed states are [positions; scaled velocities] so that one unit of state
// distance corresponds to a comparable constraint change; the constraint is
// gbar(x) = zeta - min(||x||, sense_cap) about the origin target and its
// Lipschitz constant in these coordinates is at most 1.
// ---------------------------------------------------------------------------

namespace {

constexpr double kVelocityScale = 0.5;
constexpr double kFreezeNorm = 1e3;  // hard stops, far outside the sensed range

class LinearPlantEnv final : public Env {
  public:
    explicit LinearPlantEnv(const LinearPlantOptions& opts) : opts_(opts) {
        if (opts.dim != 2 && opts.dim != 4 && opts.dim != 6)
            throw std::invalid_argument("linear_plant: dim must be 2, 4, or 6");
        if (opts.control_period < 1)
            throw std::invalid_argument("linear_plant: control_period must be >= 1");
        masses_ = opts.dim / 2;
        x0_ = Eigen::VectorXd::Zero(opts.dim);
        for (int i = 0; i < masses_; ++i) x0_[i] = opts.x0_pos;
        jump_bound_ = estimate_jump_bound();
    }

    int state_dim() const override { return opts_.dim; }
    int num_constraints() const override { return 1; }
    int horizon() const override { return opts_.horizon; }
    double dt() const override { return opts_.dt; }
    const Eigen::VectorXd& x0() const override { return x0_; }
    double jump_bound() const override { return jump_bound_; }
    bool stochastic() const override { return opts_.process_noise; }

    double stage_reward(const Eigen::VectorXd& x) const override {
        const double r = std::min(x.norm(), opts_.sense_cap);
        return -r * r * opts_.dt;
    }

    Eigen::VectorXd gbar(const Eigen::VectorXd& x) const override {
        Eigen::VectorXd g(1);
        g[0] = opts_.zeta - std::min(x.norm(), opts_.sense_cap);
        return g;
    }

    // Episodes are single-threaded; the held control is cached between calls
    // and refreshed at control boundaries (k % control_period == 0, which
    // includes every episode or restart start) and whenever the applied
    // parameter changes, so a backup takes effect on the very next step.
    Eigen::VectorXd step(const Eigen::VectorXd& x, const Eigen::VectorXd& a, int k,
                         std::mt19937_64& rng) const override {
        const auto [kp, kd] = gains(a);
        if (k % opts_.control_period == 0 || kp != held_kp_ || kd != held_kd_) {
            held_u_ = policy(x, kp, kd);
            held_kp_ = kp;
            held_kd_ = kd;
        }
        return advance(x, held_u_, opts_.process_noise ? &rng : nullptr);
    }

    // Both dial axes fold symmetrically about 0.5. The position gain peaks at
    // the dial midpoint and relaxes toward the extremes, so the workable band
    // appears twice, once near each end. The velocity gain vanishes at the
    // extremes and peaks at the midpoint.
    std::pair<double, double> gains(const Eigen::VectorXd& a) const {
        const double t0 = tent(a[0]), t1 = tent(a[1]);
        return {opts_.kp_edge + (opts_.kp_center - opts_.kp_edge) * t0,
                opts_.kd_peak * t1 * t1};
    }

    double policy(const Eigen::VectorXd& x, double kp, double kd) const {
        return std::clamp(-kp * x[0] - kd * x[masses_], -opts_.u_max, opts_.u_max);
    }

  private:
    static double tent(double t) {
        t = std::clamp(t, 0.0, 1.0);
        return 1.0 - std::abs(2.0 * t - 1.0);
    }

    void deriv(const Eigen::VectorXd& p, const Eigen::VectorXd& v, double u,
               Eigen::VectorXd& dp, Eigen::VectorXd& dv) const {
        const int m = masses_;
        dp = v;
        for (int i = 0; i < m; ++i) {
            double acc = 0.0;
            if (i == 0) {
                acc = opts_.neg_stiffness * p[0] + opts_.anti_damping * v[0] + u - opts_.load;
                if (m > 1) acc += opts_.coupling * (p[1] - p[0]);
            } else {
                acc = opts_.coupling * (p[i - 1] - p[i]) - opts_.anchor_damping * v[i];
                if (i + 1 < m)
                    acc += opts_.coupling * (p[i + 1] - p[i]);
                else
                    acc -= opts_.anchor_stiffness * p[i];
            }
            dv[i] = acc;
        }
    }

    // One sampling step of length dt under a fixed (held) control: two RK4
    // substeps on the raw coordinates, then a velocity kick when stochastic.
    Eigen::VectorXd advance(const Eigen::VectorXd& x, double u, std::mt19937_64* rng) const {
        const int m = masses_;
        Eigen::VectorXd p = x.head(m), v = x.tail(m) / kVelocityScale;
        Eigen::VectorXd k1p(m), k1v(m), k2p(m), k2v(m), k3p(m), k3v(m), k4p(m), k4v(m);
        const double h = 0.5 * opts_.dt;
        for (int s = 0; s < 2; ++s) {
            deriv(p, v, u, k1p, k1v);
            deriv(p + 0.5 * h * k1p, v + 0.5 * h * k1v, u, k2p, k2v);
            deriv(p + 0.5 * h * k2p, v + 0.5 * h * k2v, u, k3p, k3v);
            deriv(p + h * k3p, v + h * k3v, u, k4p, k4v);
            p += (h / 6.0) * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
            v += (h / 6.0) * (k1v + 2.0 * k2v + 2.0 * k3v + k4v);
        }
        if (rng) {
            std::normal_distribution<double> gauss(0.0, opts_.noise_std * std::sqrt(opts_.dt));
            for (int i = 0; i < m; ++i) v[i] += gauss(*rng);
        }
        Eigen::VectorXd out(opts_.dim);
        out.head(m) = p;
        out.tail(m) = kVelocityScale * v;
        const double nrm = out.norm();
        if (nrm > kFreezeNorm) out *= kFreezeNorm / nrm;
        return out;
    }

    // Probes transitions along episodes the monitor could actually produce:
    // every grid parameter from x0 until the state leaves the constraint
    // region with 15% slack, plus mid-episode switches from states on safe
    // trajectories, paired with fresh policies of random parameters and with
    // the stalest saturated control the hold schedule could still be
    // applying. Inflated 10%.
    double estimate_jump_bound() const {
        const ParamGrid grid = linear_plant_default_grid();
        std::mt19937_64 rng(opts_.seed ^ 0x706c616e74ULL);
        std::mt19937_64* noise = opts_.process_noise ? &rng : nullptr;
        const double stop_radius = 1.15 * opts_.zeta;
        double max_jump = 0.0;
        std::vector<Eigen::VectorXd> safe_states;

        for (std::size_t gi = 0; gi < grid.size(); ++gi) {
            const auto [kp, kd] = gains(grid[gi]);
            Eigen::VectorXd x = x0_;
            double u = 0.0;
            bool stayed_safe = true;
            std::vector<Eigen::VectorXd> visited{x};
            for (int k = 0; k < opts_.horizon && x.norm() <= stop_radius; ++k) {
                if (k % opts_.control_period == 0) u = policy(x, kp, kd);
                const Eigen::VectorXd next = advance(x, u, noise);
                max_jump = std::max(max_jump, (next - x).norm());
                x = next;
                if (x.norm() > opts_.zeta)
                    stayed_safe = false;
                else
                    visited.push_back(x);
            }
            if (stayed_safe)
                for (std::size_t k = 0; k < visited.size(); k += 8)
                    safe_states.push_back(visited[k]);
        }

        if (!safe_states.empty()) {
            std::uniform_int_distribution<std::size_t> pick_state(0, safe_states.size() - 1);
            std::uniform_int_distribution<std::size_t> pick_param(0, grid.size() - 1);
            for (int probe = 0; probe < 5000; ++probe) {
                const Eigen::VectorXd& x = safe_states[pick_state(rng)];
                const auto [kp, kd] = gains(grid[pick_param(rng)]);
                for (double u : {policy(x, kp, kd), opts_.u_max, -opts_.u_max})
                    max_jump = std::max(max_jump, (advance(x, u, noise) - x).norm());
            }
        }
        return 1.1 * max_jump;
    }

    LinearPlantOptions opts_;
    int masses_ = 1;
    Eigen::VectorXd x0_;
    double jump_bound_ = 0.0;
    mutable double held_u_ = 0.0;
    mutable double held_kp_ = std::numeric_limits<double>::quiet_NaN();
    mutable double held_kd_ = std::numeric_limits<double>::quiet_NaN();
};

}  // namespace

std::unique_ptr<Env> linear_plant_make(const LinearPlantOptions& opts) {
    return std::make_unique<LinearPlantEnv>(opts);
}

std::unique_ptr<Env> linear_plant_make(int dim, uint64_t seed) {
    LinearPlantOptions opts;
    opts.dim = dim;
    opts.seed = seed;
    return linear_plant_make(opts);
}

ParamGrid linear_plant_default_grid() {
    Eigen::VectorXd lo(2), hi(2);
    lo << 0.0, 0.0;
    hi << 1.0, 1.0;
    return make_uniform_grid(lo, hi, {21, 21});
}

Eigen::MatrixXd oracle_truth(const Env& env, const ParamGrid& grid, int repeats, uint64_t seed) {
    if (repeats < 1) throw std::invalid_argument("oracle_truth: repeats must be >= 1");
    const int q = env.num_constraints();
    Eigen::MatrixXd table(grid.size(), q + 1);
    const Eigen::VectorXd no_noise = Eigen::VectorXd::Zero(q + 1);
    const int effective_repeats = env.stochastic() ? repeats : 1;
    for (std::size_t a = 0; a < grid.size(); ++a) {
        Eigen::VectorXd acc = Eigen::VectorXd::Zero(q + 1);
        for (int r = 0; r < effective_repeats; ++r) {
            std::mt19937_64 rng(seed + 0x9E3779B97F4A7C15ULL * (a * 1000003ULL + r + 1));
            const RolloutTrace trace = rollout(env, static_cast<int>(a), grid, nullptr, rng);
            acc += episode_measurements(trace, no_noise, rng);
        }
        table.row(a) = (acc / effective_repeats).transpose();
    }
    return table;
}

}  // namespace gso
