#include "gso/backups.hpp"

#include <cmath>
#include <stdexcept>

namespace gso {

namespace {

double min_constraint_lower(const BoundsTable& table, int param_index) {
    double m = std::numeric_limits<double>::infinity();
    for (int i = 1; i <= table.q; ++i) m = std::min(m, table.lower(param_index, i));
    return m;
}

// Entry maximizing min_l - L*dist, ties to the earliest entry; -1 when empty.
int best_margin_entry(const BackupStore& store, const BoundsTable& table,
                      const Eigen::VectorXd& x) {
    double best_margin = -std::numeric_limits<double>::infinity();
    int best = -1;
    for (std::size_t e = 0; e < store.entries.size(); ++e) {
        const BackupEntry& entry = store.entries[e];
        const double margin = min_constraint_lower(table, entry.param_index) -
                              store.lipschitz_x * (x - entry.state).norm();
        if (margin > best_margin) {
            best_margin = margin;
            best = static_cast<int>(e);
        }
    }
    return best;
}

}  // namespace

TierSpec tiers_from_covariance(const KernelSpec& state_kernel, double kappa_l, double kappa_u,
                               double eta_l, double eta_u) {
    if (!(kappa_l < kappa_u))
        throw std::invalid_argument("tiers_from_covariance: need kappa_l < kappa_u");
    if (!(eta_l < eta_u))
        throw std::invalid_argument("tiers_from_covariance: need eta_l < eta_u");
    const double scale = state_kernel.lengthscales.size() > 0
                             ? state_kernel.lengthscales.minCoeff()
                             : 1.0;
    TierSpec t;
    t.eta_l = eta_l;
    t.eta_u = eta_u;
    t.d_l = scale * distance_from_covariance(state_kernel, kappa_u);
    t.d_u = scale * distance_from_covariance(state_kernel, kappa_l);
    return t;
}

BackupStore harvest_rollout(const BackupStore& store, int a_index, const RolloutTrace& trace,
                            int stride) {
    if (stride < 1) throw std::invalid_argument("harvest_rollout: stride must be >= 1");
    BackupStore out = store;
    for (std::size_t k = 0; k < trace.states.size(); k += static_cast<std::size_t>(stride))
        out.entries.push_back({a_index, trace.states[k]});
    return out;
}

BoundaryDecision boundary_check(const BackupStore& store, const BoundsTable& table,
                                const Eigen::VectorXd& x) {
    BoundaryDecision d;
    const double margin_dist = store.jump_bound + store.noise_margin;
    for (const BackupEntry& entry : store.entries) {
        const double dist = (x - entry.state).norm();
        if (min_constraint_lower(table, entry.param_index) >=
            store.lipschitz_x * (dist + margin_dist)) {
            d.continue_ok = true;
            return d;
        }
    }
    d.continue_ok = false;
    const int best = best_margin_entry(store, table, x);
    d.backup_param = best >= 0 ? store.entries[best].param_index : -1;
    return d;
}

BoundaryDecision boundary_check_tiered(const BackupStore& store, const BoundsTable& table,
                                       const Eigen::VectorXd& x, const TierSpec& tiers) {
    bool interior_within_du = false;
    bool tiered_within_dl = false;
    double nearest_dist = std::numeric_limits<double>::infinity();
    int nearest_entry = -1;
    bool any_tiered = false;
    for (std::size_t e = 0; e < store.entries.size(); ++e) {
        const BackupEntry& entry = store.entries[e];
        const double min_l = min_constraint_lower(table, entry.param_index);
        if (min_l < tiers.eta_l) continue;
        any_tiered = true;
        const double dist = (x - entry.state).norm();
        if (dist < nearest_dist) {
            nearest_dist = dist;
            nearest_entry = static_cast<int>(e);
        }
        if (dist <= tiers.d_l) tiered_within_dl = true;
        if (min_l >= tiers.eta_u && dist <= tiers.d_u) interior_within_du = true;
        if (interior_within_du && tiered_within_dl) {
            BoundaryDecision d;
            d.continue_ok = true;
            return d;
        }
    }
    BoundaryDecision d;
    d.continue_ok = false;
    d.close_range_gap = interior_within_du && !tiered_within_dl;
    if (nearest_entry >= 0) {
        d.backup_param = store.entries[nearest_entry].param_index;
    } else if (!any_tiered) {
        // Nothing clears eta_l; degrade to the exact rule's best entry so a
        // trigger always has a concrete parameter to switch to.
        const int best = best_margin_entry(store, table, x);
        if (best >= 0) d.backup_param = store.entries[best].param_index;
    }
    return d;
}

BackupStore subset_select(const BackupStore& store, const BoundsTable& table, int n_max, int m,
                          std::mt19937_64& rng) {
    if (!(m < n_max)) throw std::invalid_argument("subset_select: need m < n_max");
    if (static_cast<int>(store.entries.size()) <= n_max) return store;

    std::vector<double> weights(store.entries.size());
    double total = 0.0;
    for (std::size_t e = 0; e < store.entries.size(); ++e) {
        const double min_l = min_constraint_lower(table, store.entries[e].param_index);
        const double w = std::isfinite(min_l) ? std::exp(-min_l * min_l) : 0.0;
        weights[e] = w;
        total += w;
    }
    if (total <= 0.0) {
        weights.assign(store.entries.size(), 1.0);
        total = static_cast<double>(store.entries.size());
    }

    // Sequential weighted draws without replacement via prefix-sum walk; this
    // keeps the result identical across platforms for a given rng stream.
    std::vector<std::size_t> chosen;
    std::vector<char> taken(store.entries.size(), 0);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int pick = 0; pick < m; ++pick) {
        if (total <= 0.0) {
            // Numerical exhaustion: reweight the remainder uniformly.
            total = 0.0;
            for (std::size_t e = 0; e < weights.size(); ++e) {
                if (!taken[e]) {
                    weights[e] = 1.0;
                    total += 1.0;
                }
            }
        }
        double target = unit(rng) * total;
        std::size_t sel = weights.size();
        for (std::size_t e = 0; e < weights.size(); ++e) {
            if (taken[e] || weights[e] <= 0.0) continue;
            target -= weights[e];
            sel = e;
            if (target <= 0.0) break;
        }
        if (sel == weights.size()) {
            for (std::size_t e = 0; e < weights.size(); ++e)
                if (!taken[e]) { sel = e; break; }
        }
        chosen.push_back(sel);
        taken[sel] = 1;
        total -= weights[sel];
        weights[sel] = 0.0;
    }
    std::sort(chosen.begin(), chosen.end());

    BackupStore out;
    out.lipschitz_x = store.lipschitz_x;
    out.jump_bound = store.jump_bound;
    out.noise_margin = store.noise_margin;
    out.entries.reserve(chosen.size());
    for (std::size_t e : chosen) out.entries.push_back(store.entries[e]);
    return out;
}

bool safe_state_contains(const BackupStore& store, const BoundsTable& table,
                         const Eigen::VectorXd& x) {
    return boundary_check(store, table, x).continue_ok;
}

}  // namespace gso
