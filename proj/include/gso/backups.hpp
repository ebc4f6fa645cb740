#pragma once

#include <Eigen/Dense>
#include <random>
#include <vector>

#include "gso/confidence.hpp"
#include "gso/kernel.hpp"
#include "gso/trace.hpp"

namespace gso {

struct BackupEntry {
    int param_index = -1;
    Eigen::VectorXd state;
};

// (parameter, state) pairs known safe to continue from. Append-only between
// subset-selection events.
struct BackupStore {
    std::vector<BackupEntry> entries;
    double lipschitz_x = 1.0;   // L_x
    double jump_bound = 0.0;    // Xi
    double noise_margin = 0.0;  // d; effective margin is Xi + d
};

// Safety tolerances and distance tolerances for the tiered boundary check.
struct TierSpec {
    double eta_l = 0.4;
    double eta_u = 0.6;
    double d_l = 0.0;
    double d_u = 0.0;
};

// Derives d_l/d_u from covariance thresholds on an isotropic state kernel:
// the covariance floor kappa_u (closer states, higher trust) gives the small
// radius d_l and kappa_l the large radius d_u, keeping d_l < d_u. For
// anisotropic lengthscales the smallest one converts the scaled radius, which
// under-approximates the ball and stays conservative.
TierSpec tiers_from_covariance(const KernelSpec& state_kernel, double kappa_l, double kappa_u,
                               double eta_l, double eta_u);

struct BoundaryDecision {
    bool continue_ok = false;
    int backup_param = -1;  // valid when !continue_ok
    // Tiered check only: the trigger happened although an interior entry was
    // within d_u, i.e. the close-range tier had no cover.
    bool close_range_gap = false;
};

// Appends (a_index, x(k)) for every stride-th state of a safely completed
// episode.
BackupStore harvest_rollout(const BackupStore& store, int a_index, const RolloutTrace& trace,
                            int stride);

// Continue iff some entry certifies every constraint over the distance to x
// plus the jump and noise margins; otherwise Trigger with the highest-margin
// entry (ties by lowest entry index).
BoundaryDecision boundary_check(const BackupStore& store, const BoundsTable& table,
                                const Eigen::VectorXd& x);

// Cheap tiered variant: Continue iff an interior entry (min_i l >= eta_u) is
// within d_u and some interior-or-marginal entry is within d_l. The backup is
// the nearest interior-or-marginal entry; with both tiers empty it falls back
// to the exact rule's highest-margin entry.
BoundaryDecision boundary_check_tiered(const BackupStore& store, const BoundsTable& table,
                                       const Eigen::VectorXd& x, const TierSpec& tiers);

// If the store exceeds n_max entries, keep a sample of m drawn without
// replacement with weights exp(-(min_i l)^2); otherwise identity.
BackupStore subset_select(const BackupStore& store, const BoundsTable& table, int n_max, int m,
                          std::mt19937_64& rng);

// Membership test for the safe-state set; equivalent to boundary_check
// returning Continue.
bool safe_state_contains(const BackupStore& store, const BoundsTable& table,
                         const Eigen::VectorXd& x);

}  // namespace gso
