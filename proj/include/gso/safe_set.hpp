#pragma once

#include <vector>

#include "gso/confidence.hpp"
#include "gso/grid.hpp"

namespace gso {

// Set of grid parameters certified safe via Lipschitz propagation of the
// pessimistic constraint bounds. Grows monotonically.
struct SafeSet {
    std::vector<std::uint8_t> member;
    double lipschitz_a = 1.0;

    std::size_t count() const {
        std::size_t c = 0;
        for (auto m : member) c += m != 0;
        return c;
    }
    bool operator==(const SafeSet& o) const { return member == o.member; }
};

SafeSet make_safe_set(std::size_t grid_size, const std::vector<int>& seed, double lipschitz_a);

struct LseSets {
    std::vector<int> expanders;
    std::vector<int> maximizers;
};

// One application of the Lipschitz expansion rule against the previous safe
// set: a joins iff for every constraint some current member certifies it.
SafeSet safe_set_expand(const SafeSet& s, const BoundsTable& table, const ParamGrid& grid);

// Members whose optimistic constraint value could certify at least one
// outside parameter for at least one constraint index.
std::vector<int> compute_expanders(const SafeSet& s, const BoundsTable& table,
                                   const ParamGrid& grid);

// Members whose optimistic objective reaches the best pessimistic objective.
std::vector<int> compute_maximizers(const SafeSet& s, const BoundsTable& table);

// Most uncertain candidate (max width over all output indices, objective
// included) among expanders and maximizers; -1 if both are empty. Ties by
// lowest grid index.
int lse_acquire(const LseSets& sets, const BoundsTable& table);

// True iff every candidate width is below epsilon and the safe set did not
// change; an empty candidate set counts as converged.
bool lse_converged(const LseSets& sets, const BoundsTable& table, const SafeSet& s_prev,
                   const SafeSet& s_now, double epsilon);

// Brute-force fixpoint of the one-step epsilon-precision reachability
// operator on the true constraint table (grid rows x q columns). Test oracle.
std::vector<std::uint8_t> reachability_closure(const ParamGrid& grid,
                                               const Eigen::MatrixXd& true_g,
                                               const std::vector<int>& seed, double epsilon,
                                               double lipschitz_a);

}  // namespace gso
