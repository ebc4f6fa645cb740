#pragma once

#include <Eigen/Dense>
#include <vector>

#include "gso/gp.hpp"
#include "gso/grid.hpp"

namespace gso {

struct BetaSchedule {
    double beta_sqrt = 3.0;  // constant across iterations
};

// Contained confidence intervals over (grid point, output index). Column 0 is
// the objective, columns 1..q the constraints. Lower entries never decrease
// and upper entries never increase across updates; +-inf are valid sentinels.
struct BoundsTable {
    Eigen::MatrixXd lower;
    Eigen::MatrixXd upper;
    int q = 0;
    int contradictions = 0;  // entries where the intersection became empty

    double width(Eigen::Index a, int i) const {
        const double l = lower(a, i), u = upper(a, i);
        if (!std::isfinite(l) || !std::isfinite(u))
            return std::numeric_limits<double>::infinity();
        return u - l;
    }
};

// Constraint columns start at 0 on the safe seed and -inf elsewhere; the
// objective column starts at -inf; all uppers start at +inf.
BoundsTable bounds_init(const ParamGrid& grid, const std::vector<int>& safe_seed, int q);

// Entrywise l <- max(l, mu - b*sigma), u <- min(u, mu + b*sigma) for all
// outputs. An empty intersection (l > u) is clamped to the midpoint and
// counted in `contradictions`.
BoundsTable bounds_update(const BoundsTable& table, const std::vector<GpModel>& models,
                          const ParamGrid& grid, const BetaSchedule& beta);

// Intersects the constraint intervals of one row with [0, inf).
BoundsTable ge_clamp(const BoundsTable& table, int a_index, int q);

double width(const BoundsTable& table, Eigen::Index a_index, int i);

}  // namespace gso
