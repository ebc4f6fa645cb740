#include "gso/confidence.hpp"

#include <limits>
#include <stdexcept>

namespace gso {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

BoundsTable bounds_init(const ParamGrid& grid, const std::vector<int>& safe_seed, int q) {
    if (safe_seed.empty()) throw std::invalid_argument("bounds_init: empty safe seed");
    if (q < 1) throw std::invalid_argument("bounds_init: need at least one constraint");
    BoundsTable t;
    t.q = q;
    const Eigen::Index n = static_cast<Eigen::Index>(grid.size());
    t.lower = Eigen::MatrixXd::Constant(n, q + 1, -kInf);
    t.upper = Eigen::MatrixXd::Constant(n, q + 1, kInf);
    for (int a : safe_seed) {
        if (a < 0 || a >= n) throw std::invalid_argument("bounds_init: seed index out of range");
        for (int i = 1; i <= q; ++i) t.lower(a, i) = 0.0;
    }
    return t;
}

BoundsTable bounds_update(const BoundsTable& table, const std::vector<GpModel>& models,
                          const ParamGrid& grid, const BetaSchedule& beta) {
    if (static_cast<int>(models.size()) != table.q + 1)
        throw std::invalid_argument("bounds_update: need one model per output index");
    BoundsTable t = table;
    const Eigen::Index n = t.lower.rows();
    for (int i = 0; i <= t.q; ++i) {
        for (Eigen::Index a = 0; a < n; ++a) {
            const Posterior p = gp_predict(models[i], grid[a]);
            const double half = beta.beta_sqrt * std::sqrt(p.variance);
            double l = std::max(t.lower(a, i), p.mean - half);
            double u = std::min(t.upper(a, i), p.mean + half);
            if (l > u) {
                const double mid = 0.5 * (l + u);
                l = u = mid;
                ++t.contradictions;
            }
            t.lower(a, i) = l;
            t.upper(a, i) = u;
        }
    }
    return t;
}

BoundsTable ge_clamp(const BoundsTable& table, int a_index, int q) {
    BoundsTable t = table;
    for (int i = 1; i <= q; ++i)
        t.lower(a_index, i) = std::max(t.lower(a_index, i), 0.0);
    return t;
}

double width(const BoundsTable& table, Eigen::Index a_index, int i) {
    return table.width(a_index, i);
}

}  // namespace gso
