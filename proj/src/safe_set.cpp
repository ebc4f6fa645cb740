#include "gso/safe_set.hpp"

#include <stdexcept>

namespace gso {

SafeSet make_safe_set(std::size_t grid_size, const std::vector<int>& seed, double lipschitz_a) {
    if (seed.empty()) throw std::invalid_argument("make_safe_set: empty seed");
    SafeSet s;
    s.member.assign(grid_size, 0);
    s.lipschitz_a = lipschitz_a;
    for (int a : seed) {
        if (a < 0 || static_cast<std::size_t>(a) >= grid_size)
            throw std::invalid_argument("make_safe_set: seed index out of range");
        s.member[a] = 1;
    }
    return s;
}

SafeSet safe_set_expand(const SafeSet& s, const BoundsTable& table, const ParamGrid& grid) {
    SafeSet out = s;
    const std::size_t n = grid.size();
    std::vector<int> members;
    for (std::size_t i = 0; i < n; ++i)
        if (s.member[i]) members.push_back(static_cast<int>(i));

    for (std::size_t a = 0; a < n; ++a) {
        if (s.member[a]) continue;
        bool all_constraints = true;
        for (int i = 1; i <= table.q && all_constraints; ++i) {
            bool certified = false;
            for (int ap : members) {
                const double l = table.lower(ap, i);
                if (!std::isfinite(l)) continue;
                if (l - s.lipschitz_a * (grid[a] - grid[ap]).norm() >= 0.0) {
                    certified = true;
                    break;
                }
            }
            all_constraints = certified;
        }
        if (all_constraints) out.member[a] = 1;
    }
    return out;
}

std::vector<int> compute_expanders(const SafeSet& s, const BoundsTable& table,
                                   const ParamGrid& grid) {
    const std::size_t n = grid.size();
    std::vector<int> outside;
    for (std::size_t i = 0; i < n; ++i)
        if (!s.member[i]) outside.push_back(static_cast<int>(i));

    std::vector<int> expanders;
    if (outside.empty()) return expanders;
    for (std::size_t a = 0; a < n; ++a) {
        if (!s.member[a]) continue;
        bool found = false;
        for (int ao : outside) {
            const double dist = (grid[a] - grid[ao]).norm();
            for (int i = 1; i <= table.q; ++i) {
                const double u = table.upper(a, i);
                if (std::isfinite(u) && u - s.lipschitz_a * dist >= 0.0) {
                    found = true;
                    break;
                }
            }
            if (found) break;
        }
        if (found) expanders.push_back(static_cast<int>(a));
    }
    return expanders;
}

std::vector<int> compute_maximizers(const SafeSet& s, const BoundsTable& table) {
    double best_l = -std::numeric_limits<double>::infinity();
    for (std::size_t a = 0; a < s.member.size(); ++a)
        if (s.member[a]) best_l = std::max(best_l, table.lower(static_cast<int>(a), 0));

    std::vector<int> maximizers;
    for (std::size_t a = 0; a < s.member.size(); ++a)
        if (s.member[a] && table.upper(static_cast<int>(a), 0) >= best_l)
            maximizers.push_back(static_cast<int>(a));
    return maximizers;
}

namespace {

double candidate_width(const BoundsTable& table, int a) {
    double w = 0.0;
    for (int i = 0; i <= table.q; ++i) w = std::max(w, table.width(a, i));
    return w;
}

}  // namespace

int lse_acquire(const LseSets& sets, const BoundsTable& table) {
    int best = -1;
    double best_w = -1.0;
    auto consider = [&](int a) {
        const double w = candidate_width(table, a);
        if (w > best_w || (w == best_w && best >= 0 && a < best)) {
            best_w = w;
            best = a;
        }
    };
    for (int a : sets.expanders) consider(a);
    for (int a : sets.maximizers) consider(a);
    return best;
}

bool lse_converged(const LseSets& sets, const BoundsTable& table, const SafeSet& s_prev,
                   const SafeSet& s_now, double epsilon) {
    if (!(s_prev == s_now)) return false;
    double max_w = 0.0;
    for (int a : sets.expanders) max_w = std::max(max_w, candidate_width(table, a));
    for (int a : sets.maximizers) max_w = std::max(max_w, candidate_width(table, a));
    return max_w < epsilon;
}

std::vector<std::uint8_t> reachability_closure(const ParamGrid& grid,
                                               const Eigen::MatrixXd& true_g,
                                               const std::vector<int>& seed, double epsilon,
                                               double lipschitz_a) {
    const std::size_t n = grid.size();
    std::vector<std::uint8_t> in(n, 0);
    for (int a : seed) in[a] = 1;

    bool changed = true;
    while (changed) {
        changed = false;
        for (std::size_t a = 0; a < n; ++a) {
            if (in[a]) continue;
            for (std::size_t ap = 0; ap < n; ++ap) {
                if (!in[ap]) continue;
                const double dist = (grid[a] - grid[ap]).norm();
                bool all = true;
                for (Eigen::Index i = 0; i < true_g.cols(); ++i) {
                    if (true_g(ap, i) - epsilon - lipschitz_a * dist < 0.0) {
                        all = false;
                        break;
                    }
                }
                if (all) {
                    in[a] = 1;
                    changed = true;
                    break;
                }
            }
        }
    }
    return in;
}

}  // namespace gso
