#include "gso/grid.hpp"

#include <limits>
#include <queue>
#include <stdexcept>

namespace gso {

ParamGrid make_uniform_grid(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi,
                            const std::vector<int>& counts) {
    const int d = static_cast<int>(lo.size());
    if (hi.size() != d || static_cast<int>(counts.size()) != d || d < 1)
        throw std::invalid_argument("make_uniform_grid: dimension mismatch");
    std::size_t total = 1;
    for (int c : counts) {
        if (c < 1) throw std::invalid_argument("make_uniform_grid: counts must be >= 1");
        total *= static_cast<std::size_t>(c);
    }
    ParamGrid grid;
    grid.dim = d;
    grid.shape = counts;
    grid.points.reserve(total);
    std::vector<int> idx(d, 0);
    for (std::size_t n = 0; n < total; ++n) {
        Eigen::VectorXd p(d);
        for (int k = 0; k < d; ++k) {
            p[k] = counts[k] == 1 ? lo[k]
                                  : lo[k] + (hi[k] - lo[k]) * idx[k] / (counts[k] - 1);
        }
        grid.points.push_back(std::move(p));
        for (int k = d - 1; k >= 0; --k) {
            if (++idx[k] < counts[k]) break;
            idx[k] = 0;
        }
    }
    return grid;
}

int nearest_grid_index(const ParamGrid& grid, const Eigen::VectorXd& x) {
    int best = -1;
    double best_d = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        double d = (grid.points[i] - x).norm();
        if (d < best_d) {
            best_d = d;
            best = static_cast<int>(i);
        }
    }
    return best;
}

std::vector<int> grid_components(const ParamGrid& grid, const std::vector<std::uint8_t>& mask) {
    if (grid.shape.empty())
        throw std::invalid_argument("grid_components: grid has no structure");
    const int d = grid.dim;
    std::vector<std::size_t> strides(d, 1);
    for (int k = d - 2; k >= 0; --k)
        strides[k] = strides[k + 1] * static_cast<std::size_t>(grid.shape[k + 1]);

    std::vector<int> label(grid.size(), -1);
    int next = 0;
    for (std::size_t start = 0; start < grid.size(); ++start) {
        if (!mask[start] || label[start] >= 0) continue;
        std::queue<std::size_t> frontier;
        frontier.push(start);
        label[start] = next;
        while (!frontier.empty()) {
            std::size_t i = frontier.front();
            frontier.pop();
            std::size_t rem = i;
            for (int k = 0; k < d; ++k) {
                std::size_t coord = rem / strides[k];
                rem %= strides[k];
                if (coord > 0) {
                    std::size_t j = i - strides[k];
                    if (mask[j] && label[j] < 0) { label[j] = next; frontier.push(j); }
                }
                if (coord + 1 < static_cast<std::size_t>(grid.shape[k])) {
                    std::size_t j = i + strides[k];
                    if (mask[j] && label[j] < 0) { label[j] = next; frontier.push(j); }
                }
            }
        }
        ++next;
    }
    return label;
}

int count_components(const std::vector<int>& labels) {
    int maxl = -1;
    for (int l : labels) maxl = std::max(maxl, l);
    return maxl + 1;
}

}  // namespace gso
