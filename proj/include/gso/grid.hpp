#pragma once

#include <Eigen/Dense>
#include <vector>

namespace gso {

// Finite discretization of the policy-parameter space. Points are stored in
// row-major order over `shape` (last dimension fastest) when the grid was
// built by make_uniform_grid; `shape` is empty for unstructured point lists,
// in which case neighbor-based helpers are unavailable.
struct ParamGrid {
    std::vector<Eigen::VectorXd> points;
    int dim = 0;
    std::vector<int> shape;

    std::size_t size() const { return points.size(); }
    const Eigen::VectorXd& operator[](std::size_t i) const { return points[i]; }
};

ParamGrid make_uniform_grid(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi,
                            const std::vector<int>& counts);

// Index of the grid point closest (Euclidean) to x; ties by lowest index.
int nearest_grid_index(const ParamGrid& grid, const Eigen::VectorXd& x);

// Connected-component labels over the points where mask != 0, using
// axis-neighbor adjacency on a structured grid. Unmasked points get -1.
// Labels are assigned in increasing order of the lowest member index.
std::vector<int> grid_components(const ParamGrid& grid, const std::vector<std::uint8_t>& mask);

int count_components(const std::vector<int>& labels);

}  // namespace gso
