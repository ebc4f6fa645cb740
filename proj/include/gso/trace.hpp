#pragma once

#include <Eigen/Dense>
#include <optional>
#include <vector>

namespace gso {

// One episode sampled at the environment's step interval. applied_params[k]
// is the parameter driving the transition x(k) -> x(k+1); switched_at, when
// present, is the first k whose transition ran under the backup parameter.
struct RolloutTrace {
    std::vector<Eigen::VectorXd> states;
    std::vector<double> rewards;                   // stage reward at each state
    std::vector<Eigen::VectorXd> constraint_values;  // gbar at each state
    std::optional<int> switched_at;
    std::vector<int> applied_params;

    int steps() const { return static_cast<int>(applied_params.size()); }
};

}  // namespace gso
