#pragma once

#include <Eigen/Dense>
#include <vector>

#include "gso/kernel.hpp"

namespace gso {

struct Posterior {
    double mean = 0.0;
    double variance = 0.0;
};

// Exact zero-mean GP regression. Immutable: gp_add returns a new model built
// by rank-1 extension of the Cholesky factor of K + (sigma^2 + jitter) I.
class GpModel {
  public:
    GpModel() = default;

    const KernelSpec& kernel() const { return kernel_; }
    double noise_std() const { return noise_std_; }
    Eigen::Index size() const { return targets_.size(); }
    const std::vector<Eigen::VectorXd>& inputs() const { return inputs_; }
    const Eigen::VectorXd& targets() const { return targets_; }
    const Eigen::MatrixXd& factor() const { return L_; }

    friend GpModel gp_fit(const KernelSpec& kernel, double noise_std,
                          const std::vector<Eigen::VectorXd>& inputs,
                          const Eigen::VectorXd& targets);
    friend GpModel gp_add(const GpModel& model, const Eigen::VectorXd& input, double target);
    friend Posterior gp_predict(const GpModel& model, const Eigen::VectorXd& a);

  private:
    KernelSpec kernel_;
    double noise_std_ = 1.0;
    std::vector<Eigen::VectorXd> inputs_;
    Eigen::VectorXd targets_;
    Eigen::MatrixXd L_;      // lower Cholesky factor
    Eigen::VectorXd alpha_;  // L^{-1} targets, cached for prediction
};

GpModel gp_fit(const KernelSpec& kernel, double noise_std,
               const std::vector<Eigen::VectorXd>& inputs,
               const Eigen::VectorXd& targets);

GpModel gp_add(const GpModel& model, const Eigen::VectorXd& input, double target);

Posterior gp_predict(const GpModel& model, const Eigen::VectorXd& a);

}  // namespace gso
