#include "gso/gp.hpp"

#include <cmath>
#include <stdexcept>

namespace gso {

namespace {
constexpr double kJitterFactor = 1e-10;
}

GpModel gp_fit(const KernelSpec& kernel, double noise_std,
               const std::vector<Eigen::VectorXd>& inputs,
               const Eigen::VectorXd& targets) {
    if (static_cast<Eigen::Index>(inputs.size()) != targets.size())
        throw std::invalid_argument("gp_fit: inputs/targets size mismatch");
    if (!(noise_std > 0.0)) throw std::invalid_argument("gp_fit: noise_std must be > 0");

    GpModel m;
    m.kernel_ = kernel;
    m.noise_std_ = noise_std;
    m.inputs_ = inputs;
    m.targets_ = targets;

    const Eigen::Index n = targets.size();
    Eigen::MatrixXd K = kernel_gram(kernel, inputs);
    K.diagonal().array() += noise_std * noise_std + kJitterFactor * kernel.output_scale;
    Eigen::LLT<Eigen::MatrixXd> llt(K);
    if (llt.info() != Eigen::Success)
        throw std::runtime_error("gp_fit: Cholesky factorization failed");
    m.L_ = llt.matrixL();
    m.alpha_ = n > 0 ? m.L_.triangularView<Eigen::Lower>().solve(targets)
                     : Eigen::VectorXd(0);
    return m;
}

GpModel gp_add(const GpModel& model, const Eigen::VectorXd& input, double target) {
    const Eigen::Index n = model.size();
    if (n == 0) {
        std::vector<Eigen::VectorXd> inputs{input};
        Eigen::VectorXd targets(1);
        targets[0] = target;
        return gp_fit(model.kernel_, model.noise_std_, inputs, targets);
    }

    GpModel m = model;
    m.inputs_.push_back(input);
    m.targets_.conservativeResize(n + 1);
    m.targets_[n] = target;

    const Eigen::VectorXd k = kernel_cross(m.kernel_, model.inputs_, input);
    const Eigen::VectorXd z = model.L_.triangularView<Eigen::Lower>().solve(k);
    const double diag = m.kernel_.output_scale + m.noise_std_ * m.noise_std_ +
                        kJitterFactor * m.kernel_.output_scale;
    const double d2 = diag - z.squaredNorm();
    if (!(d2 > 0.0))
        throw std::runtime_error("gp_add: rank-1 extension lost positive definiteness");
    const double d = std::sqrt(d2);

    m.L_.conservativeResize(n + 1, n + 1);
    m.L_.row(n).head(n) = z.transpose();
    m.L_.col(n).head(n).setZero();
    m.L_(n, n) = d;
    m.alpha_.conservativeResize(n + 1);
    m.alpha_[n] = (target - z.dot(model.alpha_)) / d;
    return m;
}

Posterior gp_predict(const GpModel& model, const Eigen::VectorXd& a) {
    Posterior p;
    const double prior_var = model.kernel_.output_scale;
    if (model.size() == 0) {
        if (a.size() != model.kernel_.lengthscales.size() &&
            model.kernel_.lengthscales.size() != 0)
            throw std::invalid_argument("gp_predict: dimension mismatch");
        p.mean = 0.0;
        p.variance = prior_var;
        return p;
    }
    const Eigen::VectorXd k = kernel_cross(model.kernel_, model.inputs_, a);
    const Eigen::VectorXd z = model.L_.triangularView<Eigen::Lower>().solve(k);
    p.mean = z.dot(model.alpha_);
    p.variance = std::max(0.0, prior_var - z.squaredNorm());
    return p;
}

}  // namespace gso
