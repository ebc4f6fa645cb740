#pragma once

#include <Eigen/Dense>
#include <vector>

namespace gso {

enum class KernelFamily { SquaredExponential, Matern32 };

// Stationary kernel with per-dimension lengthscales and prior variance
// output_scale, evaluated on the lengthscale-scaled Euclidean distance.
struct KernelSpec {
    KernelFamily family = KernelFamily::SquaredExponential;
    Eigen::VectorXd lengthscales;
    double output_scale = 1.0;
};

// Lengthscale-scaled Euclidean distance between a and b.
double scaled_distance(const KernelSpec& spec, const Eigen::VectorXd& a,
                       const Eigen::VectorXd& b);

double kernel_eval(const KernelSpec& spec, const Eigen::VectorXd& a,
                   const Eigen::VectorXd& b);

Eigen::MatrixXd kernel_gram(const KernelSpec& spec, const std::vector<Eigen::VectorXd>& pts);

Eigen::VectorXd kernel_cross(const KernelSpec& spec, const std::vector<Eigen::VectorXd>& pts,
                             const Eigen::VectorXd& q);

// Largest scaled distance r with k(r) >= kappa; requires 0 < kappa <= output_scale.
// Closed form for the squared-exponential family, bisection for Matern32.
double distance_from_covariance(const KernelSpec& spec, double kappa);

}  // namespace gso
