#include "gso/kernel.hpp"

#include <cmath>
#include <stdexcept>

namespace gso {

namespace {

double kernel_of_distance(const KernelSpec& spec, double r) {
    switch (spec.family) {
        case KernelFamily::SquaredExponential:
            return spec.output_scale * std::exp(-0.5 * r * r);
        case KernelFamily::Matern32: {
            const double s = std::sqrt(3.0) * r;
            return spec.output_scale * (1.0 + s) * std::exp(-s);
        }
    }
    return 0.0;
}

}  // namespace

double scaled_distance(const KernelSpec& spec, const Eigen::VectorXd& a,
                       const Eigen::VectorXd& b) {
    if (a.size() != b.size() || a.size() != spec.lengthscales.size())
        throw std::invalid_argument("kernel: dimension mismatch");
    double r2 = 0.0;
    for (Eigen::Index k = 0; k < a.size(); ++k) {
        const double d = (a[k] - b[k]) / spec.lengthscales[k];
        r2 += d * d;
    }
    return std::sqrt(r2);
}

double kernel_eval(const KernelSpec& spec, const Eigen::VectorXd& a,
                   const Eigen::VectorXd& b) {
    return kernel_of_distance(spec, scaled_distance(spec, a, b));
}

Eigen::MatrixXd kernel_gram(const KernelSpec& spec, const std::vector<Eigen::VectorXd>& pts) {
    const Eigen::Index n = static_cast<Eigen::Index>(pts.size());
    Eigen::MatrixXd K(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
        K(i, i) = spec.output_scale;
        for (Eigen::Index j = 0; j < i; ++j) {
            const double v = kernel_eval(spec, pts[i], pts[j]);
            K(i, j) = v;
            K(j, i) = v;
        }
    }
    return K;
}

Eigen::VectorXd kernel_cross(const KernelSpec& spec, const std::vector<Eigen::VectorXd>& pts,
                             const Eigen::VectorXd& q) {
    Eigen::VectorXd k(static_cast<Eigen::Index>(pts.size()));
    for (std::size_t i = 0; i < pts.size(); ++i)
        k[static_cast<Eigen::Index>(i)] = kernel_eval(spec, pts[i], q);
    return k;
}

double distance_from_covariance(const KernelSpec& spec, double kappa) {
    if (!(kappa > 0.0) || kappa > spec.output_scale)
        throw std::invalid_argument("distance_from_covariance: kappa out of range");
    if (kappa == spec.output_scale) return 0.0;
    if (spec.family == KernelFamily::SquaredExponential)
        return std::sqrt(-2.0 * std::log(kappa / spec.output_scale));
    // k(r) is strictly decreasing; bracket then bisect.
    double hi = 1.0;
    while (kernel_of_distance(spec, hi) > kappa) hi *= 2.0;
    double lo = 0.0;
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (kernel_of_distance(spec, mid) >= kappa)
            lo = mid;
        else
            hi = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace gso
