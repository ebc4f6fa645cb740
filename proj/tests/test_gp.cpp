#include <doctest.h>

#include <Eigen/Dense>
#include <random>

#include "gso/gp.hpp"

using namespace gso;

namespace {

KernelSpec kernel_of(KernelFamily fam, int dim, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> uls(0.3, 2.0), uscale(0.5, 2.0);
    KernelSpec k;
    k.family = fam;
    k.lengthscales = Eigen::VectorXd::NullaryExpr(dim, [&](Eigen::Index) { return uls(rng); });
    k.output_scale = uscale(rng);
    return k;
}

// Posterior by direct dense solves of the standard equations,
// mu = k*ᵀ (K + cI)⁻¹ y, var = k(x,x) − k*ᵀ (K + cI)⁻¹ k*, on the same
// regularized system the model defines (c = sigma² plus its fixed jitter).
Posterior dense_posterior(const KernelSpec& kernel, double noise_std,
                          const std::vector<Eigen::VectorXd>& X, const Eigen::VectorXd& y,
                          const Eigen::VectorXd& q) {
    const Eigen::Index n = y.size();
    Eigen::MatrixXd K = kernel_gram(kernel, X);
    K.diagonal().array() += noise_std * noise_std + 1e-10 * kernel.output_scale;
    Eigen::VectorXd ks = kernel_cross(kernel, X, q);
    Eigen::LDLT<Eigen::MatrixXd> ldlt(K);
    Posterior p;
    p.mean = n ? ks.dot(ldlt.solve(y)) : 0.0;
    p.variance = kernel.output_scale - (n ? ks.dot(ldlt.solve(ks)) : 0.0);
    return p;
}

}  // namespace

TEST_CASE("empty model predicts the prior") {
    KernelSpec k;
    k.lengthscales = Eigen::VectorXd::Constant(1, 1.0);
    k.output_scale = 1.7;
    GpModel gp = gp_fit(k, 0.1, {}, Eigen::VectorXd());
    Posterior p = gp_predict(gp, Eigen::VectorXd::Constant(1, 0.3));
    CHECK(p.mean == 0.0);
    CHECK(p.variance == doctest::Approx(1.7));
}

TEST_CASE("posterior matches dense evaluation on randomized instances") {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<int> un(1, 30), udim(1, 3);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> unoise(1e-3, 0.3);

    for (int rep = 0; rep < 50; ++rep) {
        const int dim = udim(rng), n = un(rng);
        const KernelFamily fam =
            rep % 2 ? KernelFamily::Matern32 : KernelFamily::SquaredExponential;
        KernelSpec k = kernel_of(fam, dim, rng);
        const double noise = unoise(rng);

        std::vector<Eigen::VectorXd> X;
        Eigen::VectorXd y(n);
        for (int i = 0; i < n; ++i) {
            X.push_back(Eigen::VectorXd::NullaryExpr(dim, [&](Eigen::Index) { return gauss(rng); }));
            y[i] = gauss(rng);
        }
        GpModel gp = gp_fit(k, noise, X, y);

        for (int t = 0; t < 5; ++t) {
            Eigen::VectorXd q =
                Eigen::VectorXd::NullaryExpr(dim, [&](Eigen::Index) { return gauss(rng); });
            Posterior got = gp_predict(gp, q);
            Posterior want = dense_posterior(k, noise, X, y, q);
            CHECK(std::abs(got.mean - want.mean) <= 1e-8);
            CHECK(std::abs(got.variance - want.variance) <= 1e-8);
        }
    }
}

TEST_CASE("incremental extension equals a batch refit") {
    std::mt19937_64 rng(11);
    std::normal_distribution<double> gauss(0.0, 1.0);
    KernelSpec k = kernel_of(KernelFamily::SquaredExponential, 2, rng);

    std::vector<Eigen::VectorXd> X;
    Eigen::VectorXd y(0);
    GpModel inc = gp_fit(k, 0.05, X, y);
    for (int i = 0; i < 12; ++i) {
        Eigen::VectorXd x =
            Eigen::VectorXd::NullaryExpr(2, [&](Eigen::Index) { return gauss(rng); });
        const double target = gauss(rng);
        inc = gp_add(inc, x, target);
        X.push_back(x);
        y.conservativeResize(y.size() + 1);
        y[y.size() - 1] = target;
    }
    GpModel batch = gp_fit(k, 0.05, X, y);

    for (int t = 0; t < 10; ++t) {
        Eigen::VectorXd q =
            Eigen::VectorXd::NullaryExpr(2, [&](Eigen::Index) { return gauss(rng); });
        Posterior a = gp_predict(inc, q);
        Posterior b = gp_predict(batch, q);
        CHECK(std::abs(a.mean - b.mean) <= 1e-9);
        CHECK(std::abs(a.variance - b.variance) <= 1e-9);
    }
    CHECK(inc.size() == 12);
}

TEST_CASE("repeated inputs stay numerically stable and shrink variance") {
    KernelSpec k;
    k.lengthscales = Eigen::VectorXd::Constant(1, 1.0);
    k.output_scale = 1.0;
    Eigen::VectorXd x = Eigen::VectorXd::Constant(1, 0.5);

    GpModel gp = gp_fit(k, 0.1, {}, Eigen::VectorXd());
    double prev_var = gp_predict(gp, x).variance;
    for (int i = 0; i < 20; ++i) {
        gp = gp_add(gp, x, 1.0);
        const double var = gp_predict(gp, x).variance;
        CHECK(var < prev_var + 1e-12);
        CHECK(std::isfinite(var));
        prev_var = var;
    }
    // Mean of many consistent observations approaches the observed value.
    CHECK(gp_predict(gp, x).mean == doctest::Approx(1.0).epsilon(0.01));
}
