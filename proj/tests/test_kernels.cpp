#include <catch2/catch_amalgamated.hpp>

#include "mchjm/kernels.hpp"
#include "oracle_utils.hpp"

#include <random>

using namespace mchjm;

namespace {

WgParams table3_wg() {
    return WgParams::two_factor(0.0073, 4.7344, 0.0059, 0.0411, 0.1581, 0.8894, -0.8577, 1.3160,
                                1.3327, 0.5900);
}

WgParams random_params(std::mt19937& rng) {
    std::uniform_real_distribution<double> lam(0.0, 5.0), hv(0.001, 0.08), ev(0.0, 1.5),
        rv(-0.95, 0.95), b0(0.2, 2.5), b1(0.0, 3.0), b2(0.1, 2.0);
    const double l1 = lam(rng);
    return WgParams::two_factor(l1, l1 + 0.01 + lam(rng), hv(rng), hv(rng), ev(rng), ev(rng),
                                rv(rng), b0(rng), b1(rng), b2(rng));
}

} // namespace

TEST_CASE("epsilon hump") {
    const WgParams p = table3_wg();
    REQUIRE(p.epsilon(0.0) == Catch::Approx(1.3160).epsilon(1e-15));
    REQUIRE(p.epsilon(200.0) == Catch::Approx(1.0).margin(1e-12));
    for (double t = 0.0; t < 50.0; t += 0.37) REQUIRE(p.epsilon(t) > 0.0);
}

TEST_CASE("kernel g") {
    const WgParams p = table3_wg();
    const VolKernel k(p);
    REQUIRE(k.g(0, 2.0, 2.0) == 1.0);
    REQUIRE(k.g(0, 1.0, 11.0) == Catch::Approx(std::exp(-0.073)).epsilon(1e-15));
    REQUIRE_THROWS_AS(k.g(0, 2.0, 1.0), std::domain_error);

    const WgParams p0 = WgParams::two_factor(0.0, 1.0, 0.01, 0.01, 0.0, 0.0, 0.0, 1.0, 0.5, 1.0);
    const VolKernel k0(p0);
    for (double u : {0.0, 1.0, 30.0}) REQUIRE(k0.g(0, 0.0, u) == 1.0);
}

TEST_CASE("kernel G0 matches quadrature of g") {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> tt(0.0, 10.0);
    for (int it = 0; it < 25; ++it) {
        const WgParams p = random_params(rng);
        const VolKernel k(p);
        const double t = tt(rng);
        const double T0 = t + tt(rng), T1 = T0 + tt(rng);
        for (int i = 0; i < 2; ++i) {
            const double ref =
                oracle::integrate([&](double y) { return k.g(i, t, y); }, T0, T1, 1e-14);
            REQUIRE(k.G0_component(i, t, T0, T1) == Catch::Approx(ref).epsilon(1e-10).margin(1e-13));
        }
    }
    // flat kernel and empty interval
    const WgParams pz = WgParams::two_factor(0.0, 1e-9, 0.01, 0.01, 0.0, 0.0, 0.0, 1.0, 0.5, 1.0);
    const VolKernel kz(pz);
    REQUIRE(kz.G0_component(0, 0.0, 1.0, 4.0) == Catch::Approx(3.0).epsilon(1e-15));
    REQUIRE(kz.G0_component(1, 0.0, 1.0, 4.0) == Catch::Approx(3.0).epsilon(1e-8));
    REQUIRE(kz.G0_component(0, 0.0, 2.0, 2.0) == 0.0);
    REQUIRE_THROWS_AS(kz.G0_component(0, 1.0, 0.5, 2.0), std::domain_error);
}

TEST_CASE("kernel G reduces to G0 when the tenor weighting is trivial") {
    const WgParams p = table3_wg();
    const VolKernel k(p);
    SECTION("eta = 0") {
        WgParams p0 = p;
        p0.eta = {0.0, 0.0};
        p0.finalize();
        const VolKernel k0(p0);
        const Eigen::VectorXd a = k0.G(0.5, 2.0, 2.5, 2.5, Tenor{6});
        const Eigen::VectorXd b = k0.G0(0.5, 2.0, 2.5);
        REQUIRE((a - b).lpNorm<Eigen::Infinity>() == 0.0);
    }
    SECTION("x = 0 boundary (q(u;u,0) = 1)") {
        const Eigen::VectorXd a = k.G(0.5, 2.0, 2.5, 2.5, Tenor{0});
        const Eigen::VectorXd b = k.G0(0.5, 2.0, 2.5);
        REQUIRE((a - b).lpNorm<Eigen::Infinity>() == 0.0);
    }
    SECTION("Table 3 eta_1 damping factor at x = 6M") {
        const Eigen::VectorXd a = k.G(0.0, 2.0, 2.5, 2.5, Tenor{6});
        const Eigen::VectorXd b = k.G0(0.0, 2.0, 2.5);
        REQUIRE(a(0) / b(0) == Catch::Approx(std::exp(-0.07905)).epsilon(1e-12));
        REQUIRE(a(0) / b(0) == Catch::Approx(0.92400).epsilon(1e-4));
    }
}

TEST_CASE("Y solves its ODE") {
    SECTION("initial condition") {
        const VolKernel k(table3_wg());
        REQUIRE(k.Y(0.0).norm() == 0.0);
    }
    SECTION("constant volatility closed form") {
        WgParams p = WgParams::two_factor(0.3, 1.7, 0.02, 0.05, 0.0, 0.0, -0.4, 1.0, 0.0, 1.0);
        const VolKernel k(p);  // beta0=1, beta1=0 -> eps == 1
        for (double t : {0.5, 2.0, 9.0}) {
            const Eigen::MatrixXd y = k.Y(t);
            for (int i = 0; i < 2; ++i)
                for (int j = 0; j < 2; ++j) {
                    const double L = p.lambda[i] + p.lambda[j];
                    const double ref = p.h[i] * p.h[j] * p.rho(i, j) * (1.0 - std::exp(-L * t)) / L;
                    REQUIRE(y(i, j) == Catch::Approx(ref).epsilon(1e-13));
                }
        }
    }
    SECTION("generic parameters match RK4 integration") {
        std::mt19937 rng(5);
        for (int trial = 0; trial < 6; ++trial) {
            const WgParams p = trial == 0 ? table3_wg() : random_params(rng);
            const VolKernel k(p);
            const auto ode = [&](double t, const Eigen::MatrixXd& y) {
                Eigen::MatrixXd d(2, 2);
                const double e2 = p.epsilon(t) * p.epsilon(t);
                for (int i = 0; i < 2; ++i)
                    for (int j = 0; j < 2; ++j)
                        d(i, j) = e2 * p.h[i] * p.h[j] * p.rho(i, j) -
                                  (p.lambda[i] + p.lambda[j]) * y(i, j);
                return d;
            };
            const double T = 4.0;
            const Eigen::MatrixXd ref = oracle::rk4(ode, Eigen::MatrixXd::Zero(2, 2), 0.0, T, 4000);
            REQUIRE((k.Y(T) - ref).lpNorm<Eigen::Infinity>() < 1e-8);
        }
    }
}

TEST_CASE("eps2 decay integral matches adaptive quadrature") {
    std::mt19937 rng(9);
    std::uniform_real_distribution<double> dd(0.0, 10.0), tt(0.0, 12.0);
    for (int it = 0; it < 20; ++it) {
        const WgParams p = random_params(rng);
        const VolKernel k(p);
        const double s = tt(rng), u = s + tt(rng), L = dd(rng);
        const double ref = oracle::integrate(
            [&](double y) {
                const double e = p.epsilon(y);
                return e * e * std::exp(-L * (u - y));
            },
            s, u, 1e-14);
        REQUIRE(k.eps2_decay_integral(L, s, u) == Catch::Approx(ref).epsilon(1e-10).margin(1e-13));
    }
}

TEST_CASE("covariance integral is symmetric positive semidefinite") {
    std::mt19937 rng(13);
    for (int it = 0; it < 10; ++it) {
        const WgParams p = random_params(rng);
        const VolKernel k(p);
        const Eigen::MatrixXd v = k.cov_integral(0.3, 1.7);
        REQUIRE((v - v.transpose()).norm() == 0.0);
        const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(v);
        REQUIRE(es.eigenvalues().minCoeff() > -1e-18);
    }
}

TEST_CASE("parameter validation") {
    REQUIRE_THROWS_AS(WgParams::two_factor(0.5, 0.4, 0.01, 0.01, 0, 0, 0.0, 1, 1, 1),
                      std::invalid_argument);  // ordering
    REQUIRE_THROWS_AS(WgParams::two_factor(-0.1, 0.4, 0.01, 0.01, 0, 0, 0.0, 1, 1, 1),
                      std::invalid_argument);  // negative lambda
    REQUIRE_THROWS_AS(WgParams::two_factor(0.1, 0.4, 0.0, 0.01, 0, 0, 0.0, 1, 1, 1),
                      std::invalid_argument);  // h must be positive
    REQUIRE_THROWS_AS(WgParams::two_factor(0.1, 0.4, 0.01, 0.01, 0, 0, 1.5, 1, 1, 1),
                      std::invalid_argument);  // |rho| > 1 not PSD
    REQUIRE_THROWS_AS(WgParams::two_factor(0.1, 0.4, 0.01, 0.01, 0, 0, 0.0, 0.0, 1, 1),
                      std::invalid_argument);  // beta0
    // R is the pseudo square root: R R^T == rho to 1e-12
    std::mt19937 rng(17);
    for (int it = 0; it < 10; ++it) {
        const WgParams p = random_params(rng);
        REQUIRE((p.R * p.R.transpose() - p.rho).lpNorm<Eigen::Infinity>() < 1e-12);
        REQUIRE(p.R(0, 1) == 0.0);  // lower triangular
    }
}

TEST_CASE("shift rule and qhat overrides") {
    ShiftRule s;
    REQUIRE(s.kappa(5.0, Tenor{3}) == Catch::Approx(4.0));
    REQUIRE(s.kappa(5.0, Tenor{6}) == Catch::Approx(2.0));
    s.overrides.push_back({Tenor{6}, 2.0, 10.0, 3.5});
    REQUIRE(s.kappa(5.0, Tenor{6}) == 3.5);
    REQUIRE(s.kappa(15.0, Tenor{6}) == Catch::Approx(2.0));
    REQUIRE(s.kappa(5.0, Tenor{3}) == Catch::Approx(4.0));
    // x kappa(T,x) -> 1 as x -> 0 for the default rule
    for (int m : {1, 3, 6, 12}) REQUIRE(Tenor{m}.years() * s.kappa(50.0, Tenor{m}) == Catch::Approx(1.0));

    WgParams p = table3_wg();
    p.qhat.overrides.push_back({Tenor{6}, 0.0, 3.0, 1.25});
    p.finalize();
    const VolKernel k(p);
    const Eigen::VectorXd inside = k.G(0.0, 2.0, 2.5, 2.5, Tenor{6});
    const Eigen::VectorXd outside = k.G(0.0, 4.0, 4.5, 4.5, Tenor{6});
    const Eigen::VectorXd base_in = k.G0(0.0, 2.0, 2.5);
    const Eigen::VectorXd base_out = k.G0(0.0, 4.0, 4.5);
    REQUIRE(inside(0) / base_in(0) == Catch::Approx(1.25 * std::exp(-0.1581 * 0.5)).epsilon(1e-12));
    REQUIRE(outside(0) / base_out(0) == Catch::Approx(std::exp(-0.1581 * 0.5)).epsilon(1e-12));
}

TEST_CASE("three-factor kernels work") {
    Eigen::MatrixXd rho(3, 3);
    rho << 1.0, -0.3, 0.1, -0.3, 1.0, 0.2, 0.1, 0.2, 1.0;
    const WgParams p({0.01, 0.8, 3.0}, {0.004, 0.02, 0.05}, {0.1, 0.4, 1.0}, rho, 1.2, 0.9, 0.7);
    const VolKernel k(p);
    REQUIRE(k.G0(0.0, 1.0, 2.0).size() == 3);
    REQUIRE(k.Y(2.0).rows() == 3);
    REQUIRE((p.R * p.R.transpose() - rho).lpNorm<Eigen::Infinity>() < 1e-12);
}
