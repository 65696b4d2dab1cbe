#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <random>
#include <stdexcept>

#include "doctest.h"
#include "oracles.hpp"
#include "smaflow/constitutive.hpp"
#include "smaflow/errors.hpp"

using namespace smaflow;

namespace {

DevTensor random_dev(std::mt19937& rng, double radius) {
    std::uniform_real_distribution<double> u(-radius, radius);
    return {u(rng), u(rng)};
}

}  // namespace

TEST_CASE("elastic_apply: isotropic law") {
    MaterialParams p;
    p.mu = 1.0;
    p.lambda = 1.0;

    const SymTensor I{1.0, 0.0, 1.0};
    const SymTensor EI = elastic_apply(p, I);
    CHECK(EI.xx == doctest::Approx(4.0));
    CHECK(EI.xy == doctest::Approx(0.0));
    CHECK(EI.yy == doctest::Approx(4.0));

    const DevTensor d{0.3, -0.7};
    const SymTensor Ed = elastic_apply(p, d.as_sym());
    CHECK(Ed.xx == doctest::Approx(2.0 * p.mu * d.a));
    CHECK(Ed.xy == doctest::Approx(2.0 * p.mu * d.b));
    CHECK(Ed.yy == doctest::Approx(-2.0 * p.mu * d.a));

    std::mt19937 rng(11);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    p.mu = 1.7;
    p.lambda = 0.4;
    for (int k = 0; k < 50; ++k) {
        const SymTensor xi{u(rng), u(rng), u(rng)};
        const SymTensor s = elastic_apply(p, xi);
        const double tr = xi.xx + xi.yy;
        CHECK(s.xx == doctest::Approx(2.0 * p.mu * xi.xx + p.lambda * tr).epsilon(1e-14));
        CHECK(s.xy == doctest::Approx(2.0 * p.mu * xi.xy).epsilon(1e-14));
        CHECK(s.yy == doctest::Approx(2.0 * p.mu * xi.yy + p.lambda * tr).epsilon(1e-14));
        CHECK(ddot(s, xi) >= 2.0 * p.mu * ddot(xi, xi) - 1e-12);
    }
}

TEST_CASE("W1_density: zero state and term-by-term oracle") {
    MaterialParams p;
    CHECK(W1_density(p, SymTensor{}, DevTensor{}, 0.0) == doctest::Approx(p.c1 * p.delta));

    // e = z embedding kills the elastic term
    const DevTensor z{0.4, -0.2};
    CHECK(W1_density(p, z.as_sym(), z, 0.0) == doctest::Approx(hardening_H1(p, z).value));

    std::mt19937 rng(12);
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    for (int k = 0; k < 50; ++k) {
        const SymTensor e{u(rng), u(rng), u(rng)};
        const DevTensor z2 = random_dev(rng, 2.0);
        const double gz = std::abs(u(rng));
        const SymTensor d = e - z2.as_sym();
        const double ref =
            0.5 * ddot(elastic_apply(p, d), d) + 0.5 * p.nu * gz + hardening_H1(p, z2).value;
        CHECK(W1_density(p, e, z2, gz) == doctest::Approx(ref).epsilon(1e-14));
    }
}

TEST_CASE("hardening_H1: worked values") {
    MaterialParams p;  // c1 = c2 = c3 = 1, delta = 0.01

    const HardeningEval at0 = hardening_H1(p, DevTensor{});
    CHECK(at0.value == doctest::Approx(p.c1 * p.delta));
    CHECK(at0.grad.a == 0.0);
    CHECK(at0.grad.b == 0.0);

    // |z| = 2: sqrt(4.0001) + 4 + 1^4 / (0.01 * 5)
    const HardeningEval at2 = hardening_H1(p, DevTensor{2.0, 0.0});
    CHECK(at2.value == doctest::Approx(std::sqrt(4.0001) + 4.0 + 20.0).epsilon(1e-15));
    // radial symmetry: same value at any direction with |z| = 2
    const HardeningEval rot = hardening_H1(p, DevTensor{std::sqrt(2.0), std::sqrt(2.0)});
    CHECK(rot.value == doctest::Approx(at2.value).epsilon(1e-14));
}

TEST_CASE("hardening gradients match central differences") {
    MaterialParams p;
    p.c1_hat = 0.3;
    p.c2_hat = 0.2;
    std::mt19937 rng(13);
    auto h1val = [&p](DevTensor z) { return hardening_H1(p, z).value; };
    auto h2val = [&p](DevTensor z) { return hardening_H2(p, z).value; };
    for (int k = 0; k < 100; ++k) {
        const DevTensor z = random_dev(rng, 10.0 / std::sqrt(2.0));
        const DevTensor g1 = hardening_H1(p, z).grad;
        const DevTensor f1 = oracle::fd_gradient(h1val, z);
        CHECK((g1 - f1).norm() <= 1e-6 * std::max(1.0, g1.norm()));
        const DevTensor g2 = hardening_H2(p, z).grad;
        const DevTensor f2 = oracle::fd_gradient(h2val, z);
        CHECK((g2 - f2).norm() <= 1e-6 * std::max(1.0, g2.norm()));
    }
}

TEST_CASE("hardening_H1: coercivity and H2 decoupled case") {
    MaterialParams p;
    std::mt19937 rng(14);
    for (int k = 0; k < 200; ++k) {
        const DevTensor z = random_dev(rng, 8.0);
        const double n2 = z.a * z.a + z.b * z.b;
        CHECK(hardening_H1(p, z).value >= p.c2 * n2);
    }
    // c1_hat = c2_hat = 0 by default: H2 vanishes identically
    const HardeningEval h2 = hardening_H2(p, DevTensor{1.5, -0.5});
    CHECK(h2.value == 0.0);
    CHECK(h2.grad.a == 0.0);
    CHECK(h2.grad.b == 0.0);
}

TEST_CASE("psi: norm, homogeneity, triangle inequality") {
    MaterialParams p;
    p.rho = 1.0;
    CHECK(psi(p, DevTensor{}) == 0.0);
    CHECK(psi(p, DevTensor{3.0, 4.0}) == 5.0);

    std::mt19937 rng(15);
    for (int k = 0; k < 100; ++k) {
        const DevTensor v = random_dev(rng, 3.0);
        CHECK(psi(p, 2.0 * v) == 2.0 * psi(p, v));
        const DevTensor w = random_dev(rng, 3.0);
        CHECK(psi(p, v + w) <= psi(p, v) + psi(p, w) + 1e-15);
    }
}

TEST_CASE("prox_flow: worked values and threshold") {
    MaterialParams p;
    p.eta_z = 1.0;
    p.rho = 1.0;
    const double dt = 0.1;

    const DevTensor stick = prox_flow(p, DevTensor{0.5, 0.0}, dt, 1.0);
    CHECK(stick.a == 0.0);
    CHECK(stick.b == 0.0);

    const DevTensor slip = prox_flow(p, DevTensor{2.0, 0.0}, dt, 1.0);
    CHECK(slip.a == doctest::Approx(0.1).epsilon(1e-15));
    CHECK(slip.b == 0.0);

    // exactly at threshold: no motion
    const DevTensor edge = prox_flow(p, DevTensor{1.0, 0.0}, dt, 1.0);
    CHECK(edge.a == 0.0);

    // the lumped weight cancels
    const DevTensor w2 = prox_flow(p, DevTensor{2.0, 0.0}, dt, 7.3);
    CHECK(w2.a == slip.a);

    CHECK_THROWS_AS(prox_flow(p, DevTensor{1.0, 0.0}, 0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(prox_flow(p, DevTensor{1.0, 0.0}, dt, 0.0), std::invalid_argument);
}

TEST_CASE("prox_flow equals the brute-force minimizer") {
    MaterialParams p;
    p.eta_z = 0.7;
    p.rho = 0.5;
    const double dt = 0.02;
    const double coef = p.eta_z / dt;
    std::mt19937 rng(16);
    for (int k = 0; k < 100; ++k) {
        // spread radii so both regimes and the threshold area are hit
        const DevTensor r = random_dev(rng, k % 3 == 0 ? 0.6 : 5.0);
        const DevTensor mine = prox_flow(p, r, dt, 2.0);
        const DevTensor ref = oracle::brute_force_prox(r, p.rho, coef);
        CHECK((mine - ref).norm() <= 1e-8);
    }
}

TEST_CASE("enthalpy transform: worked values and inverse pair") {
    MaterialParams p;  // cc = 1, beta1 = 4
    CHECK(g_of_theta(p, 0.0) == 0.0);
    CHECK(g_of_theta(p, 1.0) == doctest::Approx(3.75).epsilon(1e-15));
    CHECK(zeta_of_enthalpy(p, 0.0) == 0.0);
    CHECK(zeta_of_enthalpy(p, -2.0) == 0.0);
    CHECK(zeta_of_enthalpy(p, 3.75) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK_THROWS_AS(g_of_theta(p, -0.1), std::domain_error);

    p.cc = 2.3;
    p.beta1 = 5.0;
    std::mt19937 rng(17);
    std::uniform_real_distribution<double> logu(-6.0, 6.0);
    for (int k = 0; k < 1000; ++k) {
        const double theta = std::pow(10.0, logu(rng));
        const double gt = g_of_theta(p, theta);
        CHECK(zeta_of_enthalpy(p, gt) == doctest::Approx(theta).epsilon(1e-10));
        const double v = std::pow(10.0, logu(rng));
        CHECK(g_of_theta(p, zeta_of_enthalpy(p, v)) == doctest::Approx(v).epsilon(1e-10));
    }
}

TEST_CASE("zeta: Lipschitz and growth bounds") {
    MaterialParams p;
    p.cc = 0.8;
    std::mt19937 rng(18);
    std::uniform_real_distribution<double> u(-5.0, 50.0);
    for (int k = 0; k < 10000; ++k) {
        const double a = u(rng), b = u(rng);
        const double dz = std::abs(zeta_of_enthalpy(p, a) - zeta_of_enthalpy(p, b));
        CHECK(dz <= std::abs(a - b) / p.cc * (1.0 + 1e-12));
    }
    // |zeta(v)| <= (beta1 v+ / cc)^(1/beta) for beta in [1, beta1]
    for (double beta : {1.0, 2.0, p.beta1}) {
        for (int k = 0; k < 200; ++k) {
            const double v = std::abs(u(rng));
            const double z = zeta_of_enthalpy(p, v);
            CHECK(z <= std::pow(p.beta1 * v / p.cc, 1.0 / beta) + 1e-12);
        }
    }
}

TEST_CASE("heat capacity and transformed conductivity") {
    MaterialParams p;
    p.cc = 1.3;
    p.beta1 = 4.0;
    CHECK(heat_capacity(p, 0.0) == doctest::Approx(1.3));
    CHECK(heat_capacity(p, 1.0) == doctest::Approx(1.3 * 8.0).epsilon(1e-15));
    CHECK_THROWS_AS(heat_capacity(p, -0.5), std::domain_error);

    p.k0 = 0.5;
    const SymTensor kc = kappa_c(p, SymTensor{1.0, 2.0, 3.0}, DevTensor{4.0, 5.0}, 6.0);
    CHECK(kc.xx == 0.5);
    CHECK(kc.xy == 0.0);
    CHECK(kc.yy == 0.5);
    // kappa = kappa_c * c(theta) recovers k0 c for any state
    const double theta = zeta_of_enthalpy(p, 2.0);
    CHECK(kc.xx * heat_capacity(p, theta) == doctest::Approx(p.k0 * heat_capacity(p, theta)));
}

TEST_CASE("entropy_coefficient: closed form and quadrature paths") {
    MaterialParams p;  // cc = 1, beta1 = 4
    CHECK(entropy_coefficient(p, 1.0) == 0.0);
    CHECK(entropy_coefficient(p, 2.0) ==
          doctest::Approx(std::log(2.0) + 3.0 + 4.5 + 7.0 / 3.0).epsilon(1e-14));
    CHECK_THROWS_AS(entropy_coefficient(p, 0.0), std::domain_error);
    CHECK_THROWS_AS(entropy_coefficient(p, -1.0), std::domain_error);

    double prev = entropy_coefficient(p, 0.05);
    for (double theta = 0.1; theta < 4.0; theta += 0.1) {
        const double s = entropy_coefficient(p, theta);
        CHECK(s > prev);
        prev = s;
    }

    // both beta1 branches against an independent quadrature of c(s)/s
    for (double beta1 : {4.0, 7.0, 4.5, 5.25}) {
        p.beta1 = beta1;
        p.cc = 1.1;
        auto integrand = [&p](double s) { return heat_capacity(p, s) / s; };
        for (double theta : {0.3, 0.9, 1.7, 3.2}) {
            const double ref = oracle::simpson(integrand, 1.0, theta, 20000);
            CHECK(entropy_coefficient(p, theta) == doctest::Approx(ref).epsilon(1e-10));
        }
    }
}

TEST_CASE("validate_params: named constraints") {
    auto violating = [](auto&& mutate) {
        MaterialParams p;
        mutate(p);
        return validate_params(p);
    };
    auto names = [](const std::vector<std::string>& v) {
        std::string all;
        for (const auto& s : v) all += s + "\n";
        return all;
    };

    CHECK(validate_params(MaterialParams{}).empty());

    struct Case {
        const char* name;
        void (*mutate)(MaterialParams&);
    };
    const Case cases[] = {
        {"mu", [](MaterialParams& p) { p.mu = 0.0; }},
        {"lambda", [](MaterialParams& p) { p.lambda = -1.0; }},
        {"eta_u", [](MaterialParams& p) { p.eta_u = 0.0; }},
        {"eta_z", [](MaterialParams& p) { p.eta_z = -2.0; }},
        {"nu", [](MaterialParams& p) { p.nu = -0.1; }},
        {"alpha", [](MaterialParams& p) { p.alpha = -1.0; }},
        {"rho", [](MaterialParams& p) { p.rho = 0.0; }},
        {"c1", [](MaterialParams& p) { p.c1 = 0.0; }},
        {"c2", [](MaterialParams& p) { p.c2 = -1.0; }},
        {"c3", [](MaterialParams& p) { p.c3 = 0.0; }},
        {"delta", [](MaterialParams& p) { p.delta = 0.0; }},
        {"c1_hat", [](MaterialParams& p) { p.c1_hat = -0.5; }},
        {"c2_hat", [](MaterialParams& p) { p.c2_hat = -0.5; }},
        {"cc", [](MaterialParams& p) { p.cc = 0.0; }},
        {"beta1", [](MaterialParams& p) { p.beta1 = 2.0; }},
        {"k0", [](MaterialParams& p) { p.k0 = 0.0; }},
        {"vartheta_bar", [](MaterialParams& p) { p.vartheta_bar = 0.0; }},
    };
    for (const Case& c : cases) {
        const auto v = violating(c.mutate);
        INFO("constraint ", c.name);
        CHECK(v.size() == 1);
        CHECK(names(v).find(c.name) != std::string::npos);
    }

    MaterialParams bad;
    bad.mu = -1.0;
    bad.rho = 0.0;
    CHECK(validate_params(bad).size() == 2);
    CHECK_THROWS_AS(require_valid(bad), ConfigError);
}

TEST_CASE("shrink: closed form on rays") {
    std::mt19937 rng(19);
    std::uniform_real_distribution<double> u(0.1, 4.0);
    for (int k = 0; k < 100; ++k) {
        const double rho = u(rng), coef = u(rng);
        const DevTensor q = random_dev(rng, 3.0);
        const DevTensor d = shrink(q, rho, coef);
        const double qn = q.norm();
        if (qn <= rho) {
            CHECK(d.a == 0.0);
            CHECK(d.b == 0.0);
        } else {
            // optimality: coef d + rho d/|d| = q
            const double dn = d.norm();
            CHECK(dn > 0.0);
            CHECK(coef * d.a + rho * d.a / dn == doctest::Approx(q.a).epsilon(1e-12));
            CHECK(coef * d.b + rho * d.b / dn == doctest::Approx(q.b).epsilon(1e-12));
        }
    }
}
