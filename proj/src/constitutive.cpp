#include "smaflow/constitutive.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "smaflow/errors.hpp"

namespace smaflow {

namespace {

void check(std::vector<std::string>& out, bool ok, const char* name, const char* rule, double got) {
    if (ok) return;
    std::ostringstream ss;
    ss << name << " must be " << rule << " (got " << got << ")";
    out.push_back(ss.str());
}

}  // namespace

std::vector<std::string> validate_params(const MaterialParams& p) {
    std::vector<std::string> v;
    check(v, p.mu > 0.0, "mu", "> 0", p.mu);
    check(v, p.lambda >= 0.0, "lambda", ">= 0", p.lambda);
    check(v, p.eta_u > 0.0, "eta_u", "> 0", p.eta_u);
    check(v, p.eta_z > 0.0, "eta_z", "> 0", p.eta_z);
    check(v, p.nu >= 0.0, "nu", ">= 0", p.nu);
    check(v, p.alpha >= 0.0, "alpha", ">= 0", p.alpha);
    check(v, p.rho > 0.0, "rho", "> 0", p.rho);
    check(v, p.c1 > 0.0, "c1", "> 0", p.c1);
    check(v, p.c2 > 0.0, "c2", "> 0", p.c2);
    check(v, p.c3 > 0.0, "c3", "> 0", p.c3);
    check(v, p.delta > 0.0, "delta", "> 0", p.delta);
    check(v, p.c1_hat >= 0.0, "c1_hat", ">= 0", p.c1_hat);
    check(v, p.c2_hat >= 0.0, "c2_hat", ">= 0", p.c2_hat);
    check(v, p.cc > 0.0, "cc", "> 0", p.cc);
    check(v, p.beta1 >= 4.0, "beta1", ">= 4", p.beta1);
    check(v, p.k0 > 0.0, "k0", "> 0", p.k0);
    check(v, p.vartheta_bar > 0.0, "vartheta_bar", "> 0", p.vartheta_bar);
    return v;
}

void require_valid(const MaterialParams& p) {
    auto v = validate_params(p);
    if (v.empty()) return;
    std::string msg = "invalid material parameters:";
    for (const auto& s : v) msg += "\n  " + s;
    throw ConfigError(msg);
}

SymTensor elastic_apply(const MaterialParams& p, SymTensor xi) {
    const double lt = p.lambda * xi.trace();
    return {2.0 * p.mu * xi.xx + lt, 2.0 * p.mu * xi.xy, 2.0 * p.mu * xi.yy + lt};
}

double W1_density(const MaterialParams& p, SymTensor e, DevTensor z, double gz_sq) {
    const SymTensor d = e - z.as_sym();
    return 0.5 * ddot(elastic_apply(p, d), d) + 0.5 * p.nu * gz_sq + hardening_H1(p, z).value;
}

HardeningEval hardening_H1(const MaterialParams& p, DevTensor z) {
    const double s2 = z.a * z.a + z.b * z.b;
    const double s = std::sqrt(s2);
    const double root = std::sqrt(p.delta * p.delta + s2);

    HardeningEval h;
    h.value = p.c1 * root + p.c2 * s2;
    // d/dz of c1 sqrt(delta^2 + s^2) + c2 s^2 is (c1/root + 2 c2) z
    double factor = p.c1 / root + 2.0 * p.c2;

    const double ex = s - p.c3;
    if (ex > 0.0) {
        const double w = 1.0 + s2;
        const double ex3 = ex * ex * ex;
        h.value += ex3 * ex / (p.delta * w);
        // quartic term: d/ds [ex^4 / (delta w)] = (4 ex^3 w - ex^4 2 s) / (delta w^2),
        // divided by s to fold into the radial factor (only reached for s > c3 > 0)
        factor += (4.0 * ex3 * w - ex3 * ex * 2.0 * s) / (p.delta * w * w * s);
    }
    h.grad = factor * z;
    return h;
}

HardeningEval hardening_H2(const MaterialParams& p, DevTensor z) {
    const double s2 = z.a * z.a + z.b * z.b;
    const double root = std::sqrt(p.delta * p.delta + s2);
    HardeningEval h;
    h.value = p.c1_hat * root + p.c2_hat * s2;
    h.grad = (p.c1_hat / root + 2.0 * p.c2_hat) * z;
    return h;
}

double psi(const MaterialParams& p, DevTensor v) { return p.rho * v.norm(); }

DevTensor shrink(DevTensor q, double rho, double coef) {
    const double n = q.norm();
    if (n <= rho) return DevTensor{};
    return ((n - rho) / (coef * n)) * q;
}

DevTensor prox_flow(const MaterialParams& p, DevTensor r, double dt, double m_w) {
    if (!(dt > 0.0)) throw std::invalid_argument("prox_flow: dt must be > 0");
    if (!(m_w > 0.0)) throw std::invalid_argument("prox_flow: m_w must be > 0");
    // m_w scales both terms of the objective and drops out of the minimizer
    return shrink(r, p.rho, p.eta_z / dt);
}

double g_of_theta(const MaterialParams& p, double theta) {
    if (theta < 0.0) throw std::domain_error("g_of_theta: theta must be >= 0");
    // (cc/beta1)((1+theta)^beta1 - 1) via expm1/log1p, stable for small theta
    return (p.cc / p.beta1) * std::expm1(p.beta1 * std::log1p(theta));
}

double zeta_of_enthalpy(const MaterialParams& p, double vartheta) {
    if (vartheta <= 0.0) return 0.0;
    return std::expm1(std::log1p(p.beta1 * vartheta / p.cc) / p.beta1);
}

SymTensor kappa_c(const MaterialParams& p, SymTensor, DevTensor, double) {
    return {p.k0, 0.0, p.k0};
}

double heat_capacity(const MaterialParams& p, double theta) {
    if (theta < 0.0) throw std::domain_error("heat_capacity: theta must be >= 0");
    return p.cc * std::exp((p.beta1 - 1.0) * std::log1p(theta));
}

namespace {

// integral_1^theta ((1+s)^(beta1-1) - 1)/s ds for non-integer beta1; the
// integrand extends smoothly through s = 0, so plain adaptive Simpson works
// for any theta > 0.
double entropy_tail_integrand(double beta1, double s) {
    if (std::abs(s) < 1e-8) {
        // series: (beta1-1) + (beta1-1)(beta1-2)/2 s + O(s^2)
        return (beta1 - 1.0) * (1.0 + 0.5 * (beta1 - 2.0) * s);
    }
    return std::expm1((beta1 - 1.0) * std::log1p(s)) / s;
}

double simpson(double beta1, double a, double b, double fa, double fm, double fb, double whole,
               double tol, int depth) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m), rm = 0.5 * (m + b);
    const double flm = entropy_tail_integrand(beta1, lm);
    const double frm = entropy_tail_integrand(beta1, rm);
    const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol)
        return left + right + (left + right - whole) / 15.0;
    return simpson(beta1, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
           simpson(beta1, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

double entropy_tail(double beta1, double theta) {
    const double a = 1.0, b = theta;
    const double fa = entropy_tail_integrand(beta1, a);
    const double fb = entropy_tail_integrand(beta1, b);
    const double fm = entropy_tail_integrand(beta1, 0.5 * (a + b));
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    return simpson(beta1, a, b, fa, fm, fb, whole, 1e-13, 48);
}

}  // namespace

double entropy_coefficient(const MaterialParams& p, double theta) {
    if (!(theta > 0.0)) throw std::domain_error("entropy_coefficient: theta must be > 0");
    const double n = p.beta1 - 1.0;
    const int ni = static_cast<int>(std::lround(n));
    if (std::abs(n - ni) < 1e-12 && ni >= 0 && ni <= 64) {
        // binomial expansion of (1+s)^n / s integrates to
        // ln theta + sum_k C(n,k) (theta^k - 1)/k
        double sum = std::log(theta);
        double binom = 1.0;
        double pow_t = 1.0;
        for (int k = 1; k <= ni; ++k) {
            binom = binom * (ni - k + 1) / k;
            pow_t *= theta;
            sum += binom * (pow_t - 1.0) / k;
        }
        return p.cc * sum;
    }
    return p.cc * (std::log(theta) + entropy_tail(p.beta1, theta));
}

}  // namespace smaflow
