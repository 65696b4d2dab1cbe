#pragma once

#include <string>
#include <vector>

#include "smaflow/tensor.hpp"

namespace smaflow {

// All constitutive constants. E and the viscosity tensors are isotropic:
// E xi = 2 mu xi + lambda tr(xi) I, L xi = eta_u xi, M v = eta_z v.
struct MaterialParams {
    double mu = 1.0;        // shear modulus
    double lambda = 1.0;    // first Lame modulus
    double eta_u = 1.0;     // strain-rate viscosity (L)
    double eta_z = 1.0;     // internal-variable viscosity (M)
    double nu = 0.1;        // gradient regularization of z
    double alpha = 0.1;     // thermal expansion coupling
    double rho = 0.5;       // dissipation threshold, Psi(v) = rho |v|
    double c1 = 1.0;        // H1 coefficients
    double c2 = 1.0;
    double c3 = 1.0;
    double delta = 0.01;    // hardening regularization parameter
    double c1_hat = 0.0;    // H2 coefficients
    double c2_hat = 0.0;
    double cc = 1.0;        // heat-capacity floor c^c
    double beta1 = 4.0;     // heat-capacity growth exponent
    double k0 = 0.5;        // conductivity, kappa^c = k0 I
    double vartheta_bar = 1.0;  // strictly positive initial-enthalpy floor
};

// Named-constraint violations; empty means the parameter set is admissible.
std::vector<std::string> validate_params(const MaterialParams& p);
// Throws ConfigError listing every violation.
void require_valid(const MaterialParams& p);

struct HardeningEval {
    double value = 0.0;
    DevTensor grad;
};

// E xi = 2 mu xi + lambda tr(xi) I.
SymTensor elastic_apply(const MaterialParams& p, SymTensor xi);

// W1 = 1/2 E(e - z):(e - z) + nu/2 |gz|^2 + H1(z), with gz_sq the squared
// gradient norm of the (a,b) components.
double W1_density(const MaterialParams& p, SymTensor e, DevTensor z, double gz_sq);

// H1(z) = c1 sqrt(delta^2 + |z|^2) + c2 |z|^2 + ((|z| - c3)_+)^4 / (delta (1 + |z|^2))
HardeningEval hardening_H1(const MaterialParams& p, DevTensor z);

// H2(z) = c1_hat sqrt(delta^2 + |z|^2) + c2_hat |z|^2
HardeningEval hardening_H2(const MaterialParams& p, DevTensor z);

// Psi(v) = rho |v|, positively 1-homogeneous.
double psi(const MaterialParams& p, DevTensor v);

// Resolvent of the incremental flow problem at one node:
//   argmin_d  rho |d| + (eta_z / (2 dt)) |d|^2 - r : d
// which is the shrinkage (dt / eta_z) max(0, 1 - rho/|r|) r. The lumped-mass
// weight m_w scales the whole objective and cancels; it must be positive.
DevTensor prox_flow(const MaterialParams& p, DevTensor r, double dt, double m_w);

// Shrinkage with an explicit quadratic weight: argmin rho|d| + coef/2 |d|^2 - q:d.
DevTensor shrink(DevTensor q, double rho, double coef);

// Enthalpy g(theta) = (c^c / beta1) ((1 + theta)^beta1 - 1) for theta >= 0.
double g_of_theta(const MaterialParams& p, double theta);

// Inverse transform: zeta(v) = (1 + beta1 v / c^c)^(1/beta1) - 1 for v >= 0,
// and 0 for v < 0. Lipschitz with constant 1/c^c.
double zeta_of_enthalpy(const MaterialParams& p, double vartheta);

// Transformed conductivity kappa^c = k0 I. The state arguments are unused by
// this constant law but keep a state-dependent law a drop-in replacement.
SymTensor kappa_c(const MaterialParams& p, SymTensor e, DevTensor z, double vartheta);

// Heat capacity c(theta) = c^c (1 + theta)^(beta1 - 1) for theta >= 0.
double heat_capacity(const MaterialParams& p, double theta);

// Entropy integral S(theta) = integral_1^theta c(s)/s ds, theta > 0. Closed
// form for integer beta1, adaptive quadrature otherwise.
double entropy_coefficient(const MaterialParams& p, double theta);

}  // namespace smaflow
