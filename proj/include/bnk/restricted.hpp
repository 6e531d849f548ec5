#pragma once

#include "bnk/params.hpp"

namespace bnk {

// Loadings of (x_t, pi_t) on (eta_m, eta_d):
//   x_t  = a1 eta_m + a2 eta_d
//   pi_t = b1 eta_m + b2 eta_d
struct SolutionMatrix {
  double a1 = 0.0;
  double a2 = 0.0;
  double b1 = 0.0;
  double b2 = 0.0;

  double smallest_singular_value() const;
  double largest_singular_value() const;
};

// Closed-form solution of the restricted system (rho_i = 0, phi_x = 0,
// phi_pi = 1/sigma, sigma2_s = 0):
//   a1 = -beta Mf sigma / (beta Mf + sigma kappa - rho_m m_bar)
//   a2 =  beta Mf       / (beta Mf + sigma kappa - rho_d m_bar)
//   b1 = a1 kappa / (1 - rho_m beta Mf),  b2 = a2 kappa / (1 - rho_d beta Mf)
// Throws SingularityError naming a vanishing denominator.
SolutionMatrix solve_restricted(const ReducedParams& reduced, double m_bar, double rho_m,
                                double rho_d);

// Persistence and innovation variance of the two AR(1) shocks.
struct ShockLaw {
  double rho_m = 0.0;
  double rho_d = 0.0;
  double sigma2_m = 0.0;
  double sigma2_d = 0.0;

  static ShockLaw from(const StructuralParams& p) {
    return {p.rho_m, p.rho_d, p.sigma2_m, p.sigma2_d};
  }
};

struct AutocovSet {
  double var_x = 0.0;
  double cov_x_xlag = 0.0;   // Cov(x_t, x_{t-k})
  double cov_x_pilag = 0.0;  // Cov(x_t, pi_{t-k})
};

// Population moments implied by a SolutionMatrix and the shock law. Throws
// DomainError if a persistence has |rho| >= 1.
AutocovSet population_autocov(const SolutionMatrix& solution, const ShockLaw& shocks, int k);

struct IdentifiedQuantities {
  double rho_m = 0.0;
  double rho_d = 0.0;
  double q1 = 0.0;  // a1^2 sigma2_m
  double q2 = 0.0;  // a2^2 sigma2_d
  double q3 = 0.0;  // a1 b1 sigma2_m = q1 kappa/(1 - rho_m beta Mf)
  double q4 = 0.0;  // a2 b2 sigma2_d = q2 kappa/(1 - rho_d beta Mf)
  // When set, only rho, Var(x) and pi/x are meaningful.
  bool degenerate = false;
  double common_rho = 0.0;
  double var_x = 0.0;
  double pi_over_x = 0.0;
};

inline constexpr double kDegeneracyTolerance = 1e-6;

IdentifiedQuantities identified_quantities(const SolutionMatrix& solution, const ShockLaw& shocks,
                                           double tolerance = kDegeneracyTolerance);

}  // namespace bnk
