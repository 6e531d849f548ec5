#include "bnk/restricted.hpp"

#include <cmath>
#include <sstream>

#include <Eigen/Dense>

#include "bnk/errors.hpp"

namespace bnk {

namespace {

constexpr double kSingular = 1e-13;

Eigen::Vector2d singular_values(const SolutionMatrix& s) {
  Eigen::Matrix2d m;
  m << s.a1, s.a2, s.b1, s.b2;
  return Eigen::JacobiSVD<Eigen::Matrix2d>(m).singularValues();
}

void check_denominator(double d, const char* what) {
  if (!std::isfinite(d) || std::abs(d) < kSingular) {
    std::ostringstream msg;
    msg << "solve_restricted: denominator " << what << " vanishes (" << d << ")";
    throw SingularityError(msg.str());
  }
}

}  // namespace

double SolutionMatrix::smallest_singular_value() const { return singular_values(*this)(1); }
double SolutionMatrix::largest_singular_value() const { return singular_values(*this)(0); }

SolutionMatrix solve_restricted(const ReducedParams& r, double m_bar, double rho_m, double rho_d) {
  const double beta = 1.0 / r.R;
  const double bmf = beta * r.Mf;
  const double den_m = bmf + r.sigma * r.kappa - rho_m * m_bar;
  const double den_d = bmf + r.sigma * r.kappa - rho_d * m_bar;
  const double pc_m = 1.0 - rho_m * bmf;
  const double pc_d = 1.0 - rho_d * bmf;
  check_denominator(den_m, "beta*Mf + sigma*kappa - rho_m*m_bar");
  check_denominator(den_d, "beta*Mf + sigma*kappa - rho_d*m_bar");
  check_denominator(pc_m, "1 - rho_m*beta*Mf");
  check_denominator(pc_d, "1 - rho_d*beta*Mf");

  SolutionMatrix s;
  s.a1 = -bmf * r.sigma / den_m;
  s.a2 = bmf / den_d;
  s.b1 = s.a1 * r.kappa / pc_m;
  s.b2 = s.a2 * r.kappa / pc_d;
  return s;
}

AutocovSet population_autocov(const SolutionMatrix& s, const ShockLaw& sh, int k) {
  if (std::abs(sh.rho_m) >= 1.0 || std::abs(sh.rho_d) >= 1.0) {
    throw DomainError("population_autocov: shock persistence must satisfy |rho| < 1");
  }
  if (k < 0) throw DomainError("population_autocov: lag must be non-negative");
  // Stationary variances of eta_m and eta_d, and their lag-k decay.
  const double vm = sh.sigma2_m / (1.0 - sh.rho_m * sh.rho_m);
  const double vd = sh.sigma2_d / (1.0 - sh.rho_d * sh.rho_d);
  const double dm = std::pow(sh.rho_m, k);
  const double dd = std::pow(sh.rho_d, k);

  AutocovSet out;
  out.var_x = s.a1 * s.a1 * vm + s.a2 * s.a2 * vd;
  out.cov_x_xlag = s.a1 * s.a1 * vm * dm + s.a2 * s.a2 * vd * dd;
  out.cov_x_pilag = s.a1 * s.b1 * vm * dm + s.a2 * s.b2 * vd * dd;
  return out;
}

IdentifiedQuantities identified_quantities(const SolutionMatrix& s, const ShockLaw& sh,
                                           double tolerance) {
  IdentifiedQuantities q;
  q.rho_m = sh.rho_m;
  q.rho_d = sh.rho_d;
  q.q1 = s.a1 * s.a1 * sh.sigma2_m;
  q.q2 = s.a2 * s.a2 * sh.sigma2_d;
  q.q3 = s.a1 * s.b1 * sh.sigma2_m;
  q.q4 = s.a2 * s.b2 * sh.sigma2_d;
  q.degenerate = std::abs(sh.rho_d - sh.rho_m) < tolerance;
  if (q.degenerate) {
    q.common_rho = 0.5 * (sh.rho_m + sh.rho_d);
    q.var_x = population_autocov(s, sh, 0).var_x;
    // Rows are proportional; either column gives the ratio.
    q.pi_over_x = std::abs(s.a2) > std::abs(s.a1) ? s.b2 / s.a2 : s.b1 / s.a1;
  }
  return q;
}

}  // namespace bnk
