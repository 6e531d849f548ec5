#include "bnk/chi2mix.hpp"

#include <cmath>
#include <cstdint>
#include <string>

#include <boost/math/distributions/chi_squared.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/tools/roots.hpp>

#include "bnk/errors.hpp"

namespace bnk {

namespace {

void check_args(double a, int k, int p) {
  if (!(a >= 0.0) || !std::isfinite(a)) throw DomainError("chi-square mixture: a must be finite and >= 0");
  if (p < 1 || p > k) {
    throw DomainError("chi-square mixture: need 1 <= p <= k, got p=" + std::to_string(p) +
                      " k=" + std::to_string(k));
  }
}

double chi2_cdf(double dof, double x) {
  if (x <= 0.0) return 0.0;
  return boost::math::gamma_p(dof / 2.0, x / 2.0);
}

}  // namespace

double chi2mix_cdf(double a, int k, int p, double x) {
  check_args(a, k, p);
  if (!(x > 0.0)) return 0.0;
  const double u = x / (1.0 + a);
  if (a == 0.0 || k == p) return chi2_cdf(p, u);

  // P = int_0^u f_p(s) F_{k-p}((x - (1+a)s)/a) ds. With s = u t^2 the density
  // factor becomes 2 u^{p/2} t^{p-1} e^{-u t^2/2} / (2^{p/2} Gamma(p/2)), which
  // has no singularity at t = 0 even for p = 1. The other factor behaves like
  // (1 - t)^{(k-p)/2} at t = 1, which tanh-sinh handles.
  const double half_p = 0.5 * p;
  const double log_norm = half_p * std::log(u) - half_p * std::log(2.0) - std::lgamma(half_p) + std::log(2.0);
  const int rest = k - p;
  auto integrand = [&](double t) {
    const double s = u * t * t;
    const double dens = std::pow(t, p - 1) * std::exp(log_norm - 0.5 * s);
    return dens * chi2_cdf(rest, (x - (1.0 + a) * s) / a);
  };
  thread_local boost::math::quadrature::tanh_sinh<double> rule;
  const double v = rule.integrate(integrand, 0.0, 1.0, 1e-12);
  return std::min(1.0, std::max(0.0, v));
}

double chi2mix_quantile(double a, int k, int p, double q) {
  check_args(a, k, p);
  if (!(q > 0.0 && q < 1.0)) throw DomainError("chi-square mixture quantile: q must lie in (0, 1)");
  // chi2_k / (1+a) <= ... : (1+a)X + aY lies between (1+a)X and (1+a)(X+Y).
  const double lo = (1.0 + a) * boost::math::quantile(boost::math::chi_squared(p), q);
  const double hi = (1.0 + a) * boost::math::quantile(boost::math::chi_squared(k), q);
  if (hi - lo <= 1e-10) return lo;
  auto f = [&](double x) { return chi2mix_cdf(a, k, p, x) - q; };
  const double flo = f(lo);
  const double fhi = f(hi);
  if (flo >= 0.0) return lo;
  if (fhi <= 0.0) return hi;
  std::uintmax_t iters = 200;
  auto tol = [](double l, double h) { return h - l <= 1e-10; };
  const auto r = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, tol, iters);
  return 0.5 * (r.first + r.second);
}

double chi2_critical(int dof, double alpha) {
  if (dof < 1) throw DomainError("chi-square critical value needs dof >= 1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0, 1)");
  return boost::math::quantile(boost::math::complement(boost::math::chi_squared(dof), alpha));
}

double gamma_of_a(double a, double alpha, int k, int p) {
  check_args(a, k, p);
  const double c = chi2_critical(p, alpha);
  return 1.0 - alpha - chi2mix_cdf(a, k, p, c);
}

double a_of_gamma(double gamma, double alpha, int k, int p) {
  check_args(0.0, k, p);
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0, 1)");
  if (!(gamma >= 0.0 && gamma < 1.0 - alpha)) {
    throw DomainError("distortion " + std::to_string(gamma) + " outside the achievable range [0, " +
                      std::to_string(1.0 - alpha) + ")");
  }
  if (gamma == 0.0) return 0.0;
  auto f = [&](double a) { return gamma_of_a(a, alpha, k, p) - gamma; };
  double lo = 0.0;
  double hi = 1.0;
  double fhi = f(hi);
  while (fhi < 0.0) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e15) throw DomainError("no root for a(gamma): distortion too close to 1 - alpha");
    fhi = f(hi);
  }
  std::uintmax_t iters = 300;
  auto tol = [](double l, double h) { return h - l <= 1e-12 * std::max(1.0, h); };
  const auto r = boost::math::tools::toms748_solve(f, lo, hi, f(lo), fhi, tol, iters);
  return 0.5 * (r.first + r.second);
}

}  // namespace bnk
