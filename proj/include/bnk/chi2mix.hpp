#pragma once

namespace bnk {

// Distribution of (1 + a) X + a Y with X ~ chi2(p), Y ~ chi2(k - p) independent.
// Requires a >= 0 and 1 <= p <= k; DomainError otherwise.
double chi2mix_cdf(double a, int k, int p, double x);
// Inverts chi2mix_cdf to an absolute tolerance of 1e-10 in x. q in (0, 1).
double chi2mix_quantile(double a, int k, int p, double q);

// Upper-tail quantile of chi2(dof) at probability 1 - alpha.
double chi2_critical(int dof, double alpha);

// Gamma(a) = 1 - alpha - H(chi2_{p,1-alpha}; a, k, p): extra coverage lost by
// the K + a S statistic at the chi2_p critical value.
double gamma_of_a(double a, double alpha, int k, int p = 1);
// Inverse of gamma_of_a on [0, 1 - alpha); bracketed root to 1e-12 in a.
// Throws DomainError outside that range.
double a_of_gamma(double gamma, double alpha, int k, int p = 1);

}  // namespace bnk
