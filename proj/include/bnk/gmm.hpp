#pragma once

#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bnk/panel.hpp"
#include "bnk/params.hpp"

namespace bnk {

enum class Equation { nkpc, is, custom };

const char* equation_name(Equation e);
Equation equation_from_name(const std::string& name);

// Parameter point theta = (m_bar, gamma) written into a copy of `fixed`.
StructuralParams with_point(const StructuralParams& fixed, const Eigen::VectorXd& theta);

struct NkpcObs {
  double pi = 0.0;
  double pi_next = 0.0;
  double x = 0.0;
};

struct IsObs {
  double x = 0.0;
  double x_next = 0.0;
  double rr = 0.0;  // i_t - pi_{t+1} - r_t
};

// pi_t - beta Mf pi_{t+1} - kappa x_t.
double residual_nkpc(const StructuralParams& params, const NkpcObs& obs);
// x_t - M x_{t+1} + sigma (i_t - pi_{t+1} - r_t), realizations in place of
// expectations.
double residual_is(const StructuralParams& params, const IsObs& obs);

// Residual vector h_t(theta) over the T usable periods.
using ResidualFn = std::function<Eigen::VectorXd(const Eigen::VectorXd& theta)>;

struct MomentProblem {
  Equation equation = Equation::custom;
  ResidualFn residuals;
  Eigen::MatrixXd z;  // T x n_z, row t pairs with residual t
  std::vector<std::string> param_names;
  std::vector<std::size_t> rows;  // panel rows of the residuals, if built from a panel
  int hac_lags = 4;

  std::size_t periods() const { return static_cast<std::size_t>(z.rows()); }
  int moments() const { return static_cast<int>(z.cols()); }
  int dimension() const { return static_cast<int>(param_names.size()); }
  // Throws InputError unless T > n_z >= number of parameters and hac_lags >= 0.
  void validate() const;
};

// Phillips curve over (m_bar, gamma) with beta, theta, phi from `fixed`. Needs
// columns pi, x and the instrument columns.
MomentProblem nkpc_problem(const TimeSeriesPanel& panel, const StructuralParams& fixed,
                           const InstrumentSpec& instruments, int hac_lags = 4);
// IS curve over (m_bar, gamma); needs x and the real-rate gap column `rr`.
MomentProblem is_problem(const TimeSeriesPanel& panel, const StructuralParams& fixed,
                         const InstrumentSpec& instruments, int hac_lags = 4);

// Bartlett weight 1 - l/(L+1).
double bartlett_weight(int lag, int lags);

// Centered Newey-West cross-covariance of the rows of a (T x n) and b (T x m):
// sum over |l| <= L of w_l G_l with G_l = T^{-1} sum_t (a_t - abar)(b_{t-l} - bbar)'.
Eigen::MatrixXd hac_cross_covariance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, int lags);
Eigen::MatrixXd hac_covariance(const Eigen::MatrixXd& g, int lags);

struct MomentBundle {
  Eigen::VectorXd f;          // f_T, length n_z
  Eigen::MatrixXd sigma;      // HAC covariance of g_t (after any ridge)
  Eigen::MatrixXd jacobian;   // d f_T / d theta, n_z x dim
  Eigen::MatrixXd weighting;  // sigma^{-1}
  Eigen::MatrixXd g;          // T x n_z moment contributions
  std::vector<Eigen::MatrixXd> dg;  // per parameter, T x n_z derivatives of g_t
  double ridge = 0.0;         // added to the diagonal when sigma was near singular
  std::size_t periods = 0;

  bool regularized() const { return ridge > 0.0; }
};

// Central differences with step eps^(1/3) max(1, |theta_j|).
MomentBundle moment_bundle(const MomentProblem& problem, const Eigen::VectorXd& theta);

// f' sigma^{-1} f; S = T times this.
double cugmm_objective(const MomentBundle& bundle);
double cugmm_objective(const MomentProblem& problem, const Eigen::VectorXd& theta);
double s_statistic(const MomentBundle& bundle);

struct KResult {
  double value = 0.0;
  int dof = 0;  // rank of the projection
  bool rank_deficient = false;
};

// Jacobian with each column recentred by its HAC covariance with g_t:
// D_j - Omega_j sigma^{-1} f.
Eigen::MatrixXd orthogonalized_jacobian(const MomentBundle& bundle, int lags);

// K for the linear function F theta (rows of F are the functions; identity
// gives the usual K). Projection of sigma^{-1/2} f on the columns
// sigma^{-1/2} Dt (Dt' sigma^{-1} Dt)^{-1} F'.
KResult k_statistic(const MomentBundle& bundle, int lags, const Eigen::MatrixXd& f_rows);
KResult k_statistic(const MomentBundle& bundle, int lags);
// Same, from an already orthogonalized Jacobian.
KResult k_statistic_from(const MomentBundle& bundle, const Eigen::MatrixXd& dt, const Eigen::MatrixXd& f_rows);

// Usual GMM variance of theta_hat: (D' sigma^{-1} D)^{-1} / T at theta_hat.
Eigen::MatrixXd gmm_variance(const MomentBundle& bundle_at_estimate);

// (theta_hat - theta)' V^{-1} (theta_hat - theta) for the rows of F.
double wald_statistic(const Eigen::VectorXd& theta_hat, const Eigen::MatrixXd& variance,
                      const Eigen::VectorXd& theta, const Eigen::MatrixXd& f_rows);

}  // namespace bnk
