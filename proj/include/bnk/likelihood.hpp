#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "bnk/optimizer.hpp"
#include "bnk/panel.hpp"
#include "bnk/params.hpp"

namespace bnk {

// Open bounds used for logistic transforms and uniform draws.
struct ParamBox {
  std::map<Param, std::pair<double, double>> bounds;

  static ParamBox defaults();
  std::pair<double, double> operator[](Param p) const;
};

enum class ObservableSet {
  output_inflation_rate,  // (x, pi, i)
  output_inflation,       // (x, pi)
};

struct LikelihoodProblem {
  Eigen::MatrixXd data;  // periods x observables
  ObservableSet observables = ObservableSet::output_inflation_rate;
  StructuralParams baseline;  // values of the fixed parameters
  std::vector<Param> free;
  // Ties phi_pi = gamma/beta and zeroes rho_i, phi_x, sigma2_s on assembly.
  bool restricted_regime = false;
  ParamBox box = ParamBox::defaults();

  // Fixed beta = 0.99, theta = 0.875, phi = 1 and sigma2_m = 1; the other nine
  // parameters free.
  static LikelihoodProblem complete_model(const TimeSeriesPanel& panel,
                                          StructuralParams baseline = table1_calibration());
  // (x, pi) only under the closed-form restrictions; free m_bar, gamma, rho_d,
  // rho_m, sigma2_d, sigma2_m.
  static LikelihoodProblem restricted_model(const TimeSeriesPanel& panel,
                                            StructuralParams baseline = table1_calibration());

  std::size_t periods() const { return static_cast<std::size_t>(data.rows()); }
  StructuralParams assemble(const Eigen::VectorXd& free_values) const;
  Eigen::VectorXd free_values(const StructuralParams& params) const;
  // Same data and fixed values, different free list.
  LikelihoodProblem with_free(std::vector<Param> free_params) const;
  // Throws DomainError unless the free list is non-empty, duplicate-free and
  // the data have at least two periods.
  void validate() const;
};

// log p(y_t | y_{t-1}, ...) for each period (Kalman prediction-error
// decomposition from the stationary distribution). Constant -(n/2) log 2pi
// per period included.
Eigen::VectorXd log_densities(const LikelihoodProblem& problem, const StructuralParams& params);
double log_likelihood(const LikelihoodProblem& problem, const StructuralParams& params);

enum class ScoreCoordinates {
  natural,      // derivatives with respect to the parameters themselves
  unconstrained // with respect to the logit of the position inside the box
};

struct ScoreBundle {
  Eigen::MatrixXd increments;  // periods x free
  Eigen::VectorXd total;       // sum of increments
  Eigen::MatrixXd j_matrix;    // sum of s_t s_t'
};

// Central differences of the per-period log densities, step
// eps^(1/3) max(1, |v|) in the chosen coordinates.
ScoreBundle score_bundle(const LikelihoodProblem& problem, const StructuralParams& params,
                         ScoreCoordinates coords = ScoreCoordinates::natural);

struct LmResult {
  double statistic = 0.0;
  double p_value = 1.0;
  int dof = 0;   // number of tested parameters
  int rank = 0;  // numerical rank of J_T
  bool rank_deficient = false;
};

// S_T' J_T^{-1} S_T with chi-square(k) reference; the pseudo-inverse is used
// and the rank reported when J_T is rank deficient.
LmResult lm_o(const LikelihoodProblem& problem, const StructuralParams& params0,
              ScoreCoordinates coords = ScoreCoordinates::natural);
LmResult lm_from_score(const ScoreBundle& score);

struct MlOptions {
  BfgsOptions bfgs{.max_iterations = 400, .gradient_tolerance = 1e-4, .step_tolerance = 1e-12};
  bool compute_standard_errors = true;
};

struct MlEstimate {
  StructuralParams params;
  std::vector<Param> free;
  Eigen::VectorXd values;
  Eigen::VectorXd sd_hessian;  // inverse negative Hessian of the log likelihood
  Eigen::VectorXd sd_opg;      // inverse J_T
  Eigen::VectorXd t_stat;      // values / sd_hessian
  Eigen::MatrixXd covariance;  // inverse negative Hessian
  double log_likelihood = 0.0;
  double score_max_abs = 0.0;  // max |dl/dv| at the optimum, natural coordinates
  bool converged = false;
  int iterations = 0;
  int evaluations = 0;
  std::string message;
};

// BFGS on logistic transforms of the free parameters into their box. Points
// where the model has no determinate solution receive a large penalty.
MlEstimate ml_estimate(const LikelihoodProblem& problem, const StructuralParams& start,
                       const MlOptions& options = {});

// (v_hat - v0)' cov^{-1} (v_hat - v0) over the free parameters.
double wald_statistic(const MlEstimate& estimate, const Eigen::VectorXd& null_values);

// Incremental parameter groups 1..6 of the projection procedure.
std::vector<Param> lm_group(int group_id);

struct ProjectionSet {
  int group_id = 0;
  std::vector<Param> params;
  double level = 0.95;
  double critical_value = 0.0;
  std::vector<Eigen::VectorXd> draws;  // every draw, in draw order
  Eigen::VectorXd lm;                  // LM_o per draw (NaN where the model failed)
  std::vector<std::size_t> retained;   // indices of draws not rejected
  Eigen::VectorXd lower;               // per-parameter min over retained draws
  Eigen::VectorXd upper;               // per-parameter max over retained draws
  std::size_t failed = 0;              // draws with no determinate solution
  std::string warning;                 // set when the set is empty

  bool empty() const { return retained.empty(); }
};

// Uniform draws of the group's parameters over the problem's box, other
// parameters at the problem's baseline; keeps draws with LM_o below the
// chi-square(k) quantile at `level`. Deterministic given seed.
ProjectionSet lm_projection_cs(const LikelihoodProblem& problem, int group_id, std::size_t n_draws,
                               std::uint64_t seed, double level = 0.95);

// Same draws and LM values, re-thresholded at another level.
ProjectionSet rethreshold(const ProjectionSet& set, double level);

}  // namespace bnk
