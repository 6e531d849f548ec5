#pragma once

#include <array>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "bnk/gmm.hpp"

namespace bnk {

struct DistortionCalibration {
  double alpha = 0.05;
  double gamma_min = 0.05;
  double a_value = 0.0;  // a(gamma_min)
  int k = 0;             // moments
  int p = 1;             // dimension of the function of interest

  // Throws DomainError unless 0 <= gamma_min < 1 - alpha.
  static DistortionCalibration make(double alpha, double gamma_min, int k, int p);
  // chi2_{p,1-alpha}: the preliminary-set threshold.
  double preliminary_critical() const;
  // H^{-1}(1 - alpha; a, k, p): the robust-set threshold.
  double robust_critical() const;
};

struct GridAxis {
  double lo = 0.0;
  double step = 0.0;
  int count = 0;

  double value(int i) const { return lo + step * i; }
  double hi() const { return value(count - 1); }
};

struct GridSpec {
  std::string name = "custom";
  std::array<GridAxis, 2> axes;

  std::size_t size() const { return static_cast<std::size_t>(axes[0].count) * axes[1].count; }
  // Point n has axis indices (n / count1, n % count1).
  Eigen::VectorXd point(std::size_t n) const;
  std::array<int, 2> indices(std::size_t n) const;

  // m_bar 0.01..0.99 x gamma 0.01..10, step 0.01.
  static GridSpec paper();
  // m_bar 0..1 x gamma 0..10, step 0.1.
  static GridSpec appendix_b();
  // m_bar 0.01..0.99 x gamma 0.01..5, step 0.01.
  static GridSpec appendix_c();
  // A preset name, or "lo:step:hi,lo:step:hi".
  static GridSpec parse(const std::string& s);
  std::string to_string() const;
};

struct GridPoint {
  bool ok = false;  // statistics computable at this point
  double objective = 0.0;
  double s = 0.0;
  double k = 0.0;                   // whole set, p = 2
  std::array<double, 2> k_param{};  // one coordinate at a time, p = 1
  double w = 0.0;
  std::array<double, 2> w_param{};
  bool k_rank_deficient = false;
  bool regularized = false;
};

// Which function of theta a set refers to: both coordinates or one of them.
enum class Target { whole = -1, first = 0, second = 1 };

struct SetResult {
  Target target = Target::whole;
  DistortionCalibration calibration;
  std::vector<char> in_robust;     // CS_R(gamma_min) membership per grid point
  std::vector<char> in_nonrobust;  // CS_N membership per grid point
  // Projections per coordinate; NaN when the set is empty.
  std::array<double, 2> robust_lower{}, robust_upper{}, nonrobust_lower{}, nonrobust_upper{};
  double gamma_hat = 0.0;
  bool never_nests = false;
  bool ics = false;  // true: CS_P(gamma_min) not inside CS_N, two-step set is CS_R

  std::size_t robust_count() const;
  std::size_t nonrobust_count() const;
};

struct TwoStepResult {
  Equation equation = Equation::custom;
  std::vector<std::string> param_names;
  GridSpec grid;
  double alpha = 0.05;
  double gamma_min = 0.05;
  int k = 0;
  std::size_t periods = 0;
  std::vector<GridPoint> points;
  Eigen::VectorXd estimate;     // polished CUGMM point
  double objective_min = 0.0;   // objective at `estimate`
  Eigen::MatrixXd variance;     // GMM variance at `estimate`
  std::size_t failed_points = 0;
  std::size_t regularized_points = 0;
  std::size_t rank_deficient_points = 0;
  SetResult whole;
  std::array<SetResult, 2> per_param;

  const SetResult& set(Target t) const;
};

// Statistic K + a S used by the preliminary and robust sets.
double combined_statistic(const GridPoint& point, Target target, double a);
double wald_of(const GridPoint& point, Target target);

// Membership of CS_P(gamma) and CS_R(gamma) on the grid.
std::vector<char> preliminary_set(const TwoStepResult& result, Target target, double gamma);
std::vector<char> robust_set(const TwoStepResult& result, Target target, double gamma);
// CS_P(gamma) inside CS_N. For a single coordinate the comparison is between
// the sets of coordinate values retained.
bool nests(const TwoStepResult& result, Target target, double gamma);

// Gamma ladder from gamma_min to just below 1 - alpha: 100 log-spaced and 100
// evenly spaced values, merged and sorted.
std::vector<double> gamma_ladder(double gamma_min, double alpha);

// Minimum over the ladder of gamma with nesting, bisected to 1e-4; 1 - alpha
// and never_nests when no ladder value nests.
double distortion_cutoff(const TwoStepResult& result, Target target, bool* never_nests = nullptr);

// Grid argmin of the objective followed by compass search within one cell.
Eigen::VectorXd cugmm_estimate(const MomentProblem& problem, const GridSpec& grid,
                               const std::vector<GridPoint>& points, double* objective = nullptr);

// Statistics on every grid point (in parallel), point estimate, CS_R, CS_N,
// gamma hat and projections for the whole set and each coordinate.
TwoStepResult grid_invert(const MomentProblem& problem, const GridSpec& grid, double alpha, double gamma_min);

}  // namespace bnk
