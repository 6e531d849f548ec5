#include "bnk/two_step.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include "bnk/chi2mix.hpp"
#include "bnk/errors.hpp"
#include "bnk/parallel.hpp"
#include "bnk/text.hpp"

namespace bnk {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

int target_dim(Target t) { return t == Target::whole ? 2 : 1; }

Eigen::MatrixXd unit_row(int j) {
  Eigen::MatrixXd f = Eigen::MatrixXd::Zero(1, 2);
  f(0, j) = 1.0;
  return f;
}

GridAxis parse_axis(const std::string& s) {
  const auto parts = split(s, ':');
  if (parts.size() != 3) throw InputError("grid axis must be lo:step:hi, got '" + s + "'");
  const double lo = parse_double(parts[0]);
  const double step = parse_double(parts[1]);
  const double hi = parse_double(parts[2]);
  if (!(step > 0.0) || !(hi >= lo)) throw InputError("grid axis needs step > 0 and hi >= lo: '" + s + "'");
  GridAxis a;
  a.lo = lo;
  a.step = step;
  a.count = static_cast<int>(std::floor((hi - lo) / step + 1e-9)) + 1;
  return a;
}

std::vector<char> membership(const TwoStepResult& r, Target target, double a, double critical) {
  std::vector<char> in(r.points.size(), 0);
  for (std::size_t n = 0; n < r.points.size(); ++n) {
    const double v = combined_statistic(r.points[n], target, a);
    in[n] = std::isfinite(v) && v <= critical;
  }
  return in;
}

bool subset(const TwoStepResult& r, Target target, const std::vector<char>& inner,
            const std::vector<char>& outer) {
  if (target == Target::whole) {
    for (std::size_t n = 0; n < inner.size(); ++n) {
      if (inner[n] && !outer[n]) return false;
    }
    return true;
  }
  const int j = static_cast<int>(target);
  std::set<int> kept_outer;
  for (std::size_t n = 0; n < outer.size(); ++n) {
    if (outer[n]) kept_outer.insert(r.grid.indices(n)[static_cast<std::size_t>(j)]);
  }
  for (std::size_t n = 0; n < inner.size(); ++n) {
    if (inner[n] && !kept_outer.count(r.grid.indices(n)[static_cast<std::size_t>(j)])) return false;
  }
  return true;
}

void project(const TwoStepResult& r, const std::vector<char>& in, std::array<double, 2>& lower,
             std::array<double, 2>& upper) {
  lower = {kNaN, kNaN};
  upper = {kNaN, kNaN};
  for (std::size_t n = 0; n < in.size(); ++n) {
    if (!in[n]) continue;
    const Eigen::VectorXd x = r.grid.point(n);
    for (int j = 0; j < 2; ++j) {
      const auto jj = static_cast<std::size_t>(j);
      if (std::isnan(lower[jj]) || x(j) < lower[jj]) lower[jj] = x(j);
      if (std::isnan(upper[jj]) || x(j) > upper[jj]) upper[jj] = x(j);
    }
  }
}

std::vector<char> nonrobust_set(const TwoStepResult& r, Target target) {
  const double c = chi2_critical(target_dim(target), r.alpha);
  std::vector<char> in(r.points.size(), 0);
  for (std::size_t n = 0; n < r.points.size(); ++n) {
    const double w = wald_of(r.points[n], target);
    in[n] = std::isfinite(w) && w <= c;
  }
  return in;
}

SetResult make_set(const TwoStepResult& r, Target target) {
  SetResult s;
  s.target = target;
  s.calibration = DistortionCalibration::make(r.alpha, r.gamma_min, r.k, target_dim(target));
  s.in_robust = membership(r, target, s.calibration.a_value, s.calibration.robust_critical());
  s.in_nonrobust = nonrobust_set(r, target);
  project(r, s.in_robust, s.robust_lower, s.robust_upper);
  project(r, s.in_nonrobust, s.nonrobust_lower, s.nonrobust_upper);
  s.ics = !nests(r, target, r.gamma_min);
  s.gamma_hat = distortion_cutoff(r, target, &s.never_nests);
  return s;
}

}  // namespace

DistortionCalibration DistortionCalibration::make(double alpha, double gamma_min, int k, int p) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("alpha must lie in (0, 1)");
  if (!(gamma_min >= 0.0 && gamma_min < 1.0 - alpha)) {
    throw DomainError("gamma_min must lie in [0, 1 - alpha)");
  }
  DistortionCalibration c;
  c.alpha = alpha;
  c.gamma_min = gamma_min;
  c.k = k;
  c.p = p;
  c.a_value = a_of_gamma(gamma_min, alpha, k, p);
  return c;
}

double DistortionCalibration::preliminary_critical() const { return chi2_critical(p, alpha); }

double DistortionCalibration::robust_critical() const { return chi2mix_quantile(a_value, k, p, 1.0 - alpha); }

Eigen::VectorXd GridSpec::point(std::size_t n) const {
  const auto idx = indices(n);
  Eigen::VectorXd x(2);
  x << axes[0].value(idx[0]), axes[1].value(idx[1]);
  return x;
}

std::array<int, 2> GridSpec::indices(std::size_t n) const {
  const auto c1 = static_cast<std::size_t>(axes[1].count);
  return {static_cast<int>(n / c1), static_cast<int>(n % c1)};
}

GridSpec GridSpec::paper() {
  GridSpec g;
  g.name = "paper";
  g.axes = {GridAxis{0.01, 0.01, 99}, GridAxis{0.01, 0.01, 1000}};
  return g;
}

GridSpec GridSpec::appendix_b() {
  GridSpec g;
  g.name = "appendix-b";
  g.axes = {GridAxis{0.0, 0.1, 11}, GridAxis{0.0, 0.1, 101}};
  return g;
}

GridSpec GridSpec::appendix_c() {
  GridSpec g;
  g.name = "appendix-c";
  g.axes = {GridAxis{0.01, 0.01, 99}, GridAxis{0.01, 0.01, 500}};
  return g;
}

GridSpec GridSpec::parse(const std::string& s) {
  const std::string t(trim(s));
  if (t == "paper") return paper();
  if (t == "appendix-b") return appendix_b();
  if (t == "appendix-c") return appendix_c();
  const auto parts = split(t, ',');
  if (parts.size() != 2) {
    throw InputError("grid must be paper, appendix-b, appendix-c or lo:step:hi,lo:step:hi; got '" + s + "'");
  }
  GridSpec g;
  g.axes = {parse_axis(std::string(trim(parts[0]))), parse_axis(std::string(trim(parts[1])))};
  return g;
}

std::string GridSpec::to_string() const {
  if (name != "custom") return name;
  std::string out;
  for (std::size_t j = 0; j < 2; ++j) {
    if (j) out += ",";
    out += format_double(axes[j].lo) + ":" + format_double(axes[j].step) + ":" + format_double(axes[j].hi());
  }
  return out;
}

std::size_t SetResult::robust_count() const {
  return static_cast<std::size_t>(std::count(in_robust.begin(), in_robust.end(), 1));
}

std::size_t SetResult::nonrobust_count() const {
  return static_cast<std::size_t>(std::count(in_nonrobust.begin(), in_nonrobust.end(), 1));
}

const SetResult& TwoStepResult::set(Target t) const {
  return t == Target::whole ? whole : per_param[static_cast<std::size_t>(t)];
}

double combined_statistic(const GridPoint& point, Target target, double a) {
  if (!point.ok) return kNaN;
  const double k = target == Target::whole ? point.k : point.k_param[static_cast<std::size_t>(target)];
  return k + a * point.s;
}

double wald_of(const GridPoint& point, Target target) {
  if (!point.ok) return kNaN;
  return target == Target::whole ? point.w : point.w_param[static_cast<std::size_t>(target)];
}

std::vector<char> preliminary_set(const TwoStepResult& r, Target target, double gamma) {
  const int p = target_dim(target);
  return membership(r, target, a_of_gamma(gamma, r.alpha, r.k, p), chi2_critical(p, r.alpha));
}

std::vector<char> robust_set(const TwoStepResult& r, Target target, double gamma) {
  const int p = target_dim(target);
  const double a = a_of_gamma(gamma, r.alpha, r.k, p);
  return membership(r, target, a, chi2mix_quantile(a, r.k, p, 1.0 - r.alpha));
}

bool nests(const TwoStepResult& r, Target target, double gamma) {
  return subset(r, target, preliminary_set(r, target, gamma), nonrobust_set(r, target));
}

std::vector<double> gamma_ladder(double gamma_min, double alpha) {
  const double top = std::max(gamma_min, 1.0 - alpha - 1e-4);
  std::vector<double> out;
  const int n = 100;
  for (int i = 0; i < n; ++i) out.push_back(gamma_min + (top - gamma_min) * i / (n - 1));
  const double log_lo = std::log(std::max(gamma_min, 1e-4));
  const double log_hi = std::log(top);
  for (int i = 0; i < n; ++i) out.push_back(std::exp(log_lo + (log_hi - log_lo) * i / (n - 1)));
  for (double& g : out) g = std::clamp(g, gamma_min, top);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

double distortion_cutoff(const TwoStepResult& r, Target target, bool* never_nests) {
  const std::vector<double> ladder = gamma_ladder(r.gamma_min, r.alpha);
  if (never_nests) *never_nests = false;
  std::size_t first = ladder.size();
  for (std::size_t i = 0; i < ladder.size(); ++i) {
    if (nests(r, target, ladder[i])) {
      first = i;
      break;
    }
  }
  if (first == ladder.size()) {
    if (never_nests) *never_nests = true;
    return 1.0 - r.alpha;
  }
  if (first == 0) return ladder[0];
  double lo = ladder[first - 1];
  double hi = ladder[first];
  while (hi - lo > 1e-4) {
    const double mid = 0.5 * (lo + hi);
    (nests(r, target, mid) ? hi : lo) = mid;
  }
  return hi;
}

Eigen::VectorXd cugmm_estimate(const MomentProblem& problem, const GridSpec& grid,
                               const std::vector<GridPoint>& points, double* objective) {
  std::size_t best = points.size();
  for (std::size_t n = 0; n < points.size(); ++n) {
    if (points[n].ok && (best == points.size() || points[n].objective < points[best].objective)) best = n;
  }
  if (best == points.size()) throw DomainError("objective not computable at any grid point");

  const Eigen::VectorXd start = grid.point(best);
  auto f = [&](const Eigen::VectorXd& x) {
    try {
      const double v = cugmm_objective(problem, x);
      return std::isfinite(v) ? v : kInf;
    } catch (const std::exception&) {
      return kInf;
    }
  };
  // Compass search inside the cell box around the grid minimum.
  Eigen::VectorXd x = start;
  double fx = points[best].objective;
  Eigen::Vector2d step(0.5 * grid.axes[0].step, 0.5 * grid.axes[1].step);
  const Eigen::Vector2d min_step = 1e-7 * Eigen::Vector2d(grid.axes[0].step, grid.axes[1].step);
  while (step(0) > min_step(0) || step(1) > min_step(1)) {
    bool moved = false;
    for (int j = 0; j < 2 && !moved; ++j) {
      for (double sign : {1.0, -1.0}) {
        Eigen::VectorXd y = x;
        y(j) += sign * step(j);
        const GridAxis& axis = grid.axes[static_cast<std::size_t>(j)];
        if (std::abs(y(j) - start(j)) > axis.step + 1e-12) continue;
        if (y(j) < axis.lo || y(j) > axis.hi()) continue;
        const double fy = f(y);
        if (fy < fx) {
          x = y;
          fx = fy;
          moved = true;
          break;
        }
      }
    }
    if (!moved) step *= 0.5;
  }
  if (objective) *objective = fx;
  return x;
}

TwoStepResult grid_invert(const MomentProblem& problem, const GridSpec& grid, double alpha, double gamma_min) {
  problem.validate();
  if (problem.dimension() != 2) throw DomainError("grid inversion needs a two-parameter problem");
  if (grid.axes[0].count < 1 || grid.axes[1].count < 1) throw DomainError("empty grid");
  // Fails early on a bad (alpha, gamma_min) pair.
  DistortionCalibration::make(alpha, gamma_min, problem.moments(), 2);

  TwoStepResult r;
  r.equation = problem.equation;
  r.param_names = problem.param_names;
  r.grid = grid;
  r.alpha = alpha;
  r.gamma_min = gamma_min;
  r.k = problem.moments();
  r.periods = problem.periods();
  r.points.resize(grid.size());

  const Eigen::MatrixXd e0 = unit_row(0);
  const Eigen::MatrixXd e1 = unit_row(1);
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(2, 2);
  parallel_for(grid.size(), [&](std::size_t n) {
    GridPoint& gp = r.points[n];
    try {
      const MomentBundle b = moment_bundle(problem, grid.point(n));
      const Eigen::MatrixXd dt = orthogonalized_jacobian(b, problem.hac_lags);
      gp.objective = cugmm_objective(b);
      gp.s = s_statistic(b);
      const KResult k = k_statistic_from(b, dt, eye);
      gp.k = k.value;
      gp.k_param = {k_statistic_from(b, dt, e0).value, k_statistic_from(b, dt, e1).value};
      gp.k_rank_deficient = k.rank_deficient;
      gp.regularized = b.regularized();
      gp.ok = std::isfinite(gp.s) && std::isfinite(gp.k) && std::isfinite(gp.k_param[0]) &&
              std::isfinite(gp.k_param[1]);
    } catch (const std::exception&) {
      gp.ok = false;
    }
  });
  for (const auto& gp : r.points) {
    r.failed_points += !gp.ok;
    r.regularized_points += gp.ok && gp.regularized;
    r.rank_deficient_points += gp.ok && gp.k_rank_deficient;
  }

  r.estimate = cugmm_estimate(problem, grid, r.points, &r.objective_min);
  try {
    r.variance = gmm_variance(moment_bundle(problem, r.estimate));
  } catch (const std::exception&) {
    // No Jacobian at the estimate: CS_N is empty.
    r.variance = Eigen::MatrixXd::Constant(2, 2, kNaN);
  }
  for (std::size_t n = 0; n < r.points.size(); ++n) {
    GridPoint& gp = r.points[n];
    if (!gp.ok) continue;
    const Eigen::VectorXd x = grid.point(n);
    gp.w = wald_statistic(r.estimate, r.variance, x, eye);
    gp.w_param = {wald_statistic(r.estimate, r.variance, x, e0), wald_statistic(r.estimate, r.variance, x, e1)};
  }

  r.whole = make_set(r, Target::whole);
  r.per_param = {make_set(r, Target::first), make_set(r, Target::second)};
  return r;
}

}  // namespace bnk
