#include "bnk/likelihood.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

#include <boost/math/distributions/chi_squared.hpp>

#include "bnk/errors.hpp"
#include "bnk/full_model.hpp"
#include "bnk/kalman.hpp"
#include "bnk/parallel.hpp"
#include "bnk/rng.hpp"

namespace bnk {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kFailurePenalty = 1e10;

double logistic(double z) { return 1.0 / (1.0 + std::exp(-z)); }

double to_box(double z, std::pair<double, double> b) { return b.first + (b.second - b.first) * logistic(z); }

double from_box(double v, std::pair<double, double> b) {
  const double u = (v - b.first) / (b.second - b.first);
  if (!(u > 0.0 && u < 1.0)) {
    throw DomainError("value " + std::to_string(v) + " outside the open parameter box");
  }
  return std::log(u / (1.0 - u));
}

Eigen::MatrixXd panel_matrix(const TimeSeriesPanel& panel, ObservableSet obs) {
  const std::vector<std::string> names = obs == ObservableSet::output_inflation_rate
                                             ? std::vector<std::string>{"x", "pi", "i"}
                                             : std::vector<std::string>{"x", "pi"};
  Eigen::MatrixXd m(static_cast<Eigen::Index>(panel.size()), static_cast<Eigen::Index>(names.size()));
  for (std::size_t j = 0; j < names.size(); ++j) {
    const auto& col = panel.column(names[j]);
    for (std::size_t t = 0; t < panel.size(); ++t) {
      m(static_cast<Eigen::Index>(t), static_cast<Eigen::Index>(j)) = col[t];
    }
  }
  return m;
}

GaussianStateSpace to_gaussian(const StateSpaceSolution& s, ObservableSet obs) {
  GaussianStateSpace g;
  const Eigen::Index n_obs = obs == ObservableSet::output_inflation_rate ? 3 : 2;
  g.design = s.c_matrix.topRows(n_obs);
  g.transition = s.transition;
  g.state_cov = s.impact * s.sigma_mat * s.impact.transpose();
  return g;
}

// Per-period log densities as a function of the free values in the requested
// coordinates.
Eigen::VectorXd densities_at(const LikelihoodProblem& problem, const Eigen::VectorXd& coords,
                             ScoreCoordinates kind) {
  Eigen::VectorXd v = coords;
  if (kind == ScoreCoordinates::unconstrained) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      v(i) = to_box(coords(i), problem.box[problem.free[static_cast<std::size_t>(i)]]);
    }
  }
  return log_densities(problem, problem.assemble(v));
}

}  // namespace

ParamBox ParamBox::defaults() {
  ParamBox b;
  const std::pair<double, double> unit{0.001, 0.999};
  const std::pair<double, double> variance{0.01, 5.0};
  b.bounds = {
      {Param::beta, unit},         {Param::theta, unit},         {Param::m_bar, unit},
      {Param::gamma, {0.01, 10.0}}, {Param::phi, {0.0, 5.0}},     {Param::phi_pi, {0.0, 5.0}},
      {Param::phi_x, {0.0, 5.0}},  {Param::rho_i, unit},         {Param::rho_d, unit},
      {Param::rho_m, unit},        {Param::sigma2_s, variance},  {Param::sigma2_d, variance},
      {Param::sigma2_m, variance},
  };
  return b;
}

std::pair<double, double> ParamBox::operator[](Param p) const {
  auto it = bounds.find(p);
  if (it == bounds.end()) throw DomainError("no bounds for parameter " + std::string(param_name(p)));
  return it->second;
}

LikelihoodProblem LikelihoodProblem::complete_model(const TimeSeriesPanel& panel, StructuralParams baseline) {
  LikelihoodProblem p;
  p.data = panel_matrix(panel, ObservableSet::output_inflation_rate);
  p.observables = ObservableSet::output_inflation_rate;
  p.baseline = baseline;
  p.free = {Param::m_bar, Param::gamma, Param::phi_pi, Param::phi_x, Param::rho_i,
            Param::rho_d, Param::rho_m, Param::sigma2_d, Param::sigma2_s};
  return p;
}

LikelihoodProblem LikelihoodProblem::restricted_model(const TimeSeriesPanel& panel, StructuralParams baseline) {
  LikelihoodProblem p;
  p.data = panel_matrix(panel, ObservableSet::output_inflation);
  p.observables = ObservableSet::output_inflation;
  p.baseline = baseline.restricted();
  p.restricted_regime = true;
  p.free = {Param::m_bar, Param::gamma, Param::rho_d, Param::rho_m, Param::sigma2_d, Param::sigma2_m};
  return p;
}

StructuralParams LikelihoodProblem::assemble(const Eigen::VectorXd& values) const {
  if (static_cast<std::size_t>(values.size()) != free.size()) {
    throw DomainError("assemble: expected " + std::to_string(free.size()) + " free values");
  }
  StructuralParams p = baseline;
  for (std::size_t i = 0; i < free.size(); ++i) p.set(free[i], values(static_cast<Eigen::Index>(i)));
  return restricted_regime ? p.restricted() : p;
}

Eigen::VectorXd LikelihoodProblem::free_values(const StructuralParams& params) const {
  Eigen::VectorXd v(static_cast<Eigen::Index>(free.size()));
  for (std::size_t i = 0; i < free.size(); ++i) v(static_cast<Eigen::Index>(i)) = params.get(free[i]);
  return v;
}

LikelihoodProblem LikelihoodProblem::with_free(std::vector<Param> free_params) const {
  LikelihoodProblem p = *this;
  p.free = std::move(free_params);
  return p;
}

void LikelihoodProblem::validate() const {
  if (free.empty()) throw DomainError("likelihood problem has no free parameters");
  std::set<Param> seen(free.begin(), free.end());
  if (seen.size() != free.size()) throw DomainError("likelihood problem lists a free parameter twice");
  if (data.rows() < 2) throw DomainError("likelihood problem needs at least two observations");
  if (restricted_regime) {
    for (Param p : free) {
      if (p == Param::phi_pi || p == Param::phi_x || p == Param::rho_i || p == Param::sigma2_s) {
        throw DomainError("parameter " + std::string(param_name(p)) +
                          " is pinned by the restricted regime and cannot be free");
      }
    }
  }
}

Eigen::VectorXd log_densities(const LikelihoodProblem& problem, const StructuralParams& params) {
  const StateSpaceSolution sol = solve_full_re(params);
  return kalman_log_densities(to_gaussian(sol, problem.observables), problem.data);
}

double log_likelihood(const LikelihoodProblem& problem, const StructuralParams& params) {
  if (problem.data.rows() == 0) return 0.0;
  return log_densities(problem, params).sum();
}

ScoreBundle score_bundle(const LikelihoodProblem& problem, const StructuralParams& params,
                         ScoreCoordinates coords) {
  const Eigen::VectorXd v = problem.free_values(params);
  Eigen::VectorXd c = v;
  if (coords == ScoreCoordinates::unconstrained) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      c(i) = from_box(v(i), problem.box[problem.free[static_cast<std::size_t>(i)]]);
    }
  }
  const Eigen::Index k = c.size();
  ScoreBundle out;
  out.increments.resize(problem.data.rows(), k);
  Eigen::VectorXd cp = c;
  for (Eigen::Index i = 0; i < k; ++i) {
    const double h = central_step(c(i));
    cp(i) = c(i) + h;
    const Eigen::VectorXd up = densities_at(problem, cp, coords);
    cp(i) = c(i) - h;
    const Eigen::VectorXd down = densities_at(problem, cp, coords);
    cp(i) = c(i);
    out.increments.col(i) = (up - down) / (2.0 * h);
  }
  out.total = out.increments.colwise().sum().transpose();
  out.j_matrix = out.increments.transpose() * out.increments;
  return out;
}

LmResult lm_from_score(const ScoreBundle& score) {
  LmResult r;
  r.dof = static_cast<int>(score.total.size());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(score.j_matrix);
  const Eigen::VectorXd& lambda = eig.eigenvalues();
  const double cutoff = std::max(lambda.cwiseAbs().maxCoeff(), 1e-300) * 1e-12;
  const Eigen::VectorXd proj = eig.eigenvectors().transpose() * score.total;
  double stat = 0.0;
  for (Eigen::Index i = 0; i < lambda.size(); ++i) {
    if (lambda(i) > cutoff) {
      stat += proj(i) * proj(i) / lambda(i);
      ++r.rank;
    }
  }
  r.rank_deficient = r.rank < r.dof;
  r.statistic = stat;
  const boost::math::chi_squared chi(r.dof);
  r.p_value = boost::math::cdf(boost::math::complement(chi, std::max(stat, 0.0)));
  return r;
}

LmResult lm_o(const LikelihoodProblem& problem, const StructuralParams& params0, ScoreCoordinates coords) {
  problem.validate();
  return lm_from_score(score_bundle(problem, params0, coords));
}

MlEstimate ml_estimate(const LikelihoodProblem& problem, const StructuralParams& start,
                       const MlOptions& options) {
  problem.validate();
  const std::size_t k = problem.free.size();
  const Eigen::VectorXd v0 = problem.free_values(start);
  Eigen::VectorXd z0(static_cast<Eigen::Index>(k));
  for (std::size_t i = 0; i < k; ++i) {
    z0(static_cast<Eigen::Index>(i)) = from_box(v0(static_cast<Eigen::Index>(i)), problem.box[problem.free[i]]);
  }
  auto to_values = [&](const Eigen::VectorXd& z) {
    Eigen::VectorXd v(z.size());
    for (std::size_t i = 0; i < k; ++i) {
      const auto ii = static_cast<Eigen::Index>(i);
      v(ii) = to_box(z(ii), problem.box[problem.free[i]]);
    }
    return v;
  };
  auto negative_loglik = [&](const Eigen::VectorXd& z) {
    try {
      const double ll = log_likelihood(problem, problem.assemble(to_values(z)));
      return std::isfinite(ll) ? -ll : kFailurePenalty;
    } catch (const std::exception&) {
      return kFailurePenalty;
    }
  };

  const BfgsResult opt = minimize_bfgs(negative_loglik, z0, options.bfgs);

  MlEstimate est;
  est.free = problem.free;
  est.values = to_values(opt.x);
  est.params = problem.assemble(est.values);
  est.log_likelihood = -opt.value;
  est.converged = opt.converged;
  est.iterations = opt.iterations;
  est.evaluations = opt.evaluations;
  est.message = opt.message;

  const Eigen::Index kk = static_cast<Eigen::Index>(k);
  est.sd_hessian = Eigen::VectorXd::Constant(kk, kNaN);
  est.sd_opg = Eigen::VectorXd::Constant(kk, kNaN);
  est.t_stat = Eigen::VectorXd::Constant(kk, kNaN);
  est.covariance = Eigen::MatrixXd::Constant(kk, kk, kNaN);

  auto natural_loglik = [&](const Eigen::VectorXd& v) {
    try {
      return log_likelihood(problem, problem.assemble(v));
    } catch (const std::exception&) {
      return kNaN;
    }
  };
  const Eigen::VectorXd grad = central_gradient(natural_loglik, est.values);
  est.score_max_abs = grad.cwiseAbs().maxCoeff();

  if (options.compute_standard_errors) {
    const Eigen::MatrixXd hess = central_hessian(natural_loglik, est.values);
    if (hess.allFinite()) {
      Eigen::FullPivLU<Eigen::MatrixXd> lu(-hess);
      if (lu.isInvertible()) {
        est.covariance = lu.inverse();
        for (Eigen::Index i = 0; i < kk; ++i) {
          const double var = est.covariance(i, i);
          est.sd_hessian(i) = var > 0 ? std::sqrt(var) : kNaN;
        }
        est.t_stat = est.values.cwiseQuotient(est.sd_hessian);
      }
    }
    try {
      const ScoreBundle sb = score_bundle(problem, est.params);
      Eigen::FullPivLU<Eigen::MatrixXd> lu(sb.j_matrix);
      if (lu.isInvertible()) est.sd_opg = lu.inverse().diagonal().cwiseSqrt();
    } catch (const std::exception&) {
      // Left as NaN.
    }
  }
  return est;
}

double wald_statistic(const MlEstimate& est, const Eigen::VectorXd& null_values) {
  const Eigen::VectorXd d = est.values - null_values;
  if (!est.covariance.allFinite()) return kNaN;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(est.covariance);
  if (!lu.isInvertible()) return kNaN;
  return d.dot(lu.solve(d));
}

std::vector<Param> lm_group(int group_id) {
  std::vector<Param> base = {Param::m_bar, Param::gamma, Param::phi_pi, Param::phi_x, Param::rho_i};
  switch (group_id) {
    case 1: return base;
    case 2: base.push_back(Param::rho_d); return base;
    case 3: base.push_back(Param::rho_m); return base;
    case 4: base.push_back(Param::sigma2_d); return base;
    case 5: base.push_back(Param::sigma2_s); return base;
    case 6: base.push_back(Param::sigma2_m); return base;
    default: throw DomainError("parameter group must be in 1..6, got " + std::to_string(group_id));
  }
}

namespace {

void summarize(ProjectionSet& set) {
  const boost::math::chi_squared chi(static_cast<double>(set.params.size()));
  set.critical_value = boost::math::quantile(chi, set.level);
  set.retained.clear();
  for (std::size_t d = 0; d < set.draws.size(); ++d) {
    const double lm = set.lm(static_cast<Eigen::Index>(d));
    if (std::isfinite(lm) && lm <= set.critical_value) set.retained.push_back(d);
  }
  const auto k = static_cast<Eigen::Index>(set.params.size());
  set.lower = Eigen::VectorXd::Constant(k, kNaN);
  set.upper = Eigen::VectorXd::Constant(k, kNaN);
  set.warning.clear();
  if (set.retained.empty()) {
    set.warning = "empty confidence set: every draw rejected";
    return;
  }
  set.lower = set.draws[set.retained.front()];
  set.upper = set.lower;
  for (std::size_t d : set.retained) {
    set.lower = set.lower.cwiseMin(set.draws[d]);
    set.upper = set.upper.cwiseMax(set.draws[d]);
  }
}

}  // namespace

ProjectionSet lm_projection_cs(const LikelihoodProblem& problem, int group_id, std::size_t n_draws,
                               std::uint64_t seed, double level) {
  ProjectionSet set;
  set.group_id = group_id;
  set.params = lm_group(group_id);
  set.level = level;
  const LikelihoodProblem sub = problem.with_free(set.params);
  if (n_draws > 0) sub.validate();

  set.draws.resize(n_draws);
  set.lm = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(n_draws), kNaN);
  // Draws come from one stream so the set does not depend on scheduling.
  Rng rng(seed, static_cast<std::uint64_t>(group_id));
  for (auto& d : set.draws) {
    d.resize(static_cast<Eigen::Index>(set.params.size()));
    for (std::size_t j = 0; j < set.params.size(); ++j) {
      const auto [lo, hi] = problem.box[set.params[j]];
      d(static_cast<Eigen::Index>(j)) = rng.uniform(lo, hi);
    }
  }
  std::vector<char> failed(n_draws, 0);
  parallel_for(n_draws, [&](std::size_t d) {
    try {
      set.lm(static_cast<Eigen::Index>(d)) = lm_o(sub, sub.assemble(set.draws[d])).statistic;
    } catch (const std::exception&) {
      failed[d] = 1;
    }
  });
  set.failed = static_cast<std::size_t>(std::count(failed.begin(), failed.end(), 1));
  summarize(set);
  return set;
}

ProjectionSet rethreshold(const ProjectionSet& set, double level) {
  ProjectionSet out = set;
  out.level = level;
  summarize(out);
  return out;
}

}  // namespace bnk
