#include "bnk/gmm.hpp"

#include <cmath>
#include <limits>

#include "bnk/errors.hpp"
#include "bnk/optimizer.hpp"

namespace bnk {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

Eigen::VectorXd gather(const TimeSeriesPanel& panel, const std::string& column,
                       const std::vector<std::size_t>& rows, std::size_t shift) {
  const auto& col = panel.column(column);
  Eigen::VectorXd v(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) v(static_cast<Eigen::Index>(i)) = col[rows[i] + shift];
  return v;
}

// Eigen-decomposition pseudo-inverse of a symmetric matrix; also returns the rank.
Eigen::MatrixXd pinv_sym(const Eigen::MatrixXd& a, int& rank) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(a);
  const Eigen::VectorXd& lam = eig.eigenvalues();
  const double cutoff = std::max(lam.cwiseAbs().maxCoeff(), 1e-300) * 1e-10;
  Eigen::VectorXd inv = Eigen::VectorXd::Zero(lam.size());
  rank = 0;
  for (Eigen::Index i = 0; i < lam.size(); ++i) {
    if (lam(i) > cutoff) {
      inv(i) = 1.0 / lam(i);
      ++rank;
    }
  }
  return eig.eigenvectors() * inv.asDiagonal() * eig.eigenvectors().transpose();
}

// Adds 1e-10 trace(sigma) to the diagonal when the smallest eigenvalue falls
// below it; returns the ridge added.
double regularize(Eigen::MatrixXd& sigma) {
  const double min_eig =
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(sigma, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
  const double floor = std::max(1e-10 * sigma.trace(), std::numeric_limits<double>::min());
  if (min_eig >= floor) return 0.0;
  sigma.diagonal().array() += floor;
  return floor;
}

}  // namespace

const char* equation_name(Equation e) {
  switch (e) {
    case Equation::nkpc: return "nkpc";
    case Equation::is: return "is";
    case Equation::custom: return "custom";
  }
  return "custom";
}

Equation equation_from_name(const std::string& name) {
  if (name == "nkpc") return Equation::nkpc;
  if (name == "is") return Equation::is;
  throw InputError("unknown equation '" + name + "' (expected nkpc or is)");
}

StructuralParams with_point(const StructuralParams& fixed, const Eigen::VectorXd& theta) {
  if (theta.size() != 2) throw DomainError("parameter point must be (m_bar, gamma)");
  StructuralParams p = fixed;
  p.m_bar = theta(0);
  p.gamma = theta(1);
  return p;
}

double residual_nkpc(const StructuralParams& params, const NkpcObs& obs) {
  const ReducedParams r = derive_reduced(params);
  return obs.pi - params.beta * r.Mf * obs.pi_next - r.kappa * obs.x;
}

double residual_is(const StructuralParams& params, const IsObs& obs) {
  const ReducedParams r = derive_reduced(params);
  return obs.x - r.M * obs.x_next + r.sigma * obs.rr;
}

void MomentProblem::validate() const {
  if (!residuals) throw InputError("moment problem has no residual function");
  if (hac_lags < 0) throw InputError("HAC lag count must be >= 0");
  if (moments() < dimension()) {
    throw InputError("fewer instruments (" + std::to_string(moments()) + ") than parameters (" +
                     std::to_string(dimension()) + ")");
  }
  if (static_cast<int>(periods()) <= moments()) {
    throw InputError("only " + std::to_string(periods()) + " usable periods for " + std::to_string(moments()) +
                     " instruments");
  }
}

MomentProblem nkpc_problem(const TimeSeriesPanel& panel, const StructuralParams& fixed,
                           const InstrumentSpec& instruments, int hac_lags) {
  const InstrumentMatrix im = build_instruments(panel, instruments, 1, {"pi", "x"});
  MomentProblem p;
  p.equation = Equation::nkpc;
  p.z = im.z;
  p.rows = im.rows;
  p.param_names = {"m_bar", "gamma"};
  p.hac_lags = hac_lags;
  const Eigen::VectorXd pi = gather(panel, "pi", im.rows, 0);
  const Eigen::VectorXd pi_next = gather(panel, "pi", im.rows, 1);
  const Eigen::VectorXd x = gather(panel, "x", im.rows, 0);
  p.residuals = [fixed, pi, pi_next, x](const Eigen::VectorXd& theta) -> Eigen::VectorXd {
    const StructuralParams s = with_point(fixed, theta);
    const ReducedParams r = derive_reduced(s);
    return pi - (s.beta * r.Mf) * pi_next - r.kappa * x;
  };
  p.validate();
  return p;
}

MomentProblem is_problem(const TimeSeriesPanel& panel, const StructuralParams& fixed,
                         const InstrumentSpec& instruments, int hac_lags) {
  const InstrumentMatrix im = build_instruments(panel, instruments, 1, {"x", "rr"});
  MomentProblem p;
  p.equation = Equation::is;
  p.z = im.z;
  p.rows = im.rows;
  p.param_names = {"m_bar", "gamma"};
  p.hac_lags = hac_lags;
  const Eigen::VectorXd x = gather(panel, "x", im.rows, 0);
  const Eigen::VectorXd x_next = gather(panel, "x", im.rows, 1);
  const Eigen::VectorXd rr = gather(panel, "rr", im.rows, 0);
  p.residuals = [fixed, x, x_next, rr](const Eigen::VectorXd& theta) -> Eigen::VectorXd {
    const ReducedParams r = derive_reduced(with_point(fixed, theta));
    return x - r.M * x_next + r.sigma * rr;
  };
  p.validate();
  return p;
}

double bartlett_weight(int lag, int lags) { return 1.0 - static_cast<double>(lag) / (lags + 1.0); }

Eigen::MatrixXd hac_cross_covariance(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b, int lags) {
  if (a.rows() != b.rows()) throw DomainError("HAC: inputs differ in length");
  if (lags < 0) throw DomainError("HAC: lag count must be >= 0");
  const Eigen::Index n = a.rows();
  if (n == 0) return Eigen::MatrixXd::Zero(a.cols(), b.cols());
  const Eigen::MatrixXd ac = a.rowwise() - a.colwise().mean();
  const Eigen::MatrixXd bc = b.rowwise() - b.colwise().mean();
  // Smooth b with the two-sided Bartlett kernel, then one product with a.
  Eigen::MatrixXd smoothed = bc;
  for (int l = 1; l <= lags && l < n; ++l) {
    const double w = bartlett_weight(l, lags);
    smoothed.bottomRows(n - l) += w * bc.topRows(n - l);
    smoothed.topRows(n - l) += w * bc.bottomRows(n - l);
  }
  return ac.transpose() * smoothed / static_cast<double>(n);
}

Eigen::MatrixXd hac_covariance(const Eigen::MatrixXd& g, int lags) {
  Eigen::MatrixXd s = hac_cross_covariance(g, g, lags);
  return 0.5 * (s + s.transpose());
}

MomentBundle moment_bundle(const MomentProblem& problem, const Eigen::VectorXd& theta) {
  if (theta.size() != problem.dimension()) throw DomainError("parameter point has the wrong dimension");
  MomentBundle b;
  b.periods = problem.periods();
  const double t = static_cast<double>(b.periods);
  const Eigen::VectorXd h = problem.residuals(theta);
  if (!h.allFinite()) throw DomainError("non-finite residuals");
  b.g = problem.z.array().colwise() * h.array();
  b.f = b.g.colwise().sum().transpose() / t;

  b.sigma = hac_covariance(b.g, problem.hac_lags);
  b.ridge = regularize(b.sigma);
  b.weighting = b.sigma.llt().solve(Eigen::MatrixXd::Identity(b.sigma.rows(), b.sigma.cols()));

  const int dim = problem.dimension();
  b.jacobian.resize(problem.moments(), dim);
  b.dg.resize(static_cast<std::size_t>(dim));
  Eigen::VectorXd tp = theta;
  for (int j = 0; j < dim; ++j) {
    const double step = central_step(theta(j));
    tp(j) = theta(j) + step;
    const Eigen::VectorXd up = problem.residuals(tp);
    tp(j) = theta(j) - step;
    const Eigen::VectorXd down = problem.residuals(tp);
    tp(j) = theta(j);
    const Eigen::VectorXd dh = (up - down) / (2.0 * step);
    b.dg[static_cast<std::size_t>(j)] = problem.z.array().colwise() * dh.array();
    b.jacobian.col(j) = b.dg[static_cast<std::size_t>(j)].colwise().sum().transpose() / t;
  }
  return b;
}

double cugmm_objective(const MomentBundle& bundle) { return bundle.f.dot(bundle.weighting * bundle.f); }

double cugmm_objective(const MomentProblem& problem, const Eigen::VectorXd& theta) {
  const Eigen::VectorXd h = problem.residuals(theta);
  if (!h.allFinite()) throw DomainError("non-finite residuals");
  const Eigen::MatrixXd g = problem.z.array().colwise() * h.array();
  const Eigen::VectorXd f = g.colwise().mean().transpose();
  Eigen::MatrixXd sigma = hac_covariance(g, problem.hac_lags);
  regularize(sigma);
  return f.dot(sigma.llt().solve(f));
}

double s_statistic(const MomentBundle& bundle) {
  return static_cast<double>(bundle.periods) * cugmm_objective(bundle);
}

Eigen::MatrixXd orthogonalized_jacobian(const MomentBundle& bundle, int lags) {
  Eigen::MatrixXd dt = bundle.jacobian;
  const Eigen::VectorXd wf = bundle.weighting * bundle.f;
  for (std::size_t j = 0; j < bundle.dg.size(); ++j) {
    const Eigen::MatrixXd omega = hac_cross_covariance(bundle.dg[j], bundle.g, lags);
    dt.col(static_cast<Eigen::Index>(j)) -= omega * wf;
  }
  return dt;
}

KResult k_statistic(const MomentBundle& bundle, int lags, const Eigen::MatrixXd& f_rows) {
  return k_statistic_from(bundle, orthogonalized_jacobian(bundle, lags), f_rows);
}

KResult k_statistic_from(const MomentBundle& bundle, const Eigen::MatrixXd& dt, const Eigen::MatrixXd& f_rows) {
  const Eigen::MatrixXd a = dt.transpose() * bundle.weighting * dt;
  const Eigen::VectorXd score = dt.transpose() * (bundle.weighting * bundle.f);
  int rank_a = 0;
  const Eigen::MatrixXd a_inv = pinv_sym(a, rank_a);
  const Eigen::VectorXd fa = f_rows * (a_inv * score);
  int rank_f = 0;
  const Eigen::MatrixXd middle = pinv_sym(f_rows * a_inv * f_rows.transpose(), rank_f);
  KResult r;
  r.value = static_cast<double>(bundle.periods) * fa.dot(middle * fa);
  r.dof = rank_f;
  r.rank_deficient = rank_a < a.rows() || rank_f < f_rows.rows();
  return r;
}

KResult k_statistic(const MomentBundle& bundle, int lags) {
  const auto dim = bundle.jacobian.cols();
  return k_statistic(bundle, lags, Eigen::MatrixXd::Identity(dim, dim));
}

Eigen::MatrixXd gmm_variance(const MomentBundle& bundle) {
  const Eigen::MatrixXd info = bundle.jacobian.transpose() * bundle.weighting * bundle.jacobian;
  Eigen::FullPivLU<Eigen::MatrixXd> lu(info);
  if (!lu.isInvertible()) return Eigen::MatrixXd::Constant(info.rows(), info.cols(), kNaN);
  return lu.inverse() / static_cast<double>(bundle.periods);
}

double wald_statistic(const Eigen::VectorXd& theta_hat, const Eigen::MatrixXd& variance,
                      const Eigen::VectorXd& theta, const Eigen::MatrixXd& f_rows) {
  if (!variance.allFinite()) return kNaN;
  const Eigen::VectorXd d = f_rows * (theta_hat - theta);
  const Eigen::MatrixXd v = f_rows * variance * f_rows.transpose();
  Eigen::LDLT<Eigen::MatrixXd> ldlt(v);
  if (ldlt.info() != Eigen::Success || !(ldlt.vectorD().minCoeff() > 0.0)) return kNaN;
  return d.dot(ldlt.solve(d));
}

}  // namespace bnk
