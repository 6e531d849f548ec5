#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "bnk/errors.hpp"
#include "bnk/full_model.hpp"
#include "bnk/kalman.hpp"
#include "bnk/likelihood.hpp"
#include "bnk/optimizer.hpp"
#include "bnk/rng.hpp"
#include "bnk/simulation.hpp"
#include "oracles.hpp"

using namespace bnk;

namespace {

TimeSeriesPanel simulated(std::uint64_t seed, std::size_t kept = 200, StructuralParams p = table1_calibration()) {
  SimulationPlan plan;
  plan.params = p;
  plan.seed = seed;
  plan.total_length = kept + 200;
  return simulate_observables(plan);
}

}  // namespace

TEST_CASE("closed-form likelihood of a trivial system") {
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(2, 2);
  Eigen::MatrixXd y(1, 2);
  y << 0.3, -1.2;
  const double ll = square_state_space_loglik(eye, Eigen::MatrixXd::Zero(2, 2), eye, y, Eigen::VectorXd::Zero(2));
  CHECK(ll == doctest::Approx(-kLog2Pi - 0.5 * (0.09 + 1.44)).epsilon(1e-15));
  CHECK(square_state_space_loglik(eye, eye, eye, Eigen::MatrixXd(0, 2), Eigen::VectorXd::Zero(2)) == 0.0);
}

TEST_CASE("Kalman filter reproduces the square closed form after the first period") {
  // Two AR(1) states revealed exactly by an invertible loading: once y_1 is
  // seen the filter's conditional densities are the closed-form terms.
  Eigen::MatrixXd c(2, 2), lambda(2, 2), sigma(2, 2);
  c << 0.7, -1.3, 0.2, 0.9;
  lambda << 0.8, 0, 0, 0.4;
  sigma << 0.5, 0, 0, 1.7;
  Rng rng(12);
  const int t = 300;
  Eigen::MatrixXd y(t, 2);
  Eigen::Vector2d u(0, 0);
  for (int s = 0; s < t; ++s) {
    u = lambda * u + Eigen::Vector2d(std::sqrt(sigma(0, 0)) * rng.normal(), std::sqrt(sigma(1, 1)) * rng.normal());
    y.row(s) = (c * u).transpose();
  }
  GaussianStateSpace m{c, lambda, sigma};
  const Eigen::VectorXd dens = kalman_log_densities(m, y);
  const double tail = dens.tail(t - 1).sum();
  const double closed = square_state_space_loglik(c, lambda, sigma, y.bottomRows(t - 1), y.row(0).transpose());
  CHECK(tail == doctest::Approx(closed).epsilon(1e-9));
}

TEST_CASE("stationary covariance solves the Lyapunov equation") {
  Eigen::MatrixXd tr(3, 3), q(3, 3);
  tr << 0.5, 0.1, 0, 0, 0.9, 0.2, 0, 0, -0.3;
  q << 1, 0.2, 0, 0.2, 2, 0.1, 0, 0.1, 0.5;
  const Eigen::MatrixXd p = stationary_covariance(tr, q);
  CHECK((p - (tr * p * tr.transpose() + q)).norm() < 1e-12);
}

TEST_CASE("problem construction") {
  const TimeSeriesPanel panel = simulated(1);
  const LikelihoodProblem prob = LikelihoodProblem::complete_model(panel);
  CHECK(prob.periods() == 200);
  CHECK(prob.free.size() == 9);
  CHECK(prob.data.cols() == 3);
  const StructuralParams p = table1_calibration();
  CHECK(prob.assemble(prob.free_values(p)) == p);
  CHECK_THROWS(prob.with_free({}).validate());
  CHECK_THROWS(prob.with_free({Param::m_bar, Param::m_bar}).validate());
  const LikelihoodProblem r = LikelihoodProblem::restricted_model(panel);
  CHECK(r.data.cols() == 2);
  CHECK(r.restricted_regime);
  const StructuralParams a = r.assemble(r.free_values(p));
  CHECK(a.rho_i == 0.0);
  CHECK(a.phi_x == 0.0);
  CHECK(a.sigma2_s == 0.0);
  CHECK(a.phi_pi == doctest::Approx(a.gamma / a.beta));
}

TEST_CASE("score increments sum to the total and J is PSD") {
  const LikelihoodProblem prob = LikelihoodProblem::complete_model(simulated(2));
  const ScoreBundle s = score_bundle(prob, table1_calibration());
  CHECK(s.increments.rows() == 200);
  CHECK(s.increments.cols() == 9);
  CHECK((s.increments.colwise().sum().transpose() - s.total).norm() == 0.0);
  CHECK((s.j_matrix - s.j_matrix.transpose()).norm() == 0.0);
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(s.j_matrix);
  CHECK(es.eigenvalues().minCoeff() >= -1e-10);
}

TEST_CASE("score matches a Ridders derivative of the log likelihood") {
  const LikelihoodProblem prob = LikelihoodProblem::complete_model(simulated(3));
  Rng rng(5, 1);
  for (int point = 0; point < 20; ++point) {
    // Interior points around the estimate.
    StructuralParams p = table1_calibration();
    for (Param q : prob.free) {
      const auto [lo, hi] = prob.box[q];
      const double v = p.get(q) * (1.0 + 0.1 * (rng.uniform() - 0.5));
      p.set(q, std::clamp(v, lo + 0.01 * (hi - lo), hi - 0.01 * (hi - lo)));
    }
    const ScoreBundle s = score_bundle(prob, p);
    for (std::size_t j = 0; j < prob.free.size(); ++j) {
      const Param q = prob.free[j];
      auto f = [&](double v) {
        StructuralParams pp = p;
        pp.set(q, v);
        return log_likelihood(prob, pp);
      };
      const double ref = oracle::ridders(f, p.get(q), 1e-3 * std::max(1.0, std::abs(p.get(q))));
      const double got = s.total(static_cast<Eigen::Index>(j));
      CHECK(std::abs(got - ref) <= 1e-5 * std::max(1.0, std::abs(ref)));
    }
  }
}

TEST_CASE("single observation: increment equals total") {
  LikelihoodProblem prob = LikelihoodProblem::complete_model(simulated(4));
  prob.data = prob.data.topRows(2).eval();
  const ScoreBundle two = score_bundle(prob, table1_calibration());
  CHECK((two.increments.row(0) + two.increments.row(1) - two.total.transpose()).norm() == 0.0);
  prob.data = prob.data.topRows(1).eval();
  CHECK_THROWS(prob.validate());
}

TEST_CASE("ML at a simulated sample, then LM at the optimum") {
  const LikelihoodProblem prob = LikelihoodProblem::complete_model(simulated(7));
  const MlEstimate est = ml_estimate(prob, table1_calibration());
  CHECK(est.converged);
  CHECK(est.score_max_abs < 1e-2);
  CHECK(est.values.size() == 9);
  for (Eigen::Index i = 0; i < est.values.size(); ++i) {
    CHECK(est.sd_hessian(i) > 0.0);
    CHECK(est.sd_opg(i) > 0.0);
    CHECK(est.t_stat(i) == doctest::Approx(est.values(i) / est.sd_hessian(i)));
  }
  CHECK(est.log_likelihood >= log_likelihood(prob, table1_calibration()));
  const LmResult lm = lm_o(prob, est.params);
  CHECK(lm.statistic < 1e-3);
  CHECK(lm.dof == 9);
  CHECK(lm.p_value > 0.99);
  CHECK(wald_statistic(est, est.values) == doctest::Approx(0.0));
  // Restarting at the optimum stops at once.
  const MlEstimate again = ml_estimate(prob, est.params);
  CHECK(again.converged);
  CHECK((again.values - est.values).cwiseAbs().maxCoeff() < 1e-3);
}

TEST_CASE("information matrix equality on a long sample") {
  const LikelihoodProblem prob = LikelihoodProblem::complete_model(simulated(11, 20000));
  const StructuralParams truth = table1_calibration();
  const ScoreBundle s = score_bundle(prob, truth);
  const Objective nll = [&](const Eigen::VectorXd& v) { return -log_likelihood(prob, prob.assemble(v)); };
  const Eigen::MatrixXd h = central_hessian(nll, prob.free_values(truth));
  // Compare in the scale that makes the Hessian the identity.
  const Eigen::LLT<Eigen::MatrixXd> llt(h);
  REQUIRE(llt.info() == Eigen::Success);
  const Eigen::MatrixXd l = llt.matrixL();
  const Eigen::MatrixXd linv = l.inverse();
  const Eigen::MatrixXd scaled = linv * s.j_matrix * linv.transpose();
  const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(scaled);
  CHECK(es.eigenvalues().minCoeff() > 0.9);
  CHECK(es.eigenvalues().maxCoeff() < 1.1);
}

TEST_CASE("LM rank deficiency is reported") {
  ScoreBundle s;
  s.increments = Eigen::MatrixXd::Zero(10, 2);
  for (int t = 0; t < 10; ++t) s.increments(t, 0) = s.increments(t, 1) = (t % 3) - 0.8;
  s.total = s.increments.colwise().sum().transpose();
  s.j_matrix = s.increments.transpose() * s.increments;
  const LmResult r = lm_from_score(s);
  CHECK(r.rank == 1);
  CHECK(r.rank_deficient);
  CHECK(std::isfinite(r.statistic));
  CHECK(r.statistic >= 0.0);
}

TEST_CASE("parameter groups") {
  CHECK(lm_group(1) == std::vector<Param>{Param::m_bar, Param::gamma, Param::phi_pi, Param::phi_x, Param::rho_i});
  for (int g = 2; g <= 6; ++g) CHECK(lm_group(g).size() == 6);
  CHECK(lm_group(6).back() == Param::sigma2_m);
  CHECK_THROWS(lm_group(0));
  CHECK_THROWS(lm_group(7));
}

TEST_CASE("projection sets") {
  LikelihoodProblem prob = LikelihoodProblem::complete_model(simulated(13));
  const StructuralParams truth = table1_calibration();

  const ProjectionSet none = lm_projection_cs(prob, 1, 0, 1);
  CHECK(none.empty());
  CHECK_FALSE(none.warning.empty());

  // A box hugging the truth so that draws are retained.
  for (Param q : lm_group(1)) prob.box.bounds[q] = {truth.get(q) - 0.02, truth.get(q) + 0.02};
  const ProjectionSet s95 = lm_projection_cs(prob, 1, 300, 99, 0.95);
  const ProjectionSet again = lm_projection_cs(prob, 1, 300, 99, 0.95);
  CHECK(s95.retained == again.retained);
  REQUIRE_FALSE(s95.empty());
  CHECK(s95.critical_value == doctest::Approx(11.0705).epsilon(1e-4));
  for (std::size_t d : s95.retained) {
    CHECK(s95.lm(static_cast<Eigen::Index>(d)) <= s95.critical_value);
    for (Eigen::Index j = 0; j < 5; ++j) {
      CHECK(s95.draws[d](j) >= s95.lower(j));
      CHECK(s95.draws[d](j) <= s95.upper(j));
    }
  }
  for (Eigen::Index j = 0; j < 5; ++j) {
    bool lo = false, hi = false;
    for (std::size_t d : s95.retained) {
      lo = lo || s95.draws[d](j) == s95.lower(j);
      hi = hi || s95.draws[d](j) == s95.upper(j);
    }
    CHECK(lo);
    CHECK(hi);
  }
  const ProjectionSet s90 = rethreshold(s95, 0.90);
  CHECK(s90.retained.size() <= s95.retained.size());
  for (Eigen::Index j = 0; j < 5 && !s90.empty(); ++j) {
    CHECK(s90.lower(j) >= s95.lower(j));
    CHECK(s90.upper(j) <= s95.upper(j));
  }
}
