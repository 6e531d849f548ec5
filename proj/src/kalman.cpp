#include "bnk/kalman.hpp"

#include <cmath>

#include "bnk/errors.hpp"

namespace bnk {

Eigen::MatrixXd stationary_covariance(const Eigen::MatrixXd& t, const Eigen::MatrixXd& q) {
  const Eigen::Index n = t.rows();
  // vec(P) = (I - T kron T)^{-1} vec(Q)
  Eigen::MatrixXd kron(n * n, n * n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) kron.block(i * n, j * n, n, n) = t(i, j) * t;
  }
  const Eigen::MatrixXd lhs = Eigen::MatrixXd::Identity(n * n, n * n) - kron;
  Eigen::PartialPivLU<Eigen::MatrixXd> lu(lhs);
  const Eigen::VectorXd vec_q = Eigen::Map<const Eigen::VectorXd>(q.data(), n * n);
  const Eigen::VectorXd vec_p = lu.solve(vec_q);
  Eigen::MatrixXd p = Eigen::Map<const Eigen::MatrixXd>(vec_p.data(), n, n);
  return 0.5 * (p + p.transpose());
}

Eigen::VectorXd kalman_log_densities(const GaussianStateSpace& m, const Eigen::MatrixXd& y) {
  const Eigen::Index periods = y.rows();
  const Eigen::Index n_obs = m.design.rows();
  Eigen::VectorXd out(periods);
  if (periods == 0) return out;

  Eigen::VectorXd a = Eigen::VectorXd::Zero(m.transition.rows());
  Eigen::MatrixXd p = stationary_covariance(m.transition, m.state_cov);
  const Eigen::MatrixXd& z = m.design;

  for (Eigen::Index t = 0; t < periods; ++t) {
    const Eigen::VectorXd v = y.row(t).transpose() - z * a;
    const Eigen::MatrixXd pz = p * z.transpose();
    Eigen::MatrixXd f = z * pz;
    f = 0.5 * (f + f.transpose());
    Eigen::LLT<Eigen::MatrixXd> llt(f);
    if (llt.info() != Eigen::Success) {
      throw SingularityError("Kalman filter: prediction-error covariance not positive definite");
    }
    const Eigen::VectorXd finv_v = llt.solve(v);
    double logdet = 0.0;
    const auto& l = llt.matrixLLT();
    for (Eigen::Index i = 0; i < n_obs; ++i) logdet += 2.0 * std::log(l(i, i));
    out(t) = -0.5 * (static_cast<double>(n_obs) * kLog2Pi + logdet + v.dot(finv_v));

    // Update then predict.
    const Eigen::MatrixXd gain = llt.solve(pz.transpose()).transpose();
    a += gain * v;
    p -= gain * pz.transpose();
    a = m.transition * a;
    p = m.transition * p * m.transition.transpose() + m.state_cov;
    p = 0.5 * (p + p.transpose());
  }
  return out;
}

double square_state_space_loglik(const Eigen::MatrixXd& c, const Eigen::MatrixXd& lambda,
                                 const Eigen::MatrixXd& sigma, const Eigen::MatrixXd& y,
                                 const Eigen::VectorXd& initial) {
  const Eigen::Index periods = y.rows();
  const Eigen::Index n = c.rows();
  if (periods == 0) return 0.0;

  Eigen::FullPivLU<Eigen::MatrixXd> c_lu(c);
  if (!c_lu.isInvertible()) throw SingularityError("state-space loading C is singular");
  Eigen::LLT<Eigen::MatrixXd> s_llt(sigma);
  if (s_llt.info() != Eigen::Success) throw SingularityError("innovation covariance not positive definite");

  double log_det_sigma = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) log_det_sigma += 2.0 * std::log(s_llt.matrixLLT()(i, i));
  const double log_det_c = std::log(std::abs(c_lu.determinant()));

  double quad = 0.0;
  Eigen::VectorXd u_prev = c_lu.solve(initial);
  for (Eigen::Index t = 0; t < periods; ++t) {
    const Eigen::VectorXd u = c_lu.solve(Eigen::VectorXd(y.row(t).transpose()));
    const Eigen::VectorXd e = u - lambda * u_prev;
    quad += e.dot(s_llt.solve(e));
    u_prev = u;
  }
  const double tt = static_cast<double>(periods);
  return -0.5 * static_cast<double>(n) * tt * kLog2Pi - 0.5 * quad - 0.5 * tt * log_det_sigma -
         tt * log_det_c;
}

}  // namespace bnk
