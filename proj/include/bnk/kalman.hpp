#pragma once

#include <Eigen/Dense>

namespace bnk {

// y_t = design * a_t,  a_t = transition * a_{t-1} + w_t,  w_t ~ N(0, state_cov).
// No measurement error.
struct GaussianStateSpace {
  Eigen::MatrixXd design;
  Eigen::MatrixXd transition;
  Eigen::MatrixXd state_cov;
};

// P solving P = T P T' + Q; requires a stable transition.
Eigen::MatrixXd stationary_covariance(const Eigen::MatrixXd& transition, const Eigen::MatrixXd& q);

inline constexpr double kLog2Pi = 1.8378770664093454836;

// Per-period log densities log p(y_t | y_1..y_{t-1}) from the prediction-error
// decomposition, filter started at the stationary distribution. Rows of `y`
// are periods. Includes the -(n/2) log(2 pi) constant. Throws SingularityError
// if a prediction-error covariance is not positive definite.
Eigen::VectorXd kalman_log_densities(const GaussianStateSpace& model, const Eigen::MatrixXd& y);

// Closed form for a square invertible loading c, y_t = c u_t with
// u_t = lambda u_{t-1} + eps_t, conditional on y_0 = `initial`:
//   -(nT/2) log 2pi - 1/2 sum e_t' sigma^{-1} e_t - (T/2) log|sigma| - T log|det c|
// with e_t = c^{-1} y_t - lambda c^{-1} y_{t-1}. Zero rows of `y` give 0.
double square_state_space_loglik(const Eigen::MatrixXd& c, const Eigen::MatrixXd& lambda,
                                 const Eigen::MatrixXd& sigma, const Eigen::MatrixXd& y,
                                 const Eigen::VectorXd& initial);

}  // namespace bnk
