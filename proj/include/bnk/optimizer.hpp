#pragma once

#include <functional>
#include <string>

#include <Eigen/Dense>

namespace bnk {

using Objective = std::function<double(const Eigen::VectorXd&)>;

// Relative step eps^(1/3) max(1, |x_i|) for central differences.
double central_step(double x);

Eigen::VectorXd central_gradient(const Objective& f, const Eigen::VectorXd& x);
// Symmetric Hessian from central differences of the function values.
Eigen::MatrixXd central_hessian(const Objective& f, const Eigen::VectorXd& x);

struct BfgsOptions {
  int max_iterations = 500;
  double gradient_tolerance = 1e-5;  // on max |g_i|
  double step_tolerance = 1e-12;
};

struct BfgsResult {
  Eigen::VectorXd x;
  double value = 0.0;
  Eigen::VectorXd gradient;
  Eigen::MatrixXd inverse_hessian;  // final BFGS approximation
  int iterations = 0;
  int evaluations = 0;
  bool converged = false;
  std::string message;
};

// Quasi-Newton minimization with BFGS updates of the inverse Hessian,
// backtracking Armijo line search, and central-difference gradients.
// Non-finite objective values are treated as +inf (the step is shortened).
BfgsResult minimize_bfgs(const Objective& f, Eigen::VectorXd x0, const BfgsOptions& options = {});

}  // namespace bnk
