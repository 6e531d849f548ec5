#include "bnk/optimizer.hpp"

#include <cmath>
#include <limits>

namespace bnk {

double central_step(double x) {
  static const double kCubeRootEps = std::cbrt(std::numeric_limits<double>::epsilon());
  return kCubeRootEps * std::max(1.0, std::abs(x));
}

Eigen::VectorXd central_gradient(const Objective& f, const Eigen::VectorXd& x) {
  Eigen::VectorXd g(x.size());
  Eigen::VectorXd xp = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double h = central_step(x(i));
    xp(i) = x(i) + h;
    const double fp = f(xp);
    xp(i) = x(i) - h;
    const double fm = f(xp);
    xp(i) = x(i);
    g(i) = (fp - fm) / (2.0 * h);
  }
  return g;
}

Eigen::MatrixXd central_hessian(const Objective& f, const Eigen::VectorXd& x) {
  const Eigen::Index n = x.size();
  Eigen::MatrixXd h(n, n);
  Eigen::VectorXd step(n);
  // Fourth-root step balances truncation and rounding for second differences.
  for (Eigen::Index i = 0; i < n; ++i) step(i) = 1e-4 * std::max(1.0, std::abs(x(i)));
  const double f0 = f(x);
  Eigen::VectorXd xp = x;
  for (Eigen::Index i = 0; i < n; ++i) {
    xp(i) = x(i) + step(i);
    const double fp = f(xp);
    xp(i) = x(i) - step(i);
    const double fm = f(xp);
    xp(i) = x(i);
    h(i, i) = (fp - 2.0 * f0 + fm) / (step(i) * step(i));
    for (Eigen::Index j = 0; j < i; ++j) {
      double acc = 0.0;
      for (int si : {1, -1}) {
        for (int sj : {1, -1}) {
          xp(i) = x(i) + si * step(i);
          xp(j) = x(j) + sj * step(j);
          acc += si * sj * f(xp);
        }
      }
      xp(i) = x(i);
      xp(j) = x(j);
      h(i, j) = h(j, i) = acc / (4.0 * step(i) * step(j));
    }
  }
  return h;
}

BfgsResult minimize_bfgs(const Objective& objective, Eigen::VectorXd x, const BfgsOptions& opt) {
  BfgsResult r;
  auto f = [&](const Eigen::VectorXd& z) {
    ++r.evaluations;
    const double v = objective(z);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  };

  const Eigen::Index n = x.size();
  double fx = f(x);
  Eigen::VectorXd g = central_gradient(f, x);
  Eigen::MatrixXd hinv = Eigen::MatrixXd::Identity(n, n);
  // Scale the first step so it moves roughly a unit distance.
  if (g.norm() > 0) hinv *= 1.0 / std::max(1.0, g.norm());

  for (r.iterations = 0; r.iterations < opt.max_iterations; ++r.iterations) {
    if (g.cwiseAbs().maxCoeff() < opt.gradient_tolerance) {
      r.converged = true;
      r.message = "gradient below tolerance";
      break;
    }
    Eigen::VectorXd dir = -hinv * g;
    double slope = g.dot(dir);
    if (slope >= 0) {
      // Lost descent; restart from steepest descent.
      hinv = Eigen::MatrixXd::Identity(n, n) / std::max(1.0, g.norm());
      dir = -hinv * g;
      slope = g.dot(dir);
    }

    double step = 1.0;
    double f_new = f(x + step * dir);
    while (!(f_new <= fx + 1e-4 * step * slope) && step * dir.norm() > opt.step_tolerance) {
      step *= 0.5;
      f_new = f(x + step * dir);
    }
    if (!(f_new <= fx + 1e-4 * step * slope)) {
      r.message = "line search failed to decrease the objective";
      break;
    }

    const Eigen::VectorXd s = step * dir;
    const Eigen::VectorXd x_new = x + s;
    const Eigen::VectorXd g_new = central_gradient(f, x_new);
    const Eigen::VectorXd y = g_new - g;
    const double sy = s.dot(y);
    if (sy > 1e-12 * s.norm() * y.norm()) {
      const double rho = 1.0 / sy;
      const Eigen::MatrixXd i_rsy = Eigen::MatrixXd::Identity(n, n) - rho * s * y.transpose();
      hinv = i_rsy * hinv * i_rsy.transpose() + rho * s * s.transpose();
    }
    x = x_new;
    fx = f_new;
    g = g_new;
  }
  if (!r.converged && r.message.empty()) r.message = "iteration limit reached";

  r.x = x;
  r.value = fx;
  r.gradient = g;
  r.inverse_hessian = hinv;
  return r;
}

}  // namespace bnk
