#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace bnk {

// First-order linear rational-expectations system in the form
//
//   A E_t[w_{t+1}] = B w_t,   w_t = (k_t, u_t)
//
// where the first `n_predetermined` entries k_t are known at t and u_t are
// forward-looking (or static) variables. A may be singular.
struct LinearReSystem {
  Eigen::MatrixXd A;
  Eigen::MatrixXd B;
  int n_predetermined = 0;
};

struct ReSolution {
  Eigen::MatrixXd policy;      // u_t = policy * k_t
  Eigen::MatrixXd transition;  // k_{t+1} = transition * k_t (deterministic part)
  // Generalized eigenvalues of the pencil, stable block first. Infinite roots
  // are reported as +inf.
  std::vector<std::complex<double>> roots;
};

// Generalized Schur (QZ) solution with the stable roots (|lambda| < 1) ordered
// first. Throws DeterminacyError if the number of unstable roots differs from
// the number of forward-looking variables, SingularityError if the stable
// block cannot be mapped onto the predetermined variables.
ReSolution solve_qz(const LinearReSystem& system);

}  // namespace bnk
