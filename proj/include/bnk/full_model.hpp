#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

#include "bnk/params.hpp"
#include "bnk/qz_solver.hpp"
#include "bnk/restricted.hpp"

namespace bnk {

// State ordering of the solved complete model.
enum StateIndex : int { kStateILag = 0, kStateEtaD = 1, kStateEtaM = 2, kStateEpsS = 3 };
inline constexpr int kNumStates = 4;
// Observable ordering.
enum ObsIndex : int { kObsX = 0, kObsPi = 1, kObsI = 2 };
inline constexpr int kNumObs = 3;
// Innovation ordering: (eps_s, eps_d, eps_m).
enum ShockIndex : int { kShockS = 0, kShockD = 1, kShockM = 2 };
inline constexpr int kNumShocks = 3;

// Linear-Gaussian state space of the complete model:
//   k_t = transition k_{t-1} + impact eps_t,   eps_t ~ N(0, sigma_mat)
//   y_t = c_matrix k_t
// with k_t = (i_{t-1}, eta_d, eta_m, eps_s) and y_t = (x_t, pi_t, i_t).
struct StateSpaceSolution {
  Eigen::MatrixXd c_matrix;    // kNumObs x kNumStates
  Eigen::MatrixXd transition;  // kNumStates x kNumStates
  Eigen::MatrixXd impact;      // kNumStates x kNumShocks
  Eigen::MatrixXd sigma_mat;   // kNumShocks x kNumShocks, diagonal
  std::vector<std::complex<double>> roots;

  // diag(rho_m, rho_d)
  Eigen::Matrix2d lambda() const;
  // Loadings of (x, pi) on (eta_m, eta_d).
  Eigen::Matrix2d shock_loadings() const;
};

// Builds the system
//   x_t  = M E_t x_{t+1} - sigma (i_t - E_t pi_{t+1}) + eta_d
//   pi_t = beta Mf E_t pi_{t+1} + kappa x_t + eps_s
//   i_t  = rho_i i_{t-1} + (1 - rho_i)(phi_pi pi_t + phi_x x_t) + eta_m
LinearReSystem full_model_system(const StructuralParams& params);

// Validates params, solves by QZ and assembles the state space. Throws
// DeterminacyError with root counts when the Taylor principle fails.
StateSpaceSolution solve_full_re(const StructuralParams& params);

// The (x, pi) on (eta_m, eta_d) block as a SolutionMatrix.
SolutionMatrix restricted_loadings(const StateSpaceSolution& solution);

}  // namespace bnk
