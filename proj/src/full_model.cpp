#include "bnk/full_model.hpp"

namespace bnk {

namespace {

// Column layout of w_t = (k_t, u_t).
enum : int { kW_ILag = 0, kW_EtaD, kW_EtaM, kW_EpsS, kW_X, kW_Pi, kW_I, kW_Size };

}  // namespace

Eigen::Matrix2d StateSpaceSolution::lambda() const {
  Eigen::Matrix2d l = Eigen::Matrix2d::Zero();
  l(0, 0) = transition(kStateEtaM, kStateEtaM);
  l(1, 1) = transition(kStateEtaD, kStateEtaD);
  return l;
}

Eigen::Matrix2d StateSpaceSolution::shock_loadings() const {
  Eigen::Matrix2d c;
  c << c_matrix(kObsX, kStateEtaM), c_matrix(kObsX, kStateEtaD),
      c_matrix(kObsPi, kStateEtaM), c_matrix(kObsPi, kStateEtaD);
  return c;
}

LinearReSystem full_model_system(const StructuralParams& p) {
  const ReducedParams r = derive_reduced(p);
  const double bmf = p.beta * r.Mf;

  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(kW_Size, kW_Size);
  Eigen::MatrixXd B = Eigen::MatrixXd::Zero(kW_Size, kW_Size);

  // i_{t} becomes next period's lagged rate.
  A(0, kW_ILag) = 1.0;
  B(0, kW_I) = 1.0;
  // Exogenous AR(1) shocks and the i.i.d. cost-push shock.
  A(1, kW_EtaD) = 1.0;
  B(1, kW_EtaD) = p.rho_d;
  A(2, kW_EtaM) = 1.0;
  B(2, kW_EtaM) = p.rho_m;
  A(3, kW_EpsS) = 1.0;
  // IS: M E x' + sigma E pi' = x + sigma i - eta_d
  A(4, kW_X) = r.M;
  A(4, kW_Pi) = r.sigma;
  B(4, kW_X) = 1.0;
  B(4, kW_I) = r.sigma;
  B(4, kW_EtaD) = -1.0;
  // NKPC: beta Mf E pi' = pi - kappa x - eps_s
  A(5, kW_Pi) = bmf;
  B(5, kW_Pi) = 1.0;
  B(5, kW_X) = -r.kappa;
  B(5, kW_EpsS) = -1.0;
  // Taylor rule (static)
  B(6, kW_I) = 1.0;
  B(6, kW_ILag) = -p.rho_i;
  B(6, kW_Pi) = -(1.0 - p.rho_i) * p.phi_pi;
  B(6, kW_X) = -(1.0 - p.rho_i) * p.phi_x;
  B(6, kW_EtaM) = -1.0;

  return {std::move(A), std::move(B), kNumStates};
}

StateSpaceSolution solve_full_re(const StructuralParams& params) {
  params.validate();
  const ReSolution re = solve_qz(full_model_system(params));

  StateSpaceSolution s;
  s.c_matrix = re.policy;
  s.transition = re.transition;
  // Exact zeros where the structure dictates; QZ leaves O(1e-16) residue.
  s.transition.row(kStateEtaD).setZero();
  s.transition(kStateEtaD, kStateEtaD) = params.rho_d;
  s.transition.row(kStateEtaM).setZero();
  s.transition(kStateEtaM, kStateEtaM) = params.rho_m;
  s.transition.row(kStateEpsS).setZero();
  s.impact = Eigen::MatrixXd::Zero(kNumStates, kNumShocks);
  s.impact(kStateEtaD, kShockD) = 1.0;
  s.impact(kStateEtaM, kShockM) = 1.0;
  s.impact(kStateEpsS, kShockS) = 1.0;
  s.sigma_mat = Eigen::MatrixXd::Zero(kNumShocks, kNumShocks);
  s.sigma_mat(kShockS, kShockS) = params.sigma2_s;
  s.sigma_mat(kShockD, kShockD) = params.sigma2_d;
  s.sigma_mat(kShockM, kShockM) = params.sigma2_m;
  s.roots = re.roots;
  return s;
}

SolutionMatrix restricted_loadings(const StateSpaceSolution& s) {
  return {s.c_matrix(kObsX, kStateEtaM), s.c_matrix(kObsX, kStateEtaD),
          s.c_matrix(kObsPi, kStateEtaM), s.c_matrix(kObsPi, kStateEtaD)};
}

}  // namespace bnk
