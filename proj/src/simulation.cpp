#include "bnk/simulation.hpp"

#include <cmath>

#include "bnk/errors.hpp"
#include "bnk/rng.hpp"

namespace bnk {

void SimulationPlan::validate() const {
  if (total_length <= burn_in_head + burn_in_tail) {
    throw DomainError("simulation plan: total_length must exceed burn_in_head + burn_in_tail");
  }
}

ShockPath simulate_shocks(const SimulationPlan& plan) {
  plan.validate();
  const auto& p = plan.params;
  const std::size_t n = plan.total_length;
  const double sd_s = std::sqrt(p.sigma2_s);
  const double sd_d = std::sqrt(p.sigma2_d);
  const double sd_m = std::sqrt(p.sigma2_m);

  ShockPath path;
  path.eta_d.resize(n);
  path.eta_m.resize(n);
  path.eps_s.resize(n);
  path.eps_d.resize(n);
  path.eps_m.resize(n);

  Rng rng(plan.seed, plan.stream);
  double eta_d = 0.0;
  double eta_m = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    path.eps_s[t] = sd_s * rng.normal();
    path.eps_d[t] = sd_d * rng.normal();
    path.eps_m[t] = sd_m * rng.normal();
    eta_d = p.rho_d * eta_d + path.eps_d[t];
    eta_m = p.rho_m * eta_m + path.eps_m[t];
    path.eta_d[t] = eta_d;
    path.eta_m[t] = eta_m;
  }
  return path;
}

TimeSeriesPanel simulate_observables(const SimulationPlan& plan, const StateSpaceSolution& sol) {
  const ShockPath shocks = simulate_shocks(plan);
  const std::size_t n = plan.total_length;
  const std::size_t keep = plan.kept_length();

  std::vector<Period> dates;
  dates.reserve(keep);
  for (std::size_t t = 0; t < keep; ++t) dates.push_back(Period::index(static_cast<std::int64_t>(t + 1)));
  std::vector<double> x(keep), pi(keep), i(keep);

  Eigen::Vector4d state = Eigen::Vector4d::Zero();
  double i_prev = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    state(kStateILag) = i_prev;
    state(kStateEtaD) = shocks.eta_d[t];
    state(kStateEtaM) = shocks.eta_m[t];
    state(kStateEpsS) = shocks.eps_s[t];
    const Eigen::Vector3d y = sol.c_matrix * state;
    i_prev = y(kObsI);
    if (t >= plan.burn_in_head && t < n - plan.burn_in_tail) {
      const std::size_t r = t - plan.burn_in_head;
      x[r] = y(kObsX);
      pi[r] = y(kObsPi);
      i[r] = y(kObsI);
    }
  }

  TimeSeriesPanel panel(std::move(dates));
  panel.set_column("x", std::move(x));
  panel.set_column("pi", std::move(pi));
  panel.set_column("i", std::move(i));
  return panel;
}

TimeSeriesPanel simulate_observables(const SimulationPlan& plan) {
  plan.validate();
  return simulate_observables(plan, solve_full_re(plan.params));
}

}  // namespace bnk
