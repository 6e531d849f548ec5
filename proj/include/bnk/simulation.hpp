#pragma once

#include <cstdint>
#include <vector>

#include "bnk/full_model.hpp"
#include "bnk/panel.hpp"
#include "bnk/params.hpp"

namespace bnk {

// Paths of the AR(1) shock levels and the three Gaussian innovations.
struct ShockPath {
  std::vector<double> eta_d;
  std::vector<double> eta_m;
  std::vector<double> eps_s;
  std::vector<double> eps_d;
  std::vector<double> eps_m;

  std::size_t size() const { return eta_d.size(); }
};

struct SimulationPlan {
  std::size_t total_length = 400;
  std::size_t burn_in_head = 100;
  std::size_t burn_in_tail = 100;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;  // replication index
  StructuralParams params;

  std::size_t kept_length() const { return total_length - burn_in_head - burn_in_tail; }
  // Throws DomainError unless total_length > burn_in_head + burn_in_tail.
  void validate() const;
};

// eta_{j,t} = rho_j eta_{j,t-1} + eps_{j,t} from eta = 0; the full
// total_length path, burn-in included. Innovations are drawn in the order
// (eps_s, eps_d, eps_m) each period.
ShockPath simulate_shocks(const SimulationPlan& plan);

// Observables (x, pi, i) driven by the shock path through an already solved
// model; rows [burn_in_head, total_length - burn_in_tail) are kept and dated
// t = 1..kept_length.
TimeSeriesPanel simulate_observables(const SimulationPlan& plan, const StateSpaceSolution& solution);
// Solves the model at plan.params first; propagates DeterminacyError.
TimeSeriesPanel simulate_observables(const SimulationPlan& plan);

}  // namespace bnk
