#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace bnk {

// Identifiers for the deep parameters, in canonical order.
enum class Param {
  beta,
  theta,
  m_bar,
  gamma,
  phi,
  phi_pi,
  phi_x,
  rho_i,
  rho_d,
  rho_m,
  sigma2_s,
  sigma2_d,
  sigma2_m,
};

inline constexpr std::size_t kNumParams = 13;

std::string_view param_name(Param p);
std::optional<Param> param_from_name(std::string_view name);
const std::array<Param, kNumParams>& all_params();

// Deep parameters of the three-equation behavioral New Keynesian model.
// Variances are in squared percentage points, everything else unitless.
struct StructuralParams {
  double beta = 0.99;
  double theta = 0.875;
  double m_bar = 1.0;
  double gamma = 1.0;
  double phi = 1.0;
  double phi_pi = 1.5;
  double phi_x = 0.0;
  double rho_i = 0.0;
  double rho_d = 0.0;
  double rho_m = 0.0;
  double sigma2_s = 0.0;
  double sigma2_d = 1.0;
  double sigma2_m = 1.0;

  double get(Param p) const;
  void set(Param p, double v);

  // Throws DomainError naming the first violated bound.
  void validate() const;

  // Imposes rho_i = 0, phi_x = 0, phi_pi = 1/sigma, sigma2_s = 0, which is the
  // regime with a closed-form solution.
  StructuralParams restricted() const;

  bool operator==(const StructuralParams&) const = default;
};

// Maximum likelihood estimates of the complete model on US data, used as the
// default calibration for simulation experiments.
StructuralParams table1_calibration();

struct ReducedParams {
  double M = 0.0;      // consumer attention
  double Mf = 0.0;     // firm attention
  double sigma = 0.0;  // effective intertemporal elasticity of substitution
  double kappa = 0.0;  // Phillips-curve slope
  double R = 0.0;      // gross discount rate 1/beta
};

// M = m_bar, Mf = m_bar (theta + (1 - beta theta)/(1 - beta theta m_bar)(1 - theta)),
// sigma = 1/(gamma R) with R = 1/beta, kappa = (1/theta - 1)(1 - beta theta)(gamma + phi).
ReducedParams derive_reduced(const StructuralParams& params);

// Flat `name = value` text format. Unknown keys are an error; missing keys keep
// the values already in `base`.
StructuralParams read_params(std::istream& in, StructuralParams base = {});
void write_params(std::ostream& out, const StructuralParams& params);

}  // namespace bnk
