#include "bnk/params.hpp"

#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <sstream>

#include "bnk/errors.hpp"
#include "bnk/text.hpp"

namespace bnk {

namespace {

constexpr std::array<std::string_view, kNumParams> kNames = {
    "beta",  "theta", "m_bar", "gamma", "phi",      "phi_pi",   "phi_x",
    "rho_i", "rho_d", "rho_m", "sigma2_s", "sigma2_d", "sigma2_m"};

constexpr std::array<Param, kNumParams> kAll = {
    Param::beta,  Param::theta, Param::m_bar, Param::gamma,    Param::phi,
    Param::phi_pi, Param::phi_x, Param::rho_i, Param::rho_d,   Param::rho_m,
    Param::sigma2_s, Param::sigma2_d, Param::sigma2_m};

void require(bool ok, std::string_view name, std::string_view bound, double v) {
  if (!ok) {
    std::ostringstream msg;
    msg << name << " = " << v << " violates " << bound;
    throw DomainError(msg.str());
  }
}

}  // namespace

std::string_view param_name(Param p) { return kNames[static_cast<std::size_t>(p)]; }

std::optional<Param> param_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kNumParams; ++i) {
    if (kNames[i] == name) return kAll[i];
  }
  return std::nullopt;
}

const std::array<Param, kNumParams>& all_params() { return kAll; }

double StructuralParams::get(Param p) const {
  switch (p) {
    case Param::beta: return beta;
    case Param::theta: return theta;
    case Param::m_bar: return m_bar;
    case Param::gamma: return gamma;
    case Param::phi: return phi;
    case Param::phi_pi: return phi_pi;
    case Param::phi_x: return phi_x;
    case Param::rho_i: return rho_i;
    case Param::rho_d: return rho_d;
    case Param::rho_m: return rho_m;
    case Param::sigma2_s: return sigma2_s;
    case Param::sigma2_d: return sigma2_d;
    case Param::sigma2_m: return sigma2_m;
  }
  return 0.0;
}

void StructuralParams::set(Param p, double v) {
  switch (p) {
    case Param::beta: beta = v; break;
    case Param::theta: theta = v; break;
    case Param::m_bar: m_bar = v; break;
    case Param::gamma: gamma = v; break;
    case Param::phi: phi = v; break;
    case Param::phi_pi: phi_pi = v; break;
    case Param::phi_x: phi_x = v; break;
    case Param::rho_i: rho_i = v; break;
    case Param::rho_d: rho_d = v; break;
    case Param::rho_m: rho_m = v; break;
    case Param::sigma2_s: sigma2_s = v; break;
    case Param::sigma2_d: sigma2_d = v; break;
    case Param::sigma2_m: sigma2_m = v; break;
  }
}

void StructuralParams::validate() const {
  // m_bar = 1 is the rational benchmark and is admitted.
  require(beta > 0 && beta < 1, "beta", "(0,1)", beta);
  require(theta > 0 && theta < 1, "theta", "(0,1)", theta);
  require(m_bar >= 0 && m_bar <= 1, "m_bar", "[0,1]", m_bar);
  require(gamma > 0, "gamma", "> 0", gamma);
  require(phi >= 0, "phi", ">= 0", phi);
  require(std::isfinite(phi_pi), "phi_pi", "finite", phi_pi);
  require(std::isfinite(phi_x), "phi_x", "finite", phi_x);
  require(rho_i >= 0 && rho_i < 1, "rho_i", "[0,1)", rho_i);
  require(rho_d >= 0 && rho_d < 1, "rho_d", "[0,1)", rho_d);
  require(rho_m >= 0 && rho_m < 1, "rho_m", "[0,1)", rho_m);
  require(sigma2_s >= 0, "sigma2_s", ">= 0", sigma2_s);
  require(sigma2_d >= 0, "sigma2_d", ">= 0", sigma2_d);
  require(sigma2_m >= 0, "sigma2_m", ">= 0", sigma2_m);
}

StructuralParams StructuralParams::restricted() const {
  StructuralParams r = *this;
  r.rho_i = 0.0;
  r.phi_x = 0.0;
  r.sigma2_s = 0.0;
  r.phi_pi = gamma / beta;  // 1/sigma
  return r;
}

StructuralParams table1_calibration() {
  StructuralParams p;
  p.beta = 0.99;
  p.theta = 0.875;
  p.phi = 1.0;
  p.m_bar = 0.6799;
  p.gamma = 1.9709;
  p.phi_pi = 1.5058;
  p.phi_x = 1.9672;
  p.rho_i = 0.4623;
  p.rho_d = 0.9591;
  p.rho_m = 0.8843;
  p.sigma2_d = 0.6536;
  p.sigma2_s = 0.7443;
  p.sigma2_m = 1.0;
  return p;
}

ReducedParams derive_reduced(const StructuralParams& p) {
  if (!(p.theta > 0)) throw DomainError("derive_reduced: theta must be > 0 (kappa divides by theta)");
  if (!(p.gamma > 0)) throw DomainError("derive_reduced: gamma must be > 0");
  if (!(p.beta > 0)) throw DomainError("derive_reduced: beta must be > 0");
  const double bt = p.beta * p.theta;
  const double denom = 1.0 - bt * p.m_bar;
  if (denom == 0.0) throw DomainError("derive_reduced: beta*theta*m_bar = 1");

  ReducedParams r;
  r.R = 1.0 / p.beta;
  r.M = p.m_bar;
  r.Mf = p.m_bar * (p.theta + (1.0 - bt) / denom * (1.0 - p.theta));
  r.sigma = 1.0 / (p.gamma * r.R);
  r.kappa = (1.0 / p.theta - 1.0) * (1.0 - bt) * (p.gamma + p.phi);
  return r;
}

StructuralParams read_params(std::istream& in, StructuralParams base) {
  for (const auto& [key, value] : parse_key_values(in)) {
    auto p = param_from_name(key);
    if (!p) throw InputError("unknown parameter '" + key + "'");
    base.set(*p, parse_double(value, key));
  }
  return base;
}

void write_params(std::ostream& out, const StructuralParams& params) {
  const auto old = out.precision(17);
  for (Param p : kAll) out << param_name(p) << " = " << params.get(p) << '\n';
  out.precision(old);
}

}  // namespace bnk
