#include "bnk/config.hpp"

#include <filesystem>
#include <fstream>
#include <ostream>

#include "bnk/errors.hpp"
#include "bnk/text.hpp"

namespace bnk {

namespace {

std::vector<std::pair<std::string, std::string>> default_entries() {
  std::vector<std::pair<std::string, std::string>> e = {
      {"seed", "20240607"},
      {"out", "results"},
      {"data", "data/us_macro_quarterly.csv"},
      {"date_column", "date"},
      {"sample_start", "1962Q2"},
      {"sample_end", ""},
      {"transforms", "x=linear_detrend; pi=demean; i=demean; ls=demean"},
      {"rn_column", "r_n"},
      {"equation", "is"},
      {"alpha", "0.05"},
      {"gamma_min", "0.05"},
      {"grid", "paper"},
      {"hac_lags", "4"},
      {"appendix_alpha", "0.1"},
      {"appendix_grid", "appendix-c"},
      {"is_instruments", "const, x:1-3, rr:1-3"},
      {"nkpc_instruments", "pi:1-4, ls:1-3"},
      {"ml_free", "m_bar, gamma, phi_pi, phi_x, rho_i, rho_d, rho_m, sigma2_d, sigma2_s"},
      {"ml_max_iterations", "400"},
      {"ml_gradient_tolerance", "0.0001"},
      {"sim_length", "400"},
      {"burn_in_head", "100"},
      {"burn_in_tail", "100"},
      {"sim_stream", "0"},
      {"lm_draws", "10000"},
      {"lm_groups", "1, 2, 3"},
      {"lm_level", "0.95"},
      {"lm_source", "simulated"},
  };
  const StructuralParams t1 = table1_calibration();
  for (Param p : all_params()) e.emplace_back("param." + std::string(param_name(p)), format_double(t1.get(p)));
  const ParamBox box = ParamBox::defaults();
  for (Param p : all_params()) {
    const auto [lo, hi] = box[p];
    e.emplace_back("box." + std::string(param_name(p)), format_double(lo) + ", " + format_double(hi));
  }
  return e;
}

const std::vector<std::string>& path_keys() {
  static const std::vector<std::string> keys = {"data", "out"};
  return keys;
}

}  // namespace

RunConfig::RunConfig() : entries_(default_entries()) {}

void RunConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config file " + path);
  const auto dir = std::filesystem::path(path).parent_path().string();
  try {
    load(in, dir);
  } catch (const InputError& e) {
    throw InputError(path + ": " + e.what());
  }
}

void RunConfig::load(std::istream& in, const std::string& base_dir) {
  for (const auto& [key, value] : parse_key_values(in)) {
    set(key, value);
    base_dirs_[key] = base_dir;
  }
}

void RunConfig::set(const std::string& key, const std::string& value) {
  for (auto& [k, v] : entries_) {
    if (k == key) {
      v = value;
      base_dirs_.erase(key);
      return;
    }
  }
  throw InputError("unknown config key '" + key + "'");
}

const std::string& RunConfig::get(const std::string& key) const {
  for (const auto& [k, v] : entries_) {
    if (k == key) return v;
  }
  throw InputError("unknown config key '" + key + "'");
}

double RunConfig::number(const std::string& key) const { return parse_double(get(key), key); }

long long RunConfig::integer(const std::string& key) const { return parse_int(get(key), key); }

std::vector<std::string> RunConfig::list(const std::string& key) const {
  std::vector<std::string> out;
  for (const auto& item : split(get(key), ',')) {
    const auto t = trim(item);
    if (!t.empty()) out.emplace_back(t);
  }
  return out;
}

std::string RunConfig::path(const std::string& key) const {
  const std::string& v = get(key);
  auto it = base_dirs_.find(key);
  if (v.empty() || it == base_dirs_.end() || it->second.empty() || std::filesystem::path(v).is_absolute()) return v;
  return (std::filesystem::path(it->second) / v).lexically_normal().string();
}

void RunConfig::validate() const {
  const double alpha = number("alpha");
  const double gamma_min = number("gamma_min");
  if (!(alpha > 0.0 && alpha < 1.0)) throw InputError("alpha must lie in (0, 1)");
  if (!(gamma_min >= 0.0)) throw InputError("gamma_min must be >= 0");
  if (!(gamma_min < 1.0 - alpha)) {
    throw InputError("gamma_min = " + get("gamma_min") + " must be below 1 - alpha = " + format_double(1.0 - alpha));
  }
  const double appendix_alpha = number("appendix_alpha");
  if (!(appendix_alpha > 0.0 && appendix_alpha < 1.0 - gamma_min)) {
    throw InputError("appendix_alpha must lie in (0, 1 - gamma_min)");
  }
  const double level = number("lm_level");
  if (!(level > 0.0 && level < 1.0)) throw InputError("lm_level must lie in (0, 1)");
  if (integer("hac_lags") < 0) throw InputError("hac_lags must be >= 0");
  if (integer("lm_draws") < 0) throw InputError("lm_draws must be >= 0");
  if (integer("ml_max_iterations") < 1) throw InputError("ml_max_iterations must be >= 1");
  for (const auto& g : list("lm_groups")) {
    const auto id = parse_int(g, "lm_groups");
    if (id < 1 || id > 6) throw InputError("lm_groups entries must be in 1..6");
  }
  if (get("lm_source") != "simulated" && get("lm_source") != "data") {
    throw InputError("lm_source must be simulated or data");
  }
  if (get("equation") != "is" && get("equation") != "nkpc") throw InputError("equation must be is or nkpc");
  box();
  params().validate();
  simulation_plan().validate();
  ml_free();
  schema();
  transforms();
  InstrumentSpec::parse(get("is_instruments"));
  InstrumentSpec::parse(get("nkpc_instruments"));
}

void RunConfig::write_manifest(std::ostream& out, const std::string& subcommand) const {
  out << "# resolved configuration for `" << subcommand << "`; loadable with --config\n";
  for (const auto& [k, v] : entries_) {
    std::string shown = v;
    for (const auto& pk : path_keys()) {
      if (k == pk) shown = path(k);
    }
    out << k << " = " << shown << '\n';
  }
}

StructuralParams RunConfig::params() const {
  StructuralParams p;
  for (Param q : all_params()) p.set(q, number("param." + std::string(param_name(q))));
  return p;
}

ParamBox RunConfig::box() const {
  ParamBox b;
  for (Param q : all_params()) {
    const std::string key = "box." + std::string(param_name(q));
    const auto parts = list(key);
    if (parts.size() != 2) throw InputError(key + " must be `lo, hi`");
    const double lo = parse_double(parts[0], key);
    const double hi = parse_double(parts[1], key);
    if (!(lo < hi)) throw InputError(key + ": lower bound must be below upper bound");
    b.bounds[q] = {lo, hi};
  }
  return b;
}

std::vector<Param> RunConfig::ml_free() const {
  std::vector<Param> out;
  for (const auto& name : list("ml_free")) {
    const auto p = param_from_name(name);
    if (!p) throw InputError("ml_free: unknown parameter '" + name + "'");
    out.push_back(*p);
  }
  if (out.empty()) throw InputError("ml_free lists no parameters");
  return out;
}

PanelSchema RunConfig::schema() const {
  PanelSchema s;
  s.date_column = get("date_column");
  if (!get("sample_start").empty()) s.start = Period::parse(get("sample_start"));
  if (!get("sample_end").empty()) s.end = Period::parse(get("sample_end"));
  if (s.start && s.end && *s.end < *s.start) throw InputError("sample_end precedes sample_start");
  return s;
}

TransformSpec RunConfig::transforms() const { return TransformSpec::parse(get("transforms")); }

SimulationPlan RunConfig::simulation_plan() const {
  SimulationPlan plan;
  plan.total_length = static_cast<std::size_t>(integer("sim_length"));
  plan.burn_in_head = static_cast<std::size_t>(integer("burn_in_head"));
  plan.burn_in_tail = static_cast<std::size_t>(integer("burn_in_tail"));
  plan.seed = static_cast<std::uint64_t>(integer("seed"));
  plan.stream = static_cast<std::uint64_t>(integer("sim_stream"));
  plan.params = params();
  return plan;
}

TimeSeriesPanel prepare_panel(const RunConfig& config, std::size_t* dropped_rows) {
  const LoadedPanel loaded = load_panel(config.path("data"), config.schema());
  if (dropped_rows) *dropped_rows = loaded.dropped_rows;
  TimeSeriesPanel panel = apply_transforms(loaded.panel, config.transforms());
  add_real_rate_gap(panel, "rr", config.get("rn_column"));
  return panel;
}

}  // namespace bnk
