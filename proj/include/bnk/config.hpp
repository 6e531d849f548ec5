#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "bnk/likelihood.hpp"
#include "bnk/panel.hpp"
#include "bnk/params.hpp"
#include "bnk/simulation.hpp"

namespace bnk {

// Flat `key = value` run configuration. Every key has a default; files and
// flags override them. Unknown keys are an error.
class RunConfig {
 public:
  RunConfig();

  // Merges a config file. Relative paths in it resolve against its directory.
  void load(const std::string& path);
  void load(std::istream& in, const std::string& base_dir = "");
  void set(const std::string& key, const std::string& value);

  const std::string& get(const std::string& key) const;
  double number(const std::string& key) const;
  long long integer(const std::string& key) const;
  std::vector<std::string> list(const std::string& key) const;  // comma separated
  // Path value resolved against the directory of the file that set it.
  std::string path(const std::string& key) const;

  // Throws InputError on inconsistent values (alpha, gamma_min, box, sample).
  void validate() const;

  // Every key in default order with its resolved value; loadable as a config.
  void write_manifest(std::ostream& out, const std::string& subcommand) const;
  const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }

  StructuralParams params() const;  // param.* keys
  ParamBox box() const;             // box.* keys
  std::vector<Param> ml_free() const;
  PanelSchema schema() const;
  TransformSpec transforms() const;
  SimulationPlan simulation_plan() const;

 private:
  std::vector<std::pair<std::string, std::string>> entries_;
  std::map<std::string, std::string> base_dirs_;
};

// Loaded, windowed and transformed panel with the real-rate gap column `rr`.
TimeSeriesPanel prepare_panel(const RunConfig& config, std::size_t* dropped_rows = nullptr);

}  // namespace bnk
