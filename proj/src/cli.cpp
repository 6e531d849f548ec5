#include "bnk/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>

#include "CLI11.hpp"
#include "bnk/config.hpp"
#include "bnk/errors.hpp"
#include "bnk/gmm.hpp"
#include "bnk/likelihood.hpp"
#include "bnk/report.hpp"
#include "bnk/simulation.hpp"
#include "bnk/text.hpp"
#include "bnk/two_step.hpp"

namespace bnk {

namespace {

namespace fs = std::filesystem;

struct Flags {
  std::string config;
  std::optional<std::string> data, out, seed, alpha, gamma_min, grid, equation;
  std::vector<std::string> sets;  // key=value
};

RunConfig resolve(const Flags& f) {
  RunConfig cfg;
  if (!f.config.empty()) cfg.load(f.config);
  auto apply = [&](const char* key, const std::optional<std::string>& v) {
    if (v) cfg.set(key, *v);
  };
  apply("data", f.data);
  apply("out", f.out);
  apply("seed", f.seed);
  apply("alpha", f.alpha);
  apply("gamma_min", f.gamma_min);
  apply("grid", f.grid);
  apply("equation", f.equation);
  for (const auto& kv : f.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw InputError("--set expects key=value, got '" + kv + "'");
    cfg.set(std::string(trim(kv.substr(0, eq))), std::string(trim(kv.substr(eq + 1))));
  }
  cfg.validate();
  return cfg;
}

class Runner {
 public:
  Runner(RunConfig cfg, std::ostream& out) : cfg_(std::move(cfg)), out_(out), dir_(cfg_.path("out")) {
    if (dir_.empty()) dir_ = ".";
    fs::create_directories(dir_);
  }

  void manifest(const std::string& subcommand) {
    std::ofstream f(file("manifest.txt"));
    if (!f) throw InputError("cannot write " + file("manifest.txt"));
    cfg_.write_manifest(f, subcommand);
  }

  void solve() {
    const StructuralParams p = cfg_.params();
    const StateSpaceSolution sol = solve_full_re(p);
    emit(solution_table(sol), "solution.csv");
    const SolutionMatrix m = restricted_loadings(sol);
    CsvTable t;
    t.header = {"a1", "a2", "b1", "b2", "smallest_singular_value"};
    t.rows.push_back({format_double(m.a1), format_double(m.a2), format_double(m.b1), format_double(m.b2),
                      format_double(m.smallest_singular_value())});
    emit(t, "loadings.csv");
  }

  void simulate() {
    const TimeSeriesPanel panel = simulate_observables(cfg_.simulation_plan());
    write_panel(file("simulated.csv"), panel);
    out_ << "wrote " << file("simulated.csv") << " (" << panel.size() << " periods)\n";
  }

  void fit_ml(const std::string& name) {
    const TimeSeriesPanel panel = data_panel();
    const LikelihoodProblem problem = likelihood_problem(panel);
    MlOptions opt;
    opt.bfgs.max_iterations = static_cast<int>(cfg_.integer("ml_max_iterations"));
    opt.bfgs.gradient_tolerance = cfg_.number("ml_gradient_tolerance");
    const MlEstimate est = ml_estimate(problem, cfg_.params(), opt);
    if (!est.converged) out_ << "warning: ML did not converge (" << est.message << ")\n";
    std::vector<Param> fixed;
    for (Param p : all_params()) {
      if (std::find(problem.free.begin(), problem.free.end(), p) == problem.free.end()) fixed.push_back(p);
    }
    emit(ml_table(est, fixed), name);
    out_ << "log likelihood " << format_fixed(est.log_likelihood, 4) << ", " << est.iterations << " iterations\n";
  }

  void lm_cs(const std::string& name) {
    const TimeSeriesPanel panel = cfg_.get("lm_source") == "data" ? data_panel() : simulate_observables(cfg_.simulation_plan());
    const LikelihoodProblem problem = likelihood_problem(panel);
    const auto draws = static_cast<std::size_t>(cfg_.integer("lm_draws"));
    const auto seed = static_cast<std::uint64_t>(cfg_.integer("seed"));
    std::vector<ProjectionSet> sets;
    for (const auto& g : cfg_.list("lm_groups")) {
      const int id = static_cast<int>(parse_int(g, "lm_groups"));
      sets.push_back(lm_projection_cs(problem, id, draws, seed, cfg_.number("lm_level")));
      const ProjectionSet& s = sets.back();
      emit(projection_draws(s), "lm_draws_group" + std::to_string(id) + ".csv");
      out_ << "group " << id << ": " << s.retained.size() << " of " << s.draws.size() << " draws retained";
      if (s.failed) out_ << ", " << s.failed << " without a determinate solution";
      out_ << '\n';
      if (!s.warning.empty()) out_ << "warning: " << s.warning << '\n';
    }
    emit(projection_table(sets), name);
  }

  TwoStepResult two_step(Equation eq, double alpha, const std::string& grid_key) {
    const TimeSeriesPanel panel = data_panel();
    const MomentProblem problem = moment_problem(panel, eq);
    const GridSpec grid = GridSpec::parse(cfg_.get(grid_key));
    TwoStepResult r = grid_invert(problem, grid, alpha, cfg_.number("gamma_min"));
    if (r.failed_points) out_ << "warning: " << r.failed_points << " grid points could not be evaluated\n";
    if (r.regularized_points) out_ << "note: HAC covariance regularized at " << r.regularized_points << " grid points\n";
    return r;
  }

  void fit_gmm() {
    const Equation eq = equation_from_name(cfg_.get("equation"));
    const TwoStepResult r = two_step(eq, cfg_.number("alpha"), "grid");
    const std::string tag = equation_name(eq);
    emit(gmm_estimate_table(r), "gmm_estimate_" + tag + ".csv");
  }

  void two_step_cs(Equation eq, double alpha, const std::string& grid_key, const std::string& table,
                   const std::string& figure) {
    const TwoStepResult r = two_step(eq, alpha, grid_key);
    const std::string tag = std::string(equation_name(eq)) + "_alpha" + format_double(alpha);
    emit(two_step_table(r), table);
    emit(grid_table(r), "grid_" + tag + ".csv");
    emit(gmm_estimate_table(r), "gmm_estimate_" + tag + ".csv");
    const std::string title = std::string(eq == Equation::is ? "IS curve" : "Phillips curve") + ", alpha = " +
                              format_double(alpha) + ", gamma_min = " + cfg_.get("gamma_min");
    write_region_svg(file(figure), r, title);
    out_ << "wrote " << file(figure) << '\n';
    out_ << tag << ": estimate (" << format_fixed(r.estimate(0), 3) << ", " << format_fixed(r.estimate(1), 3)
         << "), gamma hat " << format_fixed(100.0 * r.whole.gamma_hat, 3) << "%\n";
  }

  void replicate() {
    fit_ml("table1.csv");
    lm_cs("table2.csv");
    const double alpha = cfg_.number("alpha");
    const double appendix_alpha = cfg_.number("appendix_alpha");
    two_step_cs(Equation::is, alpha, "grid", "table3.csv", "fig2.svg");
    two_step_cs(Equation::nkpc, alpha, "grid", "table4.csv", "fig3.svg");
    two_step_cs(Equation::is, appendix_alpha, "appendix_grid", "table5.csv", "fig4.svg");
    two_step_cs(Equation::nkpc, appendix_alpha, "appendix_grid", "table6.csv", "fig5.svg");
  }

  const RunConfig& config() const { return cfg_; }

 private:
  std::string file(const std::string& name) const { return (fs::path(dir_) / name).string(); }

  void emit(const CsvTable& t, const std::string& name) {
    t.write(file(name));
    out_ << "wrote " << file(name) << '\n';
  }

  TimeSeriesPanel data_panel() {
    if (!panel_) {
      std::size_t dropped = 0;
      panel_ = prepare_panel(cfg_, &dropped);
      if (dropped) out_ << "dropped " << dropped << " incomplete rows from " << cfg_.path("data") << '\n';
    }
    return *panel_;
  }

  LikelihoodProblem likelihood_problem(const TimeSeriesPanel& panel) const {
    LikelihoodProblem p = LikelihoodProblem::complete_model(panel, cfg_.params()).with_free(cfg_.ml_free());
    p.box = cfg_.box();
    p.validate();
    return p;
  }

  MomentProblem moment_problem(const TimeSeriesPanel& panel, Equation eq) const {
    const int lags = static_cast<int>(cfg_.integer("hac_lags"));
    if (eq == Equation::nkpc) {
      return nkpc_problem(panel, cfg_.params(), InstrumentSpec::parse(cfg_.get("nkpc_instruments")), lags);
    }
    if (eq == Equation::is) {
      return is_problem(panel, cfg_.params(), InstrumentSpec::parse(cfg_.get("is_instruments")), lags);
    }
    throw InputError("equation must be is or nkpc");
  }

  RunConfig cfg_;
  std::ostream& out_;
  std::string dir_;
  std::optional<TimeSeriesPanel> panel_;
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Behavioral New Keynesian model: solution, likelihood and robust GMM inference", "bnk"};
  app.require_subcommand(1);
  app.fallthrough();

  Flags flags;
  app.add_option("--config", flags.config, "key = value configuration file")->check(CLI::ExistingFile);
  app.add_option("--data", flags.data, "panel CSV");
  app.add_option("--out", flags.out, "output directory");
  app.add_option("--seed", flags.seed, "random seed");
  app.add_option("--alpha", flags.alpha, "test level");
  app.add_option("--gamma-min", flags.gamma_min, "smallest admissible coverage distortion");
  app.add_option("--grid", flags.grid, "paper, appendix-b, appendix-c or lo:step:hi,lo:step:hi");
  app.add_option("--equation", flags.equation, "is or nkpc")->check(CLI::IsMember({"is", "nkpc"}));
  app.add_option("--set", flags.sets, "override any config key (key=value)");

  const std::vector<std::pair<std::string, std::string>> commands = {
      {"solve", "solve the model at the configured parameters"},
      {"simulate", "simulate (x, pi, i) from the configured parameters"},
      {"fit-ml", "maximum likelihood on the data panel"},
      {"lm-cs", "LM projection confidence sets"},
      {"fit-gmm", "CUGMM point estimate over the grid"},
      {"two-step-cs", "two-step identification-robust confidence sets"},
      {"replicate", "all tables and figures"},
  };
  for (const auto& [name, help] : commands) app.add_subcommand(name, help);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err);
  }

  const std::string sub = app.get_subcommands().front()->get_name();
  try {
    Runner runner(resolve(flags), out);
    runner.manifest(sub);
    const RunConfig& cfg = runner.config();
    if (sub == "solve") {
      runner.solve();
    } else if (sub == "simulate") {
      runner.simulate();
    } else if (sub == "fit-ml") {
      runner.fit_ml("ml_estimates.csv");
    } else if (sub == "lm-cs") {
      runner.lm_cs("lm_projection.csv");
    } else if (sub == "fit-gmm") {
      runner.fit_gmm();
    } else if (sub == "two-step-cs") {
      const Equation eq = equation_from_name(cfg.get("equation"));
      const std::string tag = std::string(equation_name(eq));
      runner.two_step_cs(eq, cfg.number("alpha"), "grid", "two_step_" + tag + ".csv", "region_" + tag + ".svg");
    } else {
      runner.replicate();
    }
  } catch (const std::exception& e) {
    err << "bnk " << sub << ": " << e.what() << '\n';
    return 1;
  }
  return 0;
}

int run(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return run(args, std::cout, std::cerr);
}

}  // namespace bnk
