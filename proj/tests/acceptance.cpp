// One PASS/FAIL line per acceptance criterion. Exit status is nonzero when a
// gated criterion fails; criterion 9 is reported only.

#include <boost/math/distributions/chi_squared.hpp>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <set>
#include <sstream>

#include "CLI11.hpp"
#include "bnk/chi2mix.hpp"
#include "bnk/cli.hpp"
#include "bnk/config.hpp"
#include "bnk/errors.hpp"
#include "bnk/full_model.hpp"
#include "bnk/likelihood.hpp"
#include "bnk/parallel.hpp"
#include "bnk/restricted.hpp"
#include "bnk/simulation.hpp"
#include "bnk/text.hpp"
#include "bnk/two_step.hpp"
#include "oracles.hpp"

using namespace bnk;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
  bool gated = true;
};

std::string fmt(double v, int d = 3) { return format_fixed(v, d); }
std::string sci(double v) {
  std::ostringstream s;
  s.precision(2);
  s << std::scientific << v;
  return s.str();
}

double chi2q(int dof, double level) { return boost::math::quantile(boost::math::chi_squared(dof), level); }

double max_diff(const SolutionMatrix& a, const SolutionMatrix& b) {
  return std::max({std::abs(a.a1 - b.a1), std::abs(a.a2 - b.a2), std::abs(a.b1 - b.b1), std::abs(a.b2 - b.b2)});
}

// Restricted-regime draws with a determinate, convergent forward expansion.
StructuralParams random_restricted(std::mt19937_64& gen) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (;;) {
    StructuralParams p;
    p.beta = 0.95 + 0.049 * u(gen);
    p.theta = 0.5 + 0.45 * u(gen);
    p.m_bar = 0.05 + 0.9 * u(gen);
    p.gamma = 0.3 + 5.0 * u(gen);
    p.phi = 2.0 * u(gen);
    p.rho_m = 0.9 * u(gen);
    p.rho_d = 0.9 * u(gen);
    p.sigma2_d = 0.1 + u(gen);
    p.sigma2_m = 0.1 + u(gen);
    p = p.restricted();
    const auto r = oracle::reduce(p);
    const double d = p.beta * r.Mf + r.sigma * r.kappa;
    if (std::max(p.rho_m, p.rho_d) * p.m_bar / d < 0.95) return p;
  }
}

Outcome solver_equivalence() {
  const auto t0 = std::chrono::steady_clock::now();
  std::mt19937_64 gen(1);
  double cf_fi = 0.0, cf_qz = 0.0, qz_uc = 0.0;
  int indeterminate = 0;
  for (int valid = 0; valid < 100;) {
    const StructuralParams p = random_restricted(gen);
    SolutionMatrix qz;
    try {
      qz = restricted_loadings(solve_full_re(p));
    } catch (const DeterminacyError&) {
      ++indeterminate;  // not a valid draw; redrawn
      continue;
    }
    ++valid;
    const SolutionMatrix cf = solve_restricted(derive_reduced(p), p.m_bar, p.rho_m, p.rho_d);
    cf_fi = std::max(cf_fi, max_diff(cf, oracle::forward_iteration(p)));
    cf_qz = std::max(cf_qz, max_diff(cf, qz));
    qz_uc = std::max(qz_uc, max_diff(qz, oracle::undetermined_coefficients(p)));
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  Outcome o;
  o.pass = cf_fi < 1e-8 && cf_qz < 1e-8 && secs < 10.0;
  o.detail = "closed form vs forward iteration " + sci(cf_fi) + ", closed form vs QZ " + sci(cf_qz) +
             ", QZ vs undetermined coefficients " + sci(qz_uc) + " (100 draws, " +
             std::to_string(indeterminate) + " indeterminate redrawn), " + fmt(secs, 2) + " s";
  return o;
}

Outcome identification_collapse() {
  StructuralParams p = table1_calibration().restricted();
  double last = 1e300;
  bool monotone = true;
  for (int i = 0; i < 20; ++i) {
    p.rho_d = p.rho_m + 0.1 * (19 - i) / 19.0;
    const double sv = restricted_loadings(solve_full_re(p)).smallest_singular_value();
    monotone = monotone && sv < last;
    last = sv;
  }
  Outcome o;
  o.pass = monotone && last < 1e-8;
  o.detail = std::string(monotone ? "monotone" : "not monotone") + ", smallest singular value at equality " + sci(last);
  return o;
}

TimeSeriesPanel simulated(const StructuralParams& p, std::uint64_t seed, std::uint64_t stream = 0) {
  SimulationPlan plan;
  plan.params = p;
  plan.seed = seed;
  plan.stream = stream;
  return simulate_observables(plan);
}

Outcome gradient_fidelity() {
  const LikelihoodProblem prob = LikelihoodProblem::complete_model(simulated(table1_calibration(), 3));
  std::mt19937_64 gen(4);
  std::uniform_real_distribution<double> u(-0.05, 0.05);
  double worst = 0.0;
  for (int point = 0; point < 20; ++point) {
    StructuralParams p = table1_calibration();
    for (Param q : prob.free) {
      const auto [lo, hi] = prob.box[q];
      p.set(q, std::clamp(p.get(q) * (1.0 + u(gen)), lo + 0.01 * (hi - lo), hi - 0.01 * (hi - lo)));
    }
    const ScoreBundle s = score_bundle(prob, p);
    for (std::size_t j = 0; j < prob.free.size(); ++j) {
      const Param q = prob.free[j];
      auto f = [&](double v) {
        StructuralParams pp = p;
        pp.set(q, v);
        return log_likelihood(prob, pp);
      };
      const double ref = oracle::ridders(f, p.get(q), 1e-3 * std::max(1.0, std::abs(p.get(q))));
      worst = std::max(worst, std::abs(s.total(static_cast<Eigen::Index>(j)) - ref) / std::max(1.0, std::abs(ref)));
    }
  }
  Outcome o;
  o.pass = worst < 1e-5;
  o.detail = "max relative error " + sci(worst) + " over 20 points x 9 parameters";
  return o;
}

Outcome lm_size() {
  const int reps = 2000;
  const StructuralParams truth = table1_calibration();
  const std::vector<Param> group = lm_group(1);
  const double crit = chi2q(static_cast<int>(group.size()), 0.95);
  std::vector<char> reject(reps, 0);
  parallel_for(reps, [&](std::size_t r) {
    const auto prob = LikelihoodProblem::complete_model(simulated(truth, 4000, r)).with_free(group);
    reject[r] = lm_o(prob, truth).statistic > crit;
  });
  const double rate = static_cast<double>(std::count(reject.begin(), reject.end(), 1)) / reps;
  Outcome o;
  o.pass = rate >= 0.035 && rate <= 0.065;
  o.detail = "rejection " + fmt(100 * rate, 2) + "% over " + std::to_string(reps) + " reps, T = 200";
  return o;
}

// Share of reps where the Wald test of the true restricted-regime parameters
// rejects at 5%; a singular covariance counts as a rejection.
double wald_rejection(double rho_m, int reps, std::size_t* singular) {
  StructuralParams truth = table1_calibration().restricted();
  truth.rho_m = rho_m;
  std::vector<char> reject(static_cast<std::size_t>(reps), 0), failed(static_cast<std::size_t>(reps), 0);
  parallel_for(static_cast<std::size_t>(reps), [&](std::size_t r) {
    const auto prob = LikelihoodProblem::restricted_model(simulated(truth, 5000, r), truth);
    const MlEstimate est = ml_estimate(prob, truth);
    const double w = wald_statistic(est, prob.free_values(truth));
    failed[r] = !std::isfinite(w);
    reject[r] = failed[r] || w > chi2q(static_cast<int>(prob.free.size()), 0.95);
  });
  *singular = static_cast<std::size_t>(std::count(failed.begin(), failed.end(), 1));
  return static_cast<double>(std::count(reject.begin(), reject.end(), 1)) / reps;
}

Outcome wald_fragility(int reps) {
  const double rho_d = table1_calibration().rho_d;
  std::size_t singular = 0, singular_far = 0;
  const double near = wald_rejection(rho_d - 0.05, reps, &singular);
  const double far = wald_rejection(0.3, reps, &singular_far);
  Outcome o;
  o.pass = near > 0.30;
  o.detail = "rejection " + fmt(100 * near, 1) + "% with rho_d - rho_m = 0.05 (" + std::to_string(singular) +
             " singular covariances), " + fmt(100 * far, 1) + "% with rho_m = 0.3; " + std::to_string(reps) +
             " reps each, T = 200";
  return o;
}

Outcome chi2mix_oracle() {
  std::mt19937_64 gen(6);
  std::uniform_real_distribution<double> ua(0.0, 2.0);
  std::uniform_int_distribution<int> uk(1, 10);
  double worst = 0.0;
  for (int rep = 0; rep < 10; ++rep) {
    const int k = uk(gen);
    const int p = std::uniform_int_distribution<int>(1, std::min(k, 2))(gen);
    const double a = ua(gen);
    const double x = chi2mix_quantile(a, k, p, 0.2 + 0.75 * rep / 9.0);
    std::mt19937_64 g(600 + static_cast<std::uint64_t>(rep));
    std::chi_squared_distribution<double> cp(p), cr(k > p ? k - p : 1);
    int hit = 0;
    for (int i = 0; i < 1000000; ++i) {
      const double y = k > p ? cr(g) : 0.0;
      hit += (1 + a) * cp(g) + a * y <= x;
    }
    worst = std::max(worst, std::abs(chi2mix_cdf(a, k, p, x) - hit / 1e6));
  }
  double roundtrip = 0.0;
  for (int k : {2, 4, 7, 10}) {
    for (int p : {1, 2}) {
      for (double g : {0.005, 0.05, 0.2, 0.5, 0.9}) {
        roundtrip = std::max(roundtrip, std::abs(gamma_of_a(a_of_gamma(g, 0.05, k, p), 0.05, k, p) - g));
      }
    }
  }
  Outcome o;
  o.pass = worst < 2e-3 && roundtrip < 1e-6;
  o.detail = "max |cdf - Monte Carlo| " + sci(worst) + ", roundtrip " + sci(roundtrip);
  return o;
}

TwoStepResult iv_sets(std::uint64_t seed, double strength, const GridSpec& grid, int t = 300, int lags = 4) {
  std::mt19937_64 gen(seed);
  const auto d = oracle::linear_iv(gen, t, 7, strength, {1.0, -0.5});
  return grid_invert(oracle::iv_problem(d, lags), grid, 0.05, 0.05);
}

GridSpec single_point(double a, double b) {
  GridSpec g;
  g.axes = {GridAxis{a, 0.0, 1}, GridAxis{b, 0.0, 1}};
  return g;
}

// The moments are serially independent, so Sigma is estimated without lags;
// the four-lag Bartlett estimator undercovers at this T and is shown alongside.
Outcome two_step_structure() {
  const int reps = 500, t = 1000;
  const GridSpec grid = GridSpec::parse("0.85:0.01:1.15,-0.65:0.01:-0.35");
  std::vector<char> strong_equal(reps, 0), weak_cover(reps, 0), weak_cover_hac(reps, 0);
  parallel_for(reps, [&](std::size_t r) {
    strong_equal[r] = !iv_sets(7000 + r, 1.0, grid, t, 0).whole.ics;
    // Coverage needs only the statistics at the true value.
    weak_cover[r] = iv_sets(8000 + r, 0.05, single_point(1.0, -0.5), t, 0).whole.in_robust[0];
    weak_cover_hac[r] = iv_sets(8000 + r, 0.05, single_point(1.0, -0.5), t, 4).whole.in_robust[0];
  });
  auto share = [&](const std::vector<char>& v) {
    return static_cast<double>(std::count(v.begin(), v.end(), 1)) / reps;
  };
  const double strong = share(strong_equal), weak = share(weak_cover);
  Outcome o;
  o.pass = strong >= 0.95 && weak >= 0.93;
  o.detail = "strong design CS_2S = CS_N in " + fmt(100 * strong, 1) + "%, weak design CS_R coverage " +
             fmt(100 * weak, 1) + "% (" + std::to_string(reps) + " reps each, T = 1000; with 4 HAC lags " +
             fmt(100 * share(weak_cover_hac), 1) + "%)";
  return o;
}

bool subset(const std::vector<char>& a, const std::vector<char>& b) {
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i] && !b[i]) return false;
  }
  return true;
}

RunConfig config_from(const std::string& file) {
  RunConfig cfg;
  cfg.load(std::string(BNK_SOURCE_DIR) + "/configs/" + file);
  cfg.validate();
  return cfg;
}

TwoStepResult data_sets(const RunConfig& cfg, Equation eq, const std::string& grid_key, double alpha) {
  const TimeSeriesPanel panel = prepare_panel(cfg);
  const int lags = static_cast<int>(cfg.integer("hac_lags"));
  const MomentProblem prob =
      eq == Equation::is ? is_problem(panel, cfg.params(), InstrumentSpec::parse(cfg.get("is_instruments")), lags)
                         : nkpc_problem(panel, cfg.params(), InstrumentSpec::parse(cfg.get("nkpc_instruments")), lags);
  return grid_invert(prob, GridSpec::parse(cfg.get(grid_key)), alpha, cfg.number("gamma_min"));
}

Outcome monotone_nesting() {
  std::vector<TwoStepResult> results;
  const GridSpec grid = GridSpec::parse("0:0.05:2,-1.5:0.05:0.5");
  for (double strength : {0.0, 0.05, 0.2, 1.0}) results.push_back(iv_sets(9000, strength, grid));
  const RunConfig quick = config_from("quick.cfg");
  results.push_back(data_sets(quick, Equation::is, "grid", 0.05));
  results.push_back(data_sets(quick, Equation::nkpc, "grid", 0.05));
  std::size_t checks = 0, violations = 0;
  for (const TwoStepResult& r : results) {
    const auto ladder = gamma_ladder(r.gamma_min, r.alpha);
    for (Target t : {Target::whole, Target::first, Target::second}) {
      std::vector<char> prev;
      for (double g : ladder) {
        const auto cp = preliminary_set(r, t, g);
        if (!prev.empty()) {
          ++checks;
          violations += !subset(cp, prev);
        }
        ++checks;
        violations += !subset(cp, robust_set(r, t, g));
        prev = cp;
      }
    }
  }
  Outcome o;
  o.pass = violations == 0;
  o.detail = std::to_string(violations) + " violations in " + std::to_string(checks) + " set comparisons over " +
             std::to_string(results.size()) + " grids";
  return o;
}

std::string interval(double lo, double hi) {
  if (std::isnan(lo)) return "empty";
  return "[" + fmt(lo, 2) + ", " + fmt(hi, 2) + "]";
}

Outcome published_tables() {
  const RunConfig cfg = config_from("paper.cfg");
  std::vector<std::string> misses;
  auto near = [&](const std::string& what, double got, double want, double tol) {
    if (!(std::abs(got - want) <= tol)) misses.push_back(what + " " + fmt(got) + " vs " + fmt(want));
  };

  const TwoStepResult is = data_sets(cfg, Equation::is, "grid", 0.05);
  const SetResult& is_m = is.per_param[0];
  near("IS m_bar CS_N lower", is_m.nonrobust_lower[0], 0.80, 0.05);
  near("IS m_bar CS_N upper", is_m.nonrobust_upper[0], 1.00, 0.05);
  near("IS gamma hat", is_m.gamma_hat, 0.05, 0.02);
  near("IS m_bar", is.estimate(0), 0.903, 0.05);
  near("IS gamma", is.estimate(1), 2.281, 0.05);

  const TwoStepResult nk = data_sets(cfg, Equation::nkpc, "grid", 0.05);
  const SetResult& nk_m = nk.per_param[0];
  near("NKPC m_bar CS_R lower", nk_m.robust_lower[0], 0.07, 0.05);
  near("NKPC m_bar CS_R upper", nk_m.robust_upper[0], 0.95, 0.05);
  near("NKPC m_bar CS_N lower", nk_m.nonrobust_lower[0], 0.14, 0.05);
  near("NKPC m_bar CS_N upper", nk_m.nonrobust_upper[0], 0.84, 0.05);
  near("NKPC gamma hat", nk_m.gamma_hat, 0.09934, 0.02);
  near("NKPC m_bar", nk.estimate(0), 0.393, 0.05);
  near("NKPC gamma", nk.estimate(1), 7.944, 0.05);

  const TimeSeriesPanel panel = prepare_panel(cfg);
  LikelihoodProblem lp = LikelihoodProblem::complete_model(panel, cfg.params()).with_free(cfg.ml_free());
  lp.box = cfg.box();
  MlOptions opt;
  opt.bfgs.max_iterations = static_cast<int>(cfg.integer("ml_max_iterations"));
  const MlEstimate ml = ml_estimate(lp, cfg.params(), opt);
  const StructuralParams t1 = table1_calibration();
  for (std::size_t j = 0; j < ml.free.size(); ++j) {
    near("ML " + std::string(param_name(ml.free[j])), ml.values(static_cast<Eigen::Index>(j)), t1.get(ml.free[j]), 0.1);
  }

  Outcome o;
  o.gated = false;
  o.pass = misses.empty();
  std::string d = "IS m_bar CS_N " + interval(is_m.nonrobust_lower[0], is_m.nonrobust_upper[0]) + ", gamma hat " +
                  fmt(100 * is_m.gamma_hat, 2) + "%, point (" + fmt(is.estimate(0)) + ", " + fmt(is.estimate(1)) +
                  "); NKPC m_bar CS_R " + interval(nk_m.robust_lower[0], nk_m.robust_upper[0]) + ", CS_N " +
                  interval(nk_m.nonrobust_lower[0], nk_m.nonrobust_upper[0]) + ", gamma hat " +
                  fmt(100 * nk_m.gamma_hat, 2) + "%, point (" + fmt(nk.estimate(0)) + ", " + fmt(nk.estimate(1)) +
                  "); " + std::to_string(misses.size()) + " misses";
  for (const auto& m : misses) d += "\n    miss: " + m;
  o.detail = d;
  return o;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome determinism() {
  const fs::path base = fs::temp_directory_path() / "bnk_acceptance_determinism";
  fs::remove_all(base);
  const std::string cfg = std::string(BNK_SOURCE_DIR) + "/configs/quick.cfg";
  std::ostringstream sink;
  for (const char* run_dir : {"a", "b"}) {
    if (run({"--config", cfg, "--out", (base / run_dir).string(), "replicate"}, sink, sink) != 0) {
      return {false, "replicate failed: " + sink.str()};
    }
  }
  std::size_t files = 0, differ = 0;
  for (const auto& e : fs::directory_iterator(base / "a")) {
    if (e.path().extension() != ".csv") continue;
    ++files;
    differ += slurp(e.path()) != slurp(base / "b" / e.path().filename());
  }
  fs::remove_all(base);
  Outcome o;
  o.pass = files > 0 && differ == 0;
  o.detail = std::to_string(differ) + " of " + std::to_string(files) + " CSVs differ between two runs";
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"acceptance criteria"};
  std::vector<int> only;
  int wald_reps = 300;
  app.add_option("--only", only, "criteria to run (default all)")->check(CLI::Range(1, 10));
  app.add_option("--wald-reps", wald_reps, "Monte Carlo reps for criterion 5")->check(CLI::PositiveNumber);
  CLI11_PARSE(app, argc, argv);

  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
      {"solver equivalence", solver_equivalence},
      {"identification collapse", identification_collapse},
      {"gradient fidelity", gradient_fidelity},
      {"LM_o size", lm_size},
      {"Wald fragility", [&] { return wald_fragility(wald_reps); }},
      {"chi-square mixture oracle", chi2mix_oracle},
      {"two-step structure", two_step_structure},
      {"monotone nesting", monotone_nesting},
      {"published tables (reported, not gated)", published_tables},
      {"determinism", determinism},
  };
  const std::set<int> selected(only.begin(), only.end());
  int gated_failures = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass && o.gated) ++gated_failures;
    std::cout << "criterion " << id << " " << (o.pass ? "PASS" : "FAIL") << "  " << criteria[i].first << ": "
              << o.detail << " [" << fmt(secs, 1) << " s]" << std::endl;
  }
  return gated_failures ? 1 : 0;
}
