#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "bnk/full_model.hpp"
#include "bnk/likelihood.hpp"
#include "bnk/two_step.hpp"

namespace bnk {

// Minimal CSV table: header plus string cells, quoted only when needed.
struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;

  void write(std::ostream& out) const;
  void write(const std::string& path) const;
};

// Parameter, Estimate, s.d., t-stat (inverse Hessian), then the OPG s.d.;
// fixed parameters listed after the free ones with blank s.d. columns.
CsvTable ml_table(const MlEstimate& estimate, const std::vector<Param>& fixed_rows);

// Level row (Lower/Upper) by parameter. Each parameter is taken from the
// first set in `sets` that contains it.
CsvTable projection_table(const std::vector<ProjectionSet>& sets);
// Every draw of one set: draw index, parameter values, LM_o, retained flag.
CsvTable projection_draws(const ProjectionSet& set);

// Parameter, CS_R, CS_N, Gamma_hat; one row per coordinate, then the whole set.
CsvTable two_step_table(const TwoStepResult& result);
// m_bar, gamma, S, K, W, in_CS_R, in_CS_N (whole-set membership) per grid point.
CsvTable grid_table(const TwoStepResult& result);
// Point estimate, objective, S at the estimate, GMM standard errors.
CsvTable gmm_estimate_table(const TwoStepResult& result);

// Loadings, transition, impact and generalized eigenvalues of a solution.
CsvTable solution_table(const StateSpaceSolution& solution);

// Region plot over the grid: CS_R and CS_N shaded, point estimate marked.
void write_region_svg(std::ostream& out, const TwoStepResult& result, const std::string& title);
void write_region_svg(const std::string& path, const TwoStepResult& result, const std::string& title);

// Interval as "[lo, hi]" with two decimals, "empty" when NaN.
std::string format_interval(double lo, double hi);

}  // namespace bnk
