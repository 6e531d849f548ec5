#include "bnk/report.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <ostream>

#include "bnk/errors.hpp"
#include "bnk/text.hpp"

namespace bnk {

namespace {

std::string quote(const std::string& cell) {
  if (cell.find_first_of(",\"\n") == std::string::npos) return cell;
  std::string out = "\"";
  for (char c : cell) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string fixed4(double v) { return std::isfinite(v) ? format_fixed(v, 4) : "NA"; }

std::string escape_xml(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '&': out += "&amp;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string percent(double v) { return std::isfinite(v) ? format_fixed(100.0 * v, 3) + "%" : "NA"; }

}  // namespace

void CsvTable::write(std::ostream& out) const {
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << quote(cells[i]);
    out << '\n';
  };
  line(header);
  for (const auto& r : rows) line(r);
}

void CsvTable::write(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  write(out);
}

std::string format_interval(double lo, double hi) {
  if (!std::isfinite(lo) || !std::isfinite(hi)) return "empty";
  return "[" + format_fixed(lo, 2) + ", " + format_fixed(hi, 2) + "]";
}

CsvTable ml_table(const MlEstimate& est, const std::vector<Param>& fixed_rows) {
  CsvTable t;
  t.header = {"parameter", "estimate", "sd", "t_stat", "sd_opg"};
  for (std::size_t i = 0; i < est.free.size(); ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    t.rows.push_back({std::string(param_name(est.free[i])), fixed4(est.values(ii)), fixed4(est.sd_hessian(ii)),
                      fixed4(est.t_stat(ii)), fixed4(est.sd_opg(ii))});
  }
  for (Param p : fixed_rows) t.rows.push_back({std::string(param_name(p)), fixed4(est.params.get(p)), "", "", ""});
  return t;
}

CsvTable projection_table(const std::vector<ProjectionSet>& sets) {
  std::vector<Param> order;
  std::vector<std::pair<double, double>> bounds;
  for (const auto& s : sets) {
    for (std::size_t j = 0; j < s.params.size(); ++j) {
      if (std::find(order.begin(), order.end(), s.params[j]) != order.end()) continue;
      order.push_back(s.params[j]);
      const auto jj = static_cast<Eigen::Index>(j);
      bounds.emplace_back(s.lower(jj), s.upper(jj));
    }
  }
  CsvTable t;
  t.header.push_back("level");
  for (Param p : order) t.header.emplace_back(param_name(p));
  std::vector<std::string> lower{"lower"}, upper{"upper"};
  for (const auto& [lo, hi] : bounds) {
    lower.push_back(std::isfinite(lo) ? format_fixed(lo, 3) : "empty");
    upper.push_back(std::isfinite(hi) ? format_fixed(hi, 3) : "empty");
  }
  t.rows = {lower, upper};
  return t;
}

CsvTable projection_draws(const ProjectionSet& set) {
  CsvTable t;
  t.header.push_back("draw");
  for (Param p : set.params) t.header.emplace_back(param_name(p));
  t.header.push_back("lm");
  t.header.push_back("retained");
  std::vector<char> kept(set.draws.size(), 0);
  for (std::size_t d : set.retained) kept[d] = 1;
  for (std::size_t d = 0; d < set.draws.size(); ++d) {
    std::vector<std::string> row{std::to_string(d)};
    for (Eigen::Index j = 0; j < set.draws[d].size(); ++j) row.push_back(format_double(set.draws[d](j)));
    const double lm = set.lm(static_cast<Eigen::Index>(d));
    row.push_back(std::isfinite(lm) ? format_double(lm) : "NA");
    row.push_back(kept[d] ? "1" : "0");
    t.rows.push_back(std::move(row));
  }
  return t;
}

CsvTable two_step_table(const TwoStepResult& r) {
  CsvTable t;
  t.header = {"parameter", "CS_R", "CS_N", "gamma_hat", "two_step_set", "never_nests"};
  auto add = [&](const std::string& name, const SetResult& s, int coord) {
    std::string cs_r, cs_n;
    if (coord < 0) {
      cs_r = format_interval(s.robust_lower[0], s.robust_upper[0]) + " x " +
             format_interval(s.robust_lower[1], s.robust_upper[1]);
      cs_n = format_interval(s.nonrobust_lower[0], s.nonrobust_upper[0]) + " x " +
             format_interval(s.nonrobust_lower[1], s.nonrobust_upper[1]);
    } else {
      const auto c = static_cast<std::size_t>(coord);
      cs_r = format_interval(s.robust_lower[c], s.robust_upper[c]);
      cs_n = format_interval(s.nonrobust_lower[c], s.nonrobust_upper[c]);
    }
    t.rows.push_back({name, cs_r, cs_n, percent(s.gamma_hat), s.ics ? "CS_R" : "CS_N", s.never_nests ? "1" : "0"});
  };
  add(r.param_names[0], r.per_param[0], 0);
  add(r.param_names[1], r.per_param[1], 1);
  add("(" + r.param_names[0] + ", " + r.param_names[1] + ")", r.whole, -1);
  return t;
}

CsvTable grid_table(const TwoStepResult& r) {
  CsvTable t;
  t.header = {r.param_names[0], r.param_names[1], "S", "K", "W", "in_CS_R", "in_CS_N"};
  t.rows.reserve(r.points.size());
  for (std::size_t n = 0; n < r.points.size(); ++n) {
    const GridPoint& gp = r.points[n];
    const Eigen::VectorXd x = r.grid.point(n);
    auto num = [&](double v) { return gp.ok && std::isfinite(v) ? format_double(v) : std::string("NA"); };
    t.rows.push_back({format_double(x(0)), format_double(x(1)), num(gp.s), num(gp.k), num(gp.w),
                      r.whole.in_robust[n] ? "1" : "0", r.whole.in_nonrobust[n] ? "1" : "0"});
  }
  return t;
}

CsvTable gmm_estimate_table(const TwoStepResult& r) {
  CsvTable t;
  t.header = {"parameter", "estimate", "sd"};
  for (int j = 0; j < 2; ++j) {
    const double var = r.variance(j, j);
    t.rows.push_back({r.param_names[static_cast<std::size_t>(j)], format_fixed(r.estimate(j), 4),
                      std::isfinite(var) && var >= 0 ? format_fixed(std::sqrt(var), 4) : "NA"});
  }
  t.rows.push_back({"objective", format_double(r.objective_min), ""});
  t.rows.push_back({"S", format_double(r.objective_min * static_cast<double>(r.periods)), ""});
  t.rows.push_back({"periods", std::to_string(r.periods), ""});
  t.rows.push_back({"instruments", std::to_string(r.k), ""});
  return t;
}

CsvTable solution_table(const StateSpaceSolution& s) {
  static const char* kStates[] = {"i_lag", "eta_d", "eta_m", "eps_s"};
  static const char* kObs[] = {"x", "pi", "i"};
  static const char* kShocks[] = {"eps_s", "eps_d", "eps_m"};
  CsvTable t;
  t.header = {"block", "row", "column", "value"};
  auto add = [&](const char* block, const char* row, const char* col, double v) {
    t.rows.push_back({block, row, col, format_double(v)});
  };
  for (int i = 0; i < s.c_matrix.rows(); ++i)
    for (int j = 0; j < s.c_matrix.cols(); ++j) add("loading", kObs[i], kStates[j], s.c_matrix(i, j));
  for (int i = 0; i < s.transition.rows(); ++i)
    for (int j = 0; j < s.transition.cols(); ++j) add("transition", kStates[i], kStates[j], s.transition(i, j));
  for (int i = 0; i < s.impact.rows(); ++i)
    for (int j = 0; j < s.impact.cols(); ++j) add("impact", kStates[i], kShocks[j], s.impact(i, j));
  for (std::size_t k = 0; k < s.roots.size(); ++k) {
    const std::string idx = std::to_string(k);
    t.rows.push_back({"root", idx, "real", format_double(s.roots[k].real())});
    t.rows.push_back({"root", idx, "imag", format_double(s.roots[k].imag())});
  }
  return t;
}

void write_region_svg(std::ostream& out, const TwoStepResult& r, const std::string& title) {
  const double left = 70, top = 40, width = 520, height = 400;
  const GridAxis& ax = r.grid.axes[0];
  const GridAxis& ay = r.grid.axes[1];
  const double x_lo = ax.lo - 0.5 * ax.step, x_hi = ax.hi() + 0.5 * ax.step;
  const double y_lo = ay.lo - 0.5 * ay.step, y_hi = ay.hi() + 0.5 * ay.step;
  auto px = [&](double v) { return left + (v - x_lo) / (x_hi - x_lo) * width; };
  auto py = [&](double v) { return top + height - (v - y_lo) / (y_hi - y_lo) * height; };
  auto num = [](double v) { return format_fixed(v, 2); };

  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << left + width + 160 << "\" height=\""
      << top + height + 60 << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect x=\"0\" y=\"0\" width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << left << "\" y=\"24\" font-size=\"14\">" << escape_xml(title) << "</text>\n";

  // One rectangle per vertical run of retained cells.
  auto region = [&](const std::vector<char>& in, const char* fill, const char* opacity) {
    out << "<g fill=\"" << fill << "\" fill-opacity=\"" << opacity << "\">\n";
    for (int i = 0; i < ax.count; ++i) {
      int j = 0;
      while (j < ay.count) {
        const auto n = static_cast<std::size_t>(i) * static_cast<std::size_t>(ay.count) + static_cast<std::size_t>(j);
        if (!in[n]) {
          ++j;
          continue;
        }
        int end = j;
        while (end + 1 < ay.count && in[n + static_cast<std::size_t>(end + 1 - j)]) ++end;
        const double x0 = px(ax.value(i) - 0.5 * ax.step), x1 = px(ax.value(i) + 0.5 * ax.step);
        const double y0 = py(ay.value(end) + 0.5 * ay.step), y1 = py(ay.value(j) - 0.5 * ay.step);
        out << "<rect x=\"" << num(x0) << "\" y=\"" << num(y0) << "\" width=\"" << num(x1 - x0) << "\" height=\""
            << num(y1 - y0) << "\"/>\n";
        j = end + 1;
      }
    }
    out << "</g>\n";
  };
  region(r.whole.in_robust, "#9ecae1", "0.8");
  region(r.whole.in_nonrobust, "#08519c", "0.7");

  out << "<rect x=\"" << left << "\" y=\"" << top << "\" width=\"" << width << "\" height=\"" << height
      << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 5; ++k) {
    const double vx = ax.lo + (ax.hi() - ax.lo) * k / 5.0;
    const double vy = ay.lo + (ay.hi() - ay.lo) * k / 5.0;
    out << "<line x1=\"" << num(px(vx)) << "\" y1=\"" << top + height << "\" x2=\"" << num(px(vx)) << "\" y2=\""
        << top + height + 5 << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << num(px(vx)) << "\" y=\"" << top + height + 18 << "\" text-anchor=\"middle\">" << num(vx)
        << "</text>\n";
    out << "<line x1=\"" << left - 5 << "\" y1=\"" << num(py(vy)) << "\" x2=\"" << left << "\" y2=\""
        << num(py(vy)) << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << left - 8 << "\" y=\"" << num(py(vy) + 4) << "\" text-anchor=\"end\">" << num(vy)
        << "</text>\n";
  }
  out << "<text x=\"" << left + width / 2 << "\" y=\"" << top + height + 40 << "\" text-anchor=\"middle\">"
      << escape_xml(r.param_names[0]) << "</text>\n";
  out << "<text x=\"20\" y=\"" << top + height / 2 << "\" text-anchor=\"middle\" transform=\"rotate(-90 20 "
      << top + height / 2 << ")\">" << escape_xml(r.param_names[1]) << "</text>\n";

  if (r.estimate.size() == 2 && r.estimate.allFinite()) {
    out << "<circle cx=\"" << num(px(r.estimate(0))) << "\" cy=\"" << num(py(r.estimate(1)))
        << "\" r=\"4\" fill=\"#e6550d\" stroke=\"black\"/>\n";
  }
  const double lx = left + width + 15;
  out << "<rect x=\"" << lx << "\" y=\"" << top << "\" width=\"14\" height=\"14\" fill=\"#9ecae1\"/>\n";
  out << "<text x=\"" << lx + 20 << "\" y=\"" << top + 11 << "\">CS_R</text>\n";
  out << "<rect x=\"" << lx << "\" y=\"" << top + 22 << "\" width=\"14\" height=\"14\" fill=\"#08519c\"/>\n";
  out << "<text x=\"" << lx + 20 << "\" y=\"" << top + 33 << "\">CS_N</text>\n";
  out << "<circle cx=\"" << lx + 7 << "\" cy=\"" << top + 51 << "\" r=\"4\" fill=\"#e6550d\" stroke=\"black\"/>\n";
  out << "<text x=\"" << lx + 20 << "\" y=\"" << top + 55 << "\">estimate</text>\n";
  out << "<text x=\"" << lx << "\" y=\"" << top + 80 << "\">gamma hat " << percent(r.whole.gamma_hat) << "</text>\n";
  out << "</svg>\n";
}

void write_region_svg(const std::string& path, const TwoStepResult& r, const std::string& title) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write " + path);
  write_region_svg(out, r, title);
}

}  // namespace bnk
