#include "bnk/panel.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>

#include "bnk/errors.hpp"
#include "bnk/text.hpp"

namespace bnk {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

}  // namespace

Period Period::parse(std::string_view raw) {
  const std::string_view s = trim(raw);
  auto fail = [&]() -> Period { throw InputError("unparseable date '" + std::string(s) + "'"); };

  if (all_digits(s) && s.size() < 4) return index(parse_int(s, "date"));
  // YYYYQn
  if (s.size() == 6 && (s[4] == 'Q' || s[4] == 'q') && all_digits(s.substr(0, 4))) {
    const int q = s[5] - '0';
    if (q < 1 || q > 4) return fail();
    return quarter(static_cast<int>(parse_int(s.substr(0, 4))), q);
  }
  // YYYY-MM-DD
  if (s.size() == 10 && s[4] == '-' && s[7] == '-' && all_digits(s.substr(0, 4)) &&
      all_digits(s.substr(5, 2)) && all_digits(s.substr(8, 2))) {
    const int month = static_cast<int>(parse_int(s.substr(5, 2)));
    const int day = static_cast<int>(parse_int(s.substr(8, 2)));
    if (month < 1 || month > 12 || day < 1 || day > 31) return fail();
    return quarter(static_cast<int>(parse_int(s.substr(0, 4))), (month - 1) / 3 + 1);
  }
  if (all_digits(s)) return index(parse_int(s, "date"));
  return fail();
}

std::string Period::to_string() const {
  if (kind == Kind::index) return std::to_string(ordinal);
  return std::to_string(year()) + "Q" + std::to_string(quarter_of_year());
}

std::int64_t quarters_between(const Period& first, const Period& last) {
  return last.ordinal - first.ordinal + 1;
}

bool TimeSeriesPanel::has(std::string_view name) const {
  return std::find(names_.begin(), names_.end(), name) != names_.end();
}

const std::vector<double>& TimeSeriesPanel::column(std::string_view name) const {
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) throw InputError("panel has no column '" + std::string(name) + "'");
  return columns_[static_cast<std::size_t>(it - names_.begin())];
}

std::vector<double>& TimeSeriesPanel::column(std::string_view name) {
  return const_cast<std::vector<double>&>(std::as_const(*this).column(name));
}

void TimeSeriesPanel::set_column(const std::string& name, std::vector<double> values) {
  if (values.size() != dates_.size()) {
    throw InputError("column '" + name + "' has " + std::to_string(values.size()) +
                     " values for " + std::to_string(dates_.size()) + " dates");
  }
  auto it = std::find(names_.begin(), names_.end(), name);
  if (it == names_.end()) {
    names_.push_back(name);
    columns_.push_back(std::move(values));
  } else {
    columns_[static_cast<std::size_t>(it - names_.begin())] = std::move(values);
  }
}

TimeSeriesPanel TimeSeriesPanel::slice(std::size_t first, std::size_t last) const {
  last = std::min(last, size());
  first = std::min(first, last);
  TimeSeriesPanel out(std::vector<Period>(dates_.begin() + first, dates_.begin() + last));
  out.pi_annualized = pi_annualized;
  for (std::size_t c = 0; c < names_.size(); ++c) {
    out.set_column(names_[c], std::vector<double>(columns_[c].begin() + first,
                                                  columns_[c].begin() + last));
  }
  return out;
}

bool TimeSeriesPanel::contiguous() const {
  for (std::size_t t = 1; t < dates_.size(); ++t) {
    if (dates_[t].kind != dates_[t - 1].kind || dates_[t].ordinal != dates_[t - 1].ordinal + 1) {
      return false;
    }
  }
  return true;
}

bool TimeSeriesPanel::operator==(const TimeSeriesPanel& o) const {
  if (dates_ != o.dates_ || names_ != o.names_ || pi_annualized != o.pi_annualized) return false;
  for (std::size_t c = 0; c < columns_.size(); ++c) {
    for (std::size_t t = 0; t < columns_[c].size(); ++t) {
      const double a = columns_[c][t];
      const double b = o.columns_[c][t];
      if (!(a == b || (std::isnan(a) && std::isnan(b)))) return false;
    }
  }
  return true;
}

LoadedPanel load_panel(std::istream& in, const PanelSchema& schema) {
  std::string line;
  if (!std::getline(in, line)) throw InputError("panel CSV is empty (header row required)");
  std::vector<std::string> header = split(trim(line), ',');
  for (auto& h : header) h = std::string(trim(h));
  auto date_it = std::find(header.begin(), header.end(), schema.date_column);
  if (date_it == header.end()) {
    throw InputError("panel CSV has no date column '" + schema.date_column + "'");
  }
  const std::size_t date_col = static_cast<std::size_t>(date_it - header.begin());

  std::vector<std::size_t> keep;
  std::vector<std::string> keep_names;
  if (schema.columns.empty()) {
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (c != date_col) {
        keep.push_back(c);
        keep_names.push_back(header[c]);
      }
    }
  } else {
    for (const auto& name : schema.columns) {
      auto it = std::find(header.begin(), header.end(), name);
      if (it == header.end()) throw InputError("panel CSV has no column '" + name + "'");
      keep.push_back(static_cast<std::size_t>(it - header.begin()));
      keep_names.push_back(name);
    }
  }

  std::vector<Period> dates;
  std::vector<std::vector<double>> values(keep.size());
  std::size_t dropped = 0;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (trim(line).empty()) continue;
    const auto cells = split(trim(line), ',');
    if (cells.size() != header.size()) {
      throw InputError("line " + std::to_string(lineno) + ": expected " +
                       std::to_string(header.size()) + " fields, found " +
                       std::to_string(cells.size()));
    }
    const Period date = Period::parse(cells[date_col]);
    if (schema.start && date < *schema.start) continue;
    if (schema.end && date > *schema.end) continue;

    std::vector<double> row(keep.size());
    bool complete = true;
    for (std::size_t j = 0; j < keep.size(); ++j) {
      const std::string_view cell = trim(cells[keep[j]]);
      row[j] = cell.empty() ? kNaN : parse_double(cell, header[keep[j]]);
      if (std::isnan(row[j])) complete = false;
    }
    if (!complete) {
      ++dropped;
      continue;
    }
    if (!dates.empty() && date == dates.back()) {
      throw InputError("duplicate date " + date.to_string());
    }
    if (!dates.empty() && date < dates.back()) {
      if (std::find(dates.begin(), dates.end(), date) != dates.end()) {
        throw InputError("duplicate date " + date.to_string());
      }
      throw InputError("dates not increasing at " + date.to_string());
    }
    dates.push_back(date);
    for (std::size_t j = 0; j < keep.size(); ++j) values[j].push_back(row[j]);
  }
  if (dates.empty()) throw InputError("panel is empty after applying the sample window");

  LoadedPanel out;
  out.panel = TimeSeriesPanel(std::move(dates));
  for (std::size_t j = 0; j < keep.size(); ++j) out.panel.set_column(keep_names[j], std::move(values[j]));
  out.dropped_rows = dropped;
  if (!out.panel.contiguous()) {
    throw InputError("panel is not gap-free after dropping " + std::to_string(dropped) +
                     " incomplete rows");
  }
  return out;
}

LoadedPanel load_panel(const std::string& path, const PanelSchema& schema) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open panel file '" + path + "'");
  return load_panel(in, schema);
}

void write_panel(std::ostream& out, const TimeSeriesPanel& panel) {
  out << "date";
  for (const auto& n : panel.names()) out << ',' << n;
  out << '\n';
  for (std::size_t t = 0; t < panel.size(); ++t) {
    out << panel.dates()[t].to_string();
    for (const auto& n : panel.names()) out << ',' << format_double(panel.column(n)[t]);
    out << '\n';
  }
}

void write_panel(const std::string& path, const TimeSeriesPanel& panel) {
  std::ofstream out(path);
  if (!out) throw InputError("cannot write panel file '" + path + "'");
  write_panel(out, panel);
}

Transform Transform::parse(std::string_view raw) {
  const std::string_view s = trim(raw);
  if (s == "none") return {Kind::none, 0};
  if (s == "demean") return {Kind::demean, 0};
  if (s == "linear_detrend") return {Kind::linear_detrend, 0};
  if (s == "log_diff") return {Kind::log_diff, 0};
  if (s.size() > 5 && s.substr(0, 4) == "lag(" && s.back() == ')') {
    const auto k = parse_int(s.substr(4, s.size() - 5), "lag");
    if (k < 0) throw InputError("lag must be non-negative");
    return {Kind::lag, static_cast<int>(k)};
  }
  throw InputError("unknown transform '" + std::string(s) + "'");
}

std::string Transform::to_string() const {
  switch (kind) {
    case Kind::none: return "none";
    case Kind::demean: return "demean";
    case Kind::linear_detrend: return "linear_detrend";
    case Kind::log_diff: return "log_diff";
    case Kind::lag: return "lag(" + std::to_string(lag) + ")";
  }
  return "none";
}

TransformSpec TransformSpec::parse(std::string_view s) {
  TransformSpec spec;
  for (const auto& item : split(s, ';')) {
    const auto entry = trim(item);
    if (entry.empty()) continue;
    const auto eq = entry.find('=');
    if (eq == std::string_view::npos) {
      throw InputError("transform entry '" + std::string(entry) + "' needs column=pipeline");
    }
    std::vector<Transform> steps;
    for (const auto& step : split(entry.substr(eq + 1), ',')) steps.push_back(Transform::parse(step));
    spec.pipelines.emplace_back(std::string(trim(entry.substr(0, eq))), std::move(steps));
  }
  return spec;
}

std::string TransformSpec::to_string() const {
  std::string out;
  for (const auto& [col, steps] : pipelines) {
    if (!out.empty()) out += "; ";
    out += col + "=";
    for (std::size_t i = 0; i < steps.size(); ++i) {
      if (i) out += ",";
      out += steps[i].to_string();
    }
  }
  return out;
}

TransformSpec default_transforms() {
  return TransformSpec::parse("x=linear_detrend; pi=demean; i=demean");
}

namespace {

void demean(std::vector<double>& v) {
  double sum = 0.0;
  std::size_t n = 0;
  for (double x : v) {
    if (!std::isnan(x)) {
      sum += x;
      ++n;
    }
  }
  if (n == 0) return;
  const double mean = sum / static_cast<double>(n);
  for (double& x : v) x -= mean;
}

// Removes the OLS fit on (1, t) over the finite entries.
void linear_detrend(std::vector<double>& v) {
  double st = 0, sy = 0, stt = 0, sty = 0;
  std::size_t n = 0;
  for (std::size_t t = 0; t < v.size(); ++t) {
    if (std::isnan(v[t])) continue;
    const double tt = static_cast<double>(t);
    st += tt;
    sy += v[t];
    stt += tt * tt;
    sty += tt * v[t];
    ++n;
  }
  if (n < 2) return;
  const double nn = static_cast<double>(n);
  const double tbar = st / nn;
  const double ybar = sy / nn;
  const double slope = (sty - nn * tbar * ybar) / (stt - nn * tbar * tbar);
  const double intercept = ybar - slope * tbar;
  for (std::size_t t = 0; t < v.size(); ++t) v[t] -= intercept + slope * static_cast<double>(t);
}

void log_diff(std::vector<double>& v, const std::string& name) {
  std::vector<double> out(v.size(), kNaN);
  for (std::size_t t = 0; t < v.size(); ++t) {
    if (!std::isnan(v[t]) && v[t] <= 0.0) {
      throw DomainError("log_diff of non-positive value in column '" + name + "'");
    }
    if (t > 0 && !std::isnan(v[t]) && !std::isnan(v[t - 1])) out[t] = std::log(v[t]) - std::log(v[t - 1]);
  }
  v = std::move(out);
}

void lag(std::vector<double>& v, int k) {
  std::vector<double> out(v.size(), kNaN);
  for (std::size_t t = static_cast<std::size_t>(k); t < v.size(); ++t) out[t] = v[t - k];
  v = std::move(out);
}

}  // namespace

TimeSeriesPanel apply_transforms(const TimeSeriesPanel& panel, const TransformSpec& spec) {
  TimeSeriesPanel out = panel;
  std::vector<std::string> touched;
  for (const auto& [name, steps] : spec.pipelines) {
    auto& col = out.column(name);
    for (const Transform& tr : steps) {
      switch (tr.kind) {
        case Transform::Kind::none: break;
        case Transform::Kind::demean: demean(col); break;
        case Transform::Kind::linear_detrend: linear_detrend(col); break;
        case Transform::Kind::log_diff: log_diff(col, name); break;
        case Transform::Kind::lag: lag(col, tr.lag); break;
      }
    }
    touched.push_back(name);
  }
  // Trim rows that lag/log_diff left incomplete at either end.
  std::size_t first = 0;
  std::size_t last = out.size();
  auto complete = [&](std::size_t t) {
    return std::all_of(touched.begin(), touched.end(),
                       [&](const std::string& n) { return !std::isnan(out.column(n)[t]); });
  };
  while (first < last && !complete(first)) ++first;
  while (last > first && !complete(last - 1)) --last;
  return out.slice(first, last);
}

void add_real_rate_gap(TimeSeriesPanel& panel, const std::string& name, const std::string& rn_column) {
  const auto& i = panel.column("i");
  const auto& pi = panel.column("pi");
  const std::size_t n = panel.size();
  std::vector<double> ex_post(n, kNaN);
  for (std::size_t t = 0; t + 1 < n; ++t) ex_post[t] = i[t] - pi[t + 1];

  std::vector<double> rn(n, 0.0);
  if (panel.has(rn_column)) {
    rn = panel.column(rn_column);
  } else {
    double sum = 0.0;
    std::size_t cnt = 0;
    for (double v : ex_post) {
      if (!std::isnan(v)) {
        sum += v;
        ++cnt;
      }
    }
    std::fill(rn.begin(), rn.end(), cnt ? sum / static_cast<double>(cnt) : 0.0);
  }
  std::vector<double> gap(n, kNaN);
  for (std::size_t t = 0; t < n; ++t) gap[t] = ex_post[t] - rn[t];
  panel.set_column(name, std::move(gap));
}

InstrumentSpec InstrumentSpec::parse(std::string_view s) {
  InstrumentSpec spec;
  spec.constant = false;
  for (const auto& item : split(s, ',')) {
    const auto entry = trim(item);
    if (entry.empty()) continue;
    if (entry == "const") {
      spec.constant = true;
      continue;
    }
    const auto colon = entry.find(':');
    if (colon == std::string_view::npos) {
      throw InputError("instrument entry '" + std::string(entry) + "' needs column:lags");
    }
    InstrumentBlock b;
    b.column = std::string(trim(entry.substr(0, colon)));
    const auto lags = entry.substr(colon + 1);
    const auto dash = lags.find('-');
    if (dash == std::string_view::npos) {
      b.first_lag = b.last_lag = static_cast<int>(parse_int(lags, "lag"));
    } else {
      b.first_lag = static_cast<int>(parse_int(lags.substr(0, dash), "lag"));
      b.last_lag = static_cast<int>(parse_int(lags.substr(dash + 1), "lag"));
    }
    if (b.first_lag < 0 || b.last_lag < b.first_lag) {
      throw InputError("bad lag range in instrument entry '" + std::string(entry) + "'");
    }
    spec.blocks.push_back(std::move(b));
  }
  return spec;
}

std::string InstrumentSpec::to_string() const {
  std::string out = constant ? "const" : "";
  for (const auto& b : blocks) {
    if (!out.empty()) out += ", ";
    out += b.column + ":" + std::to_string(b.first_lag) + "-" + std::to_string(b.last_lag);
  }
  return out;
}

int InstrumentSpec::count() const {
  int n = constant ? 1 : 0;
  for (const auto& b : blocks) n += b.last_lag - b.first_lag + 1;
  return n;
}

InstrumentSpec is_instruments() { return InstrumentSpec::parse("const, x:1-3, rr:1-3"); }

InstrumentSpec nkpc_instruments(const std::string& labor_share) {
  return InstrumentSpec::parse("pi:1-4, " + labor_share + ":1-3");
}

InstrumentMatrix build_instruments(const TimeSeriesPanel& panel, const InstrumentSpec& spec,
                                   int lead, const std::vector<std::string>& required) {
  const int n = static_cast<int>(panel.size());
  int max_lag = 0;
  for (const auto& b : spec.blocks) {
    max_lag = std::max(max_lag, b.last_lag);
    (void)panel.column(b.column);  // existence check
  }

  InstrumentMatrix out;
  for (const auto& b : spec.blocks) {
    for (int l = b.first_lag; l <= b.last_lag; ++l) out.labels.push_back(b.column + "(-" + std::to_string(l) + ")");
  }
  if (spec.constant) out.labels.insert(out.labels.begin(), "const");

  std::vector<std::vector<double>> rows;
  std::vector<std::vector<int>> sources;
  for (int t = max_lag; t + lead < n; ++t) {
    bool ok = true;
    for (const auto& name : required) {
      const auto& col = panel.column(name);
      for (int s = t; s <= t + lead && ok; ++s) ok = !std::isnan(col[static_cast<std::size_t>(s)]);
    }
    std::vector<double> z;
    std::vector<int> src;
    if (spec.constant) {
      z.push_back(1.0);
      src.push_back(-1);
    }
    for (const auto& b : spec.blocks) {
      const auto& col = panel.column(b.column);
      for (int l = b.first_lag; l <= b.last_lag; ++l) {
        const double v = col[static_cast<std::size_t>(t - l)];
        ok = ok && !std::isnan(v);
        z.push_back(v);
        src.push_back(t - l);
      }
    }
    if (!ok) continue;
    out.rows.push_back(static_cast<std::size_t>(t));
    rows.push_back(std::move(z));
    sources.push_back(std::move(src));
  }

  const int nz = spec.count();
  if (static_cast<int>(rows.size()) <= nz) {
    throw InputError("insufficient sample after lagging: " + std::to_string(rows.size()) +
                     " usable rows for " + std::to_string(nz) + " instruments");
  }
  out.z.resize(static_cast<Eigen::Index>(rows.size()), nz);
  out.source_rows.resize(static_cast<Eigen::Index>(rows.size()), nz);
  for (std::size_t r = 0; r < rows.size(); ++r) {
    for (int j = 0; j < nz; ++j) {
      out.z(static_cast<Eigen::Index>(r), j) = rows[r][static_cast<std::size_t>(j)];
      out.source_rows(static_cast<Eigen::Index>(r), j) = sources[r][static_cast<std::size_t>(j)];
    }
  }
  return out;
}

}  // namespace bnk
