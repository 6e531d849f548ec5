#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Dense>

namespace bnk {

// A quarterly date (ordinal = 4*year + quarter - 1) or a synthetic index t.
struct Period {
  enum class Kind { quarter, index };
  Kind kind = Kind::quarter;
  std::int64_t ordinal = 0;

  static Period quarter(int year, int q) { return {Kind::quarter, 4LL * year + (q - 1)}; }
  static Period index(std::int64_t t) { return {Kind::index, t}; }

  int year() const { return static_cast<int>(ordinal / 4); }
  int quarter_of_year() const { return static_cast<int>(ordinal % 4) + 1; }

  // YYYYQn, YYYY-MM-DD (mapped to its quarter) or a bare integer index.
  static Period parse(std::string_view s);
  std::string to_string() const;

  auto operator<=>(const Period&) const = default;
};

// Number of quarters from `first` to `last` inclusive.
std::int64_t quarters_between(const Period& first, const Period& last);

// Aligned observations with named columns. Missing values are NaN.
class TimeSeriesPanel {
 public:
  TimeSeriesPanel() = default;
  explicit TimeSeriesPanel(std::vector<Period> dates) : dates_(std::move(dates)) {}

  std::size_t size() const { return dates_.size(); }
  const std::vector<Period>& dates() const { return dates_; }
  const std::vector<std::string>& names() const { return names_; }

  bool has(std::string_view name) const;
  const std::vector<double>& column(std::string_view name) const;
  std::vector<double>& column(std::string_view name);
  // Adds or replaces a column; length must match.
  void set_column(const std::string& name, std::vector<double> values);

  // Keeps rows [first, last).
  TimeSeriesPanel slice(std::size_t first, std::size_t last) const;
  // True when consecutive dates differ by exactly one period.
  bool contiguous() const;

  // Inflation measured at an annualized rate (400 dlog P) rather than quarterly.
  bool pi_annualized = true;

  bool operator==(const TimeSeriesPanel& other) const;

 private:
  std::vector<Period> dates_;
  std::vector<std::string> names_;
  std::vector<std::vector<double>> columns_;
};

struct PanelSchema {
  std::string date_column = "date";
  // Columns to keep (empty keeps every column). Rows missing any of them drop.
  std::vector<std::string> columns;
  std::optional<Period> start;
  std::optional<Period> end;
};

struct LoadedPanel {
  TimeSeriesPanel panel;
  std::size_t dropped_rows = 0;  // rows removed for missing requested values
};

LoadedPanel load_panel(std::istream& in, const PanelSchema& schema = {});
LoadedPanel load_panel(const std::string& path, const PanelSchema& schema = {});

// CSV with `date` first, then columns in panel order; doubles printed in
// shortest round-trip form.
void write_panel(std::ostream& out, const TimeSeriesPanel& panel);
void write_panel(const std::string& path, const TimeSeriesPanel& panel);

struct Transform {
  enum class Kind { none, demean, linear_detrend, log_diff, lag };
  Kind kind = Kind::none;
  int lag = 0;

  static Transform parse(std::string_view s);
  std::string to_string() const;
};

// Per-column pipelines, applied left to right.
struct TransformSpec {
  std::vector<std::pair<std::string, std::vector<Transform>>> pipelines;

  // "x=linear_detrend; pi=demean; ls=log_diff,lag(1)"
  static TransformSpec parse(std::string_view s);
  std::string to_string() const;
};

// The default detrending: linear trend removed from x, means from pi and i.
TransformSpec default_transforms();

// Applies the pipelines and drops leading/trailing rows made incomplete by
// lag or log_diff. Throws DomainError for log_diff of a non-positive value.
TimeSeriesPanel apply_transforms(const TimeSeriesPanel& panel, const TransformSpec& spec);

// Adds column `name` = i_t - pi_{t+1} - r_t, with r_t from `rn_column` when the
// panel has it, otherwise the sample mean of i_t - pi_{t+1}. The last row is NaN.
void add_real_rate_gap(TimeSeriesPanel& panel, const std::string& name = "rr",
                       const std::string& rn_column = "r_n");

struct InstrumentBlock {
  std::string column;
  int first_lag = 1;
  int last_lag = 1;
};

struct InstrumentSpec {
  bool constant = true;
  std::vector<InstrumentBlock> blocks;

  // "const, x:1-3, rr:1-3"
  static InstrumentSpec parse(std::string_view s);
  std::string to_string() const;
  int count() const;
};

// Instruments a constant and three lags each of x and the real-rate gap.
InstrumentSpec is_instruments();
// Four lags of inflation and three lags of the labor share (column `ls`).
InstrumentSpec nkpc_instruments(const std::string& labor_share = "ls");

struct InstrumentMatrix {
  std::vector<std::size_t> rows;   // panel row t of each residual
  Eigen::MatrixXd z;               // rows.size() x n_z
  Eigen::MatrixXi source_rows;     // panel row each entry was read from, -1 for the constant
  std::vector<std::string> labels;
};

// Rows t usable when the residual needs `lead` future observations, every
// instrument block has its lags, and each `required` column is finite on
// t..t+lead. Throws InputError when fewer usable rows than instruments remain.
InstrumentMatrix build_instruments(const TimeSeriesPanel& panel, const InstrumentSpec& spec,
                                   int lead = 1, const std::vector<std::string>& required = {});

}  // namespace bnk
