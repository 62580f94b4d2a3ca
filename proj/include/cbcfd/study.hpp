#pragma once

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cbcfd/mms.hpp"

namespace cbcfd::study {

enum class SchemeChoice { Cbcfd, Bcfd, Both };

/// dt = coefficient * h^power.
struct DtRule {
  double coefficient = 1.0;
  double power = 2.0;

  /// Parses "h^2", "0.5*h^2" or "h" (power 1).
  static DtRule parse(const std::string& text);
  [[nodiscard]] std::string str() const;
};

/// Parameters of a custom trigonometric manufactured problem, read from a
/// flat key-value file (see load_custom_problem).
struct CustomProblem {
  int dim = 1;
  double length = 1.0;
  int wavenumber = 1;
  int time_power = 2;
  double a = 1.0;
  double b0 = 1.0;
  int b_time_power = 0;
};

struct RunConfig {
  std::string problem = "example1";  // example1, example2, or a custom file's stem
  std::optional<CustomProblem> custom;
  SchemeChoice scheme = SchemeChoice::Both;
  std::vector<int> grids = {20, 40, 80};
  DtRule dt_rule;
  double final_time = 1.0;
  std::filesystem::path out_dir = "out";
  mms::ForcingVariant forcing = mms::ForcingVariant::Derived;
  bool parallel = true;
};

/// Applies `key = value` lines (blank lines and '#' comments skipped) on top
/// of `base`. Unknown keys and malformed values throw ConfigError naming the
/// key. The `problem` key goes through set_problem with `base_dir`.
RunConfig parse_config(std::istream& in, RunConfig base = {},
                       const std::filesystem::path& base_dir = ".");
RunConfig load_config(const std::filesystem::path& path, RunConfig base = {});

/// "example1" and "example2" select the catalog problems; anything else is
/// read as a custom problem file (relative to `base_dir`).
void set_problem(RunConfig& config, const std::string& id,
                 const std::filesystem::path& base_dir = ".");

CustomProblem parse_custom_problem(std::istream& in);
CustomProblem load_custom_problem(const std::filesystem::path& path);

/// Throws ConfigError (with the field name) for an invalid configuration.
void validate(const RunConfig& config);

struct ConvergenceRow {
  int n = 0;
  double h = 0.0;
  double dt = 0.0;
  double err_p = 0.0;
  std::optional<double> rate_p;
  double err_u = 0.0;
  std::optional<double> rate_u;
  double seconds = 0.0;
  /// Set when this grid's run failed; the error columns are then meaningless.
  std::optional<std::string> failure;
};

struct ConvergenceReport {
  std::string scheme;  // "cbcfd" or "bcfd"
  std::string problem;
  std::vector<ConvergenceRow> rows;

  [[nodiscard]] bool has_failures() const;
};

/// ln(e_prev / e) / ln(h_prev / h) between consecutive successful rows.
void compute_rates(ConvergenceReport& report);

/// One report per selected scheme, rows ordered by grid. Grid runs are
/// independent and may execute concurrently. A failing grid is recorded in
/// its row and the study carries on.
std::vector<ConvergenceReport> run_study(const RunConfig& config);

/// Least-squares slope of log(err_p) against log(h) over successful rows.
std::optional<double> least_squares_order(const ConvergenceReport& report);

/// CSV with header `scheme,n,h,dt,err_p,rate_p,err_u,rate_u,seconds`.
/// Numbers use 17 significant digits in scientific notation; a missing rate
/// is an empty field.
void write_csv(std::ostream& out, const std::vector<ConvergenceReport>& reports);
void emit_csv(const std::vector<ConvergenceReport>& reports, const std::filesystem::path& path);
std::vector<ConvergenceReport> parse_csv(std::istream& in);

void write_markdown(std::ostream& out, const std::vector<ConvergenceReport>& reports);
void emit_markdown(const std::vector<ConvergenceReport>& reports,
                   const std::filesystem::path& path);

/// Blocks of (log10 h, log10 err_p) per scheme followed by reference lines
/// of slope 4 (anchored at the finest compact point) and slope 2 (anchored
/// at the finest classical point), separated by blank lines.
void write_loglog(std::ostream& out, const std::vector<ConvergenceReport>& reports);
void emit_loglog_data(const std::vector<ConvergenceReport>& reports,
                      const std::filesystem::path& path);

}  // namespace cbcfd::study
