#include "cbcfd/study.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <future>
#include <istream>
#include <ostream>
#include <sstream>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "cbcfd/errors.hpp"
#include "cbcfd/scheme1d.hpp"
#include "cbcfd/scheme2d.hpp"

namespace cbcfd::study {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end) throw ConfigError(key, "expected a number, got '" + v + "'");
  return out;
}

int to_int(const std::string& key, const std::string& v) {
  int out = 0;
  const auto* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end) throw ConfigError(key, "expected an integer, got '" + v + "'");
  return out;
}

std::vector<int> to_grid_list(const std::string& key, const std::string& v) {
  std::vector<int> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_int(key, trim(item)));
  if (out.empty()) throw ConfigError(key, "empty grid list");
  return out;
}

// Calls fn(key, value) for each `key = value` line.
template <class Fn>
void for_each_entry(std::istream& in, Fn&& fn) {
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string::npos) throw ConfigError(body, "expected 'key = value'");
    fn(trim(body.substr(0, eq)), trim(body.substr(eq + 1)));
  }
}

std::string sci(double v) { return fmt::format("{:.16e}", v); }

}  // namespace

DtRule DtRule::parse(const std::string& text) {
  const std::string s = trim(text);
  DtRule rule;
  std::string rest = s;
  const auto star = s.find('*');
  if (star != std::string::npos) {
    rule.coefficient = to_double("dt-rule", trim(s.substr(0, star)));
    rest = trim(s.substr(star + 1));
  }
  if (rest == "h") {
    rule.power = 1.0;
  } else if (rest.rfind("h^", 0) == 0) {
    rule.power = to_double("dt-rule", rest.substr(2));
  } else {
    throw ConfigError("dt-rule", "expected '[c*]h^q', got '" + text + "'");
  }
  return rule;
}

std::string DtRule::str() const {
  return coefficient == 1.0 ? fmt::format("h^{}", power) : fmt::format("{}*h^{}", coefficient, power);
}

CustomProblem parse_custom_problem(std::istream& in) {
  CustomProblem p;
  for_each_entry(in, [&](const std::string& k, const std::string& v) {
    if (k == "dim") p.dim = to_int(k, v);
    else if (k == "length") p.length = to_double(k, v);
    else if (k == "wavenumber") p.wavenumber = to_int(k, v);
    else if (k == "time_power") p.time_power = to_int(k, v);
    else if (k == "a") p.a = to_double(k, v);
    else if (k == "b0") p.b0 = to_double(k, v);
    else if (k == "b_time_power") p.b_time_power = to_int(k, v);
    else throw ConfigError(k, "unknown custom-problem key");
  });
  if (p.dim != 1 && p.dim != 2) throw ConfigError("dim", "must be 1 or 2");
  if (!(p.length > 0.0)) throw ConfigError("length", "must be positive");
  if (!(p.a > 0.0)) throw ConfigError("a", "must be positive");
  if (p.wavenumber < 1) throw ConfigError("wavenumber", "must be at least 1");
  if (p.time_power < 0) throw ConfigError("time_power", "must be non-negative");
  if (p.b_time_power < 0) throw ConfigError("b_time_power", "must be non-negative");
  return p;
}

CustomProblem load_custom_problem(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("problem", "cannot open " + path.string());
  return parse_custom_problem(in);
}

void set_problem(RunConfig& c, const std::string& id, const std::filesystem::path& base_dir) {
  if (id == "example1" || id == "example2") {
    c.problem = id;
    c.custom.reset();
    return;
  }
  if (id.empty()) throw ConfigError("problem", "empty problem id");
  const std::filesystem::path file = base_dir / id;
  c.custom = load_custom_problem(file);
  c.problem = file.stem().string();
}

RunConfig parse_config(std::istream& in, RunConfig c, const std::filesystem::path& base_dir) {
  for_each_entry(in, [&](const std::string& k, const std::string& v) {
    if (k == "problem") {
      set_problem(c, v, base_dir);
    } else if (k == "scheme") {
      if (v == "cbcfd") c.scheme = SchemeChoice::Cbcfd;
      else if (v == "bcfd") c.scheme = SchemeChoice::Bcfd;
      else if (v == "both") c.scheme = SchemeChoice::Both;
      else throw ConfigError(k, "expected cbcfd, bcfd or both");
    } else if (k == "grids") {
      c.grids = to_grid_list(k, v);
    } else if (k == "dt_rule" || k == "dt-rule") {
      c.dt_rule = DtRule::parse(v);
    } else if (k == "T") {
      c.final_time = to_double(k, v);
    } else if (k == "out") {
      c.out_dir = v;
    } else if (k == "forcing") {
      if (v == "derived") c.forcing = mms::ForcingVariant::Derived;
      else if (v == "printed") c.forcing = mms::ForcingVariant::Printed;
      else throw ConfigError(k, "expected derived or printed");
    } else if (k == "parallel") {
      if (v == "true" || v == "1") c.parallel = true;
      else if (v == "false" || v == "0") c.parallel = false;
      else throw ConfigError(k, "expected true or false");
    } else {
      throw ConfigError(k, "unknown configuration key");
    }
  });
  return c;
}

RunConfig load_config(const std::filesystem::path& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("config", "cannot open " + path.string());
  return parse_config(in, std::move(base), path.parent_path());
}

namespace {

double domain_length(const RunConfig& c) { return c.custom ? c.custom->length : 1.0; }

}  // namespace

void validate(const RunConfig& c) {
  if (!c.custom && c.problem != "example1" && c.problem != "example2") {
    throw ConfigError("problem", "expected example1, example2 or a custom problem file");
  }
  if (c.custom && c.forcing == mms::ForcingVariant::Printed) {
    throw ConfigError("forcing", "custom problems only have a derived forcing");
  }
  if (c.grids.empty()) throw ConfigError("grids", "empty grid list");
  for (std::size_t r = 0; r < c.grids.size(); ++r) {
    if (c.grids[r] < 4) throw ConfigError("grids", "every grid needs at least 4 cells");
    if (r > 0 && c.grids[r] <= c.grids[r - 1]) throw ConfigError("grids", "must be strictly increasing");
  }
  if (!(c.dt_rule.power > 0.0)) throw ConfigError("dt-rule", "power must be positive");
  if (!(c.dt_rule.coefficient > 0.0)) throw ConfigError("dt-rule", "coefficient must be positive");
  if (!(c.final_time > 0.0)) throw ConfigError("T", "must be positive");
  for (int n : c.grids) {
    const double h = domain_length(c) / n;
    try {
      (void)step_count(c.final_time, c.dt_rule.coefficient * std::pow(h, c.dt_rule.power));
    } catch (const ContractError&) {
      throw ConfigError("dt-rule", fmt::format("T / dt is not an integer on grid {}", n));
    }
  }
}

bool ConvergenceReport::has_failures() const {
  return std::any_of(rows.begin(), rows.end(), [](const auto& r) { return r.failure.has_value(); });
}

void compute_rates(ConvergenceReport& report) {
  const ConvergenceRow* prev = nullptr;
  for (auto& row : report.rows) {
    row.rate_p.reset();
    row.rate_u.reset();
    if (row.failure) {
      prev = nullptr;
      continue;
    }
    if (prev != nullptr) {
      const double lh = std::log(prev->h / row.h);
      row.rate_p = std::log(prev->err_p / row.err_p) / lh;
      row.rate_u = std::log(prev->err_u / row.err_u) / lh;
    }
    prev = &row;
  }
}

namespace {

ConvergenceRow run_grid(const RunConfig& c, int n, ops::StencilSet set) {
  ConvergenceRow row;
  row.n = n;
  row.h = domain_length(c) / n;
  row.dt = c.dt_rule.coefficient * std::pow(row.h, c.dt_rule.power);
  const auto start = std::chrono::steady_clock::now();
  try {
    std::optional<ErrorReport> errors;
    const bool two_d = c.custom ? c.custom->dim == 2 : c.problem == "example2";
    if (two_d) {
      mms::MmsProblem2D p = !c.custom
                                ? mms::example2(c.forcing)
                                : mms::trig_power_2d(c.custom->length, c.custom->length,
                                                     c.custom->wavenumber, c.custom->time_power,
                                                     c.custom->a, c.custom->b0,
                                                     c.custom->b_time_power, c.final_time);
      p.spec.final_time = c.final_time;
      errors = run_2d(p.spec, n, n, row.dt, set).errors;
    } else {
      mms::MmsProblem1D p = !c.custom
                                ? mms::example1(c.forcing)
                                : mms::trig_power_1d(c.custom->length, c.custom->wavenumber,
                                                     c.custom->time_power, c.custom->a,
                                                     c.custom->b0, c.custom->b_time_power,
                                                     c.final_time);
      p.spec.final_time = c.final_time;
      errors = run(p.spec, n, row.dt, set).errors;
    }
    row.err_p = errors->pressure;
    row.err_u = errors->velocity;
  } catch (const std::exception& e) {
    row.failure = e.what();
  }
  row.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return row;
}

}  // namespace

std::vector<ConvergenceReport> run_study(const RunConfig& config) {
  validate(config);
  std::vector<std::pair<std::string, ops::StencilSet>> schemes;
  if (config.scheme != SchemeChoice::Bcfd) schemes.emplace_back("cbcfd", ops::StencilSet::Compact);
  if (config.scheme != SchemeChoice::Cbcfd) schemes.emplace_back("bcfd", ops::StencilSet::Classical);

  std::vector<ConvergenceReport> reports;
  for (const auto& [label, set] : schemes) {
    ConvergenceReport report{label, config.problem, {}};
    const auto policy = config.parallel ? std::launch::async : std::launch::deferred;
    std::vector<std::future<ConvergenceRow>> jobs;
    for (int n : config.grids) {
      jobs.push_back(std::async(policy, run_grid, std::cref(config), n, set));
    }
    for (auto& job : jobs) report.rows.push_back(job.get());
    compute_rates(report);
    reports.push_back(std::move(report));
  }
  return reports;
}

std::optional<double> least_squares_order(const ConvergenceReport& report) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& r : report.rows) {
    if (!r.failure && r.err_p > 0.0) pts.emplace_back(std::log(r.h), std::log(r.err_p));
  }
  if (pts.size() < 2) return std::nullopt;
  double mx = 0, my = 0;
  for (const auto& [x, y] : pts) {
    mx += x;
    my += y;
  }
  mx /= pts.size();
  my /= pts.size();
  double sxy = 0, sxx = 0;
  for (const auto& [x, y] : pts) {
    sxy += (x - mx) * (y - my);
    sxx += (x - mx) * (x - mx);
  }
  return sxy / sxx;
}

void write_csv(std::ostream& out, const std::vector<ConvergenceReport>& reports) {
  out << "scheme,n,h,dt,err_p,rate_p,err_u,rate_u,seconds\n";
  for (const auto& rep : reports) {
    for (const auto& r : rep.rows) {
      if (r.failure) {
        fmt::print(out, "{},{},{},{},,,,,{}\n", rep.scheme, r.n, sci(r.h), sci(r.dt), sci(r.seconds));
        continue;
      }
      fmt::print(out, "{},{},{},{},{},{},{},{},{}\n", rep.scheme, r.n, sci(r.h), sci(r.dt),
                 sci(r.err_p), r.rate_p ? sci(*r.rate_p) : "", sci(r.err_u),
                 r.rate_u ? sci(*r.rate_u) : "", sci(r.seconds));
    }
  }
}

void emit_csv(const std::vector<ConvergenceReport>& reports, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_csv(out, reports);
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

std::vector<ConvergenceReport> parse_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "scheme,n,h,dt,err_p,rate_p,err_u,rate_u,seconds") {
    throw std::runtime_error("parse_csv: unexpected header");
  }
  std::vector<ConvergenceReport> reports;
  const auto num = [](const std::string& s) { return std::stod(s); };
  const auto opt = [&](const std::string& s) -> std::optional<double> {
    if (s.empty()) return std::nullopt;
    return num(s);
  };
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cols;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cols.push_back(cell);
    if (line.back() == ',') cols.emplace_back();
    if (cols.size() != 9) throw std::runtime_error("parse_csv: expected 9 columns: " + line);
    if (reports.empty() || reports.back().scheme != cols[0]) reports.push_back({cols[0], {}, {}});
    ConvergenceRow r;
    r.n = std::stoi(cols[1]);
    r.h = num(cols[2]);
    r.dt = num(cols[3]);
    if (cols[4].empty()) {
      r.failure = "failed";
    } else {
      r.err_p = num(cols[4]);
      r.err_u = num(cols[6]);
    }
    r.rate_p = opt(cols[5]);
    r.rate_u = opt(cols[7]);
    r.seconds = num(cols[8]);
    reports.back().rows.push_back(std::move(r));
  }
  return reports;
}

void write_markdown(std::ostream& out, const std::vector<ConvergenceReport>& reports) {
  for (const auto& rep : reports) {
    fmt::print(out, "### {}: {}\n\n", rep.problem, rep.scheme == "cbcfd" ? "CBCFD" : "BCFD");
    out << "| h | ‖p^N − P^N‖ | Rates | ‖ũ^N − Ũ^N‖ | Rates |\n";
    out << "|---|---|---|---|---|\n";
    for (const auto& r : rep.rows) {
      const std::string h = std::abs(r.h * r.n - 1.0) < 1e-12 ? fmt::format("1/{}", r.n)
                                                               : fmt::format("{:.6g}", r.h);
      if (r.failure) {
        fmt::print(out, "| {} | failed | --- | failed | --- |\n", h);
        continue;
      }
      const auto rate = [](const std::optional<double>& v) {
        return v ? fmt::format("{:.4f}", *v) : std::string("---");
      };
      fmt::print(out, "| {} | {:.2E} | {} | {:.2E} | {} |\n", h, r.err_p, rate(r.rate_p), r.err_u,
                 rate(r.rate_u));
    }
    out << "\n";
  }
}

void emit_markdown(const std::vector<ConvergenceReport>& reports,
                   const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_markdown(out, reports);
}

void write_loglog(std::ostream& out, const std::vector<ConvergenceReport>& reports) {
  out << "# columns: log10(h) log10(err_p)\n";
  out << "# reference slope-4 line passes through the finest cbcfd point,\n";
  out << "# reference slope-2 line through the finest bcfd point\n";
  out << "# blocks are separated by two blank lines\n";
  for (const auto& rep : reports) {
    if (auto slope = least_squares_order(rep)) {
      fmt::print(out, "# least-squares order {}: {:.6f}\n", rep.scheme, *slope);
    }
  }
  struct Anchor {
    double order;
    double log_h_min, log_h_max, log_err_at_min;
  };
  std::vector<Anchor> anchors;
  for (const auto& rep : reports) {
    fmt::print(out, "\n# block {}\n", rep.scheme);
    double lo = 0, hi = 0, err_lo = 0;
    bool any = false;
    for (const auto& r : rep.rows) {
      if (r.failure) continue;
      const double lh = std::log10(r.h);
      const double le = std::log10(r.err_p);
      fmt::print(out, "{:.10f} {:.10f}\n", lh, le);
      if (!any || lh < lo) {
        lo = lh;
        err_lo = le;
      }
      hi = any ? std::max(hi, lh) : lh;
      any = true;
    }
    out << "\n";
    if (any) anchors.push_back({rep.scheme == "cbcfd" ? 4.0 : 2.0, lo, hi, err_lo});
  }
  for (const auto& a : anchors) {
    fmt::print(out, "\n# block reference-slope-{}\n", static_cast<int>(a.order));
    fmt::print(out, "{:.10f} {:.10f}\n", a.log_h_max, a.log_err_at_min + a.order * (a.log_h_max - a.log_h_min));
    fmt::print(out, "{:.10f} {:.10f}\n", a.log_h_min, a.log_err_at_min);
    out << "\n";
  }
}

void emit_loglog_data(const std::vector<ConvergenceReport>& reports,
                      const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  write_loglog(out, reports);
}

}  // namespace cbcfd::study
