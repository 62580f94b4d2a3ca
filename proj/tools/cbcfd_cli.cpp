// Convergence-study driver.
//
//   cbcfd run --problem example2 --scheme both --grids 10,20,30,40 --out out
//
// Exit status: 0 on success, 2 on a configuration error, 3 when any grid run
// fails.

#include <cstdio>
#include <exception>
#include <filesystem>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "cbcfd/errors.hpp"
#include "cbcfd/study.hpp"

namespace {

constexpr int kConfigError = 2;
constexpr int kSolverFailure = 3;

struct Overrides {
  std::optional<std::string> config;
  std::optional<std::string> problem;
  std::optional<std::string> scheme;
  std::optional<std::string> grids;
  std::optional<std::string> dt_rule;
  std::optional<double> final_time;
  std::optional<std::string> forcing;
  std::optional<std::string> out;
  bool serial = false;
};

cbcfd::study::RunConfig build_config(const Overrides& o) {
  using cbcfd::study::RunConfig;
  RunConfig c = o.config ? cbcfd::study::load_config(*o.config) : RunConfig{};

  // Command-line values go through the same parser as config-file lines.
  std::string lines;
  const auto add = [&](const char* key, const std::optional<std::string>& v) {
    if (v) lines += fmt::format("{} = {}\n", key, *v);
  };
  add("scheme", o.scheme);
  add("grids", o.grids);
  add("dt_rule", o.dt_rule);
  add("forcing", o.forcing);
  add("out", o.out);
  std::istringstream in(lines);
  c = cbcfd::study::parse_config(in, std::move(c));

  if (o.problem) cbcfd::study::set_problem(c, *o.problem);
  if (o.final_time) c.final_time = *o.final_time;
  if (o.serial) c.parallel = false;
  cbcfd::study::validate(c);
  return c;
}

void print_summary(const std::vector<cbcfd::study::ConvergenceReport>& reports) {
  for (const auto& rep : reports) {
    fmt::print("{} ({})\n", rep.problem, rep.scheme);
    fmt::print("  {:>6} {:>12} {:>8} {:>12} {:>8} {:>9}\n", "n", "err_p", "rate_p", "err_u",
               "rate_u", "seconds");
    for (const auto& r : rep.rows) {
      if (r.failure) {
        fmt::print("  {:>6} FAILED: {}\n", r.n, *r.failure);
        continue;
      }
      const auto rate = [](const std::optional<double>& v) {
        return v ? fmt::format("{:.4f}", *v) : std::string("-");
      };
      fmt::print("  {:>6} {:>12.4e} {:>8} {:>12.4e} {:>8} {:>9.2f}\n", r.n, r.err_p,
                 rate(r.rate_p), r.err_u, rate(r.rate_u), r.seconds);
    }
    if (auto slope = cbcfd::study::least_squares_order(rep)) {
      fmt::print("  least-squares pressure order: {:.4f}\n", *slope);
    }
  }
}

int run(const Overrides& o) {
  cbcfd::study::RunConfig config;
  try {
    config = build_config(o);
  } catch (const cbcfd::ConfigError& e) {
    fmt::print(stderr, "configuration error: {}\n", e.what());
    return kConfigError;
  }

  const auto reports = cbcfd::study::run_study(config);
  print_summary(reports);

  std::filesystem::create_directories(config.out_dir);
  const auto stem = config.out_dir / (config.problem + "_convergence");
  cbcfd::study::emit_csv(reports, stem.string() + ".csv");
  cbcfd::study::emit_markdown(reports, stem.string() + ".md");
  cbcfd::study::emit_loglog_data(reports, config.out_dir / (config.problem + "_loglog.dat"));
  fmt::print("wrote {}.csv, {}.md, {}_loglog.dat\n", stem.string(), stem.string(),
             (config.out_dir / config.problem).string());

  for (const auto& rep : reports) {
    if (rep.has_failures()) return kSolverFailure;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Compact block-centered finite-difference convergence studies"};
  app.require_subcommand(1);

  Overrides o;
  auto* cmd = app.add_subcommand("run", "Run a grid-refinement study");
  cmd->add_option("--config", o.config, "Key-value configuration file")->check(CLI::ExistingFile);
  cmd->add_option("--problem", o.problem, "example1, example2, or a custom problem file");
  cmd->add_option("--scheme", o.scheme, "cbcfd, bcfd or both");
  cmd->add_option("--grids", o.grids, "Comma-separated cell counts, e.g. 20,40,80");
  cmd->add_option("--dt-rule", o.dt_rule, "Time step rule c*h^q, e.g. h^2");
  cmd->add_option("--T", o.final_time, "Final time");
  cmd->add_option("--forcing", o.forcing, "derived or printed");
  cmd->add_option("--out", o.out, "Output directory");
  cmd->add_flag("--serial", o.serial, "Run grids one after another");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigError;
  }

  try {
    return run(o);
  } catch (const cbcfd::ConfigError& e) {
    fmt::print(stderr, "configuration error: {}\n", e.what());
    return kConfigError;
  } catch (const std::exception& e) {
    fmt::print(stderr, "error: {}\n", e.what());
    return 1;
  }
}
