#include "cbcfd/problem.hpp"

#include <cmath>
#include <fmt/format.h>

#include "cbcfd/errors.hpp"

namespace cbcfd {

namespace {

// Fourth-order one-sided difference pointing into the domain (dir = +1 or -1).
double one_sided_derivative(const Fn1& g, double x, double h, double dir) {
  const double s = dir * h;
  return dir * (-25 * g(x) + 48 * g(x + s) - 36 * g(x + 2 * s) + 16 * g(x + 3 * s) - 3 * g(x + 4 * s)) /
         (12 * h);
}

void require_positive(double v, const char* name, double x, double y) {
  if (!std::isfinite(v) || v <= 0.0) {
    throw ContractError(fmt::format("{} must be positive and finite, got {} at ({}, {})", name, v, x, y));
  }
}

}  // namespace

std::vector<std::string> validate(const ProblemSpec1D& spec, int samples) {
  if (!spec.a || !spec.b || !spec.f || !spec.p0) {
    throw ContractError("ProblemSpec1D: a, b, f and p0 are all required");
  }
  if (!(spec.length > 0.0) || !(spec.final_time > 0.0)) {
    throw ContractError("ProblemSpec1D: L and T must be positive");
  }
  for (int s = 0; s < samples; ++s) {
    const double x = spec.length * s / (samples - 1);
    require_positive(spec.a(x), "a", x, 0.0);
  }
  std::vector<std::string> warnings;
  const double eps = 1e-4 * spec.length;
  for (double x : {0.0, spec.length}) {
    const double flux = -spec.a(x) * one_sided_derivative(spec.p0, x, eps, x == 0.0 ? 1.0 : -1.0);
    if (std::abs(flux) > 1e-8) {
      warnings.push_back(fmt::format("initial flux -a p0' = {:.3e} at x = {} is not zero", flux, x));
    }
  }
  return warnings;
}

std::vector<std::string> validate(const ProblemSpec2D& spec, int samples) {
  if (!spec.ax || !spec.ay || !spec.bx || !spec.by || !spec.f || !spec.p0) {
    throw ContractError("ProblemSpec2D: ax, ay, bx, by, f and p0 are all required");
  }
  if (!(spec.lx > 0.0) || !(spec.ly > 0.0) || !(spec.final_time > 0.0)) {
    throw ContractError("ProblemSpec2D: L1, L2 and T must be positive");
  }
  std::vector<std::string> warnings;
  for (int s = 0; s < samples; ++s) {
    for (int r = 0; r < samples; ++r) {
      const double x = spec.lx * s / (samples - 1);
      const double y = spec.ly * r / (samples - 1);
      require_positive(spec.ax(x, y), "a^x", x, y);
      require_positive(spec.ay(x, y), "a^y", x, y);
    }
  }
  const double t = 0.5 * spec.final_time;
  for (int s = 0; s < samples; ++s) {
    const double u = spec.lx * s / (samples - 1);
    const double v = spec.ly * s / (samples - 1);
    const auto seam = [&](const char* name, double a, double b) {
      if (std::abs(a - b) > 1e-10 * std::max(1.0, std::abs(a))) {
        warnings.push_back(fmt::format("{} is not periodic at the seam ({} vs {})", name, a, b));
      }
    };
    seam("p0", spec.p0(0.0, v), spec.p0(spec.lx, v));
    seam("p0", spec.p0(u, 0.0), spec.p0(u, spec.ly));
    seam("f", spec.f(0.0, v, t), spec.f(spec.lx, v, t));
    seam("f", spec.f(u, 0.0, t), spec.f(u, spec.ly, t));
    seam("a^x", spec.ax(0.0, v), spec.ax(spec.lx, v));
    seam("a^y", spec.ay(u, 0.0), spec.ay(u, spec.ly));
    seam("b^x", spec.bx(0.0, v, t), spec.bx(spec.lx, v, t));
    seam("b^y", spec.by(u, 0.0, t), spec.by(u, spec.ly, t));
  }
  return warnings;
}

int step_count(double final_time, double dt) {
  if (!(dt > 0.0) || !(final_time > 0.0)) throw ContractError("time step and T must be positive");
  const double ratio = final_time / dt;
  const double rounded = std::round(ratio);
  if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * std::max(1.0, ratio)) {
    throw ContractError(fmt::format("T / dt = {} is not an integer", ratio));
  }
  return static_cast<int>(rounded);
}

}  // namespace cbcfd
