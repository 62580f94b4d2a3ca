#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "cbcfd/problem.hpp"

/// Manufactured solutions.
///
/// Catalog solutions are separable, p = tau(t) phi(x), with a memory
/// coefficient b = beta(t) bhat(x). The memory integral then reduces to the
/// scalar kernel integral B(t) = int_0^t beta(s) tau(s) ds, which the caller
/// supplies in closed form, so the forcing is exact to round-off:
///   f = tau' phi - tau (a phi')' - B (bhat phi')'.
namespace cbcfd::mms {

enum class ForcingVariant { Derived, Printed };

struct SeparableSolution1D {
  double length = 1.0;
  Fn1 tau, dtau;
  Fn1 beta;
  Fn1 kernel_integral;  // B(t)
  Fn1 phi, dphi, ddphi;
  Fn1 a, da;
  Fn1 bhat, dbhat;
};

/// 2D analogue with diagonal A = diag(a^x, a^y), B = beta(t) diag(bhat^x, bhat^y).
struct SeparableSolution2D {
  double lx = 1.0, ly = 1.0;
  Fn1 tau, dtau;
  Fn1 beta;
  Fn1 kernel_integral;
  Fn2 phi, phi_x, phi_y, phi_xx, phi_yy;
  Fn2 ax, ax_x, ay, ay_y;
  Fn2 bhat_x, bhat_x_x, bhat_y, bhat_y_y;
};

struct MmsProblem1D {
  std::string name;
  SeparableSolution1D solution;
  ForcingVariant forcing = ForcingVariant::Derived;
  ProblemSpec1D spec;
};

struct MmsProblem2D {
  std::string name;
  SeparableSolution2D solution;
  ForcingVariant forcing = ForcingVariant::Derived;
  ProblemSpec2D spec;
};

/// f = p_t + u_x from the closed-form derivatives.
double derive_forcing(const SeparableSolution1D& s, double x, double t);
double derive_forcing(const SeparableSolution2D& s, double x, double y, double t);

/// Builds a problem whose forcing is derived from `s` (or `printed_forcing`
/// when given), with exact p and u~ = -a grad p attached.
MmsProblem1D make_problem(std::string name, SeparableSolution1D s, double final_time,
                          Fn2 printed_forcing = {});
MmsProblem2D make_problem(std::string name, SeparableSolution2D s, double final_time,
                          Fn3 printed_forcing = {}, bool b_time_independent = false);

/// p = t x^4 (1 - x)^4 on (0, 1), a = 1e-8, b = 1, T = 1.
MmsProblem1D example1(ForcingVariant forcing = ForcingVariant::Derived);

/// p = t^2 cos(2 pi x) cos(2 pi y) on the unit torus, A = I, B = t I, T = 1.
MmsProblem2D example2(ForcingVariant forcing = ForcingVariant::Derived);

/// p = t^m cos(2 pi k x / L) with constant a and b = b0 t^q. Used for custom
/// problems driven from configuration files.
MmsProblem1D trig_power_1d(double length, int wavenumber, int time_power, double a, double b0,
                           int b_time_power, double final_time);

/// p = t^m cos(2 pi k x / L1) cos(2 pi k y / L2), A = a I, B = b0 t^q I.
MmsProblem2D trig_power_2d(double lx, double ly, int wavenumber, int time_power, double a,
                           double b0, int b_time_power, double final_time);

struct ConsistencyOptions {
  int samples = 100;
  double step = 1e-3;       // base step of the Richardson tables
  int richardson_levels = 3;
  std::uint64_t seed = 20240611;
  /// Pin every sample to this time instead of drawing t from (0, T).
  std::optional<double> time;
};

/// Independent check of a problem's forcing against its exact pressure.
///
/// Uses only spec.a, spec.b, spec.f and exact->p: derivatives come from
/// Richardson-extrapolated central differences and the memory integral from
/// 32-point Gauss-Legendre quadrature. Returns max |p_t + div u - f| over
/// random space-time points.
double verify_consistency(const ProblemSpec1D& spec, const ConsistencyOptions& options = {});
double verify_consistency(const ProblemSpec2D& spec, const ConsistencyOptions& options = {});

/// Richardson-extrapolated central difference of g at x.
double richardson_derivative(const Fn1& g, double x, double step, int levels);

}  // namespace cbcfd::mms
