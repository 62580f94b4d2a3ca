#include "cbcfd/mms.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <boost/math/quadrature/gauss.hpp>

#include "cbcfd/errors.hpp"

namespace cbcfd::mms {

namespace {

constexpr double kPi = std::numbers::pi;

double gauss_integral(const Fn1& g, double t) {
  if (t == 0.0) return 0.0;
  return boost::math::quadrature::gauss<double, 32>::integrate(g, 0.0, t);
}

}  // namespace

double derive_forcing(const SeparableSolution1D& s, double x, double t) {
  const double flux_a = s.da(x) * s.dphi(x) + s.a(x) * s.ddphi(x);
  const double flux_b = s.dbhat(x) * s.dphi(x) + s.bhat(x) * s.ddphi(x);
  return s.dtau(t) * s.phi(x) - s.tau(t) * flux_a - s.kernel_integral(t) * flux_b;
}

double derive_forcing(const SeparableSolution2D& s, double x, double y, double t) {
  const double div_a = s.ax_x(x, y) * s.phi_x(x, y) + s.ax(x, y) * s.phi_xx(x, y) +
                       s.ay_y(x, y) * s.phi_y(x, y) + s.ay(x, y) * s.phi_yy(x, y);
  const double div_b = s.bhat_x_x(x, y) * s.phi_x(x, y) + s.bhat_x(x, y) * s.phi_xx(x, y) +
                       s.bhat_y_y(x, y) * s.phi_y(x, y) + s.bhat_y(x, y) * s.phi_yy(x, y);
  return s.dtau(t) * s.phi(x, y) - s.tau(t) * div_a - s.kernel_integral(t) * div_b;
}

MmsProblem1D make_problem(std::string name, SeparableSolution1D s, double final_time,
                          Fn2 printed_forcing) {
  MmsProblem1D out;
  out.name = std::move(name);
  out.solution = s;
  out.forcing = printed_forcing ? ForcingVariant::Printed : ForcingVariant::Derived;
  auto& spec = out.spec;
  spec.length = s.length;
  spec.final_time = final_time;
  spec.a = s.a;
  spec.b = [s](double x, double t) { return s.beta(t) * s.bhat(x); };
  if (printed_forcing) {
    spec.f = std::move(printed_forcing);
  } else {
    spec.f = [s](double x, double t) { return derive_forcing(s, x, t); };
  }
  spec.p0 = [s](double x) { return s.tau(0.0) * s.phi(x); };
  spec.exact = ExactSolution1D{
      [s](double x, double t) { return s.tau(t) * s.phi(x); },
      [s](double x, double t) { return -s.a(x) * s.tau(t) * s.dphi(x); }};
  return out;
}

MmsProblem2D make_problem(std::string name, SeparableSolution2D s, double final_time,
                          Fn3 printed_forcing, bool b_time_independent) {
  MmsProblem2D out;
  out.name = std::move(name);
  out.solution = s;
  out.forcing = printed_forcing ? ForcingVariant::Printed : ForcingVariant::Derived;
  auto& spec = out.spec;
  spec.lx = s.lx;
  spec.ly = s.ly;
  spec.final_time = final_time;
  spec.ax = s.ax;
  spec.ay = s.ay;
  spec.bx = [s](double x, double y, double t) { return s.beta(t) * s.bhat_x(x, y); };
  spec.by = [s](double x, double y, double t) { return s.beta(t) * s.bhat_y(x, y); };
  if (printed_forcing) {
    spec.f = std::move(printed_forcing);
  } else {
    spec.f = [s](double x, double y, double t) { return derive_forcing(s, x, y, t); };
  }
  spec.p0 = [s](double x, double y) { return s.tau(0.0) * s.phi(x, y); };
  spec.b_time_independent = b_time_independent;
  spec.exact = ExactSolution2D{
      [s](double x, double y, double t) { return s.tau(t) * s.phi(x, y); },
      [s](double x, double y, double t) { return -s.ax(x, y) * s.tau(t) * s.phi_x(x, y); },
      [s](double x, double y, double t) { return -s.ay(x, y) * s.tau(t) * s.phi_y(x, y); }};
  return out;
}

MmsProblem1D example1(ForcingVariant forcing) {
  constexpr double a = 1.0e-8;
  SeparableSolution1D s;
  s.length = 1.0;
  s.tau = [](double t) { return t; };
  s.dtau = [](double) { return 1.0; };
  s.beta = [](double) { return 1.0; };
  s.kernel_integral = [](double t) { return 0.5 * t * t; };
  s.phi = [](double x) { return std::pow(x * (1 - x), 4); };
  s.dphi = [](double x) { return 4 * std::pow(x * (1 - x), 3) * (1 - 2 * x); };
  s.ddphi = [](double x) { return 4 * std::pow(x * (1 - x), 2) * (3 - 14 * x + 14 * x * x); };
  s.a = [](double) { return a; };
  s.da = [](double) { return 0.0; };
  s.bhat = [](double) { return 1.0; };
  s.dbhat = [](double) { return 0.0; };
  Fn2 printed;
  if (forcing == ForcingVariant::Printed) {
    printed = [](double x, double t) {
      const double q = x * (1 - x);
      return std::pow(q, 4) - 4.0e-8 * q * q *
                                  (3 - 14 * x + 11 * x * x - 1.5 * t * t + 7 * x * t * t +
                                   3 * x * x * t - 7 * x * x * t * t);
    };
  }
  return make_problem("example1", s, 1.0, printed);
}

MmsProblem2D example2(ForcingVariant forcing) {
  const double w = 2 * kPi;
  SeparableSolution2D s;
  s.tau = [](double t) { return t * t; };
  s.dtau = [](double t) { return 2 * t; };
  s.beta = [](double t) { return t; };
  s.kernel_integral = [](double t) { return 0.25 * t * t * t * t; };
  s.phi = [w](double x, double y) { return std::cos(w * x) * std::cos(w * y); };
  s.phi_x = [w](double x, double y) { return -w * std::sin(w * x) * std::cos(w * y); };
  s.phi_y = [w](double x, double y) { return -w * std::cos(w * x) * std::sin(w * y); };
  s.phi_xx = [w](double x, double y) { return -w * w * std::cos(w * x) * std::cos(w * y); };
  s.phi_yy = s.phi_xx;
  const Fn2 one = [](double, double) { return 1.0; };
  const Fn2 zero = [](double, double) { return 0.0; };
  s.ax = s.ay = s.bhat_x = s.bhat_y = one;
  s.ax_x = s.ay_y = s.bhat_x_x = s.bhat_y_y = zero;
  Fn3 printed;
  if (forcing == ForcingVariant::Printed) {
    printed = [w](double x, double y, double t) {
      const double pi2 = kPi * kPi;
      return (2 * t + 8 * pi2 * t * t + 0.5 * pi2 * std::pow(t, 4)) * std::cos(w * x) *
             std::cos(w * y);
    };
  }
  return make_problem("example2", s, 1.0, printed);
}

namespace {

// t^m with derivative and the kernel integral int_0^t b0 s^q s^m ds.
void power_time(int m, double b0, int q, Fn1& tau, Fn1& dtau, Fn1& beta, Fn1& kernel) {
  if (m < 0 || q < 0) throw ContractError("time powers must be non-negative");
  tau = [m](double t) { return std::pow(t, m); };
  dtau = [m](double t) { return m == 0 ? 0.0 : m * std::pow(t, m - 1); };
  beta = [b0, q](double t) { return b0 * std::pow(t, q); };
  kernel = [b0, m, q](double t) { return b0 * std::pow(t, m + q + 1) / (m + q + 1); };
}

}  // namespace

MmsProblem1D trig_power_1d(double length, int wavenumber, int time_power, double a, double b0,
                           int b_time_power, double final_time) {
  if (!(a > 0.0)) throw ContractError("a must be positive");
  const double w = 2 * kPi * wavenumber / length;
  SeparableSolution1D s;
  s.length = length;
  power_time(time_power, b0, b_time_power, s.tau, s.dtau, s.beta, s.kernel_integral);
  // cos has zero slope at both ends, so the no-flux condition holds.
  s.phi = [w](double x) { return std::cos(w * x); };
  s.dphi = [w](double x) { return -w * std::sin(w * x); };
  s.ddphi = [w](double x) { return -w * w * std::cos(w * x); };
  s.a = [a](double) { return a; };
  s.da = [](double) { return 0.0; };
  s.bhat = [](double) { return 1.0; };
  s.dbhat = [](double) { return 0.0; };
  return make_problem("trig1d", s, final_time);
}

MmsProblem2D trig_power_2d(double lx, double ly, int wavenumber, int time_power, double a,
                           double b0, int b_time_power, double final_time) {
  if (!(a > 0.0)) throw ContractError("a must be positive");
  const double wx = 2 * kPi * wavenumber / lx;
  const double wy = 2 * kPi * wavenumber / ly;
  SeparableSolution2D s;
  s.lx = lx;
  s.ly = ly;
  power_time(time_power, b0, b_time_power, s.tau, s.dtau, s.beta, s.kernel_integral);
  s.phi = [=](double x, double y) { return std::cos(wx * x) * std::cos(wy * y); };
  s.phi_x = [=](double x, double y) { return -wx * std::sin(wx * x) * std::cos(wy * y); };
  s.phi_y = [=](double x, double y) { return -wy * std::cos(wx * x) * std::sin(wy * y); };
  s.phi_xx = [=](double x, double y) { return -wx * wx * std::cos(wx * x) * std::cos(wy * y); };
  s.phi_yy = [=](double x, double y) { return -wy * wy * std::cos(wx * x) * std::cos(wy * y); };
  const Fn2 coeff = [a](double, double) { return a; };
  const Fn2 one = [](double, double) { return 1.0; };
  const Fn2 zero = [](double, double) { return 0.0; };
  s.ax = s.ay = coeff;
  s.bhat_x = s.bhat_y = one;
  s.ax_x = s.ay_y = s.bhat_x_x = s.bhat_y_y = zero;
  return make_problem("trig2d", s, final_time, {}, b_time_power == 0);
}

double richardson_derivative(const Fn1& g, double x, double step, int levels) {
  if (levels < 1) throw ContractError("richardson_derivative: need at least one level");
  std::vector<double> table(levels);
  double h = step;
  for (int l = 0; l < levels; ++l, h *= 0.5) table[l] = (g(x + h) - g(x - h)) / (2 * h);
  // Central differences expand in even powers of h: eliminate h^2, h^4, ...
  double factor = 4.0;
  for (int col = 1; col < levels; ++col, factor *= 4.0) {
    for (int l = levels - 1; l >= col; --l) {
      table[l] = (factor * table[l] - table[l - 1]) / (factor - 1.0);
    }
  }
  return table[levels - 1];
}

double verify_consistency(const ProblemSpec1D& spec, const ConsistencyOptions& o) {
  if (!spec.exact) throw ContractError("verify_consistency: exact solution required");
  const Fn2& p = spec.exact->p;
  const auto dpdx = [&](double x, double t) {
    return richardson_derivative([&](double xx) { return p(xx, t); }, x, o.step, o.richardson_levels);
  };
  const auto flux = [&](double x, double t) {
    const double memory = gauss_integral([&](double s) { return spec.b(x, s) * dpdx(x, s); }, t);
    return -spec.a(x) * dpdx(x, t) - memory;
  };
  std::mt19937_64 rng(o.seed);
  std::uniform_real_distribution<double> ux(0.0, spec.length);
  std::uniform_real_distribution<double> ut(0.0, spec.final_time);
  double worst = 0.0;
  for (int k = 0; k < o.samples; ++k) {
    const double x = ux(rng);
    const double t = o.time ? *o.time : ut(rng);
    const double pt =
        richardson_derivative([&](double tt) { return p(x, tt); }, t, o.step, o.richardson_levels);
    const double ux_ =
        richardson_derivative([&](double xx) { return flux(xx, t); }, x, o.step, o.richardson_levels);
    worst = std::max(worst, std::abs(pt + ux_ - spec.f(x, t)));
  }
  return worst;
}

double verify_consistency(const ProblemSpec2D& spec, const ConsistencyOptions& o) {
  if (!spec.exact) throw ContractError("verify_consistency: exact solution required");
  const Fn3& p = spec.exact->p;
  const int lv = o.richardson_levels;
  const auto px = [&](double x, double y, double t) {
    return richardson_derivative([&](double xx) { return p(xx, y, t); }, x, o.step, lv);
  };
  const auto py = [&](double x, double y, double t) {
    return richardson_derivative([&](double yy) { return p(x, yy, t); }, y, o.step, lv);
  };
  const auto flux_x = [&](double x, double y, double t) {
    const double memory =
        gauss_integral([&](double s) { return spec.bx(x, y, s) * px(x, y, s); }, t);
    return -spec.ax(x, y) * px(x, y, t) - memory;
  };
  const auto flux_y = [&](double x, double y, double t) {
    const double memory =
        gauss_integral([&](double s) { return spec.by(x, y, s) * py(x, y, s); }, t);
    return -spec.ay(x, y) * py(x, y, t) - memory;
  };
  std::mt19937_64 rng(o.seed);
  std::uniform_real_distribution<double> ux(0.0, spec.lx);
  std::uniform_real_distribution<double> uy(0.0, spec.ly);
  std::uniform_real_distribution<double> ut(0.0, spec.final_time);
  double worst = 0.0;
  for (int k = 0; k < o.samples; ++k) {
    const double x = ux(rng);
    const double y = uy(rng);
    const double t = o.time ? *o.time : ut(rng);
    const double pt = richardson_derivative([&](double tt) { return p(x, y, tt); }, t, o.step, lv);
    const double div =
        richardson_derivative([&](double xx) { return flux_x(xx, y, t); }, x, o.step, lv) +
        richardson_derivative([&](double yy) { return flux_y(x, yy, t); }, y, o.step, lv);
    worst = std::max(worst, std::abs(pt + div - spec.f(x, y, t)));
  }
  return worst;
}

}  // namespace cbcfd::mms
