#include "cbcfd/scheme1d.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cbcfd/errors.hpp"

namespace cbcfd {

namespace {

using ops::StencilSet;

constexpr int kBandwidth = 6;

Field1D faces_of(const Grid1D& g, const Fn1& fn) { return Field1D::sample(g, Stagger1D::Face, fn); }

}  // namespace

Field1D init_utilde(const Field1D& p0, const Fn1& a, StencilSet set) {
  if (p0.stagger() != Stagger1D::Cell) throw ShapeError("init_utilde: P0 must be cell data");
  const Grid1D& g = p0.grid();
  const int m = g.cells();
  const Field1D rhs_faces = ops::delta_to_faces(p0);
  // Interior faces 1..M-1; boundary faces carry U~/a = 0.
  const auto n = static_cast<std::size_t>(m - 1);
  std::vector<double> sub(n), diag(n), super(n), rhs(n);
  for (int f = 1; f < m; ++f) {
    const auto r = static_cast<std::size_t>(f - 1);
    rhs[r] = -rhs_faces[f];
    for (const auto& e : ops::psi_face_row(f, set)) {
      if (e.col == f) diag[r] = e.weight;
      else if (e.col == f - 1) sub[r] = e.weight;
      else super[r] = e.weight;
    }
  }
  sub[0] = 0.0;
  super[n - 1] = 0.0;
  const auto w = tridiagonal_solve(sub, diag, super, rhs);
  Field1D u = Field1D::faces(g);
  for (int f = 1; f < m; ++f) u[f] = a(g.face(f)) * w[f - 1];
  return u;
}

Stepper1D::Stepper1D(ProblemSpec1D spec, int cells, double dt, StencilSet set,
                     bool keep_history_samples)
    : spec_(std::move(spec)),
      grid_(spec_.length, cells),
      set_(set),
      total_steps_(step_count(spec_.final_time, dt)),
      state_{0, dt, Field1D::cells(grid_), Field1D::faces(grid_),
             HistoryState1D(Field1D::faces(grid_), dt, keep_history_samples)},
      a_faces_(faces_of(grid_, spec_.a)) {
  validate(spec_);
  state_.pressure = Field1D::sample(grid_, Stagger1D::Cell, spec_.p0);
  state_.utilde = init_utilde(state_.pressure, spec_.a, set_);
}

LinearSystem1D Stepper1D::assemble() const {
  const int m = grid_.cells();
  const double h = grid_.h();
  const double dt = state_.dt;
  const double t_mid = (state_.n + 0.5) * dt;
  const int unknowns = 2 * m - 1;

  LinearSystem1D sys{BandedMatrix(unknowns, kBandwidth, kBandwidth),
                     std::vector<double>(unknowns, 0.0)};

  // Crank-Nicolson flux coefficient c_f = 1/2 + (dt/4) b(x_f, t_{n+1/2}) / a(x_f):
  // U^{n+1/2} = c (U~^n + U~^{n+1}) + dt S^n.
  std::vector<double> coeff(m + 1, 0.0);
  std::vector<double> known_flux(m + 1, 0.0);
  for (int f = 1; f < m; ++f) {
    const double x = grid_.face(f);
    coeff[f] = 0.5 + 0.25 * dt * spec_.b(x, t_mid) / a_faces_[f];
    known_flux[f] = coeff[f] * state_.utilde[f] + state_.history.flux(f);
  }

  const Field1D weighted_p = weighted_pressure();
  const Field1D weighted_f = weighted_forcing();

  for (int i = 0; i < m; ++i) {
    const int row = pressure_unknown(i);
    for (const auto& e : ops::psi_hat_row(i, m, set_)) {
      sys.matrix.add(row, pressure_unknown(e.col), e.weight / dt);
    }
    // delta_x over the cell: right face i+1 minus left face i.
    if (i + 1 < m) sys.matrix.add(row, velocity_unknown(i + 1), coeff[i + 1] / h);
    if (i > 0) sys.matrix.add(row, velocity_unknown(i), -coeff[i] / h);
    sys.rhs[row] = weighted_p[i] / dt + weighted_f[i] - (known_flux[i + 1] - known_flux[i]) / h;
  }

  for (int f = 1; f < m; ++f) {
    const int row = velocity_unknown(f);
    sys.matrix.add(row, pressure_unknown(f), 1.0 / h);
    sys.matrix.add(row, pressure_unknown(f - 1), -1.0 / h);
    for (const auto& e : ops::psi_face_row(f, set_)) {
      // Boundary faces hold U~ = 0 and drop out.
      if (e.col >= 1 && e.col <= m - 1) {
        sys.matrix.add(row, velocity_unknown(e.col), e.weight / a_faces_[e.col]);
      }
    }
  }
  return sys;
}

void Stepper1D::step() {
  const LinearSystem1D sys = assemble();
  std::vector<double> x;
  try {
    x = banded_solve(sys.matrix, sys.rhs);
  } catch (const SolverError& e) {
    throw SolverError("step " + std::to_string(state_.n) + " -> " + std::to_string(state_.n + 1) +
                          ": " + e.what(),
                      e.pivot());
  }
  accept(x);
}

void Stepper1D::accept(std::span<const double> x) {
  const int m = grid_.cells();
  if (static_cast<int>(x.size()) != 2 * m - 1) throw ShapeError("Stepper1D::accept: wrong length");
  Field1D pressure = Field1D::cells(grid_);
  Field1D utilde = Field1D::faces(grid_);
  for (int i = 0; i < m; ++i) pressure[i] = x[pressure_unknown(i)];
  for (int f = 1; f < m; ++f) utilde[f] = x[velocity_unknown(f)];

  const double t_mid = (state_.n + 0.5) * state_.dt;
  const Field1D b_mid = faces_of(grid_, [&](double xf) { return spec_.b(xf, t_mid); });
  state_.history.advance(b_mid, a_faces_, state_.utilde, utilde);
  state_.pressure = std::move(pressure);
  state_.utilde = std::move(utilde);
  ++state_.n;
}

Field1D Stepper1D::total_flux() const {
  Field1D u = state_.utilde;
  for (std::size_t f = 0; f < u.size(); ++f) u[f] += state_.history.flux(f);
  return u;
}

Field1D Stepper1D::weighted_pressure() const {
  return set_ == StencilSet::Compact ? ops::psi_hat(state_.pressure) : state_.pressure;
}

Field1D Stepper1D::weighted_forcing() const {
  const double t_mid = (state_.n + 0.5) * state_.dt;
  const Field1D cells =
      Field1D::sample(grid_, Stagger1D::Cell, [&](double x) { return spec_.f(x, t_mid); });
  if (set_ == StencilSet::Classical) return cells;
  const Field1D faces = faces_of(grid_, [&](double x) { return spec_.f(x, t_mid); });
  return ops::psi_tilde(cells, faces);
}

std::optional<ErrorReport> Stepper1D::errors() const {
  if (!spec_.exact) return std::nullopt;
  const double t = state_.time();
  Field1D ep = state_.pressure;
  for (int i = 0; i < grid_.cells(); ++i) ep[i] -= spec_.exact->p(grid_.center(i), t);
  Field1D eu = state_.utilde;
  for (int f = 0; f <= grid_.cells(); ++f) eu[f] -= spec_.exact->utilde(grid_.face(f), t);
  return ErrorReport{norm(ep), norm(eu)};
}

SchemeResidual scheme_residual(const Stepper1D& before, const Stepper1D& after) {
  const auto& s0 = before.state();
  const auto& s1 = after.state();
  if (s1.n != s0.n + 1) throw ContractError("scheme_residual: states are not consecutive");
  const Grid1D& g = before.grid();
  const bool compact = before.stencils() == StencilSet::Compact;
  const int m = g.cells();

  const Field1D u_old = before.total_flux();
  const Field1D u_new = after.total_flux();
  Field1D u_mid = u_old;
  for (std::size_t f = 0; f < u_mid.size(); ++f) u_mid[f] = 0.5 * (u_old[f] + u_new[f]);

  const Field1D wp0 = before.weighted_pressure();
  const Field1D wp1 = after.weighted_pressure();
  const Field1D wf = before.weighted_forcing();
  const Field1D div = ops::delta_to_cells(u_mid);

  SchemeResidual r;
  for (int i = 0; i < m; ++i) {
    const double res = (wp1[i] - wp0[i]) / s0.dt + div[i] - wf[i];
    r.mass = std::max(r.mass, std::abs(res));
  }

  Field1D w = s1.utilde;
  for (int f = 0; f <= m; ++f) w[f] /= before.spec().a(g.face(f));
  const Field1D psi_w = compact ? ops::psi_faces(w) : w;
  const Field1D dp = ops::delta_to_faces(s1.pressure);
  for (int f = 1; f < m; ++f) r.constitutive = std::max(r.constitutive, std::abs(dp[f] + psi_w[f]));
  return r;
}

RunResult1D run(const ProblemSpec1D& spec, int cells, double dt, StencilSet set) {
  Stepper1D stepper(spec, cells, dt, set);
  for (int n = 0; n < stepper.total_steps(); ++n) stepper.step();
  return {stepper.state(), stepper.errors()};
}

}  // namespace cbcfd
