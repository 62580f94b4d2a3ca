#include "cbcfd/scheme2d.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "cbcfd/errors.hpp"

namespace cbcfd {

namespace {

using ops::StencilSet;
using Triplet = Eigen::Triplet<double>;

// Solves psi W = rhs along one periodic line.
std::vector<double> solve_line(std::span<const double> rhs, StencilSet set) {
  const auto n = static_cast<int>(rhs.size());
  if (set == StencilSet::Classical) return {rhs.begin(), rhs.end()};
  std::vector<double> sub(n), diag(n), super(n);
  for (int i = 0; i < n; ++i) {
    for (const auto& e : ops::psi_periodic_row(i, n, set)) {
      if (e.col == i) diag[i] = e.weight;
      else if (e.col == (i + n - 1) % n) sub[i] = e.weight;
      else super[i] = e.weight;
    }
  }
  return cyclic_tridiagonal_solve(sub, diag, super, rhs);
}

}  // namespace

std::pair<Field2D, Field2D> init_utilde_2d(const Field2D& p0, const Fn2& ax, const Fn2& ay,
                                           StencilSet set) {
  if (p0.stagger() != Stagger2D::Cell) throw ShapeError("init_utilde_2d: P0 must be cell data");
  const Grid2D& g = p0.grid();
  const Field2D dpx = ops::delta_x(p0);
  const Field2D dpy = ops::delta_y(p0);
  Field2D ux(g, Stagger2D::FaceX);
  Field2D uy(g, Stagger2D::FaceY);
  // Independent lines; each is a cyclic tridiagonal solve for U~/a.
  std::vector<double> line;
  for (int j = 0; j < g.ny(); ++j) {
    line.resize(g.nx());
    for (int i = 0; i < g.nx(); ++i) line[i] = -dpx(i, j);
    const auto w = solve_line(line, set);
    for (int i = 0; i < g.nx(); ++i) ux(i, j) = ax(g.xf(i), g.yc(j)) * w[i];
  }
  for (int i = 0; i < g.nx(); ++i) {
    line.resize(g.ny());
    for (int j = 0; j < g.ny(); ++j) line[j] = -dpy(i, j);
    const auto w = solve_line(line, set);
    for (int j = 0; j < g.ny(); ++j) uy(i, j) = ay(g.xc(i), g.yf(j)) * w[j];
  }
  return {std::move(ux), std::move(uy)};
}

Stepper2D::Stepper2D(ProblemSpec2D spec, int nx, int ny, double dt, StencilSet set,
                     Stepper2DOptions options)
    : spec_(std::move(spec)),
      grid_(spec_.lx, spec_.ly, nx, ny),
      set_(set),
      options_(options),
      total_steps_(step_count(spec_.final_time, dt)),
      state_{0,
             dt,
             Field2D(grid_, Stagger2D::Cell),
             Field2D(grid_, Stagger2D::FaceX),
             Field2D(grid_, Stagger2D::FaceY),
             HistoryState2D(Field2D(grid_, Stagger2D::FaceX), dt, options.keep_history_samples),
             HistoryState2D(Field2D(grid_, Stagger2D::FaceY), dt, options.keep_history_samples)},
      ax_faces_(Field2D::sample(grid_, Stagger2D::FaceX, spec_.ax)),
      ay_faces_(Field2D::sample(grid_, Stagger2D::FaceY, spec_.ay)),
      solver_(options.solver) {
  validate(spec_);
  state_.pressure = Field2D::sample(grid_, Stagger2D::Cell, spec_.p0);
  auto [ux, uy] = init_utilde_2d(state_.pressure, spec_.ax, spec_.ay, set_);
  state_.utilde_x = std::move(ux);
  state_.utilde_y = std::move(uy);
}

Field2D Stepper2D::apply_psi_x(const Field2D& g) const {
  return set_ == StencilSet::Compact ? ops::psi_x(g) : g;
}

Field2D Stepper2D::apply_psi_y(const Field2D& g) const {
  return set_ == StencilSet::Compact ? ops::psi_y(g) : g;
}

LinearSystem2D Stepper2D::assemble() const {
  const int nx = grid_.nx();
  const int ny = grid_.ny();
  const int n = grid_.size();
  const double h = grid_.hx();
  const double k = grid_.hy();
  const double dt = state_.dt;
  const double t_mid = (state_.n + 0.5) * dt;
  const int ux0 = n;
  const int uy0 = 2 * n;

  // Crank-Nicolson flux coefficients and known parts of U^{n+1/2} per face.
  Field2D cx(grid_, Stagger2D::FaceX);
  Field2D cy(grid_, Stagger2D::FaceY);
  Field2D known_x(grid_, Stagger2D::FaceX);
  Field2D known_y(grid_, Stagger2D::FaceY);
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j < ny; ++j) {
      cx(i, j) = 0.5 + 0.25 * dt * spec_.bx(grid_.xf(i), grid_.yc(j), t_mid) / ax_faces_(i, j);
      cy(i, j) = 0.5 + 0.25 * dt * spec_.by(grid_.xc(i), grid_.yf(j), t_mid) / ay_faces_(i, j);
    }
  }
  for (std::size_t q = 0; q < cx.size(); ++q) {
    known_x[q] = cx[q] * state_.utilde_x[q] + state_.history_x.flux(q);
    known_y[q] = cy[q] * state_.utilde_y[q] + state_.history_y.flux(q);
  }
  const Field2D div_known =
      apply_psi_y(ops::delta_x(known_x));
  const Field2D div_known_y = apply_psi_x(ops::delta_y(known_y));
  const Field2D wp = weighted_pressure();
  const Field2D wf = weighted_forcing();

  std::vector<Triplet> t;
  t.reserve(static_cast<std::size_t>(n) * 31);
  std::vector<double> rhs(3 * static_cast<std::size_t>(n), 0.0);

  for (int i = 0; i < nx; ++i) {
    const auto row_x = ops::psi_periodic_row(i, nx, set_);
    for (int j = 0; j < ny; ++j) {
      const auto row_y = ops::psi_periodic_row(j, ny, set_);
      const int row = grid_.index(i, j);
      for (const auto& ex : row_x) {
        for (const auto& ey : row_y) {
          t.emplace_back(row, grid_.index(ex.col, ey.col), ex.weight * ey.weight / dt);
        }
      }
      // psi_y delta_x (c U~x): right face i+1 minus left face i on each y-neighbor line.
      for (const auto& ey : row_y) {
        const int right = grid_.index(i + 1, ey.col);
        const int left = grid_.index(i, ey.col);
        t.emplace_back(row, ux0 + right, ey.weight * cx[right] / h);
        t.emplace_back(row, ux0 + left, -ey.weight * cx[left] / h);
      }
      for (const auto& ex : row_x) {
        const int top = grid_.index(ex.col, j + 1);
        const int bottom = grid_.index(ex.col, j);
        t.emplace_back(row, uy0 + top, ex.weight * cy[top] / k);
        t.emplace_back(row, uy0 + bottom, -ex.weight * cy[bottom] / k);
      }
      rhs[row] = wp[row] / dt + wf[row] - div_known[row] - div_known_y[row];

      // x-face (i, j) sits between cells (i-1, j) and (i, j).
      const int fx = ux0 + row;
      t.emplace_back(fx, grid_.index(i, j), 1.0 / h);
      t.emplace_back(fx, grid_.index(i - 1, j), -1.0 / h);
      for (const auto& ex : row_x) {
        const int col = grid_.index(ex.col, j);
        t.emplace_back(fx, ux0 + col, ex.weight / ax_faces_[col]);
      }
      // y-face (i, j) sits between cells (i, j-1) and (i, j).
      const int fy = uy0 + row;
      t.emplace_back(fy, grid_.index(i, j), 1.0 / k);
      t.emplace_back(fy, grid_.index(i, j - 1), -1.0 / k);
      for (const auto& ey : row_y) {
        const int col = grid_.index(i, ey.col);
        t.emplace_back(fy, uy0 + col, ey.weight / ay_faces_[col]);
      }
    }
  }
  SparseMatrix a(3 * n, 3 * n);
  a.setFromTriplets(t.begin(), t.end());
  a.makeCompressed();
  return {std::move(a), std::move(rhs)};
}

void Stepper2D::step() {
  LinearSystem2D sys = assemble();
  std::vector<double> x;
  try {
    const auto refactor = [&] {
      solver_.factorize(sys.matrix);
      ++factorizations_;
    };
    if (factorizations_ == 0) {
      refactor();
      x = solver_.solve(sys.rhs);
    } else if (spec_.b_time_independent) {
      x = solver_.solve(sys.rhs);
    } else if (options_.policy == FactorizationPolicy::EveryStep) {
      refactor();
      x = solver_.solve(sys.rhs);
    } else {
      auto refined = solver_.solve_refined(sys.matrix, sys.rhs, options_.refinement_tolerance,
                                           options_.max_refinement_steps);
      if (!refined) {
        refactor();
        refined = solver_.solve_refined(sys.matrix, sys.rhs, options_.refinement_tolerance,
                                        options_.max_refinement_steps);
        if (!refined) throw SolverError("refinement stalled on a fresh factorization");
      }
      x = std::move(*refined);
    }
  } catch (const SolverError& e) {
    throw SolverError("step " + std::to_string(state_.n) + " -> " + std::to_string(state_.n + 1) +
                          ": " + e.what(),
                      e.pivot());
  }
  accept(x);
}

void Stepper2D::accept(std::span<const double> x) {
  const int n = grid_.size();
  if (static_cast<int>(x.size()) != 3 * n) throw ShapeError("Stepper2D::accept: wrong length");
  Field2D p(grid_, Stagger2D::Cell, {x.begin(), x.begin() + n});
  Field2D ux(grid_, Stagger2D::FaceX, {x.begin() + n, x.begin() + 2 * n});
  Field2D uy(grid_, Stagger2D::FaceY, {x.begin() + 2 * n, x.end()});

  const double t_mid = (state_.n + 0.5) * state_.dt;
  const Field2D bx = Field2D::sample(grid_, Stagger2D::FaceX,
                                     [&](double xx, double yy) { return spec_.bx(xx, yy, t_mid); });
  const Field2D by = Field2D::sample(grid_, Stagger2D::FaceY,
                                     [&](double xx, double yy) { return spec_.by(xx, yy, t_mid); });
  state_.history_x.advance(bx, ax_faces_, state_.utilde_x, ux);
  state_.history_y.advance(by, ay_faces_, state_.utilde_y, uy);
  state_.pressure = std::move(p);
  state_.utilde_x = std::move(ux);
  state_.utilde_y = std::move(uy);
  ++state_.n;
}

Field2D Stepper2D::total_flux_x() const {
  Field2D u = state_.utilde_x;
  for (std::size_t q = 0; q < u.size(); ++q) u[q] += state_.history_x.flux(q);
  return u;
}

Field2D Stepper2D::total_flux_y() const {
  Field2D u = state_.utilde_y;
  for (std::size_t q = 0; q < u.size(); ++q) u[q] += state_.history_y.flux(q);
  return u;
}

Field2D Stepper2D::weighted_pressure() const { return apply_psi_y(apply_psi_x(state_.pressure)); }

Field2D Stepper2D::weighted_forcing() const {
  const double t_mid = (state_.n + 0.5) * state_.dt;
  const Field2D f = Field2D::sample(grid_, Stagger2D::Cell,
                                    [&](double x, double y) { return spec_.f(x, y, t_mid); });
  return apply_psi_y(apply_psi_x(f));
}

std::optional<ErrorReport> Stepper2D::errors() const {
  if (!spec_.exact) return std::nullopt;
  const double t = state_.time();
  const auto& ex = *spec_.exact;
  Field2D ep = state_.pressure;
  Field2D eux = state_.utilde_x;
  Field2D euy = state_.utilde_y;
  for (int i = 0; i < grid_.nx(); ++i) {
    for (int j = 0; j < grid_.ny(); ++j) {
      ep(i, j) -= ex.p(grid_.xc(i), grid_.yc(j), t);
      eux(i, j) -= ex.utilde_x(grid_.xf(i), grid_.yc(j), t);
      euy(i, j) -= ex.utilde_y(grid_.xc(i), grid_.yf(j), t);
    }
  }
  return ErrorReport{norm(ep), std::sqrt(inner(eux, eux) + inner(euy, euy))};
}

SchemeResidual scheme_residual(const Stepper2D& before, const Stepper2D& after) {
  const auto& s0 = before.state();
  const auto& s1 = after.state();
  if (s1.n != s0.n + 1) throw ContractError("scheme_residual: states are not consecutive");
  const Grid2D& g = before.grid();
  const bool compact = before.stencils() == StencilSet::Compact;
  const auto px = [&](const Field2D& f) { return compact ? ops::psi_x(f) : f; };
  const auto py = [&](const Field2D& f) { return compact ? ops::psi_y(f) : f; };

  Field2D ux = before.total_flux_x();
  Field2D uy = before.total_flux_y();
  const Field2D ux1 = after.total_flux_x();
  const Field2D uy1 = after.total_flux_y();
  for (std::size_t q = 0; q < ux.size(); ++q) {
    ux[q] = 0.5 * (ux[q] + ux1[q]);
    uy[q] = 0.5 * (uy[q] + uy1[q]);
  }
  const Field2D wp0 = before.weighted_pressure();
  const Field2D wp1 = after.weighted_pressure();
  const Field2D wf = before.weighted_forcing();
  const Field2D div_x = py(ops::delta_x(ux));
  const Field2D div_y = px(ops::delta_y(uy));

  SchemeResidual r;
  for (std::size_t q = 0; q < wp0.size(); ++q) {
    const double res = (wp1[q] - wp0[q]) / s0.dt + div_x[q] + div_y[q] - wf[q];
    r.mass = std::max(r.mass, std::abs(res));
  }

  Field2D wx = s1.utilde_x;
  Field2D wy = s1.utilde_y;
  for (int i = 0; i < g.nx(); ++i) {
    for (int j = 0; j < g.ny(); ++j) {
      wx(i, j) /= before.spec().ax(g.xf(i), g.yc(j));
      wy(i, j) /= before.spec().ay(g.xc(i), g.yf(j));
    }
  }
  const Field2D dpx = ops::delta_x(s1.pressure);
  const Field2D dpy = ops::delta_y(s1.pressure);
  const Field2D psx = px(wx);
  const Field2D psy = py(wy);
  for (std::size_t q = 0; q < dpx.size(); ++q) {
    r.constitutive = std::max({r.constitutive, std::abs(dpx[q] + psx[q]), std::abs(dpy[q] + psy[q])});
  }
  return r;
}

RunResult2D run_2d(const ProblemSpec2D& spec, int nx, int ny, double dt, StencilSet set) {
  Stepper2D stepper(spec, nx, ny, dt, set);
  for (int n = 0; n < stepper.total_steps(); ++n) stepper.step();
  return {stepper.state(), stepper.errors()};
}

}  // namespace cbcfd
