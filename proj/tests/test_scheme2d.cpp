#include <cmath>
#include <numbers>
#include <vector>

#include <gtest/gtest.h>

#include "cbcfd/mms.hpp"
#include "cbcfd/scheme2d.hpp"

using namespace cbcfd;

namespace {

constexpr double kPi = std::numbers::pi;

ProblemSpec2D smooth_spec() {
  ProblemSpec2D s;
  s.ax = [](double x, double y) { return 1.0 + 0.3 * std::sin(2 * kPi * x) * std::cos(2 * kPi * y); };
  s.ay = [](double x, double) { return 1.0 + 0.2 * std::cos(2 * kPi * x); };
  s.bx = [](double, double y, double t) { return (1.0 + t) * std::cos(2 * kPi * y); };
  s.by = [](double x, double, double t) { return t * std::sin(2 * kPi * x) + 0.5; };
  s.f = [](double x, double y, double t) {
    return std::sin(2 * kPi * x) * std::cos(4 * kPi * y) * std::exp(-t);
  };
  s.p0 = [](double x, double y) { return std::cos(2 * kPi * x) + std::sin(2 * kPi * y); };
  return s;
}

ProblemSpec2D constant_spec(double c) {
  ProblemSpec2D s;
  s.ax = [](double x, double) { return 2.0 + std::cos(2 * kPi * x); };
  s.ay = [](double, double) { return 1.0; };
  s.bx = s.by = [](double, double, double t) { return t; };
  s.f = [](double, double, double) { return 0.0; };
  s.p0 = [c](double, double) { return c; };
  return s;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

std::vector<double> unknowns(const StepperState2D& s) {
  std::vector<double> x(s.pressure.values().begin(), s.pressure.values().end());
  x.insert(x.end(), s.utilde_x.values().begin(), s.utilde_x.values().end());
  x.insert(x.end(), s.utilde_y.values().begin(), s.utilde_y.values().end());
  return x;
}

Eigen::MatrixXd kron(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd k(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i) {
    for (Eigen::Index j = 0; j < a.cols(); ++j) k.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  }
  return k;
}

// Periodic face-to-cell (d_c) and cell-to-face (d_f) differences on n points.
Eigen::MatrixXd diff_to_cells(int n, double h) {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    d(i, (i + 1) % n) += 1.0 / h;
    d(i, i) -= 1.0 / h;
  }
  return d;
}

Eigen::MatrixXd diff_to_faces(int n, double h) {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    d(i, i) += 1.0 / h;
    d(i, (i + n - 1) % n) -= 1.0 / h;
  }
  return d;
}

double sum_hk(const Field2D& f) {
  double s = 0.0;
  for (std::size_t q = 0; q < f.size(); ++q) s += f[q];
  return s * f.grid().hx() * f.grid().hy();
}

}  // namespace

TEST(InitUtilde2D, Cases) {
  const Grid2D g(1.0, 1.0, 8, 6);
  const auto one = [](double, double) { return 1.0; };
  const auto [cx, cy] = init_utilde_2d(Field2D::sample(g, Stagger2D::Cell, [](double, double) { return 4.0; }), one, one);
  for (std::size_t q = 0; q < cx.size(); ++q) {
    EXPECT_EQ(cx[q], 0.0);
    EXPECT_EQ(cy[q], 0.0);
  }
  const auto [yx, yy] = init_utilde_2d(
      Field2D::sample(g, Stagger2D::Cell, [](double, double y) { return std::cos(2 * kPi * y); }), one, one);
  for (std::size_t q = 0; q < yx.size(); ++q) EXPECT_EQ(yx[q], 0.0);
  EXPECT_EQ(yx.stagger(), Stagger2D::FaceX);
  EXPECT_EQ(yy.stagger(), Stagger2D::FaceY);

  std::vector<double> errs;
  for (int n : {16, 32, 64}) {
    const Grid2D gn(1.0, 1.0, n, 4);
    const auto [ux, uy] = init_utilde_2d(
        Field2D::sample(gn, Stagger2D::Cell, [](double x, double) { return std::cos(2 * kPi * x); }), one, one);
    double e = 0.0;
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < 4; ++j) {
        e = std::max(e, std::abs(ux(i, j) - 2 * kPi * std::sin(2 * kPi * gn.xf(i))));
        EXPECT_EQ(uy(i, j), 0.0);
      }
    }
    errs.push_back(e);
  }
  EXPECT_NEAR(std::log2(errs[0] / errs[1]), 4.0, 0.3);
  EXPECT_NEAR(std::log2(errs[1] / errs[2]), 4.0, 0.3);
}

TEST(Stepper2D, ConstantAndZeroAreSteady) {
  for (double c : {0.0, 1.5}) {
    Stepper2D st(constant_spec(c), 6, 5, 0.05);
    for (int n = 0; n < 20; ++n) {
      st.step();
      for (std::size_t q = 0; q < st.state().pressure.size(); ++q) {
        ASSERT_NEAR(st.state().pressure[q], c, 1e-12);
        ASSERT_NEAR(st.state().utilde_x[q], 0.0, 1e-12);
        ASSERT_NEAR(st.state().utilde_y[q], 0.0, 1e-12);
      }
    }
  }
}

TEST(Stepper2D, SolutionMatchesDenseOracle) {
  for (auto [nx, ny] : {std::pair{4, 4}, {6, 6}, {5, 8}, {8, 8}}) {
    Stepper2D st(smooth_spec(), nx, ny, 0.05);
    for (int n = 0; n < 3; ++n) {
      const auto sys = st.assemble();
      const auto dense = dense_oracle_solve(Eigen::MatrixXd(sys.matrix), sys.rhs);
      st.step();
      double scale = 1.0;
      for (double v : dense) scale = std::max(scale, std::abs(v));
      EXPECT_LE(max_abs_diff(unknowns(st.state()), dense), 1e-12 * scale)
          << nx << "x" << ny << " step " << n;
    }
  }
}

TEST(Stepper2D, MatrixFreeResidual) {
  const auto ex = mms::example2();
  const double h = 0.1;
  Stepper2D before(ex.spec, 10, 10, h * h);
  Stepper2D after(ex.spec, 10, 10, h * h);
  after.step();
  const auto r = scheme_residual(before, after);
  EXPECT_LE(r.mass, 1e-11);
  EXPECT_LE(r.constitutive, 1e-11);

  Stepper2D s0(smooth_spec(), 7, 6, 0.02);
  Stepper2D s1(smooth_spec(), 7, 6, 0.02);
  s1.step();
  for (int n = 0; n < 5; ++n) {
    const auto rr = scheme_residual(s0, s1);
    EXPECT_LE(rr.mass, 1e-11);
    EXPECT_LE(rr.constitutive, 1e-11);
    s0.step();
    s1.step();
  }
}

// The assembled matrix equals the tensor-product form built from 1D periodic
// operators, i.e. the psi_hat / psi_tilde collapse under periodicity.
TEST(Stepper2D, AssemblyMatchesKroneckerForm) {
  const auto spec = smooth_spec();
  const int nx = 6, ny = 5;
  const double dt = 0.05;
  Stepper2D st(spec, nx, ny, dt);
  st.step();
  const auto sys = st.assemble();
  const Grid2D& g = st.grid();
  const int n = nx * ny;
  const double t_mid = 1.5 * dt;

  const Eigen::MatrixXd px(ops::psi_periodic_matrix(nx));
  const Eigen::MatrixXd py(ops::psi_periodic_matrix(ny));
  const Eigen::MatrixXd ix = Eigen::MatrixXd::Identity(nx, nx);
  const Eigen::MatrixXd iy = Eigen::MatrixXd::Identity(ny, ny);
  Eigen::VectorXd cx(n), cy(n), inv_ax(n), inv_ay(n);
  for (int i = 0; i < nx; ++i) {
    for (int j = 0; j < ny; ++j) {
      const int q = g.index(i, j);
      const double ax = spec.ax(g.xf(i), g.yc(j));
      const double ay = spec.ay(g.xc(i), g.yf(j));
      cx[q] = 0.5 + 0.25 * dt * spec.bx(g.xf(i), g.yc(j), t_mid) / ax;
      cy[q] = 0.5 + 0.25 * dt * spec.by(g.xc(i), g.yf(j), t_mid) / ay;
      inv_ax[q] = 1.0 / ax;
      inv_ay[q] = 1.0 / ay;
    }
  }
  Eigen::MatrixXd ref = Eigen::MatrixXd::Zero(3 * n, 3 * n);
  ref.block(0, 0, n, n) = kron(px, py) / dt;
  ref.block(0, n, n, n) = kron(ix, py) * kron(diff_to_cells(nx, g.hx()), iy) * cx.asDiagonal();
  ref.block(0, 2 * n, n, n) = kron(px, iy) * kron(ix, diff_to_cells(ny, g.hy())) * cy.asDiagonal();
  ref.block(n, 0, n, n) = kron(diff_to_faces(nx, g.hx()), iy);
  ref.block(n, n, n, n) = kron(px, iy) * inv_ax.asDiagonal();
  ref.block(2 * n, 0, n, n) = kron(ix, diff_to_faces(ny, g.hy()));
  ref.block(2 * n, 2 * n, n, n) = kron(ix, py) * inv_ay.asDiagonal();

  const Eigen::MatrixXd got(sys.matrix);
  EXPECT_LE((got - ref).cwiseAbs().maxCoeff(), 1e-15 * ref.cwiseAbs().maxCoeff());
  EXPECT_TRUE(((got.array() != 0.0) == (ref.array() != 0.0)).all());
  // psi_x psi_y = psi_y psi_x as assembled operators.
  EXPECT_LE((kron(px, iy) * kron(ix, py) - kron(ix, py) * kron(px, iy)).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Stepper2D, PeriodicMassBalance) {
  const auto ex = mms::example2();
  const int n = 10;
  const double dt = 0.01;
  Stepper2D st(ex.spec, n, n, dt);
  const Grid2D& g = st.grid();
  for (int s = 0; s < st.total_steps(); ++s) {
    const double t_mid = (s + 0.5) * dt;
    const auto f = Field2D::sample(g, Stagger2D::Cell, [&](double x, double y) { return ex.spec.f(x, y, t_mid); });
    const double before = sum_hk(ops::psi_y(ops::psi_x(st.state().pressure)));
    const double source = dt * sum_hk(ops::psi_y(ops::psi_x(f)));
    st.step();
    const double after = sum_hk(ops::psi_y(ops::psi_x(st.state().pressure)));
    const double scale = std::max({std::abs(before), std::abs(after), std::abs(source), 1.0});
    ASSERT_LE(std::abs(after - before - source), 1e-11 * scale) << "step " << s;
  }
}

TEST(Stepper2D, YIndependentDataStaysYIndependent) {
  ProblemSpec2D s;
  s.ax = [](double x, double) { return 1.0 + 0.5 * std::sin(2 * kPi * x); };
  s.ay = [](double, double) { return 1.0; };
  s.bx = [](double x, double, double t) { return std::cos(2 * kPi * x) * t; };
  s.by = [](double, double, double) { return 1.0; };
  s.f = [](double x, double, double t) { return std::sin(2 * kPi * x) * (1 + t); };
  s.p0 = [](double x, double) { return std::cos(2 * kPi * x); };
  Stepper2D st(s, 8, 6, 0.05);
  for (int n = 0; n < st.total_steps(); ++n) {
    st.step();
    for (int i = 0; i < 8; ++i) {
      double lo = st.state().pressure(i, 0), hi = lo;
      for (int j = 1; j < 6; ++j) {
        lo = std::min(lo, st.state().pressure(i, j));
        hi = std::max(hi, st.state().pressure(i, j));
      }
      ASSERT_LE(hi - lo, 1e-12);
    }
    for (std::size_t q = 0; q < st.state().utilde_y.size(); ++q) ASSERT_LE(std::abs(st.state().utilde_y[q]), 1e-12);
  }
}

TEST(Stepper2D, FactorizationPolicies) {
  const auto spec = smooth_spec();
  Stepper2DOptions every;
  every.policy = FactorizationPolicy::EveryStep;
  Stepper2D a(spec, 8, 8, 0.02, ops::StencilSet::Compact, every);
  Stepper2D b(spec, 8, 8, 0.02);
  for (int n = 0; n < 20; ++n) {
    a.step();
    b.step();
    EXPECT_LE(max_abs_diff(unknowns(a.state()), unknowns(b.state())), 1e-12);
  }
  EXPECT_EQ(a.factorizations(), 20);
  EXPECT_LT(b.factorizations(), 20);

  ProblemSpec2D fixed = spec;
  fixed.bx = [](double, double y, double) { return std::cos(2 * kPi * y); };
  fixed.by = [](double, double, double) { return 0.5; };
  fixed.b_time_independent = true;
  Stepper2D c(fixed, 6, 6, 0.05, ops::StencilSet::Compact, every);
  for (int n = 0; n < 5; ++n) c.step();
  EXPECT_EQ(c.factorizations(), 1);
}

TEST(Stepper2D, ErrorReportCombinesFaces) {
  ProblemSpec2D s = constant_spec(1.0);
  const double eps = 2e-3;
  s.lx = 2.0;
  s.ly = 0.5;
  s.exact = ExactSolution2D{[eps](double, double, double) { return 1.0 + eps; },
                            [eps](double, double, double) { return 3 * eps; },
                            [eps](double, double, double) { return 4 * eps; }};
  Stepper2D st(s, 4, 4, 0.5);
  const auto e = st.errors();
  ASSERT_TRUE(e.has_value());
  EXPECT_NEAR(e->pressure, eps, 1e-15);
  EXPECT_NEAR(e->velocity, 5 * eps, 1e-15);
}

TEST(Stepper2D, Example2FourthOrderCoarse) {
  const auto ex = mms::example2();
  const auto r1 = run_2d(ex.spec, 10, 10, 0.01);
  const auto r2 = run_2d(ex.spec, 20, 20, 0.0025);
  ASSERT_TRUE(r1.errors && r2.errors);
  EXPECT_NEAR(std::log2(r1.errors->pressure / r2.errors->pressure), 4.0, 0.15);
  EXPECT_NEAR(std::log2(r1.errors->velocity / r2.errors->velocity), 4.0, 0.15);
}
