#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include <Eigen/Dense>
#include <gtest/gtest.h>

#include "cbcfd/compact_ops.hpp"
#include "cbcfd/errors.hpp"

using namespace cbcfd;
using ops::StencilSet;

namespace {

constexpr double kPi = std::numbers::pi;

Eigen::VectorXd to_vec(std::span<const double> v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

Field1D random_field(const Grid1D& g, Stagger1D s, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Field1D f(g, s);
  for (std::size_t i = 0; i < f.size(); ++i) f[i] = u(rng);
  return f;
}

Field1D with_zero_boundary(Field1D f) {
  f[0] = 0.0;
  f[f.size() - 1] = 0.0;
  return f;
}

Eigen::VectorXd interior(const Field1D& faces) {
  return to_vec(faces.values()).segment(1, static_cast<Eigen::Index>(faces.size()) - 2);
}

double slope(const std::vector<double>& hs, const std::vector<double>& errs) {
  return std::log(errs.front() / errs.back()) / std::log(hs.front() / hs.back());
}

}  // namespace

TEST(CompactOps, MinPoints) {
  EXPECT_EQ(ops::min_points(ops::OperatorVariant::NoFlux1D), 4);
  EXPECT_EQ(ops::min_points(ops::OperatorVariant::Periodic1D), 3);
  EXPECT_EQ(ops::min_points(ops::OperatorVariant::Periodic2DAxisX), 3);
  EXPECT_EQ(ops::min_points(ops::OperatorVariant::Periodic2DAxisY), 3);
}

TEST(CompactOps, DeltaToCellsExamples) {
  const Grid1D g(1.0, 4);
  const Field1D w(g, Stagger1D::Face, {0, 1, 3, 2, 0});
  const auto d = ops::delta_to_cells(w);
  const std::vector<double> expect = {4, 8, -4, -8};
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(d[i], expect[i], 1e-14);

  const auto c = ops::delta_to_cells(Field1D::sample(g, Stagger1D::Face, [](double) { return 3.0; }));
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(c[i], 0.0, 1e-14);
  const auto l = ops::delta_to_cells(Field1D::sample(g, Stagger1D::Face, [](double x) { return x; }));
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(l[i], 1.0, 1e-14);
}

TEST(CompactOps, DeltaToFacesExamples) {
  const Grid1D g(1.0, 4);
  const auto d = ops::delta_to_faces(Field1D(g, Stagger1D::Cell, {1, 2, 4, 8}));
  ASSERT_EQ(d.size(), 5u);
  EXPECT_EQ(d[0], 0.0);
  EXPECT_NEAR(d[1], 4.0, 1e-14);
  EXPECT_NEAR(d[2], 8.0, 1e-14);
  EXPECT_NEAR(d[3], 16.0, 1e-14);
  EXPECT_EQ(d[4], 0.0);
  const auto l = ops::delta_to_faces(Field1D::sample(g, Stagger1D::Cell, [](double x) { return x; }));
  for (int f = 1; f < 4; ++f) EXPECT_NEAR(l[f], 1.0, 1e-14);
}

TEST(CompactOps, PsiFaceTriple) {
  const Grid1D g(1.0, 4);
  const auto p = ops::psi_faces(Field1D(g, Stagger1D::Face, {0, 1, 2, 3, 0}));
  EXPECT_NEAR(p[2], 2.0, 1e-15);
  // Boundary faces are passed through.
  EXPECT_EQ(p[0], 0.0);
  EXPECT_EQ(p[4], 0.0);

  std::vector<double> in = {1, 2, 3}, out(3);
  ops::psi_periodic(in, out);
  EXPECT_NEAR(out[1], 2.0, 1e-15);
}

TEST(CompactOps, PsiReproducesConstantsAndLinears) {
  const Grid1D g(1.0, 9);
  const auto cf = Field1D::sample(g, Stagger1D::Face, [](double) { return 2.5; });
  const auto cc = Field1D::sample(g, Stagger1D::Cell, [](double) { return 2.5; });
  const auto lf = Field1D::sample(g, Stagger1D::Face, [](double x) { return 3 * x - 1; });
  const auto lc = Field1D::sample(g, Stagger1D::Cell, [](double x) { return 3 * x - 1; });

  const auto pf = ops::psi_faces(cf);
  const auto pt = ops::psi_tilde(cc, cf);
  const auto ph = ops::psi_hat(cc);
  for (std::size_t i = 0; i < pf.size(); ++i) EXPECT_NEAR(pf[i], 2.5, 1e-14);
  for (std::size_t i = 0; i < pt.size(); ++i) EXPECT_NEAR(pt[i], 2.5, 1e-14);
  for (std::size_t i = 0; i < ph.size(); ++i) EXPECT_NEAR(ph[i], 2.5, 1e-14);

  const auto qf = ops::psi_faces(lf);
  const auto qt = ops::psi_tilde(lc, lf);
  const auto qh = ops::psi_hat(lc);
  for (std::size_t i = 1; i + 1 < qf.size(); ++i) EXPECT_NEAR(qf[i], lf[i], 1e-14);
  for (std::size_t i = 0; i < qt.size(); ++i) EXPECT_NEAR(qt[i], lc[i], 1e-14);
  // The one-sided closure is exact on linears, so every row reproduces.
  for (std::size_t i = 0; i < qh.size(); ++i) EXPECT_NEAR(qh[i], lc[i], 1e-14);
}

TEST(CompactOps, PsiTildeExamples) {
  const Grid1D g(1.0, 5);
  Field1D faces(g, Stagger1D::Face, std::vector<double>(6, std::numeric_limits<double>::quiet_NaN()));
  faces[0] = faces[1] = faces[4] = faces[5] = 0.0;
  const auto out = ops::psi_tilde(Field1D(g, Stagger1D::Cell, {0, 0, 24, 0, 0}), faces);
  EXPECT_NEAR(out[2], 22.0, 1e-14);
  EXPECT_NEAR(out[1], 1.0, 1e-14);

  Field1D f2 = faces;
  f2[0] = 1.0;
  f2[1] = 1.0;
  const auto b = ops::psi_tilde(Field1D(g, Stagger1D::Cell, {1, 0, 0, 0, 0}), f2);
  EXPECT_NEAR(b[0], 1.0, 1e-15);
}

TEST(CompactOps, PsiTildeRequiresBoundaryFaceData) {
  const Grid1D g(1.0, 6);
  const auto cells = Field1D::cells(g);
  for (int missing : {0, 1, 5, 6}) {
    Field1D faces = Field1D::faces(g);
    faces[missing] = std::numeric_limits<double>::quiet_NaN();
    EXPECT_THROW((void)ops::psi_tilde(cells, faces), ContractError) << "face " << missing;
  }
  Field1D faces = Field1D::faces(g);
  faces[3] = std::numeric_limits<double>::quiet_NaN();
  EXPECT_NO_THROW((void)ops::psi_tilde(cells, faces));
}

TEST(CompactOps, PsiHatBoundaryRow) {
  const Grid1D g(1.0, 6);
  const auto out = ops::psi_hat(Field1D(g, Stagger1D::Cell, {1, 2, 3, 4, 5, 6}));
  EXPECT_NEAR(out[0], 1.0, 1e-15);
  EXPECT_NEAR(out[5], 6.0, 1e-15);

  // Row weights on a unit impulse read back the closure coefficients.
  for (int k = 0; k < 4; ++k) {
    Field1D e = Field1D::cells(g);
    e[k] = 1.0;
    const double expect[] = {26.0 / 24, -5.0 / 24, 4.0 / 24, -1.0 / 24};
    EXPECT_NEAR(ops::psi_hat(e)[0], expect[k], 1e-15);
    Field1D m = Field1D::cells(g);
    m[5 - k] = 1.0;
    EXPECT_NEAR(ops::psi_hat(m)[5], expect[k], 1e-15);
  }
}

TEST(CompactOps, StencilRows) {
  const auto r = ops::psi_face_row(3);
  ASSERT_EQ(r.size(), 3);
  double sum = 0.0;
  for (const auto& e : r) sum += e.weight;
  EXPECT_NEAR(sum, 1.0, 1e-15);

  const auto hb = ops::psi_hat_row(0, 8);
  EXPECT_EQ(hb.size(), 4);
  const auto classical = ops::psi_hat_row(0, 8, StencilSet::Classical);
  ASSERT_EQ(classical.size(), 1);
  EXPECT_EQ(classical.begin()->col, 0);
  EXPECT_EQ(classical.begin()->weight, 1.0);

  const auto wrap = ops::psi_periodic_row(0, 5);
  std::vector<int> cols;
  for (const auto& e : wrap) cols.push_back(e.col);
  std::sort(cols.begin(), cols.end());
  EXPECT_EQ(cols, (std::vector<int>{0, 1, 4}));
}

TEST(CompactOps, KernelsMatchMatrices) {
  std::mt19937_64 rng(11);
  for (int m : {4, 5, 9, 32}) {
    const Grid1D g(1.3, m);
    for (int trial = 0; trial < 10; ++trial) {
      const auto c = random_field(g, Stagger1D::Cell, rng);
      const auto f = with_zero_boundary(random_field(g, Stagger1D::Face, rng));
      const Eigen::VectorXd cv = to_vec(c.values());
      const Eigen::VectorXd fv = interior(f);

      EXPECT_LE((to_vec(ops::psi_hat(c).values()) - ops::psi_hat_matrix(m) * cv).lpNorm<Eigen::Infinity>(), 1e-14);
      EXPECT_LE((interior(ops::psi_faces(f)) - ops::psi_face_matrix(m) * fv).lpNorm<Eigen::Infinity>(), 1e-14);
      EXPECT_LE((to_vec(ops::delta_to_cells(f).values()) - ops::delta_to_cells_matrix(m, g.h()) * fv).lpNorm<Eigen::Infinity>(), 1e-12);
      EXPECT_LE((interior(ops::delta_to_faces(c)) - ops::delta_to_faces_matrix(m, g.h()) * cv).lpNorm<Eigen::Infinity>(), 1e-12);

      std::vector<double> out(m);
      ops::psi_periodic(c.values(), out);
      EXPECT_LE((to_vec(out) - ops::psi_periodic_matrix(m) * cv).lpNorm<Eigen::Infinity>(), 1e-14);
    }
    // Matrices built from the stencil rows of the same operator.
    Eigen::MatrixXd from_rows = Eigen::MatrixXd::Zero(m, m);
    for (int i = 0; i < m; ++i) {
      for (const auto& e : ops::psi_hat_row(i, m)) from_rows(i, e.col) += e.weight;
    }
    EXPECT_LE((from_rows - Eigen::MatrixXd(ops::psi_hat_matrix(m))).cwiseAbs().maxCoeff(), 1e-15);
  }
}

TEST(CompactOps, ClassicalMatricesAreIdentity) {
  EXPECT_TRUE(Eigen::MatrixXd(ops::psi_hat_matrix(6, StencilSet::Classical)).isIdentity(0.0));
  EXPECT_TRUE(Eigen::MatrixXd(ops::psi_face_matrix(6, StencilSet::Classical)).isIdentity(0.0));
  EXPECT_TRUE(Eigen::MatrixXd(ops::psi_periodic_matrix(6, StencilSet::Classical)).isIdentity(0.0));
}

TEST(CompactOps, SummationByPartsLemma) {
  std::mt19937_64 rng(2024);
  std::uniform_int_distribution<int> sizes(4, 64);
  for (int trial = 0; trial < 100; ++trial) {
    const Grid1D g(0.5 + trial * 0.01, sizes(rng));
    const auto q = random_field(g, Stagger1D::Cell, rng);
    const auto w = with_zero_boundary(random_field(g, Stagger1D::Face, rng));
    const double lhs = inner(q, ops::delta_to_cells(w));
    const double rhs = inner(ops::delta_to_faces(q), w);
    const double scale = norm(q) * norm(ops::delta_to_cells(w)) + norm(ops::delta_to_faces(q)) * norm(w);
    EXPECT_LE(std::abs(lhs + rhs), 1e-13 * scale) << "trial " << trial;
  }
}

TEST(CompactOps, PeriodicDifferencesAreAdjoint) {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const int n = 13;
  const double h = 1.0 / n;
  std::vector<double> q(n), w(n), dq(n), dw(n);
  for (int i = 0; i < n; ++i) {
    q[i] = u(rng);
    w[i] = u(rng);
  }
  ops::delta_periodic_to_cells(w, h, dw);
  ops::delta_periodic_to_faces(q, h, dq);
  double a = 0.0, b = 0.0;
  for (int i = 0; i < n; ++i) {
    a += q[i] * dw[i];
    b += dq[i] * w[i];
  }
  EXPECT_NEAR(a, -b, 1e-12);
}

// delta f = psi g + O(h^4) for f' = g. A sine would make g'''' vanish at the
// ends and hide the order of the one-sided psi_hat rows.
TEST(CompactOps, FourthOrderTruncation) {
  const auto g = [](double x) { return std::cos(2 * kPi * x); };
  const auto f = [](double x) { return std::sin(2 * kPi * x) / (2 * kPi); };
  std::vector<double> hs, e_face, e_tilde, e_hat;
  for (int m : {16, 32, 64, 128}) {
    const Grid1D grid(1.0, m);
    hs.push_back(grid.h());
    // Face version: f at cells, g at faces.
    const auto lhs_f = ops::delta_to_faces(Field1D::sample(grid, Stagger1D::Cell, f));
    const auto rhs_f = ops::psi_faces(Field1D::sample(grid, Stagger1D::Face, g));
    double e = 0.0;
    for (int i = 1; i < m; ++i) e = std::max(e, std::abs(lhs_f[i] - rhs_f[i]));
    e_face.push_back(e);
    // Cell versions: f at faces, g at cells.
    const auto lhs_c = ops::delta_to_cells(Field1D::sample(grid, Stagger1D::Face, f));
    const auto gc = Field1D::sample(grid, Stagger1D::Cell, g);
    const auto gf = Field1D::sample(grid, Stagger1D::Face, g);
    const auto t = ops::psi_tilde(gc, gf);
    const auto hh = ops::psi_hat(gc);
    double et = 0.0, eh = 0.0;
    for (int i = 0; i < m; ++i) {
      et = std::max(et, std::abs(lhs_c[i] - t[i]));
      eh = std::max(eh, std::abs(lhs_c[i] - hh[i]));
    }
    e_tilde.push_back(et);
    e_hat.push_back(eh);
  }
  EXPECT_NEAR(slope(hs, e_face), 4.0, 0.3);
  EXPECT_NEAR(slope(hs, e_tilde), 4.0, 0.3);
  EXPECT_NEAR(slope(hs, e_hat), 4.0, 0.3);
}

TEST(CompactOps, PsiHatSpectralBounds) {
  for (int m : {4, 5, 6, 8, 16, 31, 64, 128, 256}) {
    const Eigen::MatrixXd a(ops::psi_hat_matrix(m));
    const Eigen::MatrixXd sym = 0.5 * (a + a.transpose());
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sym, Eigen::EigenvaluesOnly);
    EXPECT_GE(es.eigenvalues().minCoeff(), 0.75 - 1e-10) << "M = " << m;
    EXPECT_LE(es.eigenvalues().maxCoeff(), 4.0 / 3.0 + 1e-10) << "M = " << m;
  }
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    const Grid1D g(1.0, 4 + trial % 40);
    const auto p = random_field(g, Stagger1D::Cell, rng);
    const double r = inner(ops::psi_hat(p), p) / inner(p, p);
    EXPECT_GE(r, 0.75 - 1e-10);
    EXPECT_LE(r, 4.0 / 3.0 + 1e-10);
  }
}

TEST(CompactOps, FaceOperatorBounds) {
  for (int m : {4, 7, 16, 64, 256}) {
    const Eigen::MatrixXd a(ops::psi_face_matrix(m));
    EXPECT_LE((a - a.transpose()).cwiseAbs().maxCoeff(), 0.0);
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a, Eigen::EigenvaluesOnly);
    EXPECT_GE(es.eigenvalues().minCoeff(), 5.0 / 6.0 - 1e-12);
    EXPECT_LE(es.eigenvalues().maxCoeff(), 1.0 + 1e-12);
  }
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    const Grid1D g(1.0, 4 + trial % 30);
    const auto u = with_zero_boundary(random_field(g, Stagger1D::Face, rng));
    const double r = inner(ops::psi_faces(u), u) / inner(u, u);
    EXPECT_GE(r, 5.0 / 6.0 - 1e-12);
    EXPECT_LE(r, 1.0 + 1e-12);
  }
}

TEST(CompactOps, TensorBound) {
  // nx * ny <= 256 keeps the dense eigenproblem small.
  for (auto [nx, ny] : {std::pair{4, 4}, {3, 7}, {8, 8}, {16, 16}, {5, 12}}) {
    const Eigen::MatrixXd px(ops::psi_periodic_matrix(nx));
    const Eigen::MatrixXd py(ops::psi_periodic_matrix(ny));
    Eigen::MatrixXd k(nx * ny, nx * ny);
    for (int i = 0; i < nx; ++i) {
      for (int j = 0; j < nx; ++j) k.block(i * ny, j * ny, ny, ny) = px(i, j) * py;
    }
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(k, Eigen::EigenvaluesOnly);
    EXPECT_GE(es.eigenvalues().minCoeff(), 49.0 / 72.0);
  }
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const Grid2D g(1.0, 2.0, 6, 10);
  for (int trial = 0; trial < 100; ++trial) {
    Field2D p(g, Stagger2D::Cell);
    for (std::size_t q = 0; q < p.size(); ++q) p[q] = u(rng);
    const auto w = ops::compose_xy(ops::psi_x, ops::psi_y, p);
    EXPECT_GE(inner(w, p), 49.0 / 72.0 * inner(p, p));
  }
}

TEST(CompactOps, TensorOperatorsCommute) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const Grid2D g(1.0, 1.0, 7, 5);
  for (auto s : {Stagger2D::Cell, Stagger2D::FaceX, Stagger2D::FaceY}) {
    Field2D f(g, s);
    for (std::size_t q = 0; q < f.size(); ++q) f[q] = u(rng);
    const auto xy = ops::psi_y(ops::psi_x(f));
    const auto yx = ops::psi_x(ops::psi_y(f));
    const auto comp = ops::compose_xy(ops::psi_x, ops::psi_y, f);
    for (std::size_t q = 0; q < f.size(); ++q) {
      EXPECT_NEAR(xy[q], yx[q], 1e-14);
      EXPECT_EQ(comp[q], xy[q]);
    }
  }
  const auto id = [](const Field2D& x) { return x; };
  Field2D f(g, Stagger2D::Cell);
  for (std::size_t q = 0; q < f.size(); ++q) f[q] = u(rng);
  const auto same = ops::compose_xy(id, id, f);
  for (std::size_t q = 0; q < f.size(); ++q) EXPECT_EQ(same[q], f[q]);
  const auto c = ops::compose_xy(ops::psi_x, ops::psi_y,
                                 Field2D::sample(g, Stagger2D::Cell, [](double, double) { return 4.0; }));
  for (std::size_t q = 0; q < c.size(); ++q) EXPECT_NEAR(c[q], 4.0, 1e-14);
}

TEST(CompactOps, TwoDimensionalDifferences) {
  const Grid2D g(1.0, 1.0, 8, 6);
  const auto px = Field2D::sample(g, Stagger2D::FaceX, [](double x, double) { return std::sin(2 * kPi * x); });
  const auto dx = ops::delta_x(px);
  EXPECT_EQ(dx.stagger(), Stagger2D::Cell);
  for (int i = 0; i < 8; ++i) {
    const double expect = (std::sin(2 * kPi * g.xf(i + 1)) - std::sin(2 * kPi * g.xf(i))) / g.hx();
    EXPECT_NEAR(dx(i, 2), expect, 1e-12);
  }
  EXPECT_EQ(ops::delta_x(dx).stagger(), Stagger2D::FaceX);
  EXPECT_EQ(ops::delta_y(Field2D(g, Stagger2D::Cell)).stagger(), Stagger2D::FaceY);
  EXPECT_THROW((void)ops::delta_x(Field2D(g, Stagger2D::FaceY)), ShapeError);
  EXPECT_THROW((void)ops::delta_y(Field2D(g, Stagger2D::FaceX)), ShapeError);
  // delta_y of y-independent data vanishes.
  const auto dy = ops::delta_y(Field2D::sample(g, Stagger2D::Cell, [](double x, double) { return x * x; }));
  for (std::size_t q = 0; q < dy.size(); ++q) EXPECT_EQ(dy[q], 0.0);
}
