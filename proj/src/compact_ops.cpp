#include "cbcfd/compact_ops.hpp"

#include <cmath>
#include <string>
#include <vector>

#include "cbcfd/errors.hpp"

namespace cbcfd::ops {

namespace {

constexpr double kSide = 1.0 / 24.0;
constexpr double kMid = 22.0 / 24.0;

void require_points(int n, OperatorVariant v, const char* who) {
  if (n < min_points(v)) {
    throw ContractError(std::string(who) + ": need at least " + std::to_string(min_points(v)) +
                        " points, got " + std::to_string(n));
  }
}

void require_stagger(const Field1D& f, Stagger1D s, const char* who) {
  if (f.stagger() != s) throw ShapeError(std::string(who) + ": wrong staggered location");
}

}  // namespace

StencilRow psi_hat_row(int i, int cells, StencilSet set) {
  require_points(cells, OperatorVariant::NoFlux1D, "psi_hat_row");
  StencilRow row;
  if (set == StencilSet::Classical) {
    row.add(i, 1.0);
    return row;
  }
  const int last = cells - 1;
  if (i == 0 || i == last) {
    const int dir = i == 0 ? 1 : -1;
    row.add(i, 26.0 / 24.0);
    row.add(i + dir, -5.0 / 24.0);
    row.add(i + 2 * dir, 4.0 / 24.0);
    row.add(i + 3 * dir, -1.0 / 24.0);
    return row;
  }
  row.add(i - 1, kSide);
  row.add(i, kMid);
  row.add(i + 1, kSide);
  return row;
}

StencilRow psi_face_row(int f, StencilSet set) {
  StencilRow row;
  if (set == StencilSet::Classical) {
    row.add(f, 1.0);
    return row;
  }
  row.add(f - 1, kSide);
  row.add(f, kMid);
  row.add(f + 1, kSide);
  return row;
}

StencilRow psi_periodic_row(int i, int n, StencilSet set) {
  require_points(n, OperatorVariant::Periodic1D, "psi_periodic_row");
  StencilRow row;
  if (set == StencilSet::Classical) {
    row.add(i, 1.0);
    return row;
  }
  row.add((i + n - 1) % n, kSide);
  row.add(i, kMid);
  row.add((i + 1) % n, kSide);
  return row;
}

Field1D delta_to_cells(const Field1D& faces) {
  require_stagger(faces, Stagger1D::Face, "delta_to_cells");
  Field1D out = Field1D::cells(faces.grid());
  const double h = faces.grid().h();
  for (int i = 0; i < faces.grid().cells(); ++i) out[i] = (faces[i + 1] - faces[i]) / h;
  return out;
}

Field1D delta_to_faces(const Field1D& cells) {
  require_stagger(cells, Stagger1D::Cell, "delta_to_faces");
  Field1D out = Field1D::faces(cells.grid());
  const double h = cells.grid().h();
  for (int f = 1; f < cells.grid().cells(); ++f) out[f] = (cells[f] - cells[f - 1]) / h;
  return out;
}

Field1D psi_faces(const Field1D& g) {
  require_stagger(g, Stagger1D::Face, "psi_faces");
  Field1D out = g;
  for (int f = 1; f < g.grid().cells(); ++f) out[f] = (g[f - 1] + 22.0 * g[f] + g[f + 1]) / 24.0;
  return out;
}

Field1D psi_tilde(const Field1D& g, const Field1D& face_values) {
  require_stagger(g, Stagger1D::Cell, "psi_tilde");
  require_stagger(face_values, Stagger1D::Face, "psi_tilde");
  if (!(g.grid() == face_values.grid())) throw ShapeError("psi_tilde: grid mismatch");
  const int m = g.grid().cells();
  for (int f : {0, 1, m - 1, m}) {
    if (!std::isfinite(face_values[f])) {
      throw ContractError("psi_tilde: missing face value at face " + std::to_string(f));
    }
  }
  Field1D out = Field1D::cells(g.grid());
  for (int i = 1; i < m - 1; ++i) out[i] = (g[i - 1] + 22.0 * g[i] + g[i + 1]) / 24.0;
  out[0] = (face_values[0] + 4.0 * g[0] + face_values[1]) / 6.0;
  out[m - 1] = (face_values[m - 1] + 4.0 * g[m - 1] + face_values[m]) / 6.0;
  return out;
}

Field1D psi_hat(const Field1D& g) {
  require_stagger(g, Stagger1D::Cell, "psi_hat");
  const int m = g.grid().cells();
  require_points(m, OperatorVariant::NoFlux1D, "psi_hat");
  Field1D out = Field1D::cells(g.grid());
  for (int i = 1; i < m - 1; ++i) out[i] = (g[i - 1] + 22.0 * g[i] + g[i + 1]) / 24.0;
  out[0] = (26.0 * g[0] - 5.0 * g[1] + 4.0 * g[2] - g[3]) / 24.0;
  out[m - 1] = (26.0 * g[m - 1] - 5.0 * g[m - 2] + 4.0 * g[m - 3] - g[m - 4]) / 24.0;
  return out;
}

void psi_periodic(std::span<const double> in, std::span<double> out) {
  const auto n = static_cast<int>(in.size());
  require_points(n, OperatorVariant::Periodic1D, "psi_periodic");
  if (out.size() != in.size()) throw ShapeError("psi_periodic: output length mismatch");
  for (int i = 0; i < n; ++i) {
    const double left = in[(i + n - 1) % n];
    const double right = in[(i + 1) % n];
    out[i] = (left + 22.0 * in[i] + right) / 24.0;
  }
}

void delta_periodic_to_cells(std::span<const double> faces, double h, std::span<double> cells) {
  const auto n = static_cast<int>(faces.size());
  if (cells.size() != faces.size()) throw ShapeError("delta_periodic_to_cells: length mismatch");
  for (int i = 0; i < n; ++i) cells[i] = (faces[(i + 1) % n] - faces[i]) / h;
}

void delta_periodic_to_faces(std::span<const double> cells, double h, std::span<double> faces) {
  const auto n = static_cast<int>(cells.size());
  if (cells.size() != faces.size()) throw ShapeError("delta_periodic_to_faces: length mismatch");
  for (int i = 0; i < n; ++i) faces[i] = (cells[i] - cells[(i + n - 1) % n]) / h;
}

namespace {

// Gathers line `l` along `axis` (0 = x, 1 = y) into `buf`.
void gather(const Field2D& g, int axis, int l, std::vector<double>& buf) {
  const Grid2D& grid = g.grid();
  const int n = axis == 0 ? grid.nx() : grid.ny();
  buf.resize(n);
  for (int t = 0; t < n; ++t) buf[t] = axis == 0 ? g(t, l) : g(l, t);
}

void scatter(Field2D& g, int axis, int l, const std::vector<double>& buf) {
  for (int t = 0; t < static_cast<int>(buf.size()); ++t) {
    (axis == 0 ? g(t, l) : g(l, t)) = buf[t];
  }
}

template <class LineOp>
Field2D along_axis(const Field2D& g, int axis, Stagger2D out_stagger, LineOp&& op) {
  Field2D out(g.grid(), out_stagger);
  const int lines = axis == 0 ? g.grid().ny() : g.grid().nx();
  std::vector<double> in_line;
  std::vector<double> out_line;
  for (int l = 0; l < lines; ++l) {
    gather(g, axis, l, in_line);
    out_line.assign(in_line.size(), 0.0);
    op(in_line, out_line);
    scatter(out, axis, l, out_line);
  }
  return out;
}

}  // namespace

Field2D psi_x(const Field2D& g) {
  return along_axis(g, 0, g.stagger(), [](const auto& in, auto& out) { psi_periodic(in, out); });
}

Field2D psi_y(const Field2D& g) {
  return along_axis(g, 1, g.stagger(), [](const auto& in, auto& out) { psi_periodic(in, out); });
}

Field2D delta_x(const Field2D& g) {
  const double h = g.grid().hx();
  if (g.stagger() == Stagger2D::FaceX) {
    return along_axis(g, 0, Stagger2D::Cell,
                      [h](const auto& in, auto& out) { delta_periodic_to_cells(in, h, out); });
  }
  if (g.stagger() == Stagger2D::Cell) {
    return along_axis(g, 0, Stagger2D::FaceX,
                      [h](const auto& in, auto& out) { delta_periodic_to_faces(in, h, out); });
  }
  throw ShapeError("delta_x: y-face data has no x difference on this grid");
}

Field2D delta_y(const Field2D& g) {
  const double k = g.grid().hy();
  if (g.stagger() == Stagger2D::FaceY) {
    return along_axis(g, 1, Stagger2D::Cell,
                      [k](const auto& in, auto& out) { delta_periodic_to_cells(in, k, out); });
  }
  if (g.stagger() == Stagger2D::Cell) {
    return along_axis(g, 1, Stagger2D::FaceY,
                      [k](const auto& in, auto& out) { delta_periodic_to_faces(in, k, out); });
  }
  throw ShapeError("delta_y: x-face data has no y difference on this grid");
}

namespace {

using Triplet = Eigen::Triplet<double>;

SparseMatrix from_triplets(int rows, int cols, const std::vector<Triplet>& t) {
  SparseMatrix m(rows, cols);
  m.setFromTriplets(t.begin(), t.end());
  return m;
}

}  // namespace

SparseMatrix psi_hat_matrix(int cells, StencilSet set) {
  std::vector<Triplet> t;
  for (int i = 0; i < cells; ++i) {
    for (const auto& e : psi_hat_row(i, cells, set)) t.emplace_back(i, e.col, e.weight);
  }
  return from_triplets(cells, cells, t);
}

SparseMatrix psi_face_matrix(int cells, StencilSet set) {
  std::vector<Triplet> t;
  for (int f = 1; f < cells; ++f) {
    for (const auto& e : psi_face_row(f, set)) {
      if (e.col >= 1 && e.col <= cells - 1) t.emplace_back(f - 1, e.col - 1, e.weight);
    }
  }
  return from_triplets(cells - 1, cells - 1, t);
}

SparseMatrix psi_periodic_matrix(int n, StencilSet set) {
  std::vector<Triplet> t;
  for (int i = 0; i < n; ++i) {
    for (const auto& e : psi_periodic_row(i, n, set)) t.emplace_back(i, e.col, e.weight);
  }
  return from_triplets(n, n, t);
}

SparseMatrix delta_to_cells_matrix(int cells, double h) {
  std::vector<Triplet> t;
  for (int i = 0; i < cells; ++i) {
    // Interior face f maps to column f - 1.
    if (i + 1 <= cells - 1) t.emplace_back(i, i, 1.0 / h);
    if (i >= 1) t.emplace_back(i, i - 1, -1.0 / h);
  }
  return from_triplets(cells, cells - 1, t);
}

SparseMatrix delta_to_faces_matrix(int cells, double h) {
  std::vector<Triplet> t;
  for (int f = 1; f < cells; ++f) {
    t.emplace_back(f - 1, f, 1.0 / h);
    t.emplace_back(f - 1, f - 1, -1.0 / h);
  }
  return from_triplets(cells - 1, cells, t);
}

}  // namespace cbcfd::ops
