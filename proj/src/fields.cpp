#include "cbcfd/fields.hpp"

#include <algorithm>
#include <cmath>

#include "cbcfd/errors.hpp"

namespace cbcfd {

namespace {

std::size_t expected_size(const Grid1D& g, Stagger1D s) {
  return static_cast<std::size_t>(s == Stagger1D::Cell ? g.cells() : g.faces());
}

bool finite(std::span<const double> v) {
  return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

Field1D::Field1D(Grid1D grid, Stagger1D stagger)
    : grid_(grid), stagger_(stagger), values_(expected_size(grid, stagger), 0.0) {}

Field1D::Field1D(Grid1D grid, Stagger1D stagger, std::vector<double> values)
    : grid_(grid), stagger_(stagger), values_(std::move(values)) {
  if (values_.size() != expected_size(grid_, stagger_)) {
    throw ShapeError("Field1D: value count does not match grid");
  }
}

Field1D Field1D::sample(const Grid1D& g, Stagger1D s, const std::function<double(double)>& fn) {
  Field1D out(g, s);
  for (int i = 0; i < static_cast<int>(out.size()); ++i) out[i] = fn(out.coord(i));
  return out;
}

bool Field1D::all_finite() const noexcept { return finite(values_); }

Field2D::Field2D(Grid2D grid, Stagger2D stagger)
    : grid_(grid), stagger_(stagger), values_(static_cast<std::size_t>(grid.size()), 0.0) {}

Field2D::Field2D(Grid2D grid, Stagger2D stagger, std::vector<double> values)
    : grid_(grid), stagger_(stagger), values_(std::move(values)) {
  if (values_.size() != static_cast<std::size_t>(grid_.size())) {
    throw ShapeError("Field2D: value count does not match grid");
  }
}

Field2D Field2D::sample(const Grid2D& g, Stagger2D s,
                        const std::function<double(double, double)>& fn) {
  Field2D out(g, s);
  for (int i = 0; i < g.nx(); ++i) {
    for (int j = 0; j < g.ny(); ++j) out(i, j) = fn(out.x(i), out.y(j));
  }
  return out;
}

bool Field2D::all_finite() const noexcept { return finite(values_); }

double inner(const Field1D& f, const Field1D& g) {
  if (!(f.grid() == g.grid()) || f.stagger() != g.stagger()) {
    throw ShapeError("inner: fields live on different grids or locations");
  }
  const auto n = static_cast<int>(f.size());
  const int lo = f.stagger() == Stagger1D::Cell ? 0 : 1;
  const int hi = f.stagger() == Stagger1D::Cell ? n : n - 1;
  double sum = 0.0;
  for (int i = lo; i < hi; ++i) sum += f[i] * g[i];
  return f.grid().h() * sum;
}

double inner(const Field2D& f, const Field2D& g) {
  if (!(f.grid() == g.grid()) || f.stagger() != g.stagger()) {
    throw ShapeError("inner: fields live on different grids or locations");
  }
  double sum = 0.0;
  for (std::size_t k = 0; k < f.size(); ++k) sum += f[k] * g[k];
  return f.grid().hx() * f.grid().hy() * sum;
}

double norm(const Field1D& f) { return std::sqrt(inner(f, f)); }
double norm(const Field2D& f) { return std::sqrt(inner(f, f)); }

}  // namespace cbcfd
