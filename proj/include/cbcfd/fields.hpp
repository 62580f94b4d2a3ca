#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "cbcfd/grid.hpp"

namespace cbcfd {

enum class Stagger1D { Cell, Face };
enum class Stagger2D { Cell, FaceX, FaceY };

/// Values on a 1D staggered grid: M cell values or M + 1 face values.
///
/// Face fields keep both boundary faces explicitly. For velocity-type data
/// under no-flux boundaries those two entries are zero.
class Field1D {
 public:
  Field1D(Grid1D grid, Stagger1D stagger);
  Field1D(Grid1D grid, Stagger1D stagger, std::vector<double> values);

  static Field1D cells(const Grid1D& g) { return {g, Stagger1D::Cell}; }
  static Field1D faces(const Grid1D& g) { return {g, Stagger1D::Face}; }

  /// Samples `fn` at cell centers or faces.
  static Field1D sample(const Grid1D& g, Stagger1D s, const std::function<double(double)>& fn);

  [[nodiscard]] const Grid1D& grid() const noexcept { return grid_; }
  [[nodiscard]] Stagger1D stagger() const noexcept { return stagger_; }
  [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }

  double& operator[](std::size_t i) noexcept { return values_[i]; }
  double operator[](std::size_t i) const noexcept { return values_[i]; }

  [[nodiscard]] std::span<double> values() noexcept { return values_; }
  [[nodiscard]] std::span<const double> values() const noexcept { return values_; }

  /// Coordinate of entry i.
  [[nodiscard]] double coord(int i) const noexcept {
    return stagger_ == Stagger1D::Cell ? grid_.center(i) : grid_.face(i);
  }

  [[nodiscard]] bool all_finite() const noexcept;

 private:
  Grid1D grid_;
  Stagger1D stagger_;
  std::vector<double> values_;
};

/// Values on a periodic 2D grid, nx * ny entries in row-major order (j fastest).
class Field2D {
 public:
  Field2D(Grid2D grid, Stagger2D stagger);
  Field2D(Grid2D grid, Stagger2D stagger, std::vector<double> values);

  static Field2D sample(const Grid2D& g, Stagger2D s,
                        const std::function<double(double, double)>& fn);

  [[nodiscard]] const Grid2D& grid() const noexcept { return grid_; }
  [[nodiscard]] Stagger2D stagger() const noexcept { return stagger_; }
  [[nodiscard]] std::size_t size() const noexcept { return values_.size(); }

  double& operator()(int i, int j) noexcept { return values_[grid_.index(i, j)]; }
  double operator()(int i, int j) const noexcept { return values_[grid_.index(i, j)]; }
  double& operator[](std::size_t k) noexcept { return values_[k]; }
  double operator[](std::size_t k) const noexcept { return values_[k]; }

  [[nodiscard]] std::span<double> values() noexcept { return values_; }
  [[nodiscard]] std::span<const double> values() const noexcept { return values_; }

  [[nodiscard]] double x(int i) const noexcept {
    return stagger_ == Stagger2D::FaceX ? grid_.xf(i) : grid_.xc(i);
  }
  [[nodiscard]] double y(int j) const noexcept {
    return stagger_ == Stagger2D::FaceY ? grid_.yf(j) : grid_.yc(j);
  }

  [[nodiscard]] bool all_finite() const noexcept;

 private:
  Grid2D grid_;
  Stagger2D stagger_;
  std::vector<double> values_;
};

/// Discrete L2 inner products.
///
/// 1D cells: sum of h f_i g_i. 1D faces: sum of h f g over the interior
/// faces 1..M-1 only. 2D (any location): sum of h k f g over one period.
/// Throws ShapeError when grids or staggered locations differ.
double inner(const Field1D& f, const Field1D& g);
double inner(const Field2D& f, const Field2D& g);

double norm(const Field1D& f);
double norm(const Field2D& f);

}  // namespace cbcfd
