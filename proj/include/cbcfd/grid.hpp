#pragma once

#include <algorithm>

namespace cbcfd {

/// Uniform block-centered partition of (0, L) into M cells.
///
/// Indexing is zero based: cell i has center (i + 1/2) h for i = 0..M-1 and
/// face i sits at i h for i = 0..M, so face i is the left face of cell i.
class Grid1D {
 public:
  Grid1D(double length, int cells);

  [[nodiscard]] double length() const noexcept { return length_; }
  [[nodiscard]] int cells() const noexcept { return cells_; }
  [[nodiscard]] int faces() const noexcept { return cells_ + 1; }
  [[nodiscard]] double h() const noexcept { return h_; }

  [[nodiscard]] double center(int i) const noexcept { return (i + 0.5) * h_; }
  [[nodiscard]] double face(int i) const noexcept { return i * h_; }

  friend bool operator==(const Grid1D&, const Grid1D&) = default;

 private:
  double length_;
  int cells_;
  double h_;
};

/// Uniform periodic partition of (0, L1) x (0, L2) into nx x ny cells.
///
/// x-face (i, j) sits at (i h, y_j) and is the left face of cell (i, j);
/// y-face (i, j) sits at (x_i, j k) and is the bottom face of cell (i, j).
/// Under periodicity each orientation has exactly nx * ny distinct faces.
class Grid2D {
 public:
  Grid2D(double lx, double ly, int nx, int ny);

  [[nodiscard]] double lx() const noexcept { return lx_; }
  [[nodiscard]] double ly() const noexcept { return ly_; }
  [[nodiscard]] int nx() const noexcept { return nx_; }
  [[nodiscard]] int ny() const noexcept { return ny_; }
  [[nodiscard]] double hx() const noexcept { return hx_; }
  [[nodiscard]] double hy() const noexcept { return hy_; }
  [[nodiscard]] double h_max() const noexcept { return std::max(hx_, hy_); }
  [[nodiscard]] int size() const noexcept { return nx_ * ny_; }

  [[nodiscard]] double xc(int i) const noexcept { return (i + 0.5) * hx_; }
  [[nodiscard]] double yc(int j) const noexcept { return (j + 0.5) * hy_; }
  [[nodiscard]] double xf(int i) const noexcept { return i * hx_; }
  [[nodiscard]] double yf(int j) const noexcept { return j * hy_; }

  /// Row-major flat index with j fastest; both indices wrap periodically.
  [[nodiscard]] int index(int i, int j) const noexcept {
    return wrap(i, nx_) * ny_ + wrap(j, ny_);
  }

  friend bool operator==(const Grid2D&, const Grid2D&) = default;

 private:
  static int wrap(int i, int n) noexcept { return ((i % n) + n) % n; }

  double lx_, ly_;
  int nx_, ny_;
  double hx_, hy_;
};

}  // namespace cbcfd
