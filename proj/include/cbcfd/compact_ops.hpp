#pragma once

#include <array>
#include <span>

#include <Eigen/SparseCore>

#include "cbcfd/fields.hpp"

/// Difference and compact interpolation operators on block-centered grids.
///
/// Interior interpolation is psi = I + (h^2/24) delta^2, i.e. the stencil
/// (1, 22, 1)/24. Near no-flux boundaries two cell closures exist:
///   psi_tilde: Simpson-type row (g_face + 4 g_cell + g_face)/6, which needs
///              the data at the boundary face;
///   psi_hat:   one-sided row (26 g1 - 5 g2 + 4 g3 - g4)/24 using cells only.
/// Under periodicity both collapse to psi.
///
/// Each operator exists as a matrix-free kernel and as stencil rows used for
/// implicit assembly. The two are written independently.
namespace cbcfd::ops {

enum class OperatorVariant { NoFlux1D, Periodic1D, Periodic2DAxisX, Periodic2DAxisY };

/// Fewest points along the operator axis: 4 for the no-flux closure, 3 for
/// periodic stencils.
constexpr int min_points(OperatorVariant v) noexcept {
  return v == OperatorVariant::NoFlux1D ? 4 : 3;
}

/// Compact is the fourth-order set; Classical replaces every psi by identity.
enum class StencilSet { Compact, Classical };

struct StencilEntry {
  int col;
  double weight;
};

/// At most four nonzeros: the widest row is the one-sided psi_hat closure.
class StencilRow {
 public:
  void add(int col, double weight) { entries_[size_++] = {col, weight}; }
  [[nodiscard]] int size() const noexcept { return size_; }
  [[nodiscard]] const StencilEntry* begin() const noexcept { return entries_.data(); }
  [[nodiscard]] const StencilEntry* end() const noexcept { return entries_.data() + size_; }

 private:
  std::array<StencilEntry, 4> entries_{};
  int size_ = 0;
};

// ---- stencil rows ---------------------------------------------------------

/// Row i (0-based cell) of psi_hat on M cells with no-flux closure.
StencilRow psi_hat_row(int i, int cells, StencilSet set = StencilSet::Compact);

/// Row of psi at interior face f (1..M-1). Columns are face indices 0..M;
/// the caller decides what boundary faces 0 and M contribute.
StencilRow psi_face_row(int f, StencilSet set = StencilSet::Compact);

/// Row i of the periodic psi on n points (columns wrapped modulo n).
StencilRow psi_periodic_row(int i, int n, StencilSet set = StencilSet::Compact);

// ---- 1D no-flux kernels ---------------------------------------------------

/// (w_{i+1} - w_i)/h from faces to cells.
Field1D delta_to_cells(const Field1D& faces);

/// (q_i - q_{i-1})/h from cells to interior faces; boundary faces are 0.
Field1D delta_to_faces(const Field1D& cells);

/// Compact psi on face data. Interior faces use (1, 22, 1)/24 including the
/// supplied boundary-face values; boundary faces are passed through.
Field1D psi_faces(const Field1D& faces);

/// psi_tilde on cell data. The first and last rows are Simpson rules over
/// the boundary cells and read `face_values` at faces 0, 1, M-1 and M; other
/// face entries are ignored (NaN is fine). A non-finite required face value
/// throws ContractError.
Field1D psi_tilde(const Field1D& cells, const Field1D& face_values);

/// psi_hat on cell data with the one-sided four-cell closure. Needs M >= 4.
Field1D psi_hat(const Field1D& cells);

// ---- periodic kernels on contiguous lines ---------------------------------

/// Periodic (1, 22, 1)/24 along a line of n >= 3 points.
void psi_periodic(std::span<const double> in, std::span<double> out);

/// Periodic face-to-cell difference: out_i = (in_{i+1} - in_i)/h.
void delta_periodic_to_cells(std::span<const double> faces, double h, std::span<double> cells);

/// Periodic cell-to-face difference: out_i = (in_i - in_{i-1})/h.
void delta_periodic_to_faces(std::span<const double> cells, double h, std::span<double> faces);

// ---- 2D periodic kernels --------------------------------------------------

/// psi along x (resp. y) at whatever location the field has.
Field2D psi_x(const Field2D& g);
Field2D psi_y(const Field2D& g);

/// delta_x maps FaceX -> Cell and Cell -> FaceX; delta_y likewise for y.
/// Any other location throws ShapeError.
Field2D delta_x(const Field2D& g);
Field2D delta_y(const Field2D& g);

/// Tensor composition: applies `along_x` then `along_y`.
template <class OpX, class OpY>
Field2D compose_xy(OpX&& along_x, OpY&& along_y, const Field2D& g) {
  return along_y(along_x(g));
}

// ---- sparse materializations ----------------------------------------------

using SparseMatrix = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// M x M matrix of psi_hat.
SparseMatrix psi_hat_matrix(int cells, StencilSet set = StencilSet::Compact);

/// (M-1) x (M-1) matrix of psi on interior faces with zero boundary-face data.
SparseMatrix psi_face_matrix(int cells, StencilSet set = StencilSet::Compact);

/// n x n periodic psi.
SparseMatrix psi_periodic_matrix(int n, StencilSet set = StencilSet::Compact);

/// M x (M-1): interior faces to cells, boundary faces taken as zero.
SparseMatrix delta_to_cells_matrix(int cells, double h);

/// (M-1) x M: cells to interior faces.
SparseMatrix delta_to_faces_matrix(int cells, double h);

}  // namespace cbcfd::ops
