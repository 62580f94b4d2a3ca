#include "cbcfd/grid.hpp"

#include <string>

#include "cbcfd/errors.hpp"

namespace cbcfd {

Grid1D::Grid1D(double length, int cells) : length_(length), cells_(cells), h_(length / cells) {
  if (!(length > 0.0)) throw ContractError("Grid1D: length must be positive");
  // The one-sided compact closure reaches four cells in from each boundary.
  if (cells < 4) throw ContractError("Grid1D: need at least 4 cells, got " + std::to_string(cells));
}

Grid2D::Grid2D(double lx, double ly, int nx, int ny)
    : lx_(lx), ly_(ly), nx_(nx), ny_(ny), hx_(lx / nx), hy_(ly / ny) {
  if (!(lx > 0.0) || !(ly > 0.0)) throw ContractError("Grid2D: side lengths must be positive");
  if (nx < 4 || ny < 4) {
    throw ContractError("Grid2D: need at least 4 cells per axis, got " + std::to_string(nx) +
                        "x" + std::to_string(ny));
  }
}

}  // namespace cbcfd
