#pragma once

#include <optional>
#include <vector>

#include "cbcfd/compact_ops.hpp"
#include "cbcfd/fields.hpp"
#include "cbcfd/linsolve.hpp"
#include "cbcfd/memory.hpp"
#include "cbcfd/problem.hpp"
#include "cbcfd/scheme1d.hpp"

namespace cbcfd {

struct StepperState2D {
  int n = 0;
  double dt = 0.0;
  Field2D pressure;   // cells
  Field2D utilde_x;   // x-faces
  Field2D utilde_y;   // y-faces
  HistoryState2D history_x;
  HistoryState2D history_y;

  [[nodiscard]] double time() const noexcept { return n * dt; }
};

/// Unknown layout: P block, then U~x block, then U~y block, each nx * ny
/// entries in the grid's row-major order.
struct LinearSystem2D {
  SparseMatrix matrix;
  std::vector<double> rhs;
};

/// (U~x^0, U~y^0) from psi_x(U~x/a^x) = -delta_x P^0 and the y analogue,
/// solved line by line as cyclic tridiagonal systems.
std::pair<Field2D, Field2D> init_utilde_2d(const Field2D& p0, const Fn2& ax, const Fn2& ay,
                                           ops::StencilSet set = ops::StencilSet::Compact);

/// How the per-step matrix is factorized when b depends on time.
///
/// EveryStep factorizes each assembled matrix. ReuseWithRefinement keeps the
/// last factorization and iteratively refines against the current matrix
/// until the normwise backward error meets `refinement_tolerance`,
/// refactorizing whenever that takes more than `max_refinement_steps`.
/// Time-independent b always factorizes once.
enum class FactorizationPolicy { EveryStep, ReuseWithRefinement };

struct Stepper2DOptions {
  SparseSolverOptions solver;
  FactorizationPolicy policy = FactorizationPolicy::ReuseWithRefinement;
  double refinement_tolerance = 1e-14;
  int max_refinement_steps = 4;
  bool keep_history_samples = false;
};

/// Periodic Crank-Nicolson block-centered stepper in 2D.
///
/// Mass rows:  psi_x psi_y (P^{n+1} - P^n)/dt + psi_y delta_x U^{x,n+1/2}
///             + psi_x delta_y U^{y,n+1/2} = psi_x psi_y f^{n+1/2}
/// Face rows:  delta_x P^{n+1} = -psi_x (U~x/a^x)^{n+1}, likewise in y.
/// The total flux is expanded exactly as in 1D,
/// U^{s,n+1/2} = (1/2 + dt b^s/(4 a^s)) (U~^{s,n} + U~^{s,n+1}) + dt S^{s,n}.
class Stepper2D {
 public:
  Stepper2D(ProblemSpec2D spec, int nx, int ny, double dt,
            ops::StencilSet set = ops::StencilSet::Compact, Stepper2DOptions options = {});

  [[nodiscard]] const StepperState2D& state() const noexcept { return state_; }
  [[nodiscard]] const ProblemSpec2D& spec() const noexcept { return spec_; }
  [[nodiscard]] const Grid2D& grid() const noexcept { return grid_; }
  [[nodiscard]] ops::StencilSet stencils() const noexcept { return set_; }
  [[nodiscard]] int total_steps() const noexcept { return total_steps_; }

  [[nodiscard]] LinearSystem2D assemble() const;
  void step();
  void accept(std::span<const double> solution);

  [[nodiscard]] Field2D total_flux_x() const;
  [[nodiscard]] Field2D total_flux_y() const;

  /// psi_x psi_y P^n.
  [[nodiscard]] Field2D weighted_pressure() const;
  /// psi_x psi_y f at t_{n+1/2}.
  [[nodiscard]] Field2D weighted_forcing() const;

  [[nodiscard]] std::optional<ErrorReport> errors() const;

  /// Number of numeric factorizations performed so far.
  [[nodiscard]] int factorizations() const noexcept { return factorizations_; }

 private:
  [[nodiscard]] Field2D apply_psi_x(const Field2D& g) const;
  [[nodiscard]] Field2D apply_psi_y(const Field2D& g) const;

  ProblemSpec2D spec_;
  Grid2D grid_;
  ops::StencilSet set_;
  Stepper2DOptions options_;
  int total_steps_;
  StepperState2D state_;
  Field2D ax_faces_;
  Field2D ay_faces_;
  SparseSolver solver_;
  int factorizations_ = 0;
};

/// Matrix-free residuals: `mass` for the cell equation, `constitutive` for
/// the larger of the x- and y-face equations.
SchemeResidual scheme_residual(const Stepper2D& before, const Stepper2D& after);

struct RunResult2D {
  StepperState2D final_state;
  std::optional<ErrorReport> errors;
};

RunResult2D run_2d(const ProblemSpec2D& spec, int nx, int ny, double dt,
                   ops::StencilSet set = ops::StencilSet::Compact);

}  // namespace cbcfd
