#pragma once

#include <optional>
#include <vector>

#include "cbcfd/compact_ops.hpp"
#include "cbcfd/fields.hpp"
#include "cbcfd/linsolve.hpp"
#include "cbcfd/memory.hpp"
#include "cbcfd/problem.hpp"

namespace cbcfd {

/// Discrete L2 errors at the final time.
struct ErrorReport {
  double pressure = 0.0;
  double velocity = 0.0;
};

struct StepperState1D {
  int n = 0;
  double dt = 0.0;
  Field1D pressure;  // P^n at cell centers
  Field1D utilde;    // U~^n at faces, boundary faces exactly 0
  HistoryState1D history;

  [[nodiscard]] double time() const noexcept { return n * dt; }
};

/// The implicit system for one Crank-Nicolson step.
///
/// Unknowns interleave pressure and interior-face velocity,
/// P_0, U~_1, P_1, U~_2, ..., U~_{M-1}, P_{M-1}, which keeps the matrix
/// banded with bandwidth 6 on either side (set by the psi_hat closure rows).
struct LinearSystem1D {
  BandedMatrix matrix;
  std::vector<double> rhs;
};

constexpr int pressure_unknown(int cell) noexcept { return 2 * cell; }
constexpr int velocity_unknown(int face) noexcept { return 2 * face - 1; }

/// U~^0 from the discrete constitutive relation psi(U~/a) = -delta P^0 with
/// zero boundary-face velocity. Classical stencils drop psi.
Field1D init_utilde(const Field1D& p0, const Fn1& a,
                    ops::StencilSet set = ops::StencilSet::Compact);

/// Max-abs residuals of the mass and constitutive equations for the step
/// `before` -> `after`, evaluated with the matrix-free operator kernels and
/// the total flux rebuilt from the two history states.
struct SchemeResidual {
  double mass = 0.0;
  double constitutive = 0.0;
};

/// Crank-Nicolson block-centered stepper for the 1D problem with no-flux
/// boundaries. With StencilSet::Compact this is the fourth-order compact
/// scheme; StencilSet::Classical gives the second-order baseline on the same
/// assembly path.
class Stepper1D {
 public:
  Stepper1D(ProblemSpec1D spec, int cells, double dt,
            ops::StencilSet set = ops::StencilSet::Compact, bool keep_history_samples = false);

  [[nodiscard]] const StepperState1D& state() const noexcept { return state_; }
  [[nodiscard]] const ProblemSpec1D& spec() const noexcept { return spec_; }
  [[nodiscard]] const Grid1D& grid() const noexcept { return grid_; }
  [[nodiscard]] ops::StencilSet stencils() const noexcept { return set_; }
  [[nodiscard]] int total_steps() const noexcept { return total_steps_; }

  [[nodiscard]] LinearSystem1D assemble() const;

  /// Solves the assembled system and advances P, U~ and the history.
  void step();

  /// Advances to level n + 1 from an externally computed solution vector
  /// (same layout as the assembled unknowns).
  void accept(std::span<const double> solution);

  /// U^n = U~^n + dt S^n.
  [[nodiscard]] Field1D total_flux() const;

  /// psi_hat P for the current level (identity for classical stencils).
  [[nodiscard]] Field1D weighted_pressure() const;

  /// psi_tilde f at t_{n+1/2} for the current level.
  [[nodiscard]] Field1D weighted_forcing() const;

  [[nodiscard]] std::optional<ErrorReport> errors() const;

 private:
  ProblemSpec1D spec_;
  Grid1D grid_;
  ops::StencilSet set_;
  int total_steps_;
  StepperState1D state_;
  Field1D a_faces_;
};

SchemeResidual scheme_residual(const Stepper1D& before, const Stepper1D& after);

struct RunResult1D {
  StepperState1D final_state;
  std::optional<ErrorReport> errors;
};

/// Runs to T = spec.final_time. T / dt must be an integer.
RunResult1D run(const ProblemSpec1D& spec, int cells, double dt,
                ops::StencilSet set = ops::StencilSet::Compact);

}  // namespace cbcfd
