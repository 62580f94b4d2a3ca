#pragma once

#include <memory>
#include <optional>
#include <span>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SparseCore>

namespace cbcfd {

/// Square band matrix with kl sub- and ku super-diagonals.
///
/// Storage is the LAPACK general-band layout with kl extra rows reserved for
/// fill-in during factorization, so the matrix can be handed to dgbsv as is.
class BandedMatrix {
 public:
  BandedMatrix(int n, int kl, int ku);

  [[nodiscard]] int n() const noexcept { return n_; }
  [[nodiscard]] int kl() const noexcept { return kl_; }
  [[nodiscard]] int ku() const noexcept { return ku_; }

  [[nodiscard]] bool in_band(int i, int j) const noexcept {
    return i >= 0 && j >= 0 && i < n_ && j < n_ && j - i <= ku_ && i - j <= kl_;
  }

  /// Adds `v` to entry (i, j); throws ContractError outside the band.
  void add(int i, int j, double v);
  [[nodiscard]] double at(int i, int j) const noexcept;

  [[nodiscard]] std::vector<double> multiply(std::span<const double> x) const;
  [[nodiscard]] double norm_inf() const;
  [[nodiscard]] Eigen::MatrixXd to_dense() const;

  void set_zero();

 private:
  friend std::vector<double> banded_solve(const BandedMatrix&, std::span<const double>);
  [[nodiscard]] int ldab() const noexcept { return 2 * kl_ + ku_ + 1; }
  // Column-major; entry (i, j) lives at row kl + ku + i - j of column j.
  [[nodiscard]] std::size_t slot(int i, int j) const noexcept {
    return static_cast<std::size_t>(j) * ldab() + (kl_ + ku_ + i - j);
  }

  int n_, kl_, ku_;
  std::vector<double> ab_;
};

/// LU with partial pivoting inside the band. Throws SolverError with the
/// zero-based pivot index when the matrix is singular.
std::vector<double> banded_solve(const BandedMatrix& a, std::span<const double> rhs);

using SparseMatrix = Eigen::SparseMatrix<double>;

struct SparseSolverOptions {
  /// Fall back to ILUT-preconditioned BiCGSTAB when direct LU fails.
  bool iterative_fallback = false;
  double iterative_tolerance = 1e-12;
  int max_iterations = 2000;
};

/// Direct sparse LU that reuses the symbolic analysis while the sparsity
/// pattern stays the same.
class SparseSolver {
 public:
  explicit SparseSolver(SparseSolverOptions options = {});
  ~SparseSolver();
  SparseSolver(SparseSolver&&) noexcept;
  SparseSolver& operator=(SparseSolver&&) noexcept;

  /// Factorizes `a`. The pattern is analyzed on first use or when it changes.
  void factorize(const SparseMatrix& a);
  [[nodiscard]] bool factorized() const noexcept;
  [[nodiscard]] std::vector<double> solve(std::span<const double> rhs) const;

  /// Solves `a x = rhs` using the stored factorization of a nearby matrix as
  /// the preconditioner of an iterative refinement against `a`. Stops once the
  /// normwise backward error ||a x - rhs||_inf / (||a||_inf ||x||_inf +
  /// ||rhs||_inf) is at most `tolerance`; returns nullopt if that takes more
  /// than `max_steps` corrections.
  [[nodiscard]] std::optional<std::vector<double>> solve_refined(const SparseMatrix& a,
                                                                 std::span<const double> rhs,
                                                                 double tolerance,
                                                                 int max_steps) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// One-shot factorize and solve.
std::vector<double> sparse_solve(const SparseMatrix& a, std::span<const double> rhs,
                                 SparseSolverOptions options = {});

/// Reference Gaussian elimination with partial pivoting. Test oracle only:
/// O(n^3) and deliberately independent of the banded and sparse paths.
std::vector<double> dense_oracle_solve(Eigen::MatrixXd a, std::vector<double> rhs);

/// Thomas algorithm for sub/diag/super diagonals (sub[0] and super[n-1] unused).
std::vector<double> tridiagonal_solve(std::span<const double> sub, std::span<const double> diag,
                                      std::span<const double> super, std::span<const double> rhs);

/// Cyclic tridiagonal system: sub[0] couples row 0 to column n-1 and
/// super[n-1] couples row n-1 to column 0. Sherman-Morrison on top of Thomas.
std::vector<double> cyclic_tridiagonal_solve(std::span<const double> sub,
                                             std::span<const double> diag,
                                             std::span<const double> super,
                                             std::span<const double> rhs);

/// Normwise backward error ||A x - b||_inf / (||A||_inf ||x||_inf + ||b||_inf).
double backward_error(const SparseMatrix& a, std::span<const double> x, std::span<const double> b);

/// Infinity norm of A x - b.
double residual_inf(const SparseMatrix& a, std::span<const double> x, std::span<const double> b);

}  // namespace cbcfd
