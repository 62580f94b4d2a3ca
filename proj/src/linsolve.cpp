#include "cbcfd/linsolve.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseLU>
#include <lapacke.h>

#include "cbcfd/errors.hpp"

namespace cbcfd {

namespace {

double sparse_norm_inf(const SparseMatrix& a) {
  Eigen::VectorXd row_sums = Eigen::VectorXd::Zero(a.rows());
  for (Eigen::Index c = 0; c < a.outerSize(); ++c) {
    for (SparseMatrix::InnerIterator it(a, c); it; ++it) row_sums[it.row()] += std::abs(it.value());
  }
  return row_sums.size() == 0 ? 0.0 : row_sums.maxCoeff();
}

}  // namespace

BandedMatrix::BandedMatrix(int n, int kl, int ku)
    : n_(n), kl_(kl), ku_(ku), ab_(static_cast<std::size_t>(n) * (2 * kl + ku + 1), 0.0) {
  if (n <= 0 || kl < 0 || ku < 0) throw ContractError("BandedMatrix: invalid dimensions");
}

void BandedMatrix::add(int i, int j, double v) {
  if (!in_band(i, j)) {
    throw ContractError("BandedMatrix: entry (" + std::to_string(i) + ", " + std::to_string(j) +
                        ") is outside the band");
  }
  ab_[slot(i, j)] += v;
}

double BandedMatrix::at(int i, int j) const noexcept { return in_band(i, j) ? ab_[slot(i, j)] : 0.0; }

std::vector<double> BandedMatrix::multiply(std::span<const double> x) const {
  std::vector<double> y(n_, 0.0);
  for (int i = 0; i < n_; ++i) {
    const int lo = std::max(0, i - kl_);
    const int hi = std::min(n_ - 1, i + ku_);
    for (int j = lo; j <= hi; ++j) y[i] += ab_[slot(i, j)] * x[j];
  }
  return y;
}

double BandedMatrix::norm_inf() const {
  double best = 0.0;
  for (int i = 0; i < n_; ++i) {
    double row = 0.0;
    for (int j = std::max(0, i - kl_); j <= std::min(n_ - 1, i + ku_); ++j) {
      row += std::abs(ab_[slot(i, j)]);
    }
    best = std::max(best, row);
  }
  return best;
}

Eigen::MatrixXd BandedMatrix::to_dense() const {
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n_, n_);
  for (int i = 0; i < n_; ++i) {
    for (int j = std::max(0, i - kl_); j <= std::min(n_ - 1, i + ku_); ++j) d(i, j) = at(i, j);
  }
  return d;
}

void BandedMatrix::set_zero() { std::fill(ab_.begin(), ab_.end(), 0.0); }

std::vector<double> banded_solve(const BandedMatrix& a, std::span<const double> rhs) {
  if (static_cast<int>(rhs.size()) != a.n()) throw ShapeError("banded_solve: rhs length mismatch");
  std::vector<double> ab = a.ab_;
  std::vector<double> x(rhs.begin(), rhs.end());
  std::vector<lapack_int> ipiv(a.n());
  const lapack_int info = LAPACKE_dgbsv(LAPACK_COL_MAJOR, a.n(), a.kl(), a.ku(), 1, ab.data(),
                                        a.ldab(), ipiv.data(), x.data(), a.n());
  if (info > 0) {
    throw SolverError("banded_solve: zero pivot at index " + std::to_string(info - 1), info - 1);
  }
  if (info < 0) throw SolverError("banded_solve: invalid argument " + std::to_string(-info));
  return x;
}

struct SparseSolver::Impl {
  SparseSolverOptions options;
  Eigen::SparseLU<SparseMatrix, Eigen::COLAMDOrdering<int>> lu;
  bool analyzed = false;
  Eigen::Index rows = -1;
  Eigen::Index nnz = -1;
  std::vector<int> outer;
  std::vector<int> inner;
  bool direct_ok = false;
  SparseMatrix matrix;  // kept for the iterative fallback and residual checks

  bool same_pattern(const SparseMatrix& a) const {
    if (a.rows() != rows || a.nonZeros() != nnz) return false;
    return std::equal(outer.begin(), outer.end(), a.outerIndexPtr()) &&
           std::equal(inner.begin(), inner.end(), a.innerIndexPtr());
  }
};

SparseSolver::SparseSolver(SparseSolverOptions options) : impl_(std::make_unique<Impl>()) {
  impl_->options = options;
}
SparseSolver::~SparseSolver() = default;
SparseSolver::SparseSolver(SparseSolver&&) noexcept = default;
SparseSolver& SparseSolver::operator=(SparseSolver&&) noexcept = default;

void SparseSolver::factorize(const SparseMatrix& a) {
  if (a.rows() != a.cols()) throw ShapeError("SparseSolver: matrix is not square");
  if (!a.isCompressed()) throw ContractError("SparseSolver: matrix must be compressed");
  auto& s = *impl_;
  if (!s.analyzed || !s.same_pattern(a)) {
    s.lu.analyzePattern(a);
    s.analyzed = true;
    s.rows = a.rows();
    s.nnz = a.nonZeros();
    s.outer.assign(a.outerIndexPtr(), a.outerIndexPtr() + a.outerSize() + 1);
    s.inner.assign(a.innerIndexPtr(), a.innerIndexPtr() + a.nonZeros());
  }
  s.lu.factorize(a);
  s.direct_ok = s.lu.info() == Eigen::Success;
  if (!s.direct_ok && !s.options.iterative_fallback) {
    throw SolverError("SparseSolver: LU factorization failed: " + s.lu.lastErrorMessage());
  }
  s.matrix = a;
}

bool SparseSolver::factorized() const noexcept { return impl_->analyzed; }

std::optional<std::vector<double>> SparseSolver::solve_refined(const SparseMatrix& a,
                                                               std::span<const double> rhs,
                                                               double tolerance,
                                                               int max_steps) const {
  if (a.rows() != impl_->rows) throw ShapeError("SparseSolver: matrix size changed");
  const Eigen::Map<const Eigen::VectorXd> b(rhs.data(), a.rows());
  std::vector<double> x = solve(rhs);
  Eigen::Map<Eigen::VectorXd> xv(x.data(), a.rows());
  const double norm_a = sparse_norm_inf(a);
  const double norm_b = b.lpNorm<Eigen::Infinity>();
  for (int k = 0; k <= max_steps; ++k) {
    const Eigen::VectorXd r = b - a * xv;
    const double scale = norm_a * xv.lpNorm<Eigen::Infinity>() + norm_b;
    if (r.lpNorm<Eigen::Infinity>() <= tolerance * scale) return x;
    if (k == max_steps) break;
    const auto dx = solve({r.data(), static_cast<std::size_t>(r.size())});
    xv += Eigen::Map<const Eigen::VectorXd>(dx.data(), a.rows());
  }
  return std::nullopt;
}

std::vector<double> SparseSolver::solve(std::span<const double> rhs) const {
  const auto& s = *impl_;
  if (static_cast<Eigen::Index>(rhs.size()) != s.rows) {
    throw ShapeError("SparseSolver: rhs length mismatch");
  }
  const Eigen::Map<const Eigen::VectorXd> b(rhs.data(), s.rows);
  Eigen::VectorXd x;
  if (s.direct_ok) {
    x = s.lu.solve(b);
  } else {
    Eigen::BiCGSTAB<SparseMatrix, Eigen::IncompleteLUT<double>> it;
    it.setTolerance(s.options.iterative_tolerance);
    it.setMaxIterations(s.options.max_iterations);
    it.compute(s.matrix);
    x = it.solve(b);
    const double rel = (s.matrix * x - b).norm() / std::max(b.norm(), 1e-300);
    if (it.info() != Eigen::Success || rel > s.options.iterative_tolerance) {
      throw SolverError("SparseSolver: iterative fallback did not converge (relative residual " +
                        std::to_string(rel) + ")");
    }
  }
  return {x.data(), x.data() + x.size()};
}

std::vector<double> sparse_solve(const SparseMatrix& a, std::span<const double> rhs,
                                 SparseSolverOptions options) {
  SparseSolver solver(options);
  solver.factorize(a);
  return solver.solve(rhs);
}

std::vector<double> dense_oracle_solve(Eigen::MatrixXd a, std::vector<double> rhs) {
  const auto n = a.rows();
  if (a.cols() != n || static_cast<Eigen::Index>(rhs.size()) != n) {
    throw ShapeError("dense_oracle_solve: dimension mismatch");
  }
  for (Eigen::Index k = 0; k < n; ++k) {
    Eigen::Index piv = k;
    for (Eigen::Index i = k + 1; i < n; ++i) {
      if (std::abs(a(i, k)) > std::abs(a(piv, k))) piv = i;
    }
    if (a(piv, k) == 0.0) throw SolverError("dense_oracle_solve: singular matrix", static_cast<long>(k));
    if (piv != k) {
      a.row(k).swap(a.row(piv));
      std::swap(rhs[k], rhs[piv]);
    }
    for (Eigen::Index i = k + 1; i < n; ++i) {
      const double m = a(i, k) / a(k, k);
      if (m == 0.0) continue;
      for (Eigen::Index j = k; j < n; ++j) a(i, j) -= m * a(k, j);
      rhs[i] -= m * rhs[k];
    }
  }
  std::vector<double> x(n);
  for (Eigen::Index i = n - 1; i >= 0; --i) {
    double s = rhs[i];
    for (Eigen::Index j = i + 1; j < n; ++j) s -= a(i, j) * x[j];
    x[i] = s / a(i, i);
  }
  return x;
}

std::vector<double> tridiagonal_solve(std::span<const double> sub, std::span<const double> diag,
                                      std::span<const double> super, std::span<const double> rhs) {
  const std::size_t n = diag.size();
  if (sub.size() != n || super.size() != n || rhs.size() != n) {
    throw ShapeError("tridiagonal_solve: length mismatch");
  }
  std::vector<double> c(n), x(n);
  double denom = diag[0];
  if (denom == 0.0) throw SolverError("tridiagonal_solve: zero pivot at index 0", 0);
  c[0] = super[0] / denom;
  x[0] = rhs[0] / denom;
  for (std::size_t i = 1; i < n; ++i) {
    denom = diag[i] - sub[i] * c[i - 1];
    if (denom == 0.0) {
      throw SolverError("tridiagonal_solve: zero pivot at index " + std::to_string(i),
                        static_cast<long>(i));
    }
    c[i] = super[i] / denom;
    x[i] = (rhs[i] - sub[i] * x[i - 1]) / denom;
  }
  for (std::size_t i = n - 1; i-- > 0;) x[i] -= c[i] * x[i + 1];
  return x;
}

std::vector<double> cyclic_tridiagonal_solve(std::span<const double> sub,
                                             std::span<const double> diag,
                                             std::span<const double> super,
                                             std::span<const double> rhs) {
  const std::size_t n = diag.size();
  if (n < 3) throw ContractError("cyclic_tridiagonal_solve: need at least 3 rows");
  if (sub.size() != n || super.size() != n || rhs.size() != n) {
    throw ShapeError("cyclic_tridiagonal_solve: length mismatch");
  }
  // A = T + u v^T with u = (gamma, 0, ..., 0, alpha), v = (1, 0, ..., 0, beta/gamma).
  const double alpha = super[n - 1];
  const double beta = sub[0];
  const double gamma = -diag[0];
  std::vector<double> d(diag.begin(), diag.end());
  d[0] -= gamma;
  d[n - 1] -= alpha * beta / gamma;
  const auto y = tridiagonal_solve(sub, d, super, rhs);
  std::vector<double> u(n, 0.0);
  u[0] = gamma;
  u[n - 1] = alpha;
  const auto z = tridiagonal_solve(sub, d, super, u);
  const double vy = y[0] + beta / gamma * y[n - 1];
  const double vz = z[0] + beta / gamma * z[n - 1];
  const double factor = vy / (1.0 + vz);
  std::vector<double> x(n);
  for (std::size_t i = 0; i < n; ++i) x[i] = y[i] - factor * z[i];
  return x;
}

double backward_error(const SparseMatrix& a, std::span<const double> x, std::span<const double> b) {
  const Eigen::Map<const Eigen::VectorXd> xv(x.data(), static_cast<Eigen::Index>(x.size()));
  const Eigen::Map<const Eigen::VectorXd> bv(b.data(), static_cast<Eigen::Index>(b.size()));
  const double scale = sparse_norm_inf(a) * xv.lpNorm<Eigen::Infinity>() + bv.lpNorm<Eigen::Infinity>();
  return residual_inf(a, x, b) / scale;
}

double residual_inf(const SparseMatrix& a, std::span<const double> x, std::span<const double> b) {
  const Eigen::Map<const Eigen::VectorXd> xv(x.data(), static_cast<Eigen::Index>(x.size()));
  const Eigen::Map<const Eigen::VectorXd> bv(b.data(), static_cast<Eigen::Index>(b.size()));
  return (a * xv - bv).lpNorm<Eigen::Infinity>();
}

}  // namespace cbcfd
