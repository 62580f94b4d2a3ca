#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace cbcfd {

using Fn1 = std::function<double(double)>;
using Fn2 = std::function<double(double, double)>;
using Fn3 = std::function<double(double, double, double)>;

/// Closed-form solution used for error reporting: p(x, t) and
/// u~ = -a p_x (x, t).
struct ExactSolution1D {
  Fn2 p;
  Fn2 utilde;
};

/// p_t + u_x = f on (0, L) x (0, T] with
/// u = -a p_x - int_0^t b p_x ds and -a p_x = 0 at x = 0, L.
struct ProblemSpec1D {
  double length = 1.0;
  double final_time = 1.0;
  Fn1 a;   // a(x) > 0
  Fn2 b;   // b(x, t)
  Fn2 f;   // f(x, t)
  Fn1 p0;  // p(x, 0)
  std::optional<ExactSolution1D> exact;
};

struct ExactSolution2D {
  Fn3 p;
  Fn3 utilde_x;
  Fn3 utilde_y;
};

/// p_t + div u = f on a periodic box with
/// u = -(A grad p + int_0^t B grad p ds), A = diag(a^x, a^y), B = diag(b^x, b^y).
struct ProblemSpec2D {
  double lx = 1.0;
  double ly = 1.0;
  double final_time = 1.0;
  Fn2 ax;  // a^x(x, y) > 0
  Fn2 ay;
  Fn3 bx;  // b^x(x, y, t)
  Fn3 by;
  Fn3 f;   // f(x, y, t)
  Fn2 p0;
  /// Lets the stepper reuse one factorization for the whole run.
  bool b_time_independent = false;
  std::optional<ExactSolution2D> exact;
};

/// Sampled sanity checks. Throws ContractError for non-positive or
/// non-finite a; returns human-readable warnings for soft violations
/// (boundary incompatibility of p0, periodicity seams).
std::vector<std::string> validate(const ProblemSpec1D& spec, int samples = 257);
std::vector<std::string> validate(const ProblemSpec2D& spec, int samples = 33);

/// Number of steps T / dt; throws ContractError unless it is a positive integer.
int step_count(double final_time, double dt);

}  // namespace cbcfd
