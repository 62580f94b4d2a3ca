#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "cbcfd/errors.hpp"
#include "cbcfd/fields.hpp"

namespace cbcfd {

/// Composite midpoint rule over half-step samples u(t_{l+1/2}), l = 0..n-1.
///
/// Every sample carries weight dt, except that with `include_final_half` the
/// last one carries dt/2 (the integral then ends at that sample's time).
/// An empty sample list integrates to 0.
double midpoint_integral(std::span<const double> samples, double dt, bool include_final_half);

/// Running sum S^n = sum_{l<n} (b/a U~)^{l+1/2} of the memory integrand.
///
/// Half-step samples use b at t_{l+1/2} and the Crank-Nicolson average of
/// U~^l and U~^{l+1}. The memory flux at level n is dt * S^n. Works for any
/// field type with indexed access (Field1D faces or Field2D faces).
template <class Field>
class HistoryState {
 public:
  HistoryState(Field zero, double dt, bool keep_samples = false)
      : sum_(std::move(zero)), dt_(dt), keep_samples_(keep_samples) {
    for (std::size_t k = 0; k < sum_.size(); ++k) sum_[k] = 0.0;
  }

  /// S^{n+1} = S^n + (b_mid / a) * (u_old + u_new) / 2.
  void advance(const Field& b_mid, const Field& a, const Field& u_old, const Field& u_new) {
    check(b_mid);
    check(a);
    check(u_old);
    check(u_new);
    Field sample = sum_;
    for (std::size_t k = 0; k < sum_.size(); ++k) {
      sample[k] = b_mid[k] / a[k] * 0.5 * (u_old[k] + u_new[k]);
      sum_[k] += sample[k];
    }
    if (keep_samples_) samples_.push_back(std::move(sample));
    ++steps_;
  }

  [[nodiscard]] const Field& sum() const noexcept { return sum_; }
  [[nodiscard]] int steps() const noexcept { return steps_; }
  [[nodiscard]] double dt() const noexcept { return dt_; }

  /// dt * S^n at entry k.
  [[nodiscard]] double flux(std::size_t k) const noexcept { return dt_ * sum_[k]; }

  [[nodiscard]] bool keeps_samples() const noexcept { return keep_samples_; }

  /// Recomputes the sum from retained samples. Requires keep_samples.
  [[nodiscard]] Field from_scratch() const {
    if (!keep_samples_) throw ContractError("HistoryState: samples were not retained");
    Field out = sum_;
    std::vector<double> column(samples_.size());
    for (std::size_t k = 0; k < out.size(); ++k) {
      for (std::size_t l = 0; l < samples_.size(); ++l) column[l] = samples_[l][k];
      out[k] = midpoint_integral(column, 1.0, false);
    }
    return out;
  }

 private:
  void check(const Field& f) const {
    if (f.size() != sum_.size() || f.stagger() != sum_.stagger() || !(f.grid() == sum_.grid())) {
      throw ShapeError("HistoryState: field does not match the accumulator");
    }
  }

  Field sum_;
  double dt_;
  bool keep_samples_;
  int steps_ = 0;
  std::vector<Field> samples_;
};

using HistoryState1D = HistoryState<Field1D>;
using HistoryState2D = HistoryState<Field2D>;

}  // namespace cbcfd
