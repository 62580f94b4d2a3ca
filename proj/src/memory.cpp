#include "cbcfd/memory.hpp"

namespace cbcfd {

double midpoint_integral(std::span<const double> samples, double dt, bool include_final_half) {
  if (samples.empty()) return 0.0;
  double sum = 0.0;
  for (double s : samples) sum += s;
  if (include_final_half) sum -= 0.5 * samples.back();
  return dt * sum;
}

}  // namespace cbcfd
