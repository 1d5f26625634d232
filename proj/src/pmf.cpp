#include "marea/pmf.hpp"

#include <cmath>
#include <string>

#include "marea/error.hpp"

namespace marea {

void UtilizationPmf::validate(double tol) const {
  if (pi.empty()) throw InputError("utilization PMF is empty");
  double total = 0.0;
  for (double p : pi) {
    if (!(p >= 0.0)) throw InputError("utilization PMF has a negative or NaN entry");
    total += p;
  }
  if (std::abs(total - 1.0) > tol) throw InputError("utilization PMF sums to " + std::to_string(total));
}

UtilizationPmf UtilizationPmf::point_mass_at_zero(int n_add) {
  UtilizationPmf out;
  out.pi.assign(static_cast<std::size_t>(n_add) + 1, 0.0);
  out.pi[0] = 1.0;
  return out;
}

}  // namespace marea
