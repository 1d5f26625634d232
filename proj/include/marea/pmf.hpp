#pragma once

#include <vector>

namespace marea {

/// PMF over the number of additional RBs (beyond the guarantee) a service
/// has available in a TTI; entry n covers n extra RBs, n in [0, N_add].
struct UtilizationPmf {
  std::vector<double> pi;

  int n_add() const { return static_cast<int>(pi.size()) - 1; }
  /// Throws InputError unless entries are >= 0 and sum to 1 within `tol`.
  void validate(double tol = 1e-9) const;

  /// All mass on n = 0.
  static UtilizationPmf point_mass_at_zero(int n_add);
};

}  // namespace marea
