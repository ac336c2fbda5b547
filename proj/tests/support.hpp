#pragma once

#include <cmath>
#include <vector>

#include "dephasing/channel.hpp"
#include "dephasing/random.hpp"
#include "dephasing/sampling.hpp"

namespace dephasing::testing {

/// Full-rank random density matrix G G^dagger / tr(G G^dagger).
inline CMatrix random_density_matrix(int n, Rng& rng) {
  const CMatrix g = complex_gaussian(n, n, rng);
  CMatrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return 0.5 * (rho + rho.adjoint());
}

inline CMatrix random_unitary(int n, Rng& rng) { return haar_isometry(n, n, rng); }

inline std::vector<double> random_phases(int n, Rng& rng) {
  std::uniform_real_distribution<double> u(0.0, 2.0 * M_PI);
  std::vector<double> out(n);
  for (auto& p : out) p = u(rng);
  return out;
}

inline double max_abs(const CMatrix& m) { return m.size() ? m.cwiseAbs().maxCoeff() : 0.0; }

}  // namespace dephasing::testing
