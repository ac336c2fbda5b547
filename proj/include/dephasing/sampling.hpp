#pragma once

// Seedable random phase-damping channels: Gram matrices of independent,
// unitarily invariant unit vectors in C^r.

#include <cstdint>
#include <vector>

#include "dephasing/assistance.hpp"
#include "dephasing/bloch.hpp"
#include "dephasing/channel.hpp"
#include "dephasing/random.hpp"

namespace dephasing {

/// Normalized standard complex Gaussian vector in C^r.
CVector random_unit_vector(int r, Rng& rng);

DynamicalVectors random_dynamical_vectors(int n, int r, Rng& rng);

/// Gram channel of n independent random unit vectors in C^r.
PhaseDampingChannel random_channel(int n, int r, Rng& rng);

struct SampleRecord {
  PhaseDampingChannel channel;
  int rank = 0;
  double v_b = 0.0;
  double purity = 0.0;
  double q_a = 0.0;
  double e_a_lower = 0.0;
  bool converged = false;
  std::size_t sample_index = 0;
  std::uint64_t seed = 0;
};

/// Bloch volume used for reporting: full simplex when r^2 >= N, best
/// sub-simplex (max_subvolume) otherwise.
double reported_volume(const PhaseDampingChannel& d);

/// Metrics of one channel; the optimizer seed in `cfg` is used as given.
SampleRecord measure_channel(const PhaseDampingChannel& d, const OptimizerConfig& cfg);

struct BatchOptions {
  std::size_t count = 1;
  int n = 4;
  int r = 2;
  std::uint64_t base_seed = 1;
  /// Offset added to the per-record index when deriving streams, so
  /// several batches can share one base seed without overlap.
  std::uint64_t index_offset = 0;
  OptimizerConfig optimizer;
  int threads = 1;
};

/// Record i draws its channel from stream (base_seed, index_offset + i); its
/// optimizer seed is derived from the same stream seed. Output is ordered by
/// index and independent of `threads`. Throws std::invalid_argument for count < 1.
std::vector<SampleRecord> sample_batch(const BatchOptions& opts);

}  // namespace dephasing
