#include "dephasing/sampling.hpp"

#include <optional>

#include "dephasing/parallel.hpp"

namespace dephasing {

CVector random_unit_vector(int r, Rng& rng) {
  if (r < 1) throw std::invalid_argument("random_unit_vector: r must be >= 1");
  CVector v = complex_gaussian(r, 1, rng).col(0);
  return v / v.norm();
}

DynamicalVectors random_dynamical_vectors(int n, int r, Rng& rng) {
  if (n < 1 || r < 1) throw std::invalid_argument("random_dynamical_vectors: n, r must be >= 1");
  CMatrix columns(r, n);
  for (int i = 0; i < n; ++i) columns.col(i) = random_unit_vector(r, rng);
  return DynamicalVectors(std::move(columns));
}

PhaseDampingChannel random_channel(int n, int r, Rng& rng) {
  return channel_from_vectors(random_dynamical_vectors(n, r, rng));
}

double reported_volume(const PhaseDampingChannel& d) {
  const int r = d.rank();
  if (r >= 2 && r * r < d.dim_n()) return max_subvolume(d).volume;
  return bloch_volume(d);
}

SampleRecord measure_channel(const PhaseDampingChannel& d, const OptimizerConfig& cfg) {
  const AssistanceResult ea = quantumness_of_assistance(d, cfg);
  return SampleRecord{.channel = d,
                      .rank = d.rank(),
                      .v_b = reported_volume(d),
                      .purity = choi_purity(d),
                      .q_a = ea.q_a,
                      .e_a_lower = ea.e_a_lower,
                      .converged = ea.converged,
                      .sample_index = 0,
                      .seed = cfg.seed};
}

std::vector<SampleRecord> sample_batch(const BatchOptions& opts) {
  if (opts.count < 1) throw std::invalid_argument("sample_batch: count must be >= 1");
  std::vector<std::optional<SampleRecord>> slots(opts.count);
  parallel_for(opts.count, opts.threads, [&](std::size_t i) {
    const std::uint64_t seed = stream_seed(opts.base_seed, opts.index_offset + i);
    Rng rng(seed);
    const PhaseDampingChannel d = random_channel(opts.n, opts.r, rng);
    OptimizerConfig cfg = opts.optimizer;
    cfg.seed = splitmix64(seed);
    cfg.threads = 1;
    SampleRecord rec = measure_channel(d, cfg);
    rec.sample_index = i;
    rec.seed = seed;
    slots[i] = std::move(rec);
  });
  std::vector<SampleRecord> out;
  out.reserve(opts.count);
  for (auto& s : slots) out.push_back(std::move(*s));
  return out;
}

}  // namespace dephasing
