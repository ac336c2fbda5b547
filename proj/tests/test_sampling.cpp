#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "dephasing/sampling.hpp"
#include "support.hpp"

using namespace dephasing;
using dephasing::testing::max_abs;

namespace {

// Two-sample Kolmogorov-Smirnov statistic.
double ks_statistic(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double worst = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    worst = std::max(worst, std::abs(static_cast<double>(i) / a.size() -
                                     static_cast<double>(j) / b.size()));
  }
  return worst;
}

// Uniform point on the qubit Bloch sphere, written as a state vector.
CVector sphere_qubit(Rng& rng) {
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const double cos_theta = 2.0 * unif(rng) - 1.0;
  const double phi = 2.0 * M_PI * unif(rng);
  const double theta = std::acos(cos_theta);
  CVector v(2);
  v << std::cos(0.5 * theta), std::exp(kI * phi) * std::sin(0.5 * theta);
  return v;
}

OptimizerConfig cheap_optimizer() {
  OptimizerConfig cfg;
  cfg.restarts = 2;
  cfg.max_iters = 200;
  return cfg;
}

}  // namespace

TEST_CASE("random_unit_vector") {
  Rng rng(61);
  for (int i = 0; i < 50; ++i) {
    const CVector z = random_unit_vector(1, rng);
    CHECK(std::abs(std::abs(z(0)) - 1.0) < 1e-15);
  }
  for (int r = 1; r <= 5; ++r) CHECK(std::abs(random_unit_vector(r, rng).norm() - 1.0) < 1e-14);
  CHECK_THROWS_AS(random_unit_vector(0, rng), std::invalid_argument);

  Rng a(62), b(62);
  const CVector va = random_unit_vector(3, a);
  const CVector vb = random_unit_vector(3, b);
  CHECK((va.array() == vb.array()).all());
}

TEST_CASE("Haar moment: mean |<a|b>|^2 = 1/r") {
  Rng rng(63);
  for (int r = 2; r <= 4; ++r) {
    const int draws = 10000;
    double sum = 0.0, sum_sq = 0.0;
    for (int i = 0; i < draws; ++i) {
      const double x = std::norm(random_unit_vector(r, rng).dot(random_unit_vector(r, rng)));
      sum += x;
      sum_sq += x * x;
    }
    const double mean = sum / draws;
    const double se = std::sqrt((sum_sq / draws - mean * mean) / draws);
    CHECK(std::abs(mean - 1.0 / r) < 3.0 * se);
  }
}

TEST_CASE("random_channel ranks and purity range") {
  Rng rng(64);
  CHECK(random_channel(4, 2, rng).rank() == 2);
  CHECK(random_channel(4, 4, rng).rank() == 4);
  CHECK(random_channel(4, 6, rng).rank() == 4);
  CHECK(random_channel(5, 1, rng).rank() == 1);
  double lo = 1.0, hi = 0.0;
  for (int i = 0; i < 10000; ++i) {
    const double p = choi_purity(random_channel(4, 2, rng));
    lo = std::min(lo, p);
    hi = std::max(hi, p);
  }
  CHECK(lo >= 0.5 - 1e-9);  // rank 2: barycenter relation
  CHECK(hi <= 1.0 + 1e-12);
}

TEST_CASE("sampled purity distribution is unitarily invariant") {
  // Library sampler vs an independent sphere construction rotated by a fixed unitary.
  Rng rng(65);
  const CMatrix u = dephasing::testing::random_unitary(2, rng);
  Rng lib_rng(66), ref_rng(67);
  const int samples = 1000;
  std::vector<double> lib, ref;
  for (int i = 0; i < samples; ++i) {
    lib.push_back(choi_purity(random_channel(4, 2, lib_rng)));
    CMatrix cols(2, 4);
    for (int n = 0; n < 4; ++n) cols.col(n) = u * sphere_qubit(ref_rng);
    ref.push_back(choi_purity(channel_from_vectors(DynamicalVectors(cols))));
  }
  const double critical = 1.628 * std::sqrt(2.0 / samples);  // alpha = 0.01
  CHECK(ks_statistic(lib, ref) < critical);

  // Rotating the sampled vectors themselves changes nothing pointwise.
  Rng again(66);
  const auto v = random_dynamical_vectors(4, 2, again);
  const auto rotated = DynamicalVectors(u * v.columns());
  CHECK(max_abs(channel_from_vectors(rotated).matrix() - channel_from_vectors(v).matrix()) <
        1e-14);
}

TEST_CASE("sample_batch") {
  BatchOptions opts;
  opts.count = 12;
  opts.base_seed = 99;
  opts.optimizer = cheap_optimizer();

  const auto serial = sample_batch(opts);
  REQUIRE(serial.size() == 12);
  opts.threads = 4;
  const auto parallel = sample_batch(opts);

  for (std::size_t i = 0; i < serial.size(); ++i) {
    const auto& s = serial[i];
    CHECK(s.sample_index == i);
    CHECK(s.seed == stream_seed(99, i));
    CHECK(s.rank == 2);
    CHECK(s.v_b >= 0.0);
    CHECK(s.purity >= 0.25);
    CHECK(s.purity <= 1.0);
    CHECK(s.q_a >= 0.0);
    CHECK(s.q_a <= 1.0);

    // The record is a function of (seed, index) alone.
    Rng rng(stream_seed(99, i));
    const auto d = random_channel(4, 2, rng);
    CHECK((d.matrix().array() == s.channel.matrix().array()).all());

    const auto& p = parallel[i];
    CHECK(p.seed == s.seed);
    CHECK(p.v_b == s.v_b);
    CHECK(p.purity == s.purity);
    CHECK(p.q_a == s.q_a);
    CHECK(p.e_a_lower == s.e_a_lower);
    CHECK(p.converged == s.converged);
  }

  SUBCASE("index offset continues the same streams") {
    BatchOptions tail = opts;
    tail.count = 4;
    tail.index_offset = 8;
    const auto rest = sample_batch(tail);
    for (std::size_t i = 0; i < rest.size(); ++i) CHECK(rest[i].seed == serial[8 + i].seed);
  }
  SUBCASE("count = 0 is rejected") {
    BatchOptions none = opts;
    none.count = 0;
    CHECK_THROWS_AS(sample_batch(none), std::invalid_argument);
  }
}

TEST_CASE("rank-2 volumes never exceed the regular tetrahedron") {
  Rng rng(68);
  double largest = 0.0;
  for (int i = 0; i < 20000; ++i) largest = std::max(largest, reported_volume(random_channel(4, 2, rng)));
  CHECK(largest <= 8.0 * std::sqrt(3.0) / 27.0 + 1e-9);
  CHECK(largest > 0.3);
}

TEST_CASE("reported_volume picks the sub-matrix search when r^2 < N") {
  Rng rng(69);
  const auto d = random_channel(6, 2, rng);
  CHECK(reported_volume(d) == max_subvolume(d).volume);
  const auto full = random_channel(4, 3, rng);
  CHECK(reported_volume(full) == bloch_volume(full));
}
