#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "dephasing/assistance.hpp"
#include "dephasing/experiments.hpp"
#include "support.hpp"

using namespace dephasing;
using dephasing::testing::max_abs;

namespace {

// D_tetra regression value of the optimizer (bits); no closed form is known.
constexpr double kTetraEaBaseline = 1.79248;

CMatrix random_anti_hermitian(int k, Rng& rng) {
  const CMatrix g = complex_gaussian(k, k, rng);
  return 0.5 * (g - g.adjoint());
}

OptimizerConfig quick_config(int restarts = 8) {
  OptimizerConfig cfg;
  cfg.restarts = restarts;
  cfg.seed = 7;
  return cfg;
}

// Partial trace over the second factor, written out index by index.
CMatrix reduce_first(const CMatrix& rho, int n) {
  CMatrix out = CMatrix::Zero(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) out(a, b) += rho(a * n + c, b * n + c);
  return out;
}

CMatrix reduce_second(const CMatrix& rho, int n) {
  CMatrix out = CMatrix::Zero(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) out(a, b) += rho(c * n + a, c * n + b);
  return out;
}

}  // namespace

TEST_CASE("choi_state examples") {
  const auto cd = choi_state(completely_decohering(4)).matrix();
  for (int m = 0; m < 4; ++m) CHECK(cd(m * 4 + m, m * 4 + m) == Complex(0.25, 0.0));
  CHECK(std::abs(cd.trace() - 1.0) < 1e-15);
  CHECK(max_abs(cd - CMatrix(cd.diagonal().asDiagonal())) == 0.0);

  CVector phi = CVector::Zero(16);
  for (int m = 0; m < 4; ++m) phi(m * 4 + m) = 0.5;
  const auto pure = choi_state(unitary_channel(4)).matrix();
  CHECK(max_abs(pure - phi * phi.adjoint()) < 1e-15);

  const auto tetra = choi_state(tetra_channel()).matrix();
  CHECK(numerical_rank(tetra) == 2);
  CHECK(std::abs((tetra * tetra).trace().real() - 0.5) < 1e-12);
}

TEST_CASE("choi_state invariants on random channels") {
  Rng rng(51);
  for (int trial = 0; trial < 40; ++trial) {
    const int n = 2 + trial % 4;
    const int r = 1 + trial % 3;
    const auto d = random_channel(n, r, rng);
    const CMatrix rho = choi_state(d).matrix();
    CHECK(std::abs(rho.trace() - 1.0) < 1e-12);
    CHECK(hermiticity_defect(rho) < 1e-15);
    CHECK(min_eigenvalue(rho) > -1e-10);
    CHECK(numerical_rank(rho) == channel_rank(d));
    const CMatrix maximal = CMatrix::Identity(n, n) / static_cast<double>(n);
    CHECK(max_abs(reduce_first(rho, n) - maximal) < 1e-12);
    CHECK(max_abs(reduce_second(rho, n) - maximal) < 1e-12);
    CHECK(std::abs(choi_purity(d) - (rho * rho).trace().real()) < 1e-12);
  }
}

TEST_CASE("choi_purity examples") {
  CHECK(choi_purity(unitary_channel(4)) == doctest::Approx(1.0));
  CHECK(choi_purity(completely_decohering(4)) == doctest::Approx(0.25));
  CHECK(std::abs(choi_purity(tetra_channel()) - 0.5) < 1e-12);
}

TEST_CASE("entanglement_entropy") {
  CVector phi = CVector::Zero(16);
  for (int m = 0; m < 4; ++m) phi(m * 4 + m) = 0.5;
  CHECK(std::abs(entanglement_entropy(phi, 4, 4) - 2.0) < 1e-12);

  CVector product = CVector::Zero(16);
  product(5) = 1.0;
  CHECK(std::abs(entanglement_entropy(product, 4, 4)) < 1e-12);

  CVector half = CVector::Zero(16);
  half(0) = std::sqrt(0.5);
  half(5) = std::sqrt(0.5);
  CHECK(std::abs(entanglement_entropy(half, 4, 4) - 1.0) < 1e-12);

  CHECK_THROWS_AS(entanglement_entropy(CVector::Ones(16), 4, 4), std::invalid_argument);
  CHECK_THROWS_AS(entanglement_entropy(phi, 3, 4), DimensionError);

  SUBCASE("invariant under local unitaries") {
    Rng rng(52);
    for (int trial = 0; trial < 20; ++trial) {
      const int da = 2 + trial % 3;
      const int db = 2 + (trial / 3) % 3;
      const CVector psi = random_unit_vector(da * db, rng);
      const CMatrix u = dephasing::testing::random_unitary(da, rng);
      const CMatrix v = dephasing::testing::random_unitary(db, rng);
      // Index a*db + b; kron(u, v) acts on that ordering.
      CMatrix uv(da * db, da * db);
      for (int a = 0; a < da; ++a)
        for (int b = 0; b < da; ++b) uv.block(a * db, b * db, db, db) = u(a, b) * v;
      CHECK(std::abs(entanglement_entropy(uv * psi, da, db) - entanglement_entropy(psi, da, db)) <
            1e-10);
    }
  }
}

TEST_CASE("shannon_entropy_bits") {
  CHECK(shannon_entropy_bits(RVector::Constant(4, 0.25)) == doctest::Approx(2.0));
  RVector p(3);
  p << 1.0, 0.0, 0.0;
  CHECK(shannon_entropy_bits(p) == 0.0);
}

TEST_CASE("decomposition_from_isometry") {
  const CMatrix rho = choi_state(tetra_channel()).matrix();
  const auto eig = support_eigensystem(rho);
  REQUIRE(eig.values.size() == 2);
  CHECK(eig.values(0) >= eig.values(1));

  SUBCASE("identity gives the eigendecomposition") {
    const auto dec = decomposition_from_isometry(eig, CMatrix::Identity(2, 2));
    for (int i = 0; i < 2; ++i) {
      CHECK(std::abs(dec.weights[i] - eig.values(i)) < 1e-14);
      CHECK(std::abs(std::abs(dec.states[i].dot(eig.vectors.col(i))) - 1.0) < 1e-12);
    }
  }
  SUBCASE("random isometries reconstruct the state") {
    Rng rng(53);
    for (int k = 2; k <= 6; ++k) {
      const CMatrix u = haar_isometry(k, 2, rng);
      const auto dec = decomposition_from_isometry(eig, u);
      REQUIRE(static_cast<int>(dec.weights.size()) == k);
      double total = 0.0;
      for (std::size_t i = 0; i < dec.weights.size(); ++i) {
        CHECK(dec.weights[i] >= 0.0);
        CHECK(std::abs(dec.states[i].norm() - 1.0) < 1e-12);
        total += dec.weights[i];
      }
      CHECK(std::abs(total - 1.0) < 1e-12);
      CHECK(max_abs(dec.mixture() - rho) < 1e-10);
    }
  }
  SUBCASE("pure state: every row carries the same state") {
    const CMatrix pure = choi_state(unitary_channel(3)).matrix();
    const auto e1 = support_eigensystem(pure);
    REQUIRE(e1.values.size() == 1);
    Rng rng(54);
    const CMatrix u = haar_isometry(3, 1, rng);
    const auto dec = decomposition_from_isometry(e1, u);
    for (int i = 0; i < 3; ++i) {
      CHECK(std::abs(dec.weights[i] - std::norm(u(i, 0))) < 1e-14);
      CHECK(std::abs(std::abs(dec.states[i].dot(e1.vectors.col(0))) - 1.0) < 1e-12);
    }
    CHECK(max_abs(dec.mixture() - pure) < 1e-12);
  }
  SUBCASE("non-isometries are rejected") {
    CHECK_THROWS_AS(decomposition_from_isometry(eig, 2.0 * CMatrix::Identity(2, 2)),
                    std::invalid_argument);
    CHECK_THROWS_AS(decomposition_from_isometry(eig, CMatrix::Identity(3, 3)),
                    std::invalid_argument);
  }
}

TEST_CASE("anti-Hermitian coordinates are an isometric round trip") {
  Rng rng(55);
  for (int k = 1; k <= 5; ++k) {
    const CMatrix x = random_anti_hermitian(k, rng);
    const RVector c = anti_hermitian_to_coords(x);
    CHECK(c.size() == k * k);
    CHECK(max_abs(anti_hermitian_from_coords(c, k) - x) < 1e-14);
    CHECK(std::abs(c.squaredNorm() - x.squaredNorm()) < 1e-12);
  }
}

TEST_CASE("objective agrees with the explicit decomposition") {
  Rng rng(56);
  for (int trial = 0; trial < 20; ++trial) {
    const auto d = random_channel(4, 2 + trial % 3, rng);
    const ChoiState choi(d);
    const AssistanceObjective f(choi, d.rank() * d.rank());
    const CMatrix u = haar_isometry(f.length(), f.support_rank(), rng);
    const auto dec = decomposition_from_isometry(f.eigensystem(), u);
    CHECK(std::abs(f.value(u) - dec.average_entanglement(4, 4)) < 1e-10);
  }
}

TEST_CASE("objective gradient matches finite differences") {
  Rng rng(57);
  for (int trial = 0; trial < 15; ++trial) {
    const auto d = random_channel(4, 2 + trial % 3, rng);
    const AssistanceObjective f(ChoiState(d), d.rank() * d.rank());
    const int k = f.length();
    const CMatrix u = haar_isometry(k, f.support_rank(), rng);
    CMatrix g;
    const double v0 = f.value_and_gradient(u, g);
    CHECK(v0 == doctest::Approx(f.value(u)));
    CHECK(max_abs(g + g.adjoint()) < 1e-12);
    for (int dir = 0; dir < 3; ++dir) {
      const CMatrix x = random_anti_hermitian(k, rng);
      const double h = 1e-6;
      const double fd =
          (f.value(exp_anti_hermitian(h * x) * u) - f.value(exp_anti_hermitian(-h * x) * u)) /
          (2.0 * h);
      const double analytic = (g.adjoint() * x).trace().real();
      CHECK(std::abs(fd - analytic) < 1e-6 * std::max(1.0, std::abs(analytic)));
    }
  }
}

TEST_CASE("entanglement of assistance examples") {
  SUBCASE("completely decohering channel reaches log2 N") {
    const auto r = entanglement_of_assistance(choi_state(completely_decohering(4)), quick_config());
    CHECK(std::abs(r.e_a_lower - 2.0) < 2e-3);
    CHECK(r.converged);
    CHECK(max_abs(r.decomposition.mixture() - choi_state(completely_decohering(4)).matrix()) <
          1e-8);
  }
  SUBCASE("maximally entangled pure state") {
    const auto r = entanglement_of_assistance(choi_state(unitary_channel(4)), quick_config());
    CHECK(std::abs(r.e_a_lower - 2.0) < 1e-12);
    CHECK(r.q_a < 1e-6);
    CHECK(r.converged);
  }
  SUBCASE("tetra channel stays below log2 N") {
    const auto choi = choi_state(tetra_channel());
    const auto r = entanglement_of_assistance(choi, quick_config(20));
    CHECK(r.e_a_lower < 2.0 - 0.1);
    CHECK(std::abs(r.e_a_lower - kTetraEaBaseline) < 1e-4);
    CHECK(r.converged);
    CHECK(r.q_a > 0.1);
    CHECK(max_abs(r.decomposition.mixture() - choi.matrix()) < 1e-8);

    // Random isometries never beat the optimizer.
    const AssistanceObjective f(choi, r.decomposition_len);
    Rng rng(58);
    double best = 0.0;
    for (int i = 0; i < 100000; ++i) {
      best = std::max(best, f.value(haar_isometry(f.length(), f.support_rank(), rng)));
    }
    CHECK(best <= r.e_a_lower + 1e-9);
    CHECK(best > r.eigen_baseline);
  }
}

TEST_CASE("assistance result invariants") {
  Rng rng(59);
  for (int trial = 0; trial < 12; ++trial) {
    const auto d = random_channel(4, 1 + trial % 4, rng);
    const auto r = quantumness_of_assistance(d, quick_config(4));
    CHECK(r.e_a_lower >= r.eigen_baseline - 1e-12);
    CHECK(r.e_a_lower >= 0.0);
    CHECK(r.e_a_lower <= 2.0 + 1e-9);
    CHECK(r.q_a >= 0.0);
    CHECK(r.q_a <= 1.0);
    CHECK(std::abs(r.q_a - std::clamp(r.q_a_raw, 0.0, 1.0)) == 0.0);
    CHECK(r.restart_values.size() >= 1);
    CHECK(*std::max_element(r.restart_values.begin(), r.restart_values.end()) <=
          r.e_a_lower + 1e-15);
    CHECK(AssistanceResult::q_a_is_upper_bound);
  }
}

TEST_CASE("q_a under local unitaries of the Choi state") {
  Rng rng(60);
  const OptimizerConfig cfg = quick_config(20);
  for (int trial = 0; trial < 4; ++trial) {
    const auto d = random_channel(4, 2 + trial % 2, rng);
    const double q = quantumness_of_assistance(d, cfg).q_a;
    const auto rephased = rephase(d, dephasing::testing::random_phases(4, rng));
    CHECK(std::abs(quantumness_of_assistance(rephased, cfg).q_a - q) < 3 * cfg.objective_tol);
    std::vector<int> perm = {0, 1, 2, 3};
    std::shuffle(perm.begin(), perm.end(), rng);
    CHECK(std::abs(quantumness_of_assistance(permute(d, perm), cfg).q_a - q) <
          3 * cfg.objective_tol);
  }
}

TEST_CASE("quantumness examples along the tetra/decohering mixture") {
  const OptimizerConfig cfg = quick_config(20);
  CHECK(quantumness_of_assistance(completely_decohering(4), cfg).q_a < 1e-3);
  CHECK(quantumness_of_assistance(unitary_channel(4), cfg).q_a < 1e-6);
  CHECK(quantumness_of_assistance(tetra_decohering_mixture(0.25), cfg).q_a < 0.02);

  const auto rows = lambda_sweep(11, cfg);
  for (std::size_t i = 1; i < rows.size(); ++i) CHECK(rows[i].q_a <= rows[i - 1].q_a + 0.01);
  CHECK(std::abs(rows.front().q_a - (1.0 - kTetraEaBaseline / 2.0)) < 1e-4);
}

TEST_CASE("restarts are reproducible and thread independent") {
  const auto choi = choi_state(mcmq_channel(1.0));
  OptimizerConfig cfg = quick_config(6);
  const auto a = entanglement_of_assistance(choi, cfg);
  const auto b = entanglement_of_assistance(choi, cfg);
  cfg.threads = 3;
  const auto c = entanglement_of_assistance(choi, cfg);
  CHECK(a.restart_values == b.restart_values);
  CHECK(a.restart_values == c.restart_values);
  CHECK(a.e_a_lower == c.e_a_lower);
  cfg.seed = 8;
  CHECK(entanglement_of_assistance(choi, cfg).restart_values != a.restart_values);
}
