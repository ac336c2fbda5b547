#pragma once

// Jamiolkowski states of phase-damping channels and their entanglement of
// assistance.
//
// The Choi state of D is rho = (1/N) sum_mn D_mn |mm><nn|. Its support lies in
// span{|mm>}, so every state of a pure-state decomposition is already in
// Schmidt form and its entanglement is the Shannon entropy of |<mm|psi>|^2.
//
// E_A is a maximum over decompositions. The optimizer below only ever
// returns the value of a decomposition it actually found, so e_a_lower is a
// lower bound on E_A and q_a an upper bound on the true quantumness.

#include <cstdint>
#include <vector>

#include "dephasing/channel.hpp"

namespace dephasing {

class ChoiState {
 public:
  explicit ChoiState(const PhaseDampingChannel& d);

  int dim_n() const { return dim_n_; }
  /// N^2 x N^2 density matrix, index of |ab> is a*N + b.
  const CMatrix& matrix() const { return matrix_; }

 private:
  int dim_n_;
  CMatrix matrix_;
};

ChoiState choi_state(const PhaseDampingChannel& d);

/// tr(rho_D^2) = (1/N^2) sum |D_mn|^2.
double choi_purity(const PhaseDampingChannel& d);

/// Base-2 entropy of the reduced state of a pure state on C^dim_a x C^dim_b;
/// Schmidt weights below 1e-12 contribute nothing. Throws
/// std::invalid_argument for non-unit input and DimensionError on size mismatch.
double entanglement_entropy(const CVector& psi, int dim_a, int dim_b);

/// Shannon entropy (bits) of a probability vector, ignoring entries below 1e-12.
double shannon_entropy_bits(const RVector& probs);

struct Decomposition {
  std::vector<double> weights;
  std::vector<CVector> states;

  /// sum_i w_i |psi_i><psi_i|
  CMatrix mixture() const;
  /// sum_i w_i E(psi_i)
  double average_entanglement(int dim_a, int dim_b) const;
};

/// Nonzero part of the spectrum of a density matrix, descending.
struct SupportEigensystem {
  RVector values;
  CMatrix vectors;  // one column per eigenvalue
};

SupportEigensystem support_eigensystem(const CMatrix& rho);

/// |psi~_i> = sum_j conj(u_ij) sqrt(lambda_j) |e_j>, w_i = <psi~_i|psi~_i>.
/// Zero-weight rows get the first eigenvector as a placeholder state.
/// Throws std::invalid_argument unless u (k x q) has orthonormal columns
/// within 1e-10 and q equals the support rank.
Decomposition decomposition_from_isometry(const SupportEigensystem& eig, const CMatrix& u);

struct OptimizerConfig {
  int restarts = 20;
  /// Decomposition length k; 0 selects min(rank^2, 16) (at least rank).
  int decomposition_len = 0;
  int max_iters = 500;
  double objective_tol = 1e-7;
  std::uint64_t seed = 1;
  /// Workers for independent restarts; results do not depend on it.
  int threads = 1;
};

struct AssistanceResult {
  /// Best average entanglement found, in bits.
  double e_a_lower = 0.0;
  /// 1 - e_a_lower / log2 N clipped to [0, 1].
  double q_a = 0.0;
  /// Unclipped value of the same expression.
  double q_a_raw = 0.0;
  Decomposition decomposition;
  /// The two best restarts agree within 10 * objective_tol.
  bool converged = false;
  std::vector<double> restart_values;
  /// Value of the plain eigendecomposition, a floor for e_a_lower.
  double eigen_baseline = 0.0;
  int decomposition_len = 0;
  /// e_a_lower only bounds E_A from below, hence q_a bounds Q_A from above.
  static constexpr bool q_a_is_upper_bound = true;
};

/// Average entanglement of the decomposition generated by an isometry u,
/// together with its gradient. The gradient is left-trivialized: for an
/// anti-Hermitian X, d/dt value(exp(tX) u) at t = 0 equals Re tr(G^dagger X).
class AssistanceObjective {
 public:
  AssistanceObjective(const ChoiState& rho, int decomposition_len);

  int support_rank() const { return static_cast<int>(eig_.values.size()); }
  int length() const { return length_; }
  const SupportEigensystem& eigensystem() const { return eig_; }

  double value(const CMatrix& u) const;
  /// Returns the value; writes the anti-Hermitian k x k gradient.
  double value_and_gradient(const CMatrix& u, CMatrix& gradient) const;

 private:
  SupportEigensystem eig_;
  CMatrix weighted_;  // N x q, sqrt(lambda_j) <mm|e_j>
  int length_;
};

/// Maximizes the average entanglement over decompositions of length k with
/// cfg.restarts quasi-Newton ascents from Haar-random isometries. Restart i
/// draws from the stream (cfg.seed, i).
AssistanceResult entanglement_of_assistance(const ChoiState& rho, const OptimizerConfig& cfg);

/// choi_state followed by entanglement_of_assistance.
AssistanceResult quantumness_of_assistance(const PhaseDampingChannel& d,
                                           const OptimizerConfig& cfg);

/// Coordinates of an anti-Hermitian k x k matrix in an orthonormal basis
/// (Frobenius inner product), k^2 reals.
RVector anti_hermitian_to_coords(const CMatrix& x);
CMatrix anti_hermitian_from_coords(const RVector& coords, int k);

}  // namespace dephasing
