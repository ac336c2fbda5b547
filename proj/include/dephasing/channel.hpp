#pragma once

// Phase-damping channels on C^N.
//
// A phase-damping channel leaves the populations of a preferred basis |n>
// untouched and multiplies each coherence rho_mn by a damping factor
// D_mn = <a_n|a_m>, where the |a_n> are unit vectors in C^r (the dynamical
// vectors). The matrix D is therefore a Gram matrix: Hermitian, positive
// semidefinite, unit diagonal. Its rank r is the Kraus rank of the channel.

#include <span>
#include <string>
#include <vector>

#include "dephasing/linalg.hpp"

namespace dephasing {

inline constexpr double kUnitNormTol = 1e-12;
inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kPsdTol = 1e-10;
inline constexpr double kPsdTolStrict = 1e-12;
inline constexpr double kDiagonalTol = 1e-12;
inline constexpr double kRankCutoff = 1e-10;
inline constexpr double kKrausTol = 1e-10;

/// Numerical rank of a Hermitian PSD matrix: eigenvalues above kRankCutoff * lambda_max.
int numerical_rank(const CMatrix& hermitian);

struct ValidationReport {
  bool square = true;
  double hermiticity_defect = 0.0;
  double min_eigenvalue = 0.0;
  double max_diagonal_deviation = 0.0;
  double max_abs_entry = 0.0;
  bool strict = false;
  bool accepted = false;

  std::string describe() const;
};

/// Checks that `matrix` is a valid damping matrix. Throws DimensionError for
/// non-square input. `strict` tightens the PSD tolerance to -1e-12.
ValidationReport validate_channel(const CMatrix& matrix, bool strict = false);

/// N unit vectors in C^r, stored as the columns of an r x N matrix.
class DynamicalVectors {
 public:
  /// Throws std::invalid_argument if any column is not unit norm or the shape is empty.
  explicit DynamicalVectors(CMatrix columns);

  int dim_n() const { return static_cast<int>(columns_.cols()); }
  int rank_r() const { return static_cast<int>(columns_.rows()); }
  const CMatrix& columns() const { return columns_; }
  Eigen::VectorXcd vector(int n) const { return columns_.col(n); }

 private:
  CMatrix columns_;
};

class InvalidChannel : public std::invalid_argument {
 public:
  explicit InvalidChannel(ValidationReport report)
      : std::invalid_argument("invalid phase-damping channel: " + report.describe()),
        report_(report) {}
  const ValidationReport& report() const { return report_; }

 private:
  ValidationReport report_;
};

/// Immutable phase-damping channel, described by its damping matrix D.
class PhaseDampingChannel {
 public:
  /// Validates and stores `d`; throws InvalidChannel or DimensionError.
  static PhaseDampingChannel from_matrix(const CMatrix& d, bool strict = false);

  int dim_n() const { return static_cast<int>(d_.rows()); }
  const CMatrix& matrix() const { return d_; }
  Complex operator()(int m, int n) const { return d_(m, n); }
  /// Kraus rank, fixed at construction.
  int rank() const { return rank_; }

 private:
  PhaseDampingChannel(CMatrix d, int rank) : d_(std::move(d)), rank_(rank) {}

  CMatrix d_;
  int rank_;
};

class DensityMatrix {
 public:
  /// Throws std::invalid_argument unless rho is Hermitian, unit trace and PSD.
  explicit DensityMatrix(CMatrix rho);

  int dim() const { return static_cast<int>(rho_.rows()); }
  const CMatrix& matrix() const { return rho_; }

 private:
  CMatrix rho_;
};

/// Kraus operators; for phase damping each operator is diagonal.
struct KrausSet {
  std::vector<CMatrix> operators;

  /// max |sum K^dagger K - 1|
  double trace_preservation_defect() const;
  /// max |sum K K^dagger - 1|
  double unitality_defect() const;
};

/// Probabilistic mixture of unitary conjugations.
class RuDecomposition {
 public:
  /// Throws std::invalid_argument on bad weights or non-unitary members.
  RuDecomposition(std::vector<double> probs, std::vector<CMatrix> unitaries);

  const std::vector<double>& probs() const { return probs_; }
  const std::vector<CMatrix>& unitaries() const { return unitaries_; }
  int dim() const { return static_cast<int>(unitaries_.front().rows()); }

 private:
  std::vector<double> probs_;
  std::vector<CMatrix> unitaries_;
};

// Representations -----------------------------------------------------------

/// D_mn = <a_n|a_m>.
PhaseDampingChannel channel_from_vectors(const DynamicalVectors& v);

/// Gram factorization of D. Eigenvectors are taken in descending eigenvalue
/// order, each with its first nonzero component real positive; vector n is
/// row n of V sqrt(Lambda), restricted to the leading r columns.
DynamicalVectors vectors_from_channel(const PhaseDampingChannel& d);

/// K_i = sum_n (a_n)_i |n><n|, so that sum_i K_i rho K_i^dagger = D * rho.
KrausSet kraus_from_vectors(const DynamicalVectors& v);

int channel_rank(const PhaseDampingChannel& d);

// Application ---------------------------------------------------------------

/// rho'_mn = D_mn rho_mn.
DensityMatrix apply_channel(const PhaseDampingChannel& d, const DensityMatrix& rho);
CMatrix apply_channel(const PhaseDampingChannel& d, const CMatrix& op);

DensityMatrix apply_kraus(const KrausSet& k, const DensityMatrix& rho);
CMatrix apply_kraus(const KrausSet& k, const CMatrix& op);

// Named channels ------------------------------------------------------------

/// Largest admissible MCMQ angle, arccos(-1/3).
double tetrahedral_angle();

/// The regular-tetrahedron channel with off-diagonal modulus 1/sqrt(3).
PhaseDampingChannel tetra_channel();

/// Identity damping matrix: all coherences destroyed.
PhaseDampingChannel completely_decohering(int n);

/// All-ones damping matrix on C^n: the identity channel.
PhaseDampingChannel unitary_channel(int n);

/// The four C^2 dynamical vectors of the MCMQ family: polar angles
/// (0, alpha, alpha, alpha), azimuths (0, 0, 2pi/3, -2pi/3).
DynamicalVectors mcmq_vectors(double alpha);

/// Gram channel of mcmq_vectors(alpha). Throws std::domain_error outside
/// [0, arccos(-1/3)].
PhaseDampingChannel mcmq_channel(double alpha);

/// Entrywise convex combination. Throws std::invalid_argument on bad weights
/// and DimensionError on mixed dimensions.
PhaseDampingChannel mix_channels(std::span<const PhaseDampingChannel> channels,
                                 std::span<const double> weights);

/// (1 - lambda) D_tetra + lambda D_cd.
PhaseDampingChannel tetra_decohering_mixture(double lambda);

/// D -> u D u^dagger with u = diag(exp(i phases)).
PhaseDampingChannel rephase(const PhaseDampingChannel& d, std::span<const double> phases);

/// D'_mn = D_{perm[m], perm[n]}.
PhaseDampingChannel permute(const PhaseDampingChannel& d, std::span<const int> perm);

// Random-unitary checks -----------------------------------------------------

/// Max over matrix units |m><n| of the entrywise deviation between
/// sum_i p_i U_i |m><n| U_i^dagger and D_mn |m><n|.
double verify_ru_decomposition(const RuDecomposition& ru, const PhaseDampingChannel& d);

/// Equal-weight ensemble {1x1, sz x 1, 1 x sz, sz x sz} on two qubits, which
/// realizes completely_decohering(4).
RuDecomposition two_qubit_dephasing_ensemble();

}  // namespace dephasing
