#pragma once

// Bloch-space geometry of the dynamical vectors.
//
// Each dynamical vector |a_n> in C^r is mapped to a Bloch vector b_n in
// R^(r^2-1) through |a><a| = (1/r) 1 + (1/2) b . sigma. Pairwise squared
// distances only depend on overlaps, s_mn^2 = 4 (1 - |D_mn|^2), so the
// simplex volume follows from D through the Cayley-Menger determinant
// without ever building Bloch coordinates.

#include <span>
#include <vector>

#include "dephasing/channel.hpp"

namespace dephasing {

inline constexpr double kDefaultVolumeTol = 1e-7;

/// r^2 - 1 traceless Hermitian generators with tr(s_i s_j) = 2 delta_ij.
struct GeneratorBasis {
  int rank_r = 0;
  std::vector<CMatrix> generators;
};

/// Generalized Gell-Mann matrices: symmetric pairs (j<k), antisymmetric pairs
/// (j<k), then diagonal generators. For r = 2 this is (sx, sy, sz).
/// Throws std::invalid_argument for r < 2.
GeneratorBasis su_generators(int r);

using BlochVector = RVector;

/// b_i = <a|s_i|a>. Throws std::invalid_argument for non-unit input and
/// DimensionError when a and basis disagree in dimension.
BlochVector bloch_from_state(const CVector& a, const GeneratorBasis& basis);

/// Bloch vectors of the dynamical vectors in a basis of matching rank.
std::vector<BlochVector> bloch_vectors(const DynamicalVectors& v);

/// Symmetric, zero-diagonal matrix of squared Bloch distances.
using SquaredDistanceMatrix = RMatrix;

/// s_mn^2 = 4 (1 - |D_mn|^2).
SquaredDistanceMatrix squared_distances(const PhaseDampingChannel& d);

/// Volume of the (k-1)-simplex with the given k x k squared edge lengths,
/// from the bordered Cayley-Menger determinant. A single point has volume 0.
/// Slightly negative squared volumes from round-off are clipped to 0.
double cayley_menger_volume(const SquaredDistanceMatrix& s);

/// Volume of the simplex spanned by all N Bloch vectors of the channel.
double bloch_volume(const PhaseDampingChannel& d);

struct SubVolume {
  double volume = 0.0;
  std::vector<int> indices;
};

/// Largest simplex volume over principal sub-matrices of size max(r^2, 2).
/// Ties keep the lexicographically first index set. Throws
/// std::invalid_argument unless r^2 < N.
SubVolume max_subvolume(const PhaseDampingChannel& d);

struct ExtremalityCertificate {
  int rank_r = 0;
  bool r_squared_le_n = false;
  /// Full simplex volume when r^2 >= N, otherwise the best sub-simplex volume.
  double best_volume = 0.0;
  bool certified_non_ru = false;
  std::vector<int> witness_indices;
};

/// Certifies a channel as non random-unitary when 2 <= r, r^2 <= N and the
/// relevant Bloch volume exceeds tol. The check is one-directional: a
/// negative answer says nothing about RU membership.
ExtremalityCertificate extremality_certificate(const PhaseDampingChannel& d,
                                               double tol = kDefaultVolumeTol);

/// 1/2 (1 + |mean(b)|^2) for four Bloch vectors in R^3.
double barycenter_purity(std::span<const BlochVector> blochs);

/// sqrt(det G)/(k-1)! with G_ij = (b_i - b_k).(b_j - b_k). Coordinate route to
/// the simplex volume, kept independent of the Cayley-Menger path.
double gram_volume_oracle(std::span<const RVector> points);

}  // namespace dephasing
