#include "dephasing/bloch.hpp"

#include <algorithm>
#include <cmath>

namespace dephasing {

namespace {

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

// Visits every increasing index tuple of the given size drawn from [0, n).
template <typename Fn>
void for_each_subset(int n, int size, Fn&& fn) {
  std::vector<int> idx(size);
  for (int i = 0; i < size; ++i) idx[i] = i;
  while (true) {
    fn(idx);
    int pos = size - 1;
    while (pos >= 0 && idx[pos] == n - size + pos) --pos;
    if (pos < 0) return;
    ++idx[pos];
    for (int i = pos + 1; i < size; ++i) idx[i] = idx[i - 1] + 1;
  }
}

}  // namespace

GeneratorBasis su_generators(int r) {
  if (r < 2) throw std::invalid_argument("su_generators: r must be >= 2");
  GeneratorBasis basis;
  basis.rank_r = r;
  for (int j = 0; j < r; ++j) {
    for (int k = j + 1; k < r; ++k) {
      CMatrix g = CMatrix::Zero(r, r);
      g(j, k) = 1.0;
      g(k, j) = 1.0;
      basis.generators.push_back(std::move(g));
    }
  }
  for (int j = 0; j < r; ++j) {
    for (int k = j + 1; k < r; ++k) {
      CMatrix g = CMatrix::Zero(r, r);
      g(j, k) = -kI;
      g(k, j) = kI;
      basis.generators.push_back(std::move(g));
    }
  }
  // diag(1, ..., 1, -l, 0, ...) * sqrt(2 / (l (l + 1))) for l = 1..r-1
  for (int l = 1; l < r; ++l) {
    CMatrix g = CMatrix::Zero(r, r);
    const double scale = std::sqrt(2.0 / (l * (l + 1.0)));
    for (int i = 0; i < l; ++i) g(i, i) = scale;
    g(l, l) = -l * scale;
    basis.generators.push_back(std::move(g));
  }
  return basis;
}

BlochVector bloch_from_state(const CVector& a, const GeneratorBasis& basis) {
  if (a.size() != basis.rank_r) throw DimensionError("bloch_from_state: dimension mismatch");
  if (std::abs(a.norm() - 1.0) > kUnitNormTol) {
    throw std::invalid_argument("bloch_from_state: state is not unit norm");
  }
  BlochVector b(basis.generators.size());
  for (std::size_t i = 0; i < basis.generators.size(); ++i) {
    b(static_cast<Eigen::Index>(i)) = a.dot(basis.generators[i] * a).real();
  }
  return b;
}

std::vector<BlochVector> bloch_vectors(const DynamicalVectors& v) {
  // Rank one: every projector is the identity on C^1 and R^0 is the Bloch space.
  if (v.rank_r() == 1) return std::vector<BlochVector>(v.dim_n(), BlochVector(0));
  const GeneratorBasis basis = su_generators(v.rank_r());
  std::vector<BlochVector> out;
  out.reserve(v.dim_n());
  for (int n = 0; n < v.dim_n(); ++n) out.push_back(bloch_from_state(v.vector(n), basis));
  return out;
}

SquaredDistanceMatrix squared_distances(const PhaseDampingChannel& d) {
  const int n = d.dim_n();
  SquaredDistanceMatrix s(n, n);
  for (int m = 0; m < n; ++m) {
    s(m, m) = 0.0;
    for (int k = m + 1; k < n; ++k) {
      const double v = 4.0 * (1.0 - std::norm(d(m, k)));
      s(m, k) = v;
      s(k, m) = v;
    }
  }
  return s;
}

double cayley_menger_volume(const SquaredDistanceMatrix& s) {
  if (s.rows() != s.cols()) throw DimensionError("cayley_menger_volume: not square");
  const auto k = static_cast<int>(s.rows());
  if (k <= 1) return 0.0;
  RMatrix a(k + 1, k + 1);
  a(0, 0) = 0.0;
  a.row(0).tail(k).setOnes();
  a.col(0).tail(k).setOnes();
  a.bottomRightCorner(k, k) = s;
  const double det = a.fullPivLu().determinant();
  const double sign = (k % 2 == 0) ? 1.0 : -1.0;
  const double fact = factorial(k - 1);
  const double vol2 = sign * det / (std::ldexp(1.0, k - 1) * fact * fact);
  return vol2 > 0.0 ? std::sqrt(vol2) : 0.0;
}

double bloch_volume(const PhaseDampingChannel& d) {
  return cayley_menger_volume(squared_distances(d));
}

SubVolume max_subvolume(const PhaseDampingChannel& d) {
  const int n = d.dim_n();
  const int r = d.rank();
  if (r * r >= n) {
    throw std::invalid_argument("max_subvolume: requires r^2 < N; use bloch_volume");
  }
  const int size = std::max(r * r, 2);
  const SquaredDistanceMatrix all = squared_distances(d);
  SubVolume best;
  for_each_subset(n, size, [&](const std::vector<int>& idx) {
    SquaredDistanceMatrix sub(size, size);
    for (int i = 0; i < size; ++i)
      for (int j = 0; j < size; ++j) sub(i, j) = all(idx[i], idx[j]);
    const double v = cayley_menger_volume(sub);
    if (best.indices.empty() || v > best.volume) {
      best.volume = v;
      best.indices = idx;
    }
  });
  return best;
}

ExtremalityCertificate extremality_certificate(const PhaseDampingChannel& d, double tol) {
  ExtremalityCertificate cert;
  const int n = d.dim_n();
  cert.rank_r = d.rank();
  cert.r_squared_le_n = cert.rank_r * cert.rank_r <= n;
  if (cert.rank_r * cert.rank_r < n) {
    SubVolume sub = max_subvolume(d);
    cert.best_volume = sub.volume;
    cert.witness_indices = std::move(sub.indices);
  } else {
    cert.best_volume = bloch_volume(d);
    cert.witness_indices.resize(n);
    for (int i = 0; i < n; ++i) cert.witness_indices[i] = i;
  }
  cert.certified_non_ru = cert.rank_r >= 2 && cert.r_squared_le_n && cert.best_volume > tol;
  return cert;
}

double barycenter_purity(std::span<const BlochVector> blochs) {
  if (blochs.size() != 4) throw std::invalid_argument("barycenter_purity: need four vectors");
  RVector mean = RVector::Zero(3);
  for (const auto& b : blochs) {
    if (b.size() != 3) throw DimensionError("barycenter_purity: vectors must lie in R^3");
    mean += b;
  }
  mean /= 4.0;
  return 0.5 * (1.0 + mean.squaredNorm());
}

double gram_volume_oracle(std::span<const RVector> points) {
  const auto k = static_cast<int>(points.size());
  if (k < 2) throw std::invalid_argument("gram_volume_oracle: need at least two points");
  const RVector& apex = points.back();
  RMatrix edges(apex.size(), k - 1);
  for (int i = 0; i + 1 < k; ++i) edges.col(i) = points[i] - apex;
  const RMatrix g = edges.transpose() * edges;
  const double det = g.determinant();
  return det > 0.0 ? std::sqrt(det) / factorial(k - 1) : 0.0;
}

}  // namespace dephasing
