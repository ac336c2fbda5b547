#include "dephasing/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace dephasing {

namespace {

void require_square(const CMatrix& m, const char* what) {
  if (m.rows() != m.cols()) {
    std::ostringstream os;
    os << what << ": expected a square matrix, got " << m.rows() << "x" << m.cols();
    throw DimensionError(os.str());
  }
}

}  // namespace

int numerical_rank(const CMatrix& hermitian) {
  if (hermitian.size() == 0) return 0;
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian, Eigen::EigenvaluesOnly);
  const RVector& ev = es.eigenvalues();
  const double top = ev.maxCoeff();
  if (top <= 0.0) return 0;
  return static_cast<int>((ev.array() > kRankCutoff * top).count());
}

std::string ValidationReport::describe() const {
  std::ostringstream os;
  if (!square) return "matrix is not square";
  os << "hermiticity_defect=" << hermiticity_defect << " min_eigenvalue=" << min_eigenvalue
     << " max_diagonal_deviation=" << max_diagonal_deviation
     << " max_abs_entry=" << max_abs_entry << (strict ? " (strict)" : "")
     << (accepted ? " accepted" : " rejected");
  return os.str();
}

ValidationReport validate_channel(const CMatrix& matrix, bool strict) {
  require_square(matrix, "validate_channel");
  ValidationReport r;
  r.strict = strict;
  if (matrix.size() == 0) {
    r.accepted = false;
    return r;
  }
  r.hermiticity_defect = hermiticity_defect(matrix);
  r.min_eigenvalue = min_eigenvalue(matrix);
  r.max_diagonal_deviation = (matrix.diagonal().array() - 1.0).abs().maxCoeff();
  r.max_abs_entry = matrix.cwiseAbs().maxCoeff();
  const double psd_tol = strict ? kPsdTolStrict : kPsdTol;
  r.accepted = r.hermiticity_defect <= kHermitianTol && r.min_eigenvalue >= -psd_tol &&
               r.max_diagonal_deviation <= kDiagonalTol && r.max_abs_entry <= 1.0 + kDiagonalTol;
  return r;
}

DynamicalVectors::DynamicalVectors(CMatrix columns) : columns_(std::move(columns)) {
  if (columns_.rows() < 1 || columns_.cols() < 1) {
    throw std::invalid_argument("DynamicalVectors: need at least one vector of length >= 1");
  }
  for (Eigen::Index n = 0; n < columns_.cols(); ++n) {
    const double norm = columns_.col(n).norm();
    if (std::abs(norm - 1.0) > kUnitNormTol) {
      std::ostringstream os;
      os << "DynamicalVectors: vector " << n << " has norm " << norm;
      throw std::invalid_argument(os.str());
    }
  }
}

PhaseDampingChannel PhaseDampingChannel::from_matrix(const CMatrix& d, bool strict) {
  const ValidationReport report = validate_channel(d, strict);
  if (!report.accepted) throw InvalidChannel(report);
  return PhaseDampingChannel(d, numerical_rank(0.5 * (d + d.adjoint())));
}

DensityMatrix::DensityMatrix(CMatrix rho) : rho_(std::move(rho)) {
  require_square(rho_, "DensityMatrix");
  if (rho_.size() == 0) throw std::invalid_argument("DensityMatrix: empty matrix");
  if (hermiticity_defect(rho_) > kHermitianTol) {
    throw std::invalid_argument("DensityMatrix: not Hermitian");
  }
  if (std::abs(rho_.trace() - 1.0) > kHermitianTol) {
    throw std::invalid_argument("DensityMatrix: trace differs from 1");
  }
  if (min_eigenvalue(rho_) < -kPsdTol) {
    throw std::invalid_argument("DensityMatrix: not positive semidefinite");
  }
}

double KrausSet::trace_preservation_defect() const {
  if (operators.empty()) return 1.0;
  const auto n = operators.front().rows();
  CMatrix sum = CMatrix::Zero(n, n);
  for (const auto& k : operators) sum += k.adjoint() * k;
  return (sum - CMatrix::Identity(n, n)).cwiseAbs().maxCoeff();
}

double KrausSet::unitality_defect() const {
  if (operators.empty()) return 1.0;
  const auto n = operators.front().rows();
  CMatrix sum = CMatrix::Zero(n, n);
  for (const auto& k : operators) sum += k * k.adjoint();
  return (sum - CMatrix::Identity(n, n)).cwiseAbs().maxCoeff();
}

RuDecomposition::RuDecomposition(std::vector<double> probs, std::vector<CMatrix> unitaries)
    : probs_(std::move(probs)), unitaries_(std::move(unitaries)) {
  if (probs_.empty() || probs_.size() != unitaries_.size()) {
    throw std::invalid_argument("RuDecomposition: need matching, non-empty weights and unitaries");
  }
  double total = 0.0;
  for (double p : probs_) {
    if (p < 0.0) throw std::invalid_argument("RuDecomposition: negative weight");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw std::invalid_argument("RuDecomposition: weights do not sum to 1");
  }
  const auto n = unitaries_.front().rows();
  for (const auto& u : unitaries_) {
    require_square(u, "RuDecomposition");
    if (u.rows() != n) throw DimensionError("RuDecomposition: unitaries differ in dimension");
    if ((u.adjoint() * u - CMatrix::Identity(n, n)).cwiseAbs().maxCoeff() > kKrausTol) {
      throw std::invalid_argument("RuDecomposition: member is not unitary");
    }
  }
}

PhaseDampingChannel channel_from_vectors(const DynamicalVectors& v) {
  // (A^dagger A)_{nm} = <a_n|a_m>, so D = (A^dagger A)^T.
  const CMatrix& a = v.columns();
  CMatrix d = (a.adjoint() * a).transpose();
  // Remove round-off on the diagonal and in the Hermitian pairing.
  d = 0.5 * (d + d.adjoint()).eval();
  d.diagonal().setOnes();
  return PhaseDampingChannel::from_matrix(d);
}

DynamicalVectors vectors_from_channel(const PhaseDampingChannel& d) {
  const int n = d.dim_n();
  const int r = std::max(d.rank(), 1);
  Eigen::SelfAdjointEigenSolver<CMatrix> es(d.matrix());
  const RVector& values = es.eigenvalues();
  const CMatrix& vecs = es.eigenvectors();

  CMatrix columns(r, n);
  for (int j = 0; j < r; ++j) {
    const int src = n - 1 - j;  // descending order
    Eigen::VectorXcd e = vecs.col(src);
    for (int m = 0; m < n; ++m) {
      if (std::abs(e(m)) > 1e-12) {
        e *= std::conj(e(m)) / std::abs(e(m));
        break;
      }
    }
    const double scale = std::sqrt(std::max(values(src), 0.0));
    columns.row(j) = (scale * e).transpose();
  }
  for (int m = 0; m < n; ++m) columns.col(m).normalize();
  return DynamicalVectors(std::move(columns));
}

KrausSet kraus_from_vectors(const DynamicalVectors& v) {
  KrausSet k;
  const int n = v.dim_n();
  for (int i = 0; i < v.rank_r(); ++i) {
    CMatrix op = CMatrix::Zero(n, n);
    op.diagonal() = v.columns().row(i).transpose();
    k.operators.push_back(std::move(op));
  }
  return k;
}

int channel_rank(const PhaseDampingChannel& d) { return d.rank(); }

CMatrix apply_channel(const PhaseDampingChannel& d, const CMatrix& op) {
  if (op.rows() != d.dim_n() || op.cols() != d.dim_n()) {
    throw DimensionError("apply_channel: operator and channel dimensions differ");
  }
  return d.matrix().cwiseProduct(op);
}

DensityMatrix apply_channel(const PhaseDampingChannel& d, const DensityMatrix& rho) {
  return DensityMatrix(apply_channel(d, rho.matrix()));
}

CMatrix apply_kraus(const KrausSet& k, const CMatrix& op) {
  if (k.operators.empty()) throw std::invalid_argument("apply_kraus: empty Kraus set");
  const auto n = k.operators.front().rows();
  if (op.rows() != n || op.cols() != n) {
    throw DimensionError("apply_kraus: operator and Kraus dimensions differ");
  }
  CMatrix out = CMatrix::Zero(n, n);
  for (const auto& kr : k.operators) out += kr * op * kr.adjoint();
  return out;
}

DensityMatrix apply_kraus(const KrausSet& k, const DensityMatrix& rho) {
  return DensityMatrix(apply_kraus(k, rho.matrix()));
}

double tetrahedral_angle() { return std::acos(-1.0 / 3.0); }

PhaseDampingChannel tetra_channel() {
  const double x = 1.0 / std::sqrt(3.0);
  const Complex ix = kI * x;
  CMatrix d(4, 4);
  // clang-format off
  d << 1.0, x,   x,   x,
       x,   1.0, ix,  -ix,
       x,   -ix, 1.0, ix,
       x,   ix,  -ix, 1.0;
  // clang-format on
  return PhaseDampingChannel::from_matrix(d);
}

PhaseDampingChannel completely_decohering(int n) {
  if (n < 1) throw std::invalid_argument("completely_decohering: n must be >= 1");
  return PhaseDampingChannel::from_matrix(CMatrix::Identity(n, n));
}

PhaseDampingChannel unitary_channel(int n) {
  if (n < 1) throw std::invalid_argument("unitary_channel: n must be >= 1");
  return PhaseDampingChannel::from_matrix(CMatrix::Ones(n, n));
}

DynamicalVectors mcmq_vectors(double alpha) {
  if (!(alpha >= -1e-12 && alpha <= tetrahedral_angle() + 1e-12)) {
    throw std::domain_error("mcmq: alpha must lie in [0, arccos(-1/3)]");
  }
  const double third = 2.0 * std::numbers::pi / 3.0;
  const double polar[4] = {0.0, alpha, alpha, alpha};
  const double azimuth[4] = {0.0, 0.0, third, -third};
  CMatrix columns(2, 4);
  for (int n = 0; n < 4; ++n) {
    columns(0, n) = std::cos(0.5 * polar[n]);
    columns(1, n) = std::exp(kI * azimuth[n]) * std::sin(0.5 * polar[n]);
  }
  return DynamicalVectors(std::move(columns));
}

PhaseDampingChannel mcmq_channel(double alpha) { return channel_from_vectors(mcmq_vectors(alpha)); }

PhaseDampingChannel mix_channels(std::span<const PhaseDampingChannel> channels,
                                 std::span<const double> weights) {
  if (channels.empty() || channels.size() != weights.size()) {
    throw std::invalid_argument("mix_channels: need matching, non-empty channels and weights");
  }
  double total = 0.0;
  for (double w : weights) {
    if (w < 0.0) throw std::invalid_argument("mix_channels: negative weight");
    total += w;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw std::invalid_argument("mix_channels: weights do not sum to 1");
  }
  const int n = channels.front().dim_n();
  CMatrix d = CMatrix::Zero(n, n);
  for (std::size_t i = 0; i < channels.size(); ++i) {
    if (channels[i].dim_n() != n) throw DimensionError("mix_channels: dimension mismatch");
    d += weights[i] * channels[i].matrix();
  }
  d.diagonal().setOnes();
  return PhaseDampingChannel::from_matrix(d);
}

PhaseDampingChannel tetra_decohering_mixture(double lambda) {
  const PhaseDampingChannel parts[] = {tetra_channel(), completely_decohering(4)};
  const double weights[] = {1.0 - lambda, lambda};
  return mix_channels(parts, weights);
}

PhaseDampingChannel rephase(const PhaseDampingChannel& d, std::span<const double> phases) {
  if (static_cast<int>(phases.size()) != d.dim_n()) {
    throw DimensionError("rephase: one phase per basis state required");
  }
  CMatrix out = d.matrix();
  for (int m = 0; m < d.dim_n(); ++m) {
    for (int n = 0; n < d.dim_n(); ++n) out(m, n) *= std::exp(kI * (phases[m] - phases[n]));
  }
  out.diagonal().setOnes();
  return PhaseDampingChannel::from_matrix(out);
}

PhaseDampingChannel permute(const PhaseDampingChannel& d, std::span<const int> perm) {
  const int n = d.dim_n();
  if (static_cast<int>(perm.size()) != n) throw DimensionError("permute: wrong length");
  std::vector<int> sorted(perm.begin(), perm.end());
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < n; ++i) {
    if (sorted[i] != i) throw std::invalid_argument("permute: not a permutation");
  }
  CMatrix out(n, n);
  for (int m = 0; m < n; ++m) {
    for (int k = 0; k < n; ++k) out(m, k) = d(perm[m], perm[k]);
  }
  return PhaseDampingChannel::from_matrix(out);
}

double verify_ru_decomposition(const RuDecomposition& ru, const PhaseDampingChannel& d) {
  const int n = d.dim_n();
  if (ru.dim() != n) throw DimensionError("verify_ru_decomposition: dimension mismatch");
  double worst = 0.0;
  for (int m = 0; m < n; ++m) {
    for (int k = 0; k < n; ++k) {
      CMatrix unit = CMatrix::Zero(n, n);
      unit(m, k) = 1.0;
      CMatrix image = CMatrix::Zero(n, n);
      for (std::size_t i = 0; i < ru.probs().size(); ++i) {
        const CMatrix& u = ru.unitaries()[i];
        image += ru.probs()[i] * u * unit * u.adjoint();
      }
      image(m, k) -= d(m, k);
      worst = std::max(worst, image.cwiseAbs().maxCoeff());
    }
  }
  return worst;
}

RuDecomposition two_qubit_dephasing_ensemble() {
  const Eigen::Matrix2cd id = Eigen::Matrix2cd::Identity();
  Eigen::Matrix2cd sz;
  sz << 1.0, 0.0, 0.0, -1.0;
  auto kron = [](const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b) {
    CMatrix out(4, 4);
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) out.block(2 * i, 2 * j, 2, 2) = a(i, j) * b;
    return out;
  };
  return RuDecomposition({0.25, 0.25, 0.25, 0.25},
                         {kron(id, id), kron(sz, id), kron(id, sz), kron(sz, sz)});
}

}  // namespace dephasing
