#include "dephasing/assistance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "dephasing/parallel.hpp"
#include "dephasing/random.hpp"

namespace dephasing {

namespace {

constexpr double kSchmidtClip = 1e-12;

// -x log2 x summed over |C_im|^2, minus the same over the row weights.
double average_entropy(const CMatrix& c, RVector* weights = nullptr) {
  double total = 0.0;
  RVector w(c.rows());
  for (Eigen::Index i = 0; i < c.rows(); ++i) {
    double wi = 0.0;
    for (Eigen::Index m = 0; m < c.cols(); ++m) {
      const double p = std::norm(c(i, m));
      wi += p;
      if (p > 0.0) total -= p * std::log2(p);
    }
    if (wi > 0.0) total += wi * std::log2(wi);
    w(i) = wi;
  }
  if (weights) *weights = std::move(w);
  return total;
}

struct Point {
  CMatrix u;
  double value = 0.0;  // minimized objective: minus the average entanglement
  RVector grad;        // gradient of `value` in Lie-algebra coordinates
};

// Exponential map exp(t X) for a fixed anti-Hermitian X, reusing one eigensolve.
class Geodesic {
 public:
  explicit Geodesic(const CMatrix& x) {
    const CMatrix h = kI * x;
    es_.compute(0.5 * (h + h.adjoint()));
  }
  CMatrix exp(double t) const {
    const Eigen::VectorXcd phases =
        es_.eigenvalues().unaryExpr([t](double l) { return std::exp(-kI * (l * t)); });
    return es_.eigenvectors() * phases.asDiagonal() * es_.eigenvectors().adjoint();
  }

 private:
  Eigen::SelfAdjointEigenSolver<CMatrix> es_;
};

class RestartSolver {
 public:
  RestartSolver(const AssistanceObjective& objective, const OptimizerConfig& cfg)
      : objective_(objective), cfg_(cfg), k_(objective.length()) {}

  Point evaluate(const CMatrix& u) const {
    Point p;
    p.u = u;
    CMatrix g;
    p.value = -objective_.value_and_gradient(u, g);
    p.grad = -anti_hermitian_to_coords(g);
    return p;
  }

  Point run(CMatrix u0) const {
    Point cur = evaluate(u0);
    const auto dim = cur.grad.size();
    RMatrix h = RMatrix::Identity(dim, dim);
    bool fresh = true;  // h is the identity
    int stalls = 0;
    for (int iter = 0; iter < cfg_.max_iters; ++iter) {
      if (cur.grad.lpNorm<Eigen::Infinity>() < 1e-10) break;
      RVector dir = -(h.selfadjointView<Eigen::Lower>() * cur.grad);
      double slope = dir.dot(cur.grad);
      if (!(slope < 0.0)) {
        h.setIdentity();
        fresh = true;
        dir = -cur.grad;
        slope = dir.dot(cur.grad);
      }
      const double t0 = iter == 0 ? std::min(1.0, 1.0 / cur.grad.norm()) : 1.0;
      Point next;
      double step = 0.0;
      if (!line_search(cur, dir, slope, t0, next, step)) {
        if (fresh) break;
        h.setIdentity();
        fresh = true;
        continue;
      }
      const RVector s = step * dir;
      const RVector y = next.grad - cur.grad;
      const double sy = s.dot(y);
      if (sy > 1e-14) {
        const double rho = 1.0 / sy;
        const RVector hy = h.selfadjointView<Eigen::Lower>() * y;
        auto hs = h.selfadjointView<Eigen::Lower>();
        hs.rankUpdate(s, (1.0 + rho * y.dot(hy)) * rho);
        hs.rankUpdate(hy, s, -rho);
        fresh = false;
      }
      const double gain = cur.value - next.value;
      cur = std::move(next);
      if ((iter + 1) % 25 == 0) cur = evaluate(reorthonormalize(cur.u));
      stalls = gain < 1e-3 * cfg_.objective_tol ? stalls + 1 : 0;
      if (stalls >= 3) break;
    }
    return cur;
  }

 private:
  static CMatrix reorthonormalize(const CMatrix& u) {
    Eigen::JacobiSVD<CMatrix> svd(u, Eigen::ComputeThinU | Eigen::ComputeThinV);
    return svd.matrixU() * svd.matrixV().adjoint();
  }

  // Strong Wolfe search along t -> exp(t X) u with X the matrix of `dir`.
  bool line_search(const Point& start, const RVector& dir, double slope0, double t_init,
                   Point& out, double& t_out) const {
    constexpr double c1 = 1e-4;
    constexpr double c2 = 0.9;
    const Geodesic geo(anti_hermitian_from_coords(dir, k_));
    auto at = [&](double t, double& dphi) {
      Point p = evaluate(geo.exp(t) * start.u);
      dphi = p.grad.dot(dir);
      return p;
    };

    auto zoom = [&](double lo, double phi_lo, double dphi_lo, double hi, double phi_hi) {
      for (int i = 0; i < 40; ++i) {
        // Quadratic interpolant through (lo, phi_lo, dphi_lo) and (hi, phi_hi).
        const double width = hi - lo;
        double t = lo + 0.5 * width;
        const double denom = 2.0 * (phi_hi - phi_lo - dphi_lo * width);
        if (denom > 0.0) {
          const double cand = lo - dphi_lo * width * width / denom;
          const double a = std::min(lo, hi) + 0.1 * std::abs(width);
          const double b = std::max(lo, hi) - 0.1 * std::abs(width);
          if (cand > a && cand < b) t = cand;
        }
        double dphi = 0.0;
        Point p = at(t, dphi);
        if (p.value > start.value + c1 * t * slope0 || p.value >= phi_lo) {
          hi = t;
          phi_hi = p.value;
        } else {
          if (std::abs(dphi) <= -c2 * slope0) {
            out = std::move(p);
            t_out = t;
            return true;
          }
          if (dphi * (hi - lo) >= 0.0) {
            hi = lo;
            phi_hi = phi_lo;
          }
          lo = t;
          phi_lo = p.value;
          dphi_lo = dphi;
          out = std::move(p);
          t_out = t;
        }
        if (std::abs(hi - lo) < 1e-14) break;
      }
      // Accept any sufficient decrease found while zooming.
      return t_out > 0.0 && out.value < start.value;
    };

    t_out = 0.0;
    double t_prev = 0.0;
    double phi_prev = start.value;
    double dphi_prev = slope0;
    double t = t_init;
    for (int i = 0; i < 30; ++i) {
      double dphi = 0.0;
      Point p = at(t, dphi);
      if (!std::isfinite(p.value)) return false;
      if (p.value > start.value + c1 * t * slope0 || (i > 0 && p.value >= phi_prev)) {
        return zoom(t_prev, phi_prev, dphi_prev, t, p.value);
      }
      if (std::abs(dphi) <= -c2 * slope0) {
        out = std::move(p);
        t_out = t;
        return true;
      }
      if (dphi >= 0.0) {
        const double phi_t = p.value;
        out = std::move(p);
        t_out = t;
        return zoom(t, phi_t, dphi, t_prev, phi_prev);
      }
      t_prev = t;
      phi_prev = p.value;
      dphi_prev = dphi;
      out = std::move(p);
      t_out = t;
      t *= 2.0;
    }
    return t_out > 0.0;
  }

  const AssistanceObjective& objective_;
  const OptimizerConfig& cfg_;
  int k_;
};

}  // namespace

ChoiState::ChoiState(const PhaseDampingChannel& d) : dim_n_(d.dim_n()) {
  const int n = dim_n_;
  matrix_ = CMatrix::Zero(n * n, n * n);
  for (int m = 0; m < n; ++m) {
    for (int k = 0; k < n; ++k) matrix_(m * n + m, k * n + k) = d(m, k) / static_cast<double>(n);
  }
}

ChoiState choi_state(const PhaseDampingChannel& d) { return ChoiState(d); }

double choi_purity(const PhaseDampingChannel& d) {
  const double n = d.dim_n();
  return d.matrix().cwiseAbs2().sum() / (n * n);
}

double shannon_entropy_bits(const RVector& probs) {
  double h = 0.0;
  for (Eigen::Index i = 0; i < probs.size(); ++i) {
    if (probs(i) > kSchmidtClip) h -= probs(i) * std::log2(probs(i));
  }
  return h;
}

double entanglement_entropy(const CVector& psi, int dim_a, int dim_b) {
  if (psi.size() != static_cast<Eigen::Index>(dim_a) * dim_b) {
    throw DimensionError("entanglement_entropy: state size differs from dim_a * dim_b");
  }
  if (std::abs(psi.norm() - 1.0) > 1e-10) {
    throw std::invalid_argument("entanglement_entropy: state is not unit norm");
  }
  // psi_(a*dim_b + b) -> M(a, b)
  CMatrix m(dim_a, dim_b);
  for (int a = 0; a < dim_a; ++a)
    for (int b = 0; b < dim_b; ++b) m(a, b) = psi(a * dim_b + b);
  Eigen::JacobiSVD<CMatrix> svd(m);
  return shannon_entropy_bits(svd.singularValues().cwiseAbs2());
}

CMatrix Decomposition::mixture() const {
  if (states.empty()) return {};
  const auto n = states.front().size();
  CMatrix out = CMatrix::Zero(n, n);
  for (std::size_t i = 0; i < states.size(); ++i) {
    out += weights[i] * states[i] * states[i].adjoint();
  }
  return out;
}

double Decomposition::average_entanglement(int dim_a, int dim_b) const {
  double total = 0.0;
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (weights[i] > 0.0) total += weights[i] * entanglement_entropy(states[i], dim_a, dim_b);
  }
  return total;
}

SupportEigensystem support_eigensystem(const CMatrix& rho) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(0.5 * (rho + rho.adjoint()));
  const int rank = numerical_rank(rho);
  const auto n = rho.rows();
  SupportEigensystem out;
  out.values.resize(rank);
  out.vectors.resize(n, rank);
  for (int j = 0; j < rank; ++j) {
    out.values(j) = es.eigenvalues()(n - 1 - j);
    out.vectors.col(j) = es.eigenvectors().col(n - 1 - j);
  }
  return out;
}

Decomposition decomposition_from_isometry(const SupportEigensystem& eig, const CMatrix& u) {
  const auto q = eig.values.size();
  if (u.cols() != q || u.rows() < q) {
    throw std::invalid_argument("decomposition_from_isometry: u must be k x rank with k >= rank");
  }
  if ((u.adjoint() * u - CMatrix::Identity(q, q)).cwiseAbs().maxCoeff() > 1e-10) {
    throw std::invalid_argument("decomposition_from_isometry: u is not an isometry");
  }
  const CMatrix scaled = eig.vectors * eig.values.cwiseMax(0.0).cwiseSqrt().asDiagonal();
  const CMatrix unnormalized = scaled * u.conjugate().transpose();  // column i = psi~_i
  Decomposition d;
  for (Eigen::Index i = 0; i < u.rows(); ++i) {
    CVector psi = unnormalized.col(i);
    const double w = psi.squaredNorm();
    d.weights.push_back(w);
    d.states.push_back(w > 0.0 ? CVector(psi / std::sqrt(w)) : CVector(eig.vectors.col(0)));
  }
  return d;
}

AssistanceObjective::AssistanceObjective(const ChoiState& rho, int decomposition_len)
    : eig_(support_eigensystem(rho.matrix())), length_(decomposition_len) {
  const int n = rho.dim_n();
  const int q = support_rank();
  if (length_ < q) {
    throw std::invalid_argument("AssistanceObjective: decomposition length below support rank");
  }
  weighted_.resize(n, q);
  for (int m = 0; m < n; ++m) {
    for (int j = 0; j < q; ++j) {
      weighted_(m, j) = std::sqrt(std::max(eig_.values(j), 0.0)) * eig_.vectors(m * n + m, j);
    }
  }
}

double AssistanceObjective::value(const CMatrix& u) const {
  // C_im = <mm|psi~_i> = sum_j conj(u_ij) M_mj
  const CMatrix c = u.conjugate() * weighted_.transpose();
  return average_entropy(c);
}

double AssistanceObjective::value_and_gradient(const CMatrix& u, CMatrix& gradient) const {
  const CMatrix c = u.conjugate() * weighted_.transpose();
  RVector w;
  const double f = average_entropy(c, &w);
  // df/d conj(C_im) = C_im log2(w_i / |C_im|^2)
  CMatrix g(c.rows(), c.cols());
  for (Eigen::Index i = 0; i < c.rows(); ++i) {
    for (Eigen::Index m = 0; m < c.cols(); ++m) {
      const double p = std::norm(c(i, m));
      g(i, m) = p > 0.0 ? c(i, m) * std::log2(w(i) / p) : Complex(0.0);
    }
  }
  // df = 2 Re tr(E^T du), du = X u  =>  grad = Y^dagger - Y with Y = u E^T.
  const CMatrix e = g * weighted_.conjugate();
  const CMatrix y = u * e.transpose();
  gradient = y.adjoint() - y;
  return f;
}

RVector anti_hermitian_to_coords(const CMatrix& x) {
  const auto k = static_cast<int>(x.rows());
  RVector c(k * k);
  int pos = 0;
  for (int j = 0; j < k; ++j) c(pos++) = x(j, j).imag();
  for (int j = 0; j < k; ++j) {
    for (int l = j + 1; l < k; ++l) {
      c(pos++) = std::numbers::sqrt2 * x(j, l).real();
      c(pos++) = std::numbers::sqrt2 * x(j, l).imag();
    }
  }
  return c;
}

CMatrix anti_hermitian_from_coords(const RVector& coords, int k) {
  if (coords.size() != static_cast<Eigen::Index>(k) * k) {
    throw DimensionError("anti_hermitian_from_coords: expected k^2 coordinates");
  }
  CMatrix x = CMatrix::Zero(k, k);
  int pos = 0;
  for (int j = 0; j < k; ++j) x(j, j) = Complex(0.0, coords(pos++));
  for (int j = 0; j < k; ++j) {
    for (int l = j + 1; l < k; ++l) {
      const double re = coords(pos++) / std::numbers::sqrt2;
      const double im = coords(pos++) / std::numbers::sqrt2;
      x(j, l) = Complex(re, im);
      x(l, j) = Complex(-re, im);
    }
  }
  return x;
}

AssistanceResult entanglement_of_assistance(const ChoiState& rho, const OptimizerConfig& cfg) {
  if (cfg.restarts < 1) throw std::invalid_argument("OptimizerConfig: restarts must be >= 1");
  if (cfg.max_iters < 0 || !(cfg.objective_tol > 0.0)) {
    throw std::invalid_argument("OptimizerConfig: max_iters >= 0 and objective_tol > 0 required");
  }
  const int n = rho.dim_n();
  const SupportEigensystem eig = support_eigensystem(rho.matrix());
  const int q = static_cast<int>(eig.values.size());
  int k = cfg.decomposition_len > 0 ? cfg.decomposition_len : std::min(q * q, 16);
  k = std::max(k, q);
  if (cfg.decomposition_len > 0 && cfg.decomposition_len < q) {
    throw std::invalid_argument("OptimizerConfig: decomposition length below Choi rank");
  }

  const AssistanceObjective objective(rho, k);
  AssistanceResult result;
  result.decomposition_len = k;

  const CMatrix identity_iso = CMatrix::Identity(k, q);
  result.eigen_baseline = objective.value(identity_iso);
  CMatrix best_u = identity_iso;
  double best = result.eigen_baseline;

  if (q == 1) {
    // A pure state has a single decomposition.
    result.restart_values.assign(cfg.restarts, best);
    result.converged = true;
  } else {
    std::vector<CMatrix> finals(cfg.restarts);
    result.restart_values.resize(cfg.restarts);
    const RestartSolver solver(objective, cfg);
    parallel_for(cfg.restarts, cfg.threads, [&](std::size_t i) {
      Rng rng = stream_rng(cfg.seed, i);
      const Point p = solver.run(haar_isometry(k, q, rng));
      finals[i] = p.u;
      result.restart_values[i] = -p.value;
    });
    for (int i = 0; i < cfg.restarts; ++i) {
      if (result.restart_values[i] > best) {
        best = result.restart_values[i];
        best_u = finals[i];
      }
    }
    std::vector<double> sorted = result.restart_values;
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    result.converged = sorted.size() >= 2 && sorted[0] - sorted[1] <= 10.0 * cfg.objective_tol;
  }

  // Re-project onto exact isometries before building the reported decomposition.
  Eigen::JacobiSVD<CMatrix> svd(best_u, Eigen::ComputeThinU | Eigen::ComputeThinV);
  best_u = svd.matrixU() * svd.matrixV().adjoint();
  result.decomposition = decomposition_from_isometry(eig, best_u);

  const double log_n = std::log2(static_cast<double>(n));
  result.e_a_lower = std::clamp(best, 0.0, log_n);
  result.q_a_raw = n > 1 ? 1.0 - best / log_n : 0.0;
  result.q_a = std::clamp(result.q_a_raw, 0.0, 1.0);
  return result;
}

AssistanceResult quantumness_of_assistance(const PhaseDampingChannel& d,
                                           const OptimizerConfig& cfg) {
  return entanglement_of_assistance(ChoiState(d), cfg);
}

}  // namespace dephasing
