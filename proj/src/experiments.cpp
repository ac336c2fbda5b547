#include "dephasing/experiments.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <sstream>

#include "dephasing/parallel.hpp"
#include "dephasing/random.hpp"

namespace dephasing {

nlohmann::json MetricsReport::to_json() const {
  nlohmann::json j{
      {"n", n},
      {"rank", rank},
      {"v_b", v_b},
      {"volume_kind", max_subvolume_indices.empty() ? "full" : "max_subvolume"},
      {"purity", purity},
      {"q_a", q_a},
      {"q_a_raw", q_a_raw},
      {"q_a_is_upper_bound", AssistanceResult::q_a_is_upper_bound},
      {"e_a_lower", e_a_lower},
      {"certified_non_ru", certified_non_ru},
      {"r_squared_le_n", r_squared_le_n},
      {"converged", converged},
      {"restart_values", restart_values},
  };
  if (!max_subvolume_indices.empty()) j["max_subvolume_indices"] = max_subvolume_indices;
  return j;
}

MetricsReport analyze_channel(const PhaseDampingChannel& d, const OptimizerConfig& cfg,
                              double volume_tol) {
  const ExtremalityCertificate cert = extremality_certificate(d, volume_tol);
  const AssistanceResult ea = quantumness_of_assistance(d, cfg);
  MetricsReport r;
  r.n = d.dim_n();
  r.rank = cert.rank_r;
  r.v_b = cert.best_volume;
  if (cert.rank_r * cert.rank_r < d.dim_n()) r.max_subvolume_indices = cert.witness_indices;
  r.purity = choi_purity(d);
  r.q_a = ea.q_a;
  r.q_a_raw = ea.q_a_raw;
  r.e_a_lower = ea.e_a_lower;
  r.certified_non_ru = cert.certified_non_ru;
  r.r_squared_le_n = cert.r_squared_le_n;
  r.converged = ea.converged;
  r.restart_values = ea.restart_values;
  return r;
}

namespace {

template <typename ChannelAt>
std::vector<CurveRow> family_curve(int points, double lo, double hi, const OptimizerConfig& cfg,
                                   int threads, ChannelAt&& channel_at) {
  if (points < 2) throw std::invalid_argument("curve: need at least two grid points");
  std::vector<CurveRow> rows(points);
  parallel_for(static_cast<std::size_t>(points), threads, [&](std::size_t i) {
    const double t = i + 1 == static_cast<std::size_t>(points)
                         ? hi
                         : lo + (hi - lo) * static_cast<double>(i) / (points - 1);
    const PhaseDampingChannel d = channel_at(t);
    OptimizerConfig local = cfg;
    local.seed = stream_seed(cfg.seed, i);
    local.threads = 1;
    const AssistanceResult ea = quantumness_of_assistance(d, local);
    rows[i] = CurveRow{t, reported_volume(d), choi_purity(d), ea.q_a, ea.converged};
  });
  return rows;
}

}  // namespace

std::vector<CurveRow> mcmq_curve(int points, const OptimizerConfig& cfg, int threads) {
  return family_curve(points, 0.0, tetrahedral_angle(), cfg, threads,
                      [](double alpha) { return mcmq_channel(alpha); });
}

std::vector<CurveRow> lambda_sweep(int points, const OptimizerConfig& cfg, int threads) {
  return family_curve(points, 0.0, 1.0, cfg, threads,
                      [](double lambda) { return tetra_decohering_mixture(lambda); });
}

std::vector<SampleRecord> figure2_samples(std::size_t count, std::uint64_t seed,
                                          const OptimizerConfig& cfg, int threads) {
  BatchOptions opts;
  opts.count = count;
  opts.n = 4;
  opts.r = 2;
  opts.base_seed = seed;
  opts.optimizer = cfg;
  opts.threads = threads;
  return sample_batch(opts);
}

std::vector<SampleRecord> figure3_samples(std::size_t count2, std::size_t count3,
                                          std::size_t count4, std::uint64_t seed,
                                          const OptimizerConfig& cfg, int threads) {
  std::vector<SampleRecord> all;
  std::size_t offset = 0;
  const std::size_t counts[] = {count2, count3, count4};
  for (int r = 2; r <= 4; ++r) {
    BatchOptions opts;
    opts.count = counts[r - 2];
    opts.n = 4;
    opts.r = r;
    opts.base_seed = seed;
    opts.index_offset = offset;
    opts.optimizer = cfg;
    opts.threads = threads;
    for (auto& rec : sample_batch(opts)) {
      rec.sample_index += offset;
      all.push_back(std::move(rec));
    }
    offset += opts.count;
  }
  return all;
}

std::string format_number(double x) {
  if (x == 0.0) x = 0.0;  // drop the sign of negative zero
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", x);
  return buf;
}

std::string samples_csv(const std::vector<SampleRecord>& records) {
  std::string out = "index,seed,rank,v_b,purity,q_a,e_a_lower,converged\n";
  for (const auto& r : records) {
    out += std::to_string(r.sample_index) + ',' + std::to_string(r.seed) + ',' +
           std::to_string(r.rank) + ',' + format_number(r.v_b) + ',' + format_number(r.purity) +
           ',' + format_number(r.q_a) + ',' + format_number(r.e_a_lower) + ',' +
           (r.converged ? "1" : "0") + '\n';
  }
  return out;
}

std::string curve_csv(const std::vector<CurveRow>& rows, const std::string& parameter_name) {
  std::string out = parameter_name + ",v_b,purity,q_a\n";
  for (const auto& r : rows) {
    out += format_number(r.parameter) + ',' + format_number(r.v_b) + ',' +
           format_number(r.purity) + ',' + format_number(r.q_a) + '\n';
  }
  return out;
}

McmqReference::McmqReference(std::vector<CurveRow> rows) : rows_(std::move(rows)) {
  if (rows_.size() < 2) throw std::invalid_argument("McmqReference: need at least two rows");
  std::sort(rows_.begin(), rows_.end(),
            [](const CurveRow& a, const CurveRow& b) { return a.parameter < b.parameter; });
}

namespace {

// Linear interpolation of q over a key that is monotone along `rows`.
template <typename Key>
double interpolate(const std::vector<CurveRow>& rows, double x, Key key) {
  for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
    const double a = key(rows[i]);
    const double b = key(rows[i + 1]);
    if ((x - a) * (x - b) <= 0.0) {
      if (a == b) return std::max(rows[i].q_a, rows[i + 1].q_a);
      const double t = (x - a) / (b - a);
      return rows[i].q_a + t * (rows[i + 1].q_a - rows[i].q_a);
    }
  }
  return std::nan("");
}

}  // namespace

double McmqReference::q_at_volume(double v_b) const {
  if (v_b <= rows_.front().v_b) return rows_.front().q_a;
  if (v_b >= rows_.back().v_b) return rows_.back().q_a;
  return interpolate(rows_, v_b, [](const CurveRow& r) { return r.v_b; });
}

double McmqReference::q_at_purity(double purity) const {
  // Purity decreases from 1 (alpha = 0) to 1/2 (tetrahedron).
  if (purity >= rows_.front().purity) return rows_.front().q_a;
  if (purity <= rows_.back().purity) return rows_.back().q_a;
  return interpolate(rows_, purity, [](const CurveRow& r) { return r.purity; });
}

namespace {

template <typename Bound>
BoundCheck check_bound(const std::vector<SampleRecord>& records, double tolerance, Bound bound) {
  BoundCheck c;
  c.max_excess = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < records.size(); ++i) {
    const double excess = records[i].q_a - bound(records[i]);
    ++c.checked;
    if (excess > tolerance) ++c.violations;
    if (excess > c.max_excess) {
      c.max_excess = excess;
      c.worst_index = records[i].sample_index;
    }
  }
  return c;
}

}  // namespace

BoundCheck check_volume_bound(const std::vector<SampleRecord>& records, const McmqReference& ref,
                              double tolerance) {
  return check_bound(records, tolerance,
                     [&](const SampleRecord& r) { return ref.q_at_volume(r.v_b); });
}

BoundCheck check_purity_bound(const std::vector<SampleRecord>& records, const McmqReference& ref,
                              double tolerance) {
  return check_bound(records, tolerance,
                     [&](const SampleRecord& r) { return ref.q_at_purity(r.purity); });
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << text;
  if (!out) throw std::runtime_error("write failed for " + path);
}

}  // namespace dephasing
