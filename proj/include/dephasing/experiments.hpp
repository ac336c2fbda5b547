#pragma once

// Experiment drivers behind the command-line tool. Every driver returns data
// (rows or CSV text) so tests can compare outputs byte for byte.

#include <cstdint>
#include <string>
#include <vector>

#include <json.hpp>

#include "dephasing/assistance.hpp"
#include "dephasing/bloch.hpp"
#include "dephasing/sampling.hpp"

namespace dephasing {

enum ExitCode : int {
  kExitOk = 0,
  kExitParse = 2,
  kExitValidation = 3,
  kExitNumeric = 4,
};

struct MetricsReport {
  int n = 0;
  int rank = 0;
  double v_b = 0.0;
  /// Set when v_b comes from the best principal sub-matrix (r^2 < N).
  std::vector<int> max_subvolume_indices;
  double purity = 0.0;
  double q_a = 0.0;
  double q_a_raw = 0.0;
  double e_a_lower = 0.0;
  bool certified_non_ru = false;
  bool r_squared_le_n = false;
  bool converged = false;
  std::vector<double> restart_values;

  nlohmann::json to_json() const;
};

MetricsReport analyze_channel(const PhaseDampingChannel& d, const OptimizerConfig& cfg,
                              double volume_tol = kDefaultVolumeTol);

/// One point of a one-parameter channel family (MCMQ angle or mixing weight).
struct CurveRow {
  double parameter = 0.0;
  double v_b = 0.0;
  double purity = 0.0;
  double q_a = 0.0;
  bool converged = false;
};

/// `points` angles spread uniformly over [0, arccos(-1/3)]. Row i uses the
/// optimizer stream (cfg.seed, i).
std::vector<CurveRow> mcmq_curve(int points, const OptimizerConfig& cfg, int threads = 1);

/// `points` mixing weights spread uniformly over [0, 1] for
/// (1 - lambda) D_tetra + lambda D_cd.
std::vector<CurveRow> lambda_sweep(int points, const OptimizerConfig& cfg, int threads = 1);

/// Rank-2 samples on C^4 with indices [0, count).
std::vector<SampleRecord> figure2_samples(std::size_t count, std::uint64_t seed,
                                          const OptimizerConfig& cfg, int threads = 1);

/// Rank 2, 3, 4 samples on C^4 with consecutive global indices.
std::vector<SampleRecord> figure3_samples(std::size_t count2, std::size_t count3,
                                          std::size_t count4, std::uint64_t seed,
                                          const OptimizerConfig& cfg, int threads = 1);

/// Fixed-format decimal: 12 significant digits.
std::string format_number(double x);

/// Columns index,seed,rank,v_b,purity,q_a,e_a_lower,converged.
std::string samples_csv(const std::vector<SampleRecord>& records);

/// Columns <parameter_name>,v_b,purity,q_a.
std::string curve_csv(const std::vector<CurveRow>& rows, const std::string& parameter_name);

/// Piecewise-linear MCMQ reference for the bound checks.
class McmqReference {
 public:
  explicit McmqReference(std::vector<CurveRow> rows);

  /// Interpolated q_a at Bloch volume v_b; clamped to the end values outside the curve.
  double q_at_volume(double v_b) const;
  /// Interpolated q_a at purity p; below the curve's minimum purity the
  /// maximal-volume end value applies.
  double q_at_purity(double purity) const;

 private:
  std::vector<CurveRow> rows_;  // ordered by increasing angle
};

struct BoundCheck {
  std::size_t checked = 0;
  std::size_t violations = 0;
  double max_excess = 0.0;  // largest q_a - bound seen (may be negative)
  std::size_t worst_index = 0;
};

BoundCheck check_volume_bound(const std::vector<SampleRecord>& records, const McmqReference& ref,
                              double tolerance);
BoundCheck check_purity_bound(const std::vector<SampleRecord>& records, const McmqReference& ref,
                              double tolerance);

/// Writes `text` to `path`; throws std::runtime_error on failure.
void write_text_file(const std::string& path, const std::string& text);

}  // namespace dephasing
