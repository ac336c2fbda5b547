// dephasing: analyze phase-damping channels and regenerate the experiment data.
//
// Exit codes: 0 success, 2 parse error (command line or channel file),
// 3 channel validation failure, 4 internal numeric failure.

#include <cmath>
#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "dephasing/channel_json.hpp"
#include "dephasing/experiments.hpp"

namespace {

using namespace dephasing;

constexpr const char* kSampleColumns =
    "CSV columns:\n"
    "  index      sample number (global across ranks)\n"
    "  seed       stream seed the channel was drawn from\n"
    "  rank       Kraus rank r of the channel\n"
    "  v_b        Bloch simplex volume (best sub-simplex when r^2 < N)\n"
    "  purity     purity of the Jamiolkowski state\n"
    "  q_a        quantumness of assistance (upper bound: the optimizer underestimates E_A)\n"
    "  e_a_lower  best entanglement of assistance found, bits\n"
    "  converged  1 when the two best optimizer restarts agree within 10*tol\n"
    "The MCMQ reference curve (alpha,v_b,purity,q_a) is written to --curve-out,\n"
    "by default <out>_mcmq.csv next to --out.";

constexpr const char* kCurveColumns =
    "CSV columns: <parameter>,v_b,purity,q_a where the parameter is alpha (MCMQ angle)\n"
    "or lambda (weight of the completely decohering channel). q_a is an upper bound.";

struct SharedOptions {
  int restarts = 20;
  double tol = 1e-7;
  int k = 0;
  int max_iters = 500;
  int threads = 0;
  std::uint64_t seed = 1;
  double volume_tol = kDefaultVolumeTol;
  std::string manifest;
  std::string out;

  OptimizerConfig optimizer() const {
    OptimizerConfig cfg;
    cfg.restarts = restarts;
    cfg.objective_tol = tol;
    cfg.decomposition_len = k;
    cfg.max_iters = max_iters;
    cfg.seed = seed;
    cfg.threads = 1;
    return cfg;
  }
};

void add_shared(CLI::App& cmd, SharedOptions& o) {
  cmd.add_option("--restarts", o.restarts, "Optimizer restarts per channel")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd.add_option("--tol", o.tol, "Optimizer objective tolerance")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd.add_option("--k", o.k, "Decomposition length (0: rank^2 capped at 16)")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  cmd.add_option("--max-iters", o.max_iters, "Quasi-Newton iterations per restart")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  cmd.add_option("--threads", o.threads, "Worker threads (0: all cores); output does not depend on it")
      ->check(CLI::NonNegativeNumber)
      ->capture_default_str();
  cmd.add_option("--volume-tol", o.volume_tol, "Bloch volume threshold for the extremality certificate")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  cmd.add_option("--manifest", o.manifest, "Write the fully resolved configuration to this file");
}

std::string curve_path_for(const std::string& out, const std::string& explicit_path) {
  if (!explicit_path.empty()) return explicit_path;
  if (out.empty() || out == "-") return {};
  std::filesystem::path p(out);
  return (p.parent_path() / (p.stem().string() + "_mcmq.csv")).string();
}

void emit(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
  } else {
    write_text_file(path, text);
  }
}

void require_finite(const std::vector<SampleRecord>& records) {
  for (const auto& r : records) {
    if (!std::isfinite(r.v_b) || !std::isfinite(r.purity) || !std::isfinite(r.q_a)) {
      throw std::runtime_error("non-finite metric in sample " + std::to_string(r.sample_index));
    }
  }
}

void require_finite(const std::vector<CurveRow>& rows) {
  for (const auto& r : rows) {
    if (!std::isfinite(r.v_b) || !std::isfinite(r.purity) || !std::isfinite(r.q_a)) {
      throw std::runtime_error("non-finite metric in curve row");
    }
  }
}

class NumericFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Phase-damping channel quantumness: Bloch volume, purity and entanglement of assistance"};
  app.set_config("--config", "", "Read options from a TOML/INI file (command-line flags win)");
  app.require_subcommand(1);

  // analyze
  SharedOptions analyze_opts;
  std::string analyze_in;
  auto* analyze = app.add_subcommand("analyze", "Report rank, V_B, purity, Q_A and the extremality certificate of one channel");
  analyze->add_option("--in", analyze_in, "Channel JSON file {\"n\": N, \"d\": [[[re, im], ...], ...]}")
      ->required();
  analyze->add_option("--json-out", analyze_opts.out, "Write the report here instead of stdout");
  analyze->add_option("--seed", analyze_opts.seed, "Optimizer seed")->capture_default_str();
  add_shared(*analyze, analyze_opts);

  // figure2
  SharedOptions fig2_opts;
  std::size_t fig2_count = 2000;
  std::string fig2_curve_out;
  int fig2_curve_points = 41;
  auto* fig2 = app.add_subcommand("figure2", "Random rank-2 channels on two qubits: Q_A against V_B");
  fig2->add_option("--count", fig2_count, "Number of channels")->check(CLI::PositiveNumber)->capture_default_str();
  fig2->add_option("--seed", fig2_opts.seed, "Base seed")->capture_default_str();
  fig2->add_option("--out", fig2_opts.out, "Output CSV (default stdout)");
  fig2->add_option("--curve-out", fig2_curve_out, "MCMQ reference curve CSV");
  fig2->add_option("--curve-points", fig2_curve_points, "MCMQ grid points")
      ->check(CLI::Range(2, 1 << 20))
      ->capture_default_str();
  add_shared(*fig2, fig2_opts);
  fig2->footer(kSampleColumns);

  // figure3
  SharedOptions fig3_opts;
  std::size_t count2 = 500, count3 = 500, count4 = 500;
  std::string fig3_curve_out;
  int fig3_curve_points = 41;
  auto* fig3 = app.add_subcommand("figure3", "Random channels of rank 2, 3 and 4 on two qubits: Q_A against purity");
  fig3->add_option("--count2", count2, "Rank-2 channels")->check(CLI::PositiveNumber)->capture_default_str();
  fig3->add_option("--count3", count3, "Rank-3 channels")->check(CLI::PositiveNumber)->capture_default_str();
  fig3->add_option("--count4", count4, "Rank-4 channels")->check(CLI::PositiveNumber)->capture_default_str();
  fig3->add_option("--seed", fig3_opts.seed, "Base seed")->capture_default_str();
  fig3->add_option("--out", fig3_opts.out, "Output CSV (default stdout)");
  fig3->add_option("--curve-out", fig3_curve_out, "MCMQ reference curve CSV");
  fig3->add_option("--curve-points", fig3_curve_points, "MCMQ grid points")
      ->check(CLI::Range(2, 1 << 20))
      ->capture_default_str();
  add_shared(*fig3, fig3_opts);
  fig3->footer(kSampleColumns);

  // mcmq-curve
  SharedOptions mcmq_opts;
  int mcmq_points = 41;
  auto* mcmq = app.add_subcommand("mcmq-curve", "Metrics along the MCMQ family, alpha in [0, arccos(-1/3)]");
  mcmq->add_option("--points", mcmq_points, "Grid points")->check(CLI::Range(2, 1 << 20))->capture_default_str();
  mcmq->add_option("--seed", mcmq_opts.seed, "Optimizer seed")->capture_default_str();
  mcmq->add_option("--out", mcmq_opts.out, "Output CSV (default stdout)");
  add_shared(*mcmq, mcmq_opts);
  mcmq->footer(kCurveColumns);

  // lambda-sweep
  SharedOptions sweep_opts;
  int sweep_points = 41;
  auto* sweep = app.add_subcommand("lambda-sweep", "Metrics of (1-lambda) D_tetra + lambda D_cd, lambda in [0, 1]");
  sweep->add_option("--points", sweep_points, "Grid points")->check(CLI::Range(2, 1 << 20))->capture_default_str();
  sweep->add_option("--seed", sweep_opts.seed, "Optimizer seed")->capture_default_str();
  sweep->add_option("--out", sweep_opts.out, "Output CSV (default stdout)");
  add_shared(*sweep, sweep_opts);
  sweep->footer(kCurveColumns);

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitParse;
  }

  auto write_manifest = [&](const SharedOptions& o) {
    if (!o.manifest.empty()) write_text_file(o.manifest, app.config_to_str(true, true));
  };

  try {
    if (*analyze) {
      write_manifest(analyze_opts);
      CMatrix m;
      try {
        m = read_channel_file(analyze_in);
      } catch (const ChannelParseError& e) {
        std::cerr << "parse error: " << e.what() << '\n';
        return kExitParse;
      }
      const ValidationReport report = validate_channel(m);
      if (!report.accepted) {
        nlohmann::json j{{"error", "validation"},
                         {"hermiticity_defect", report.hermiticity_defect},
                         {"min_eigenvalue", report.min_eigenvalue},
                         {"max_diagonal_deviation", report.max_diagonal_deviation},
                         {"max_abs_entry", report.max_abs_entry}};
        std::cerr << j.dump(2) << '\n';
        return kExitValidation;
      }
      const PhaseDampingChannel d = PhaseDampingChannel::from_matrix(m);
      OptimizerConfig cfg = analyze_opts.optimizer();
      cfg.threads = analyze_opts.threads;
      const MetricsReport r = analyze_channel(d, cfg, analyze_opts.volume_tol);
      if (!std::isfinite(r.v_b) || !std::isfinite(r.q_a) || !std::isfinite(r.purity)) {
        throw NumericFailure("non-finite metric");
      }
      emit(analyze_opts.out, r.to_json().dump(2) + "\n");
    } else if (*fig2) {
      write_manifest(fig2_opts);
      const OptimizerConfig cfg = fig2_opts.optimizer();
      const auto records = figure2_samples(fig2_count, fig2_opts.seed, cfg, fig2_opts.threads);
      require_finite(records);
      emit(fig2_opts.out, samples_csv(records));
      if (const auto path = curve_path_for(fig2_opts.out, fig2_curve_out); !path.empty()) {
        const auto curve = mcmq_curve(fig2_curve_points, cfg, fig2_opts.threads);
        require_finite(curve);
        write_text_file(path, curve_csv(curve, "alpha"));
      }
    } else if (*fig3) {
      write_manifest(fig3_opts);
      const OptimizerConfig cfg = fig3_opts.optimizer();
      const auto records = figure3_samples(count2, count3, count4, fig3_opts.seed, cfg, fig3_opts.threads);
      require_finite(records);
      emit(fig3_opts.out, samples_csv(records));
      if (const auto path = curve_path_for(fig3_opts.out, fig3_curve_out); !path.empty()) {
        const auto curve = mcmq_curve(fig3_curve_points, cfg, fig3_opts.threads);
        require_finite(curve);
        write_text_file(path, curve_csv(curve, "alpha"));
      }
    } else if (*mcmq) {
      write_manifest(mcmq_opts);
      const auto rows = mcmq_curve(mcmq_points, mcmq_opts.optimizer(), mcmq_opts.threads);
      require_finite(rows);
      emit(mcmq_opts.out, curve_csv(rows, "alpha"));
    } else if (*sweep) {
      write_manifest(sweep_opts);
      const auto rows = lambda_sweep(sweep_points, sweep_opts.optimizer(), sweep_opts.threads);
      require_finite(rows);
      emit(sweep_opts.out, curve_csv(rows, "lambda"));
    }
  } catch (const InvalidChannel& e) {
    std::cerr << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitNumeric;
  }
  return kExitOk;
}
