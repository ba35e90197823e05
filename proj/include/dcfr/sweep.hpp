#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "dcfr/data.hpp"
#include "dcfr/metrics.hpp"
#include "dcfr/trainer.hpp"

namespace dcfr {

std::vector<double> geometric_grid(double lo, double hi, int points);

struct SweepConfig {
  std::string train_path;
  std::string test_path;  // empty: carve a test part out of the training file
  std::string schema_path;
  double val_fraction = 0.2;
  double test_fraction = 0.2;  // only used when test_path is empty
  std::vector<TrainMode> modes{TrainMode::Cf};
  std::vector<double> lambdas = geometric_grid(0.1, 20.0, 10);
  std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  TrainConfig base;  // lambda/mode/seed overridden per run
  int threads = 0;   // 0 = hardware concurrency
  std::string out_dir = "sweep-out";
};

SweepConfig sweep_config_from_json(const std::string& path);

struct RunRecord {
  TrainMode mode = TrainMode::Cf;
  double lambda = 0.0;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  MetricsReport test;
};

struct TradeoffPoint {
  double lambda = 0.0;
  int n_ok = 0;
  int failures = 0;
  double mean_accuracy = 0.0;
  double mean_delta_dp = 0.0;
  double mean_delta_eo = 0.0;
  double mean_delta_cf = 0.0;
  double mean_delta = 0.0;  // the mode's own metric
  std::vector<RunRecord> runs;
};

struct TradeoffCurve {
  TrainMode mode = TrainMode::Cf;
  std::vector<TradeoffPoint> points;  // points with zero successful seeds are dropped
  std::vector<int> pareto;            // indices into points, sorted by delta ascending
};

/// Which gap the mode trades off against accuracy.
double mode_metric(TrainMode mode, const MetricsReport& report);

struct ParetoPoint {
  double accuracy = 0.0;
  double delta = 0.0;
  double lambda = 0.0;  // tie-break: exact duplicates keep the smallest lambda
};

/// Nondominated subset under (accuracy up, delta down); weak dominance with
/// at least one strict inequality. Result sorted by delta ascending.
std::vector<int> pareto_front(const std::vector<ParetoPoint>& points);

/// Full sweep over (mode, lambda, seed) with a bounded worker pool. The
/// unfair mode collapses to the single lambda = 0 point.
std::vector<TradeoffCurve> run_sweep(const SweepConfig& config, const FairDataset& train,
                                     const FairDataset& val, const FairDataset& test);

/// Loads datasets per the config paths, then runs the sweep.
std::vector<TradeoffCurve> run_sweep(const SweepConfig& config);

/// raw_<mode>.csv, aggregated_<mode>.csv, pareto_<mode>.csv and manifest.json
/// under out_dir. No timestamps: reruns are byte-identical.
void emit_results(const std::vector<TradeoffCurve>& curves, const SweepConfig& config,
                  const std::string& out_dir);

/// True when every requested (mode, lambda) point kept at least one seed.
bool sweep_complete(const SweepConfig& config, const std::vector<TradeoffCurve>& curves);

}  // namespace dcfr
