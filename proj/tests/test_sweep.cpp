#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "dcfr/rng.hpp"
#include "dcfr/sweep.hpp"
#include "dcfr/synthetic.hpp"
#include "test_support.hpp"

using namespace dcfr;

namespace {

// Brute-force O(n^2) domination oracle with the same tie convention: exact
// (accuracy, delta) duplicates keep the smallest lambda.
std::vector<int> pareto_oracle(const std::vector<ParetoPoint>& pts) {
  std::vector<int> kept;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    bool out = false;
    for (std::size_t j = 0; j < pts.size() && !out; ++j) {
      if (i == j) continue;
      const bool weak = pts[j].accuracy >= pts[i].accuracy && pts[j].delta <= pts[i].delta;
      const bool strict = pts[j].accuracy > pts[i].accuracy || pts[j].delta < pts[i].delta;
      if (weak && strict) out = true;
      if (pts[j].accuracy == pts[i].accuracy && pts[j].delta == pts[i].delta &&
          pts[j].lambda < pts[i].lambda) {
        out = true;
      }
    }
    if (!out) kept.push_back(static_cast<int>(i));
  }
  std::sort(kept.begin(), kept.end(),
            [&pts](int a, int b) { return pts[a].delta < pts[b].delta; });
  return kept;
}

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

SweepConfig toy_sweep_config(const std::filesystem::path& dir) {
  SweepConfig config;
  config.modes = {TrainMode::Cf, TrainMode::Unfair};
  config.lambdas = {0.5, 4.0};
  config.seeds = {1, 2};
  config.base.epochs = 40;
  config.base.batch_size = 64;
  config.base.adv_steps = 2;
  config.base.pred_hidden = 6;
  config.base.adv_hidden = 6;
  config.threads = 2;
  config.out_dir = dir.string();
  return config;
}

}  // namespace

TEST_CASE("geometric_grid spans the endpoints") {
  const auto grid = geometric_grid(0.1, 20.0, 10);
  REQUIRE(grid.size() == 10);
  CHECK(grid.front() == 0.1);
  CHECK(grid.back() == 20.0);
  for (std::size_t i = 1; i < grid.size(); ++i) {
    CHECK(grid[i] > grid[i - 1]);
    // constant ratio
    CHECK(grid[i] / grid[i - 1] == doctest::Approx(grid[1] / grid[0]).epsilon(1e-9));
  }
  CHECK_THROWS_AS(geometric_grid(0.0, 1.0, 5), std::invalid_argument);
}

TEST_CASE("pareto_front: strict domination drops the dominated point") {
  const std::vector<ParetoPoint> pts{{0.8, 0.1, 1.0}, {0.7, 0.2, 2.0}};
  CHECK(pareto_front(pts) == std::vector<int>{0});
}

TEST_CASE("pareto_front: incomparable points are both kept, sorted by delta") {
  const std::vector<ParetoPoint> pts{{0.8, 0.2, 1.0}, {0.7, 0.1, 2.0}};
  CHECK(pareto_front(pts) == std::vector<int>{1, 0});
}

TEST_CASE("pareto_front: exact ties collapse to the smallest lambda") {
  const std::vector<ParetoPoint> pts{{0.8, 0.1, 3.0}, {0.8, 0.1, 0.5}, {0.8, 0.1, 1.0}};
  CHECK(pareto_front(pts) == std::vector<int>{1});
}

TEST_CASE("pareto_front: monotone trade-off keeps every point") {
  std::vector<ParetoPoint> pts;
  for (int i = 0; i < 10; ++i) {
    pts.push_back({0.9 - 0.02 * i, 0.5 - 0.04 * i, static_cast<double>(i)});
  }
  CHECK(pareto_front(pts).size() == pts.size());
}

TEST_CASE("pareto_front matches the brute-force oracle on random point sets") {
  Rng rng(404);
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 1 + rng.index(60);
    std::vector<ParetoPoint> pts(n);
    const bool quantize = trial % 2 == 0;  // force ties and duplicates
    for (int i = 0; i < n; ++i) {
      double acc = rng.uniform01();
      double delta = rng.uniform01();
      if (quantize) {
        acc = std::round(acc * 8.0) / 8.0;
        delta = std::round(delta * 8.0) / 8.0;
      }
      pts[i] = {acc, delta, static_cast<double>(i)};
    }
    CHECK(pareto_front(pts) == pareto_oracle(pts));
  }
}

TEST_CASE("mode_metric picks the mode's own gap") {
  MetricsReport report;
  report.delta_dp = 0.1;
  report.delta_eo = 0.2;
  report.delta_cf = 0.3;
  CHECK(mode_metric(TrainMode::Dp, report) == 0.1);
  CHECK(mode_metric(TrainMode::Eo, report) == 0.2);
  CHECK(mode_metric(TrainMode::Cf, report) == 0.3);
  CHECK(mode_metric(TrainMode::Unfair, report) == 0.3);
}

TEST_CASE("run_sweep: toy end-to-end with deterministic emission") {
  AdmissionToyConfig toy;
  toy.n = 700;
  toy.seed = 5;
  const CsvTable table = admission_toy_table(toy);
  const SchemaSpec schema = admission_toy_schema();
  const Encoding enc = fit_encoding(table, schema);
  const FairDataset full = encode_table(table, schema, enc);
  const auto parts = split(full, {0.6, 0.2, 0.2}, 1);

  const auto dir_a = std::filesystem::temp_directory_path() / "dcfr_sweep_a";
  const auto dir_b = std::filesystem::temp_directory_path() / "dcfr_sweep_b";
  std::filesystem::remove_all(dir_a);
  std::filesystem::remove_all(dir_b);

  const SweepConfig config = toy_sweep_config(dir_a);
  const auto curves = run_sweep(config, parts[0], parts[1], parts[2]);
  REQUIRE(curves.size() == 2);
  CHECK(curves[0].points.size() == 2);       // two lambdas
  CHECK(curves[1].points.size() == 1);       // unfair collapses to lambda = 0
  CHECK(curves[1].points[0].lambda == 0.0);
  CHECK(sweep_complete(config, curves));
  for (const auto& point : curves[0].points) {
    CHECK(point.n_ok == 2);
    CHECK(point.failures == 0);
    CHECK(point.runs.size() == 2);
  }
  CHECK(!curves[0].pareto.empty());

  emit_results(curves, config, dir_a.string());
  CHECK(std::filesystem::exists(dir_a / "raw_cf.csv"));
  CHECK(std::filesystem::exists(dir_a / "aggregated_cf.csv"));
  CHECK(std::filesystem::exists(dir_a / "pareto_cf.csv"));
  CHECK(std::filesystem::exists(dir_a / "manifest.json"));

  // 2 lambdas x 2 seeds -> 4 raw data rows (+1 header).
  std::ifstream raw(dir_a / "raw_cf.csv");
  std::string line;
  int rows = 0;
  while (std::getline(raw, line)) ++rows;
  CHECK(rows == 5);

  // Re-running the identical sweep gives byte-identical outputs.
  const auto curves2 = run_sweep(config, parts[0], parts[1], parts[2]);
  emit_results(curves2, config, dir_b.string());
  CHECK(slurp(dir_a / "aggregated_cf.csv") == slurp(dir_b / "aggregated_cf.csv"));
  CHECK(slurp(dir_a / "raw_cf.csv") == slurp(dir_b / "raw_cf.csv"));
  CHECK(slurp(dir_a / "aggregated_unfair.csv") == slurp(dir_b / "aggregated_unfair.csv"));
}

TEST_CASE("aggregation is invariant to seed order") {
  AdmissionToyConfig toy;
  toy.n = 500;
  toy.seed = 6;
  const CsvTable table = admission_toy_table(toy);
  const SchemaSpec schema = admission_toy_schema();
  const FairDataset full = encode_table(table, schema, fit_encoding(table, schema));
  const auto parts = split(full, {0.6, 0.2, 0.2}, 2);

  SweepConfig config = toy_sweep_config(std::filesystem::temp_directory_path() / "unused");
  config.modes = {TrainMode::Cf};
  config.lambdas = {1.0};
  config.seeds = {3, 1, 2};
  const auto forward_order = run_sweep(config, parts[0], parts[1], parts[2]);
  config.seeds = {1, 2, 3};
  const auto sorted_order = run_sweep(config, parts[0], parts[1], parts[2]);
  CHECK(forward_order[0].points[0].mean_accuracy == sorted_order[0].points[0].mean_accuracy);
  CHECK(forward_order[0].points[0].mean_delta_cf == sorted_order[0].points[0].mean_delta_cf);
}

TEST_CASE("emit_results with no curves writes the manifest only") {
  const auto dir = std::filesystem::temp_directory_path() / "dcfr_sweep_empty";
  std::filesystem::remove_all(dir);
  const SweepConfig config = toy_sweep_config(dir);
  emit_results({}, config, dir.string());
  CHECK(std::filesystem::exists(dir / "manifest.json"));
  CHECK(!std::filesystem::exists(dir / "raw_cf.csv"));
  const std::string manifest = slurp(dir / "manifest.json");
  CHECK(manifest.find("config_hash") != std::string::npos);
  CHECK(manifest.find("nothing to emit") != std::string::npos);
}

TEST_CASE("sweep config json parsing") {
  const auto path = std::filesystem::temp_directory_path() / "dcfr_sweep_cfg.json";
  {
    std::ofstream out(path);
    out << R"({
      "train": "train.csv",
      "schema": "schema.cfg",
      "modes": ["cf", "dp"],
      "lambdas": {"lo": 0.1, "hi": 20.0, "points": 10},
      "seeds": [1, 2, 3, 4, 5],
      "epochs": 100,
      "batch_size": 256,
      "adv_steps": 5,
      "out_dir": "results"
    })";
  }
  const SweepConfig config = sweep_config_from_json(path.string());
  CHECK(config.train_path == "train.csv");
  CHECK(config.modes.size() == 2);
  CHECK(config.lambdas.size() == 10);
  CHECK(config.lambdas.front() == 0.1);
  CHECK(config.lambdas.back() == 20.0);
  CHECK(config.seeds.size() == 5);
  CHECK(config.base.epochs == 100);
  CHECK(config.out_dir == "results");
}
