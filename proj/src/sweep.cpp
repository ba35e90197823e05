#include "dcfr/sweep.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <map>
#include <thread>

namespace dcfr {

std::vector<double> geometric_grid(double lo, double hi, int points) {
  if (lo <= 0.0 || hi <= lo || points < 2) {
    throw std::invalid_argument("geometric_grid: need 0 < lo < hi and >= 2 points");
  }
  std::vector<double> grid(points);
  const double step = (std::log(hi) - std::log(lo)) / static_cast<double>(points - 1);
  for (int i = 0; i < points; ++i) grid[i] = std::exp(std::log(lo) + step * i);
  grid.front() = lo;
  grid.back() = hi;
  return grid;
}

SweepConfig sweep_config_from_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open sweep config: " + path);
  nlohmann::json j;
  in >> j;

  SweepConfig config;
  config.train_path = j.at("train").get<std::string>();
  config.schema_path = j.at("schema").get<std::string>();
  if (j.contains("test")) config.test_path = j["test"].get<std::string>();
  if (j.contains("val_fraction")) config.val_fraction = j["val_fraction"].get<double>();
  if (j.contains("test_fraction")) config.test_fraction = j["test_fraction"].get<double>();
  if (j.contains("out_dir")) config.out_dir = j["out_dir"].get<std::string>();
  if (j.contains("threads")) config.threads = j["threads"].get<int>();
  if (j.contains("modes")) {
    config.modes.clear();
    for (const auto& m : j["modes"]) {
      config.modes.push_back(train_mode_from_string(m.get<std::string>()));
    }
  }
  if (j.contains("lambdas")) {
    const auto& l = j["lambdas"];
    if (l.is_array()) {
      config.lambdas = l.get<std::vector<double>>();
    } else {
      config.lambdas = geometric_grid(l.at("lo").get<double>(), l.at("hi").get<double>(),
                                      l.at("points").get<int>());
    }
  }
  if (j.contains("seeds")) config.seeds = j["seeds"].get<std::vector<std::uint64_t>>();

  TrainConfig& base = config.base;
  if (j.contains("epochs")) base.epochs = j["epochs"].get<int>();
  if (j.contains("batch_size")) base.batch_size = j["batch_size"].get<int>();
  if (j.contains("adv_steps")) base.adv_steps = j["adv_steps"].get<int>();
  if (j.contains("pred_hidden")) base.pred_hidden = j["pred_hidden"].get<int>();
  if (j.contains("adv_hidden")) base.adv_hidden = j["adv_hidden"].get<int>();
  if (j.contains("patience")) base.patience = j["patience"].get<int>();
  if (j.contains("full_pass")) base.full_pass = j["full_pass"].get<bool>();
  if (j.contains("l1_adversary")) base.l1_adversary = j["l1_adversary"].get<bool>();
  return config;
}

double mode_metric(TrainMode mode, const MetricsReport& report) {
  switch (mode) {
    case TrainMode::Dp: return report.delta_dp;
    case TrainMode::Eo: return report.delta_eo;
    case TrainMode::Cf:
    case TrainMode::LaftrCf:
    case TrainMode::Unfair: return report.delta_cf;
  }
  return report.delta_cf;
}

std::vector<int> pareto_front(const std::vector<ParetoPoint>& points) {
  if (points.empty()) throw std::invalid_argument("pareto_front: no points");
  std::vector<int> order(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) order[i] = static_cast<int>(i);
  std::sort(order.begin(), order.end(), [&points](int a, int b) {
    if (points[a].delta != points[b].delta) return points[a].delta < points[b].delta;
    if (points[a].accuracy != points[b].accuracy) return points[a].accuracy > points[b].accuracy;
    return points[a].lambda < points[b].lambda;
  });
  std::vector<int> front;
  double best_acc = -std::numeric_limits<double>::infinity();
  double last_delta = std::numeric_limits<double>::quiet_NaN();
  double last_acc = std::numeric_limits<double>::quiet_NaN();
  for (int i : order) {
    const auto& p = points[i];
    if (p.delta == last_delta && p.accuracy == last_acc) continue;  // duplicate: smaller lambda won
    if (p.accuracy > best_acc) {
      front.push_back(i);
      best_acc = p.accuracy;
      last_delta = p.delta;
      last_acc = p.accuracy;
    }
  }
  return front;
}

namespace {

struct Task {
  std::size_t mode_index;
  std::size_t point_index;
  TrainMode mode;
  double lambda;
  std::uint64_t seed;
};

// Permutation-invariant mean: summing in sorted order makes aggregation
// independent of seed ordering, bit for bit.
double sorted_mean(std::vector<double> values) {
  std::sort(values.begin(), values.end());
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

std::string fmt_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::uint64_t fnv1a(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

nlohmann::json config_json(const SweepConfig& config) {
  nlohmann::json j;
  j["train"] = config.train_path;
  j["test"] = config.test_path;
  j["schema"] = config.schema_path;
  j["val_fraction"] = config.val_fraction;
  j["test_fraction"] = config.test_fraction;
  j["modes"] = nlohmann::json::array();
  for (TrainMode m : config.modes) j["modes"].push_back(to_string(m));
  j["lambdas"] = config.lambdas;
  j["seeds"] = config.seeds;
  j["epochs"] = config.base.epochs;
  j["batch_size"] = config.base.batch_size;
  j["adv_steps"] = config.base.adv_steps;
  j["pred_hidden"] = config.base.pred_hidden;
  j["adv_hidden"] = config.base.adv_hidden;
  j["patience"] = config.base.patience;
  j["full_pass"] = config.base.full_pass;
  j["l1_adversary"] = config.base.l1_adversary;
  return j;
}

}  // namespace

std::vector<TradeoffCurve> run_sweep(const SweepConfig& config, const FairDataset& train,
                                     const FairDataset& val, const FairDataset& test) {
  // One weight scheme per distinct weight mode, shared read-only by workers.
  std::map<FairnessMode, WeightScheme> weights;
  for (TrainMode mode : config.modes) {
    const FairnessMode wm = weight_mode_of(mode);
    if (!weights.count(wm)) weights.emplace(wm, compute_weights(train, wm));
  }

  std::vector<Task> tasks;
  std::vector<std::vector<double>> point_lambdas(config.modes.size());
  for (std::size_t m = 0; m < config.modes.size(); ++m) {
    const TrainMode mode = config.modes[m];
    point_lambdas[m] = mode == TrainMode::Unfair ? std::vector<double>{0.0} : config.lambdas;
    for (std::size_t p = 0; p < point_lambdas[m].size(); ++p) {
      for (std::uint64_t seed : config.seeds) {
        tasks.push_back({m, p, mode, point_lambdas[m][p], seed});
      }
    }
  }

  std::vector<RunRecord> records(tasks.size());
  std::atomic<std::size_t> cursor{0};
  auto worker = [&] {
    for (;;) {
      const std::size_t i = cursor.fetch_add(1);
      if (i >= tasks.size()) return;
      const Task& task = tasks[i];
      RunRecord& record = records[i];
      record.mode = task.mode;
      record.lambda = task.lambda;
      record.seed = task.seed;
      TrainConfig run = config.base;
      run.mode = task.mode;
      run.lambda = task.lambda;
      run.seed = task.seed;
      try {
        const TrainResult result =
            train_model(train, val, &test, run, &weights.at(weight_mode_of(task.mode)));
        record.test = result.trace.test;
        record.ok = true;
      } catch (const std::exception& e) {
        record.ok = false;
        record.error = e.what();
      }
    }
  };

  int n_threads = config.threads > 0 ? config.threads
                                     : static_cast<int>(std::thread::hardware_concurrency());
  n_threads = std::max(1, std::min<int>(n_threads, static_cast<int>(tasks.size())));
  std::vector<std::thread> pool;
  pool.reserve(n_threads);
  for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();

  // Deterministic reduce in config order.
  std::vector<TradeoffCurve> curves(config.modes.size());
  for (std::size_t m = 0; m < config.modes.size(); ++m) {
    curves[m].mode = config.modes[m];
    for (std::size_t p = 0; p < point_lambdas[m].size(); ++p) {
      TradeoffPoint point;
      point.lambda = point_lambdas[m][p];
      curves[m].points.push_back(point);
    }
  }
  for (std::size_t i = 0; i < tasks.size(); ++i) {
    curves[tasks[i].mode_index].points[tasks[i].point_index].runs.push_back(records[i]);
  }
  for (auto& curve : curves) {
    std::vector<TradeoffPoint> kept;
    for (auto& point : curve.points) {
      std::vector<double> acc, dp, eo, cf, own;
      for (const auto& run : point.runs) {
        if (!run.ok) {
          point.failures += 1;
          continue;
        }
        acc.push_back(run.test.accuracy);
        dp.push_back(run.test.delta_dp);
        eo.push_back(run.test.delta_eo);
        cf.push_back(run.test.delta_cf);
        own.push_back(mode_metric(curve.mode, run.test));
      }
      point.n_ok = static_cast<int>(acc.size());
      if (point.n_ok == 0) {
        std::cerr << "sweep: dropping point mode=" << to_string(curve.mode)
                  << " lambda=" << point.lambda << " (all seeds failed)\n";
        continue;
      }
      point.mean_accuracy = sorted_mean(acc);
      point.mean_delta_dp = sorted_mean(dp);
      point.mean_delta_eo = sorted_mean(eo);
      point.mean_delta_cf = sorted_mean(cf);
      point.mean_delta = sorted_mean(own);
      kept.push_back(std::move(point));
    }
    curve.points = std::move(kept);
    if (!curve.points.empty()) {
      std::vector<ParetoPoint> pts;
      pts.reserve(curve.points.size());
      for (const auto& point : curve.points) {
        pts.push_back({point.mean_accuracy, point.mean_delta, point.lambda});
      }
      curve.pareto = pareto_front(pts);
    }
  }
  return curves;
}

std::vector<TradeoffCurve> run_sweep(const SweepConfig& config) {
  const SchemaSpec schema = load_schema(config.schema_path);
  FairDataset train, val, test;
  if (!config.test_path.empty()) {
    auto [tr, te] = load_train_test(config.train_path, config.test_path, schema);
    auto parts = split(tr, {1.0 - config.val_fraction, config.val_fraction}, config.base.seed);
    train = std::move(parts[0]);
    val = std::move(parts[1]);
    test = std::move(te);
  } else {
    FairDataset full = load_csv(config.train_path, schema);
    auto parts = split(full,
                       {1.0 - config.val_fraction - config.test_fraction, config.val_fraction,
                        config.test_fraction},
                       config.base.seed);
    train = std::move(parts[0]);
    val = std::move(parts[1]);
    test = std::move(parts[2]);
  }
  return run_sweep(config, train, val, test);
}

void emit_results(const std::vector<TradeoffCurve>& curves, const SweepConfig& config,
                  const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);

  nlohmann::json manifest;
  manifest["tool"] = "dcfr 1.0.0";
  manifest["config"] = config_json(config);
  char hash[32];
  std::snprintf(hash, sizeof(hash), "%016llx",
                static_cast<unsigned long long>(fnv1a(manifest["config"].dump())));
  manifest["config_hash"] = hash;
  manifest["points"] = nlohmann::json::array();
  manifest["failures"] = nlohmann::json::array();
  manifest["warnings"] = nlohmann::json::array();

  if (curves.empty()) {
    manifest["warnings"].push_back("no curves produced; nothing to emit");
    std::cerr << "emit_results: no curves produced; writing manifest only\n";
  }

  for (const auto& curve : curves) {
    const std::string mode = to_string(curve.mode);
    {
      std::ofstream raw(fs::path(out_dir) / ("raw_" + mode + ".csv"));
      raw << "lambda,seed,accuracy,delta_dp,delta_eo,delta_cf\n";
      for (const auto& point : curve.points) {
        for (const auto& run : point.runs) {
          if (!run.ok) continue;
          raw << fmt_g17(run.lambda) << "," << run.seed << "," << fmt_g17(run.test.accuracy)
              << "," << fmt_g17(run.test.delta_dp) << "," << fmt_g17(run.test.delta_eo) << ","
              << fmt_g17(run.test.delta_cf) << "\n";
        }
      }
    }
    {
      std::ofstream agg(fs::path(out_dir) / ("aggregated_" + mode + ".csv"));
      agg << "lambda,n_seeds,failures,mean_accuracy,mean_delta_dp,mean_delta_eo,mean_delta_cf\n";
      for (const auto& point : curve.points) {
        agg << fmt_g17(point.lambda) << "," << point.n_ok << "," << point.failures << ","
            << fmt_g17(point.mean_accuracy) << "," << fmt_g17(point.mean_delta_dp) << ","
            << fmt_g17(point.mean_delta_eo) << "," << fmt_g17(point.mean_delta_cf) << "\n";
      }
    }
    {
      std::ofstream par(fs::path(out_dir) / ("pareto_" + mode + ".csv"));
      par << "lambda,mean_accuracy,mean_delta\n";
      for (int i : curve.pareto) {
        const auto& point = curve.points[i];
        par << fmt_g17(point.lambda) << "," << fmt_g17(point.mean_accuracy) << ","
            << fmt_g17(point.mean_delta) << "\n";
      }
    }
    for (const auto& point : curve.points) {
      manifest["points"].push_back({{"mode", mode},
                                    {"lambda", point.lambda},
                                    {"n_ok", point.n_ok},
                                    {"failures", point.failures}});
      for (const auto& run : point.runs) {
        if (run.ok) continue;
        manifest["failures"].push_back({{"mode", mode},
                                        {"lambda", run.lambda},
                                        {"seed", run.seed},
                                        {"error", run.error}});
      }
    }
  }

  std::ofstream mf(fs::path(out_dir) / "manifest.json");
  mf << manifest.dump(2) << "\n";
}

bool sweep_complete(const SweepConfig& config, const std::vector<TradeoffCurve>& curves) {
  if (curves.size() != config.modes.size()) return false;
  for (std::size_t m = 0; m < curves.size(); ++m) {
    const std::size_t expected =
        config.modes[m] == TrainMode::Unfair ? 1 : config.lambdas.size();
    if (curves[m].points.size() != expected) return false;
    for (const auto& point : curves[m].points) {
      if (point.n_ok < 1) return false;
    }
  }
  return true;
}

}  // namespace dcfr
