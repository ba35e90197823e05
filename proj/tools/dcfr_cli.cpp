#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "dcfr/metrics.hpp"
#include "dcfr/sweep.hpp"
#include "dcfr/synthetic.hpp"
#include "dcfr/theory.hpp"
#include "dcfr/trainer.hpp"

using namespace dcfr;

namespace {

void print_warnings(const std::vector<std::string>& warnings, const char* where) {
  for (const auto& w : warnings) std::cerr << where << ": " << w << "\n";
}

struct DataArgs {
  std::string train_path, test_path, schema_path;
  double val_fraction = 0.2;
  double test_fraction = 0.2;

  void attach(CLI::App* cmd, bool test_required_split = true) {
    cmd->add_option("--train", train_path, "training CSV")->required();
    cmd->add_option("--test", test_path, "canonical test CSV (otherwise carved from train)");
    cmd->add_option("--schema", schema_path, "schema config file")->required();
    cmd->add_option("--val-fraction", val_fraction, "validation share of the training file");
    if (test_required_split) {
      cmd->add_option("--test-fraction", test_fraction,
                      "test share when no canonical test file is given");
    }
  }

  // (train, val, test) with the encoding frozen on the training file.
  std::array<FairDataset, 3> load() const {
    const SchemaSpec schema = load_schema(schema_path);
    if (!test_path.empty()) {
      auto [train_full, test] = load_train_test(train_path, test_path, schema);
      auto parts = split(train_full, {1.0 - val_fraction, val_fraction}, 0);
      return {std::move(parts[0]), std::move(parts[1]), std::move(test)};
    }
    FairDataset full = load_csv(train_path, schema);
    auto parts =
        split(full, {1.0 - val_fraction - test_fraction, val_fraction, test_fraction}, 0);
    return {std::move(parts[0]), std::move(parts[1]), std::move(parts[2])};
  }
};

int run_train(const DataArgs& data, TrainConfig config, const std::string& out_dir) {
  auto [train, val, test] = data.load();
  print_warnings(train.warnings, "train");
  print_warnings(val.warnings, "validation");
  print_warnings(test.warnings, "test");

  TrainResult result = train_model(train, val, &test, config);
  print_warnings(result.weights.warnings, "weights");

  std::filesystem::create_directories(out_dir);
  const auto dir = std::filesystem::path(out_dir);
  save_model(result.bundle, (dir / "model.txt").string());
  write_trace_csv(result.trace, (dir / "trace.csv").string());
  {
    std::ofstream out(dir / "metrics.json");
    out << metrics_to_json(result.trace.test) << "\n";
  }

  const auto& m = result.trace.test;
  std::cout << "mode=" << to_string(config.mode) << " lambda=" << config.effective_lambda()
            << " seed=" << config.seed << "\n"
            << "test accuracy=" << m.accuracy << " delta_dp=" << m.delta_dp
            << " delta_eo=" << m.delta_eo << " delta_cf=" << m.delta_cf << "\n"
            << "fine-tune epochs=" << result.trace.step2_epochs << "\n"
            << "outputs in " << out_dir << "\n";
  return 0;
}

int run_audit(const std::string& data_path, const std::string& schema_path,
              const std::string& train_path, const std::string& pred_path,
              const std::string& out_json, const std::string& out_strata) {
  const SchemaSpec schema = load_schema(schema_path);
  FairDataset eval;
  StratumTable train_table;
  bool have_train = false;
  if (!train_path.empty()) {
    auto [train, test] = load_train_test(train_path, data_path, schema);
    eval = std::move(test);
    train_table = train.strata;
    have_train = true;
  } else {
    eval = load_csv(data_path, schema);
  }
  print_warnings(eval.warnings, "audit");

  std::ifstream in(pred_path);
  if (!in) throw std::runtime_error("cannot open predictions: " + pred_path);
  std::string line;
  std::getline(in, line);  // header
  std::vector<double> values;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    values.push_back(std::stod(line));
  }
  if (static_cast<int>(values.size()) != eval.n()) {
    throw std::runtime_error("predictions have " + std::to_string(values.size()) +
                             " rows, dataset has " + std::to_string(eval.n()) +
                             " after dropping missing-value rows");
  }
  Eigen::VectorXi pred(eval.n());
  for (int i = 0; i < eval.n(); ++i) pred[i] = values[i] >= 0.5 ? 1 : 0;

  const MetricsReport report =
      evaluate_metrics(pred, eval, have_train ? &train_table : nullptr);
  print_warnings(report.warnings, "audit");

  std::ofstream json_out(out_json);
  json_out << metrics_to_json(report) << "\n";
  std::ofstream strata_out(out_strata);
  strata_out << "f,label,gap,prob,counted\n";
  for (const auto& g : report.per_stratum) {
    strata_out << g.f << "," << g.label << "," << g.gap << "," << g.prob << ","
               << (g.counted ? 1 : 0) << "\n";
  }
  std::cout << "accuracy=" << report.accuracy << " delta_dp=" << report.delta_dp
            << " delta_eo=" << report.delta_eo << " delta_cf=" << report.delta_cf << "\n";
  return 0;
}

int run_sweep_cmd(const std::string& config_path) {
  const SweepConfig config = sweep_config_from_json(config_path);
  const auto curves = run_sweep(config);
  emit_results(curves, config, config.out_dir);
  std::cout << "sweep results in " << config.out_dir << "\n";
  return sweep_complete(config, curves) ? 0 : 1;
}

int run_verify_theory(int joints, int h_trials, std::uint64_t seed) {
  const TheorySuiteReport report = run_theory_suite(joints, h_trials, seed);
  for (const auto& check : report.checks) {
    std::cout << check.name << ": " << (check.pass ? "PASS" : "FAIL") << " (" << check.trials
              << " trials";
    if (!check.detail.empty()) std::cout << "; " << check.detail;
    std::cout << ")\n";
  }
  return report.all_pass ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Conditional-fairness regularized training and auditing"};
  app.require_subcommand(1);

  // train
  auto* train_cmd = app.add_subcommand("train", "run the two-step adversarial training");
  DataArgs train_data;
  train_data.attach(train_cmd);
  TrainConfig config;
  std::string mode_name = "cf";
  std::string out_dir = "train-out";
  train_cmd->add_option("--mode", mode_name, "dp|eo|cf|laftr-cf|unfair");
  train_cmd->add_option("--lambda", config.lambda, "fairness trade-off coefficient");
  train_cmd->add_option("--seed", config.seed, "RNG seed");
  train_cmd->add_option("--epochs", config.epochs, "Step I/II epoch budget");
  train_cmd->add_option("--batch-size", config.batch_size);
  train_cmd->add_option("--adv-steps", config.adv_steps, "adversary updates per epoch");
  train_cmd->add_option("--pred-hidden", config.pred_hidden, "encoder width (= dim Z)");
  train_cmd->add_option("--adv-hidden", config.adv_hidden, "adversary hidden width");
  train_cmd->add_option("--patience", config.patience, "fine-tuning early-stop patience");
  train_cmd->add_flag("--full-pass", config.full_pass,
                      "one shuffled data pass per epoch instead of a single batch");
  train_cmd->add_flag("--l1-adversary", config.l1_adversary,
                      "descend the weighted L1 adversary loss (ablation)");
  train_cmd->add_option("--out-dir", out_dir, "output directory");

  // audit
  auto* audit_cmd = app.add_subcommand("audit", "metrics for an existing prediction file");
  std::string audit_data, audit_schema, audit_train, audit_pred;
  std::string audit_json = "metrics.json", audit_strata = "per_stratum.csv";
  audit_cmd->add_option("--data", audit_data, "dataset CSV to audit")->required();
  audit_cmd->add_option("--schema", audit_schema, "schema config file")->required();
  audit_cmd->add_option("--pred", audit_pred, "one-column predictions CSV (header + rows)")
      ->required();
  audit_cmd->add_option("--train", audit_train,
                        "training CSV; freezes the encoding and flags unseen strata");
  audit_cmd->add_option("--out-json", audit_json);
  audit_cmd->add_option("--out-strata", audit_strata);

  // sweep
  auto* sweep_cmd = app.add_subcommand("sweep", "lambda sweep with Pareto extraction");
  std::string sweep_config_path;
  sweep_cmd->add_option("--config", sweep_config_path, "sweep config JSON")->required();

  // verify-theory
  auto* verify_cmd = app.add_subcommand("verify-theory", "brute-force theorem checks");
  int joints = 1000, h_trials = 1000;
  std::uint64_t theory_seed = 2024;
  verify_cmd->add_option("--joints", joints, "random joints for the equivalence check");
  verify_cmd->add_option("--h-trials", h_trials, "random test functions per identity");
  verify_cmd->add_option("--seed", theory_seed);

  // make-toy
  auto* toy_cmd = app.add_subcommand("make-toy", "emit the admission-toy CSV and schema");
  AdmissionToyConfig toy;
  std::string toy_out = "toy.csv", toy_schema_out = "toy.schema";
  toy_cmd->add_option("--n", toy.n, "rows");
  toy_cmd->add_option("--seed", toy.seed);
  toy_cmd->add_option("--out", toy_out, "CSV path");
  toy_cmd->add_option("--schema-out", toy_schema_out, "schema path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*train_cmd) {
      config.mode = train_mode_from_string(mode_name);
      return run_train(train_data, config, out_dir);
    }
    if (*audit_cmd) {
      return run_audit(audit_data, audit_schema, audit_train, audit_pred, audit_json,
                       audit_strata);
    }
    if (*sweep_cmd) return run_sweep_cmd(sweep_config_path);
    if (*verify_cmd) return run_verify_theory(joints, h_trials, theory_seed);
    if (*toy_cmd) {
      write_csv(admission_toy_table(toy), toy_out);
      std::ofstream schema_out(toy_schema_out);
      schema_out << "sensitive = gender\n"
                 << "sensitive_positive = male\n"
                 << "fair = dept\n"
                 << "outcome = admit\n"
                 << "outcome_positive = yes\n";
      std::cout << "wrote " << toy_out << " and " << toy_schema_out << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
