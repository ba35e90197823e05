#include "dcfr/metrics.hpp"

#include <json.hpp>
#include <stdexcept>

namespace dcfr {

namespace {

void check_binary_sizes(Eigen::Index a, Eigen::Index b, const char* what) {
  if (a != b || a == 0) {
    throw std::invalid_argument(std::string(what) + ": empty or mismatched inputs");
  }
}

}  // namespace

double accuracy(const Eigen::Ref<const Eigen::VectorXi>& pred,
                const Eigen::Ref<const Eigen::VectorXi>& y) {
  check_binary_sizes(pred.size(), y.size(), "accuracy");
  return (pred.array() == y.array()).cast<double>().mean();
}

double delta_dp(const Eigen::Ref<const Eigen::VectorXi>& pred,
                const Eigen::Ref<const Eigen::VectorXi>& s) {
  check_binary_sizes(pred.size(), s.size(), "delta_dp");
  long n[2] = {0, 0};
  long pos[2] = {0, 0};
  for (Eigen::Index i = 0; i < pred.size(); ++i) {
    n[s[i]] += 1;
    pos[s[i]] += pred[i];
  }
  if (n[0] == 0 || n[1] == 0) {
    throw std::invalid_argument("delta_dp: a sensitive group is empty, metric undefined");
  }
  return std::abs(static_cast<double>(pos[1]) / static_cast<double>(n[1]) -
                  static_cast<double>(pos[0]) / static_cast<double>(n[0]));
}

double delta_eo(const Eigen::Ref<const Eigen::VectorXi>& pred,
                const Eigen::Ref<const Eigen::VectorXi>& s,
                const Eigen::Ref<const Eigen::VectorXi>& y) {
  check_binary_sizes(pred.size(), s.size(), "delta_eo");
  check_binary_sizes(pred.size(), y.size(), "delta_eo");
  long n[2][2] = {{0, 0}, {0, 0}};    // [y][s]
  long pos[2][2] = {{0, 0}, {0, 0}};
  for (Eigen::Index i = 0; i < pred.size(); ++i) {
    n[y[i]][s[i]] += 1;
    pos[y[i]][s[i]] += pred[i];
  }
  double value = 0.0;
  const double total = static_cast<double>(pred.size());
  for (int yi = 0; yi < 2; ++yi) {
    if (n[yi][0] == 0 || n[yi][1] == 0) {
      throw std::invalid_argument("delta_eo: an (S,Y) cell is empty, metric undefined");
    }
    const double rate1 = static_cast<double>(pos[yi][1]) / static_cast<double>(n[yi][1]);
    const double rate0 = static_cast<double>(pos[yi][0]) / static_cast<double>(n[yi][0]);
    const double p_y = static_cast<double>(n[yi][0] + n[yi][1]) / total;
    value += p_y * std::abs(rate1 - rate0);
  }
  return value;
}

std::pair<double, std::vector<StratumGap>> delta_cf(
    const Eigen::Ref<const Eigen::VectorXi>& pred, const Eigen::Ref<const Eigen::VectorXi>& s,
    const Eigen::Ref<const Eigen::VectorXi>& f_id, const std::vector<std::string>& stratum_labels,
    const StratumTable* train_table, std::vector<std::string>* warnings) {
  check_binary_sizes(pred.size(), s.size(), "delta_cf");
  check_binary_sizes(pred.size(), f_id.size(), "delta_cf");

  int num_strata = static_cast<int>(stratum_labels.size());
  for (Eigen::Index i = 0; i < f_id.size(); ++i) {
    num_strata = std::max(num_strata, f_id[i] + 1);
  }
  std::vector<std::array<long, 2>> n(num_strata, {0, 0});
  std::vector<std::array<long, 2>> pos(num_strata, {0, 0});
  for (Eigen::Index i = 0; i < pred.size(); ++i) {
    n[f_id[i]][s[i]] += 1;
    pos[f_id[i]][s[i]] += pred[i];
  }

  auto warn = [warnings](const std::string& msg) {
    if (warnings) warnings->push_back(msg);
  };

  const double total = static_cast<double>(pred.size());
  double value = 0.0;
  std::vector<StratumGap> gaps;
  for (int f = 0; f < num_strata; ++f) {
    const long nf = n[f][0] + n[f][1];
    if (nf == 0) continue;
    StratumGap g;
    g.f = f;
    g.label = f < static_cast<int>(stratum_labels.size()) ? stratum_labels[f]
                                                          : std::to_string(f);
    g.prob = static_cast<double>(nf) / total;
    const bool unseen = train_table != nullptr &&
                        (f >= static_cast<int>(train_table->count_f.size()) ||
                         train_table->count_f[f] == 0);
    if (unseen) {
      g.counted = false;
      warn("stratum '" + g.label + "' unseen in training; contributes 0 to delta_cf");
    } else if (n[f][0] == 0 || n[f][1] == 0) {
      g.counted = false;
      warn("stratum '" + g.label + "' has a single S group; contributes 0 to delta_cf");
    } else {
      g.gap = std::abs(static_cast<double>(pos[f][1]) / static_cast<double>(n[f][1]) -
                       static_cast<double>(pos[f][0]) / static_cast<double>(n[f][0]));
      value += g.gap * g.prob;
    }
    gaps.push_back(std::move(g));
  }
  return {value, gaps};
}

MetricsReport evaluate_metrics(const Eigen::Ref<const Eigen::VectorXi>& pred,
                               const FairDataset& eval, const StratumTable* train_table) {
  MetricsReport report;
  report.accuracy = accuracy(pred, eval.y);
  report.delta_dp = delta_dp(pred, eval.s);
  report.delta_eo = delta_eo(pred, eval.s, eval.y);
  auto [cf, gaps] = delta_cf(pred, eval.s, eval.f_id, eval.stratum_labels, train_table,
                             &report.warnings);
  report.delta_cf = cf;
  report.per_stratum = std::move(gaps);
  return report;
}

std::string metrics_to_json(const MetricsReport& report) {
  nlohmann::json j;
  j["accuracy"] = report.accuracy;
  j["delta_dp"] = report.delta_dp;
  j["delta_eo"] = report.delta_eo;
  j["delta_cf"] = report.delta_cf;
  j["per_stratum"] = nlohmann::json::array();
  for (const auto& g : report.per_stratum) {
    j["per_stratum"].push_back({{"f", g.f},
                                {"label", g.label},
                                {"gap", g.gap},
                                {"prob", g.prob},
                                {"counted", g.counted}});
  }
  j["warnings"] = report.warnings;
  return j.dump(2);
}

}  // namespace dcfr
