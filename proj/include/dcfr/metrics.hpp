#pragma once

#include <Eigen/Core>
#include <string>
#include <vector>

#include "dcfr/data.hpp"

namespace dcfr {

struct StratumGap {
  int f = 0;
  std::string label;
  double gap = 0.0;   // |P(pred=1|S=1,F=f) - P(pred=1|S=0,F=f)|, 0 if uncounted
  double prob = 0.0;  // empirical P(F=f) on the evaluated rows
  bool counted = true;
};

struct MetricsReport {
  double accuracy = 0.0;
  double delta_dp = 0.0;
  double delta_eo = 0.0;
  double delta_cf = 0.0;
  std::vector<StratumGap> per_stratum;
  std::vector<std::string> warnings;
};

double accuracy(const Eigen::Ref<const Eigen::VectorXi>& pred,
                const Eigen::Ref<const Eigen::VectorXi>& y);

/// |P(pred=1|S=1) - P(pred=1|S=0)| from empirical frequencies. Throws if a
/// sensitive group is empty.
double delta_dp(const Eigen::Ref<const Eigen::VectorXi>& pred,
                const Eigen::Ref<const Eigen::VectorXi>& s);

/// P(Y=0)|FPR1-FPR0| + P(Y=1)|TPR1-TPR0|. Throws if any (S,Y) cell is empty.
double delta_eo(const Eigen::Ref<const Eigen::VectorXi>& pred,
                const Eigen::Ref<const Eigen::VectorXi>& s,
                const Eigen::Ref<const Eigen::VectorXi>& y);

/// Sum over strata of |group gap| * P(F=f). Strata with one S group count as
/// zero with a warning, as do strata missing from `train_table` when given.
std::pair<double, std::vector<StratumGap>> delta_cf(
    const Eigen::Ref<const Eigen::VectorXi>& pred, const Eigen::Ref<const Eigen::VectorXi>& s,
    const Eigen::Ref<const Eigen::VectorXi>& f_id, const std::vector<std::string>& stratum_labels,
    const StratumTable* train_table = nullptr, std::vector<std::string>* warnings = nullptr);

/// All four metrics on one evaluation set; train_table flags unseen strata.
MetricsReport evaluate_metrics(const Eigen::Ref<const Eigen::VectorXi>& pred,
                               const FairDataset& eval,
                               const StratumTable* train_table = nullptr);

std::string metrics_to_json(const MetricsReport& report);

}  // namespace dcfr
