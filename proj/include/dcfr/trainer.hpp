#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "dcfr/data.hpp"
#include "dcfr/metrics.hpp"
#include "dcfr/nn.hpp"
#include "dcfr/rng.hpp"

namespace dcfr {

// Training targets; unfair is the lambda = 0 baseline (CF wiring, no penalty).
enum class TrainMode { Dp, Eo, Cf, LaftrCf, Unfair };

const char* to_string(TrainMode mode);
TrainMode train_mode_from_string(const std::string& name);
FairnessMode weight_mode_of(TrainMode mode);

struct TrainConfig {
  TrainMode mode = TrainMode::Cf;
  double lambda = 1.0;
  int epochs = 400;
  int batch_size = 512;
  int adv_steps = 5;       // 0 leaves the adversary at its initialization
  int pred_hidden = 60;    // encoder hidden width; this is the Z dimension
  int adv_hidden = 50;
  int patience = 20;       // fine-tuning early stop, in epochs
  std::uint64_t seed = 0;
  bool full_pass = false;  // shuffled full pass per epoch instead of one draw
  bool l1_adversary = false;
  double rho = 0.95;
  double eps = 1e-6;
  double lr = 1.0;

  double effective_lambda() const { return mode == TrainMode::Unfair ? 0.0 : lambda; }
  void validate() const;
};

/// Encoder g: [X | S] -> relu hidden (= Z); head k: Z -> sigmoid; adversary
/// h: [Z | extra] -> relu hidden -> sigmoid, where extra is the mode's
/// one-hot block (none, Y, or F).
struct ModelBundle {
  TrainMode mode = TrainMode::Cf;
  AdversaryInput adv_input = AdversaryInput::ZOneHotF;
  int m_x = 0;
  int m_z = 0;
  int extra_dim = 0;  // one-hot width appended to the adversary input
  DenseNet encoder, head, adversary;
  AdadeltaState encoder_state, head_state, adversary_state;
};

ModelBundle make_bundle(const FairDataset& train, const TrainConfig& config);

struct EpochStats {
  double pred_loss = 0.0;        // cross-entropy on the epoch's batch
  double adversary_error = 0.0;  // weighted squared error after ADV_STEPS
  double q_value = 0.0;          // mode constant minus adversary_error
  double val_accuracy = 0.0;
};

struct TrainTrace {
  std::vector<EpochStats> epochs;
  int step2_epochs = 0;
  MetricsReport test;
};

class TrainingDiverged : public std::runtime_error {
 public:
  TrainingDiverged(const std::string& what, TrainTrace trace)
      : std::runtime_error(what), trace(std::move(trace)) {}
  TrainTrace trace;
};

/// Adversarial step: per epoch, one Adadelta update of (encoder, head) on
/// cross-entropy + lambda * Q'(h) with the adversary frozen, then ADV_STEPS
/// adversary updates with encoder and head frozen.
TrainTrace train_step1(ModelBundle& bundle, const FairDataset& train, const FairDataset& val,
                       const WeightScheme& weights, const TrainConfig& config);

/// Fine-tuning: head-only epochs, early stop when validation accuracy has not
/// increased for `patience` consecutive epochs; the best head (earliest on
/// ties) is restored. Returns the number of epochs run.
int train_step2(ModelBundle& bundle, const FairDataset& train, const FairDataset& val,
                const TrainConfig& config);

/// prob = k(g([x|s])); pred = prob >= 0.5.
std::pair<Eigen::VectorXd, Eigen::VectorXi> predict(ModelBundle& bundle,
                                                    const Eigen::Ref<const Eigen::MatrixXd>& x,
                                                    const Eigen::Ref<const Eigen::VectorXi>& s);

struct TrainResult {
  ModelBundle bundle;
  TrainTrace trace;
  WeightScheme weights;
};

/// Full pipeline: weights, bundle, Step I, Step II, test metrics (when a test
/// set is given). `precomputed` lets sweeps share one WeightScheme per mode.
TrainResult train_model(const FairDataset& train, const FairDataset& val,
                        const FairDataset* test, const TrainConfig& config,
                        const WeightScheme* precomputed = nullptr);

/// Versioned text checkpoint (parameters and wiring; optimizer state is not
/// persisted).
void save_model(const ModelBundle& bundle, const std::string& path);
ModelBundle load_model(const std::string& path);

void write_trace_csv(const TrainTrace& trace, const std::string& path);

/// Deterministic index stream for minibatches; draws are with replacement,
/// full-pass mode reshuffles a permutation each pass.
class MinibatchSampler {
 public:
  MinibatchSampler(int n, int batch_size, bool full_pass, std::uint64_t stream_seed);
  std::vector<int> next();

 private:
  int n_, batch_size_;
  bool full_pass_;
  Rng rng_;
  std::vector<int> order_;
  std::size_t cursor_ = 0;
};

}  // namespace dcfr
