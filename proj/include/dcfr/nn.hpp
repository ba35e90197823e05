#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "dcfr/rng.hpp"

namespace dcfr {

enum class Activation { Identity, Relu, Sigmoid };

struct DenseLayer {
  Eigen::MatrixXd weight;     // [in x out]
  Eigen::RowVectorXd bias;    // [out]
  Activation act = Activation::Identity;
};

struct LayerGrad {
  Eigen::MatrixXd weight;
  Eigen::RowVectorXd bias;
};

/// Reverse-mode gradients for one cached forward pass. `input` carries
/// dLoss/dInput so nets can be chained (head/adversary into the encoder).
struct Gradients {
  std::vector<LayerGrad> layers;
  Eigen::MatrixXd input;
};

// Plain MLP over row-major batches: out = act(in * W + b) per layer.
// forward() caches per-layer inputs/outputs; backward() consumes the cache.
class DenseNet {
 public:
  DenseNet() = default;

  // dims = {in, h1, ..., out}; one activation per layer. Weights start
  // uniform on +-sqrt(6/(fan_in+fan_out)), biases at zero.
  DenseNet(const std::vector<int>& dims, const std::vector<Activation>& acts, Rng& rng);

  const Eigen::MatrixXd& forward(const Eigen::Ref<const Eigen::MatrixXd>& batch);
  Gradients backward(const Eigen::Ref<const Eigen::MatrixXd>& upstream) const;

  int input_dim() const { return layers.empty() ? 0 : static_cast<int>(layers.front().weight.rows()); }
  int output_dim() const { return layers.empty() ? 0 : static_cast<int>(layers.back().weight.cols()); }
  std::size_t parameter_count() const;

  // FNV-1a over raw parameter bytes; used by freeze-correctness checks.
  std::uint64_t checksum() const;

  std::vector<DenseLayer> layers;

 private:
  std::vector<Eigen::MatrixXd> inputs_;   // input seen by each layer
  std::vector<Eigen::MatrixXd> outputs_;  // activation of each layer
  bool cached_ = false;
};

struct AdadeltaState {
  double rho = 0.95;
  double eps = 1e-6;
  double lr = 1.0;
  std::vector<LayerGrad> acc_grad;    // EMA of squared gradients
  std::vector<LayerGrad> acc_update;  // EMA of squared updates
};

AdadeltaState make_adadelta(const DenseNet& net, double rho = 0.95, double eps = 1e-6,
                            double lr = 1.0);

/// One Adadelta update of `net` in place. Shapes of `grads` must match.
void adadelta_step(DenseNet& net, const Gradients& grads, AdadeltaState& state);

/// Mean binary cross-entropy; predictions clamped to [1e-7, 1-1e-7] before logs.
double cross_entropy(const Eigen::Ref<const Eigen::VectorXd>& pred,
                     const Eigen::Ref<const Eigen::VectorXi>& target);

/// d(mean cross-entropy)/d pred. Zero where the clamp is active (flat region).
Eigen::VectorXd cross_entropy_grad(const Eigen::Ref<const Eigen::VectorXd>& pred,
                                   const Eigen::Ref<const Eigen::VectorXi>& target);

inline constexpr double kProbClamp = 1e-7;

}  // namespace dcfr
