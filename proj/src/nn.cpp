#include "dcfr/nn.hpp"

#include <cmath>
#include <cstring>
#include <limits>
#include <stdexcept>

namespace dcfr {

namespace {

Eigen::MatrixXd apply_activation(const Eigen::MatrixXd& pre, Activation act) {
  switch (act) {
    case Activation::Identity:
      return pre;
    case Activation::Relu:
      return pre.cwiseMax(0.0);
    case Activation::Sigmoid:
      // Split form avoids overflow in exp; saturation is pinned one ulp away
      // from {0, 1} so outputs stay strictly inside the open interval.
      return pre.unaryExpr([](double x) {
        static const double hi = std::nextafter(1.0, 0.0);
        static const double lo = std::numeric_limits<double>::min();
        double v;
        if (x >= 0.0) {
          v = 1.0 / (1.0 + std::exp(-x));
        } else {
          const double e = std::exp(x);
          v = e / (1.0 + e);
        }
        return std::min(std::max(v, lo), hi);
      });
  }
  throw std::logic_error("unknown activation");
}

// Derivative expressed through the layer output; relu uses out > 0, so the
// unit at exactly zero pre-activation gets gradient zero.
Eigen::ArrayXXd activation_grad(const Eigen::MatrixXd& out, Activation act) {
  switch (act) {
    case Activation::Identity:
      return Eigen::ArrayXXd::Ones(out.rows(), out.cols());
    case Activation::Relu:
      return (out.array() > 0.0).cast<double>();
    case Activation::Sigmoid:
      return out.array() * (1.0 - out.array());
  }
  throw std::logic_error("unknown activation");
}

}  // namespace

DenseNet::DenseNet(const std::vector<int>& dims, const std::vector<Activation>& acts, Rng& rng) {
  if (dims.size() < 2 || acts.size() != dims.size() - 1) {
    throw std::invalid_argument("DenseNet: need dims {in,...,out} and one activation per layer");
  }
  layers.reserve(acts.size());
  for (std::size_t l = 0; l + 1 < dims.size(); ++l) {
    const int fan_in = dims[l];
    const int fan_out = dims[l + 1];
    if (fan_in <= 0 || fan_out <= 0) {
      throw std::invalid_argument("DenseNet: layer dims must be positive");
    }
    DenseLayer layer;
    layer.weight.resize(fan_in, fan_out);
    const double bound = std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
    for (int i = 0; i < fan_in; ++i) {
      for (int j = 0; j < fan_out; ++j) {
        layer.weight(i, j) = rng.uniform(-bound, bound);
      }
    }
    layer.bias = Eigen::RowVectorXd::Zero(fan_out);
    layer.act = acts[l];
    layers.push_back(std::move(layer));
  }
}

const Eigen::MatrixXd& DenseNet::forward(const Eigen::Ref<const Eigen::MatrixXd>& batch) {
  if (layers.empty()) throw std::logic_error("forward: empty network");
  if (batch.cols() != input_dim()) {
    throw std::invalid_argument("forward: batch has " + std::to_string(batch.cols()) +
                                " columns, expected " + std::to_string(input_dim()));
  }
  inputs_.assign(layers.size(), {});
  outputs_.assign(layers.size(), {});
  Eigen::MatrixXd x = batch;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    inputs_[l] = x;
    Eigen::MatrixXd pre = (x * layers[l].weight).rowwise() + layers[l].bias;
    outputs_[l] = apply_activation(pre, layers[l].act);
    x = outputs_[l];
  }
  cached_ = true;
  return outputs_.back();
}

Gradients DenseNet::backward(const Eigen::Ref<const Eigen::MatrixXd>& upstream) const {
  if (!cached_) throw std::logic_error("backward: no cached forward pass");
  if (upstream.rows() != outputs_.back().rows() || upstream.cols() != outputs_.back().cols()) {
    throw std::invalid_argument("backward: upstream shape does not match forward output");
  }
  Gradients grads;
  grads.layers.resize(layers.size());
  Eigen::MatrixXd delta = upstream;
  for (std::size_t l = layers.size(); l-- > 0;) {
    delta = (delta.array() * activation_grad(outputs_[l], layers[l].act)).matrix();
    grads.layers[l].weight = inputs_[l].transpose() * delta;
    grads.layers[l].bias = delta.colwise().sum();
    delta = delta * layers[l].weight.transpose();
  }
  grads.input = std::move(delta);
  return grads;
}

std::size_t DenseNet::parameter_count() const {
  std::size_t n = 0;
  for (const auto& l : layers) {
    n += static_cast<std::size_t>(l.weight.size()) + static_cast<std::size_t>(l.bias.size());
  }
  return n;
}

std::uint64_t DenseNet::checksum() const {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  auto mix = [&h](const double* p, std::size_t n) {
    const auto* bytes = reinterpret_cast<const unsigned char*>(p);
    for (std::size_t i = 0; i < n * sizeof(double); ++i) {
      h ^= bytes[i];
      h *= 0x100000001b3ULL;
    }
  };
  for (const auto& l : layers) {
    mix(l.weight.data(), static_cast<std::size_t>(l.weight.size()));
    mix(l.bias.data(), static_cast<std::size_t>(l.bias.size()));
  }
  return h;
}

AdadeltaState make_adadelta(const DenseNet& net, double rho, double eps, double lr) {
  AdadeltaState s;
  s.rho = rho;
  s.eps = eps;
  s.lr = lr;
  s.acc_grad.resize(net.layers.size());
  s.acc_update.resize(net.layers.size());
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    const auto& layer = net.layers[l];
    s.acc_grad[l].weight = Eigen::MatrixXd::Zero(layer.weight.rows(), layer.weight.cols());
    s.acc_grad[l].bias = Eigen::RowVectorXd::Zero(layer.bias.cols());
    s.acc_update[l].weight = s.acc_grad[l].weight;
    s.acc_update[l].bias = s.acc_grad[l].bias;
  }
  return s;
}

namespace {

// theta += -lr * sqrt(acc_u + eps)/sqrt(acc_g + eps) * g, accumulators updated
// with decay rho. Templated so matrices and row vectors share one path.
template <typename P, typename G>
void adadelta_apply(P& param, const G& grad, P& acc_g, P& acc_u, double rho, double eps,
                    double lr) {
  acc_g.array() = rho * acc_g.array() + (1.0 - rho) * grad.array().square();
  P update =
      (-lr * (acc_u.array() + eps).sqrt() / (acc_g.array() + eps).sqrt() * grad.array()).matrix();
  acc_u.array() = rho * acc_u.array() + (1.0 - rho) * update.array().square();
  param += update;
}

}  // namespace

void adadelta_step(DenseNet& net, const Gradients& grads, AdadeltaState& state) {
  if (grads.layers.size() != net.layers.size() || state.acc_grad.size() != net.layers.size()) {
    throw std::invalid_argument("adadelta_step: layer count mismatch");
  }
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    if (grads.layers[l].weight.rows() != net.layers[l].weight.rows() ||
        grads.layers[l].weight.cols() != net.layers[l].weight.cols()) {
      throw std::invalid_argument("adadelta_step: gradient shape mismatch at layer " +
                                  std::to_string(l));
    }
    adadelta_apply(net.layers[l].weight, grads.layers[l].weight, state.acc_grad[l].weight,
                   state.acc_update[l].weight, state.rho, state.eps, state.lr);
    adadelta_apply(net.layers[l].bias, grads.layers[l].bias, state.acc_grad[l].bias,
                   state.acc_update[l].bias, state.rho, state.eps, state.lr);
  }
}

double cross_entropy(const Eigen::Ref<const Eigen::VectorXd>& pred,
                     const Eigen::Ref<const Eigen::VectorXi>& target) {
  if (pred.size() != target.size() || pred.size() == 0) {
    throw std::invalid_argument("cross_entropy: empty or mismatched inputs");
  }
  const auto p = pred.array().min(1.0 - kProbClamp).max(kProbClamp);
  const auto y = target.cast<double>().array();
  return -(y * p.log() + (1.0 - y) * (1.0 - p).log()).mean();
}

Eigen::VectorXd cross_entropy_grad(const Eigen::Ref<const Eigen::VectorXd>& pred,
                                   const Eigen::Ref<const Eigen::VectorXi>& target) {
  if (pred.size() != target.size() || pred.size() == 0) {
    throw std::invalid_argument("cross_entropy_grad: empty or mismatched inputs");
  }
  const double inv_n = 1.0 / static_cast<double>(pred.size());
  Eigen::VectorXd g(pred.size());
  for (Eigen::Index i = 0; i < pred.size(); ++i) {
    const double p = pred[i];
    if (p < kProbClamp || p > 1.0 - kProbClamp) {
      g[i] = 0.0;  // clamped loss is flat here
    } else {
      g[i] = inv_n * (p - static_cast<double>(target[i])) / (p * (1.0 - p));
    }
  }
  return g;
}

}  // namespace dcfr
