#include "dcfr/trainer.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "dcfr/regularizer.hpp"

namespace dcfr {

const char* to_string(TrainMode mode) {
  switch (mode) {
    case TrainMode::Dp: return "dp";
    case TrainMode::Eo: return "eo";
    case TrainMode::Cf: return "cf";
    case TrainMode::LaftrCf: return "laftr-cf";
    case TrainMode::Unfair: return "unfair";
  }
  return "?";
}

TrainMode train_mode_from_string(const std::string& name) {
  if (name == "dp") return TrainMode::Dp;
  if (name == "eo") return TrainMode::Eo;
  if (name == "cf") return TrainMode::Cf;
  if (name == "laftr-cf" || name == "laftr_cf") return TrainMode::LaftrCf;
  if (name == "unfair") return TrainMode::Unfair;
  throw std::invalid_argument("unknown train mode: " + name);
}

FairnessMode weight_mode_of(TrainMode mode) {
  switch (mode) {
    case TrainMode::Dp: return FairnessMode::Dp;
    case TrainMode::Eo: return FairnessMode::Eo;
    case TrainMode::Cf: return FairnessMode::Cf;
    case TrainMode::LaftrCf: return FairnessMode::LaftrCf;
    case TrainMode::Unfair: return FairnessMode::Cf;  // wiring only; lambda is 0
  }
  return FairnessMode::Cf;
}

void TrainConfig::validate() const {
  if (lambda < 0.0) throw std::invalid_argument("TrainConfig: lambda must be >= 0");
  if (epochs <= 0 || batch_size <= 0) throw std::invalid_argument("TrainConfig: positive sizes");
  if (adv_steps < 0) throw std::invalid_argument("TrainConfig: adv_steps must be >= 0");
  if (pred_hidden <= 0 || adv_hidden <= 0) {
    throw std::invalid_argument("TrainConfig: hidden widths must be positive");
  }
  if (patience < 1) throw std::invalid_argument("TrainConfig: patience must be >= 1");
  if (rho <= 0.0 || rho >= 1.0 || eps <= 0.0 || lr <= 0.0) {
    throw std::invalid_argument("TrainConfig: bad optimizer constants");
  }
}

namespace {

int extra_dim_for(AdversaryInput input, const FairDataset& train) {
  switch (input) {
    case AdversaryInput::Z: return 0;
    case AdversaryInput::ZOneHotY: return 2;
    case AdversaryInput::ZOneHotF: return train.num_strata();
  }
  return 0;
}

Eigen::MatrixXd gather_inputs(const FairDataset& ds, const std::vector<int>& idx) {
  Eigen::MatrixXd xb(idx.size(), ds.x.cols() + 1);
  for (std::size_t i = 0; i < idx.size(); ++i) {
    xb.row(i).head(ds.x.cols()) = ds.x.row(idx[i]);
    xb(i, ds.x.cols()) = static_cast<double>(ds.s[idx[i]]);
  }
  return xb;
}

Eigen::VectorXi gather_ints(const Eigen::VectorXi& v, const std::vector<int>& idx) {
  Eigen::VectorXi out(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) out[i] = v[idx[i]];
  return out;
}

Eigen::VectorXd gather_doubles(const Eigen::VectorXd& v, const std::vector<int>& idx) {
  Eigen::VectorXd out(idx.size());
  for (std::size_t i = 0; i < idx.size(); ++i) out[i] = v[idx[i]];
  return out;
}

// [Z | one-hot block] for the adversary. Training rows always carry stratum
// ids inside the fitted range.
Eigen::MatrixXd adversary_input_block(const Eigen::MatrixXd& z, const FairDataset& ds,
                                      const std::vector<int>& idx, AdversaryInput input,
                                      int extra_dim) {
  Eigen::MatrixXd a(z.rows(), z.cols() + extra_dim);
  a.leftCols(z.cols()) = z;
  a.rightCols(extra_dim).setZero();
  if (input == AdversaryInput::ZOneHotY) {
    for (std::size_t i = 0; i < idx.size(); ++i) a(i, z.cols() + ds.y[idx[i]]) = 1.0;
  } else if (input == AdversaryInput::ZOneHotF) {
    for (std::size_t i = 0; i < idx.size(); ++i) {
      const int f = ds.f_id[idx[i]];
      if (f >= extra_dim) {
        throw std::invalid_argument("adversary input: stratum id outside the fitted range");
      }
      a(i, z.cols() + f) = 1.0;
    }
  }
  return a;
}

double val_accuracy_of(ModelBundle& bundle, const FairDataset& val) {
  auto [prob, pred] = predict(bundle, val.x, val.s);
  (void)prob;
  return accuracy(pred, val.y);
}

}  // namespace

MinibatchSampler::MinibatchSampler(int n, int batch_size, bool full_pass,
                                   std::uint64_t stream_seed)
    : n_(n), batch_size_(std::min(batch_size, n)), full_pass_(full_pass), rng_(stream_seed) {
  if (n <= 0 || batch_size <= 0) throw std::invalid_argument("MinibatchSampler: empty");
  if (full_pass_) {
    order_.resize(n_);
    for (int i = 0; i < n_; ++i) order_[i] = i;
    rng_.shuffle(order_);
  }
}

std::vector<int> MinibatchSampler::next() {
  std::vector<int> idx;
  if (!full_pass_) {
    idx.resize(batch_size_);
    for (int& v : idx) v = rng_.index(n_);
    return idx;
  }
  if (cursor_ >= order_.size()) {
    rng_.shuffle(order_);
    cursor_ = 0;
  }
  const std::size_t stop = std::min(cursor_ + static_cast<std::size_t>(batch_size_),
                                    order_.size());
  idx.assign(order_.begin() + cursor_, order_.begin() + stop);
  cursor_ = stop;
  return idx;
}

ModelBundle make_bundle(const FairDataset& train, const TrainConfig& config) {
  config.validate();
  const WeightScheme probe = [&] {
    WeightScheme s;
    s.mode = weight_mode_of(config.mode);
    switch (s.mode) {
      case FairnessMode::Dp: s.adversary_input = AdversaryInput::Z; break;
      case FairnessMode::Eo: s.adversary_input = AdversaryInput::ZOneHotY; break;
      case FairnessMode::Cf: s.adversary_input = AdversaryInput::ZOneHotF; break;
      case FairnessMode::LaftrCf: s.adversary_input = AdversaryInput::Z; break;
    }
    return s;
  }();

  ModelBundle bundle;
  bundle.mode = config.mode;
  bundle.adv_input = probe.adversary_input;
  bundle.m_x = train.x_dim();
  bundle.m_z = config.pred_hidden;
  bundle.extra_dim = extra_dim_for(bundle.adv_input, train);

  Rng enc_rng(derive_seed(config.seed, "init-encoder"));
  Rng head_rng(derive_seed(config.seed, "init-head"));
  Rng adv_rng(derive_seed(config.seed, "init-adversary"));
  bundle.encoder = DenseNet({bundle.m_x + 1, bundle.m_z}, {Activation::Relu}, enc_rng);
  bundle.head = DenseNet({bundle.m_z, 1}, {Activation::Sigmoid}, head_rng);
  bundle.adversary = DenseNet({bundle.m_z + bundle.extra_dim, config.adv_hidden, 1},
                              {Activation::Relu, Activation::Sigmoid}, adv_rng);
  bundle.encoder_state = make_adadelta(bundle.encoder, config.rho, config.eps, config.lr);
  bundle.head_state = make_adadelta(bundle.head, config.rho, config.eps, config.lr);
  bundle.adversary_state = make_adadelta(bundle.adversary, config.rho, config.eps, config.lr);
  return bundle;
}

TrainTrace train_step1(ModelBundle& bundle, const FairDataset& train, const FairDataset& val,
                       const WeightScheme& weights, const TrainConfig& config) {
  config.validate();
  if (weights.mode != weight_mode_of(config.mode)) {
    throw std::invalid_argument("train_step1: weight scheme does not match the mode");
  }
  if (weights.w.size() != train.n()) {
    throw std::invalid_argument("train_step1: weights sized for a different dataset");
  }
  if (val.n() == 0) throw std::invalid_argument("train_step1: empty validation set");

  const double lambda = config.effective_lambda();
  const double n_train = static_cast<double>(train.n());
  const double c_mode = q_constant_for_mode(train, weights.mode);
  const int steps_per_epoch =
      config.full_pass ? (train.n() + config.batch_size - 1) / config.batch_size : 1;
  MinibatchSampler sampler(train.n(), config.batch_size, config.full_pass,
                           derive_seed(config.seed, "step1-batches"));

  TrainTrace trace;
  trace.epochs.reserve(config.epochs);

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    EpochStats stats;
    for (int step = 0; step < steps_per_epoch; ++step) {
      const std::vector<int> idx = sampler.next();
      const double scale = n_train / static_cast<double>(idx.size());
      const Eigen::MatrixXd xb = gather_inputs(train, idx);
      const Eigen::VectorXi yb = gather_ints(train.y, idx);
      const Eigen::VectorXi sb = gather_ints(train.s, idx);
      const Eigen::VectorXd wb = gather_doubles(weights.w, idx) * scale;

      // (g, k) update with h frozen.
      const Eigen::MatrixXd& z = bundle.encoder.forward(xb);
      const Eigen::VectorXd prob = bundle.head.forward(z).col(0);
      stats.pred_loss = cross_entropy(prob, yb);
      const Gradients head_grads = bundle.head.backward(cross_entropy_grad(prob, yb));
      Eigen::MatrixXd d_z = head_grads.input;
      if (lambda > 0.0) {
        const Eigen::MatrixXd a_in =
            adversary_input_block(z, train, idx, bundle.adv_input, bundle.extra_dim);
        const Eigen::VectorXd h = bundle.adversary.forward(a_in).col(0);
        const AdversaryBatch ab{h, sb, wb, c_mode};
        const Gradients adv_grads =
            bundle.adversary.backward(fairness_penalty_grad(ab, lambda));
        d_z += adv_grads.input.leftCols(bundle.m_z);
      }
      const Gradients enc_grads = bundle.encoder.backward(d_z);
      adadelta_step(bundle.encoder, enc_grads, bundle.encoder_state);
      adadelta_step(bundle.head, head_grads, bundle.head_state);

      // Adversary updates with g, k frozen; Z is fixed for all ADV_STEPS.
      const Eigen::MatrixXd z_fixed = bundle.encoder.forward(xb);
      const Eigen::MatrixXd a_in =
          adversary_input_block(z_fixed, train, idx, bundle.adv_input, bundle.extra_dim);
      for (int t = 0; t < config.adv_steps; ++t) {
        const Eigen::VectorXd h = bundle.adversary.forward(a_in).col(0);
        const AdversaryBatch ab{h, sb, wb, c_mode};
        const Eigen::VectorXd grad_h =
            config.l1_adversary ? adversary_loss_l1_grad(ab) : adversary_loss_grad(ab);
        const Gradients adv_grads = bundle.adversary.backward(grad_h);
        adadelta_step(bundle.adversary, adv_grads, bundle.adversary_state);
      }
      const Eigen::VectorXd h_final = bundle.adversary.forward(a_in).col(0);
      const AdversaryBatch ab_final{h_final, sb, wb, c_mode};
      stats.adversary_error = adversary_loss(ab_final);
      stats.q_value = c_mode - stats.adversary_error;
    }
    stats.val_accuracy = val_accuracy_of(bundle, val);
    trace.epochs.push_back(stats);
    if (!std::isfinite(stats.pred_loss) || !std::isfinite(stats.adversary_error)) {
      throw TrainingDiverged("train_step1: non-finite loss at epoch " + std::to_string(epoch),
                             trace);
    }
  }
  return trace;
}

int train_step2(ModelBundle& bundle, const FairDataset& train, const FairDataset& val,
                const TrainConfig& config) {
  config.validate();
  if (val.n() == 0) throw std::invalid_argument("train_step2: empty validation set");

  const int steps_per_epoch =
      config.full_pass ? (train.n() + config.batch_size - 1) / config.batch_size : 1;
  MinibatchSampler sampler(train.n(), config.batch_size, config.full_pass,
                           derive_seed(config.seed, "step2-batches"));

  double best_acc = val_accuracy_of(bundle, val);
  std::vector<DenseLayer> best_head = bundle.head.layers;
  int stale = 0;
  int epochs_run = 0;

  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    double pred_loss = 0.0;
    for (int step = 0; step < steps_per_epoch; ++step) {
      const std::vector<int> idx = sampler.next();
      const Eigen::MatrixXd xb = gather_inputs(train, idx);
      const Eigen::VectorXi yb = gather_ints(train.y, idx);
      const Eigen::MatrixXd& z = bundle.encoder.forward(xb);
      const Eigen::VectorXd prob = bundle.head.forward(z).col(0);
      pred_loss = cross_entropy(prob, yb);
      const Gradients head_grads = bundle.head.backward(cross_entropy_grad(prob, yb));
      adadelta_step(bundle.head, head_grads, bundle.head_state);
    }
    ++epochs_run;
    if (!std::isfinite(pred_loss)) {
      throw TrainingDiverged("train_step2: non-finite loss at epoch " + std::to_string(epoch),
                             TrainTrace{});
    }
    const double acc = val_accuracy_of(bundle, val);
    if (acc > best_acc) {  // strict: ties keep the earliest best
      best_acc = acc;
      best_head = bundle.head.layers;
      stale = 0;
    } else {
      ++stale;
    }
    if (stale >= config.patience) break;
  }
  bundle.head.layers = std::move(best_head);
  return epochs_run;
}

std::pair<Eigen::VectorXd, Eigen::VectorXi> predict(ModelBundle& bundle,
                                                    const Eigen::Ref<const Eigen::MatrixXd>& x,
                                                    const Eigen::Ref<const Eigen::VectorXi>& s) {
  if (x.rows() != s.size()) throw std::invalid_argument("predict: x and s row counts differ");
  if (x.cols() != bundle.m_x) {
    throw std::invalid_argument("predict: expected " + std::to_string(bundle.m_x) +
                                " feature columns, got " + std::to_string(x.cols()));
  }
  Eigen::MatrixXd xb(x.rows(), x.cols() + 1);
  xb.leftCols(x.cols()) = x;
  xb.col(x.cols()) = s.cast<double>();
  const Eigen::MatrixXd& z = bundle.encoder.forward(xb);
  const Eigen::VectorXd prob = bundle.head.forward(z).col(0);
  Eigen::VectorXi pred(prob.size());
  for (Eigen::Index i = 0; i < prob.size(); ++i) pred[i] = prob[i] >= 0.5 ? 1 : 0;
  return {prob, pred};
}

TrainResult train_model(const FairDataset& train, const FairDataset& val, const FairDataset* test,
                        const TrainConfig& config, const WeightScheme* precomputed) {
  TrainResult result;
  result.weights = precomputed ? *precomputed : compute_weights(train, weight_mode_of(config.mode));
  result.bundle = make_bundle(train, config);
  result.trace = train_step1(result.bundle, train, val, result.weights, config);
  result.trace.step2_epochs = train_step2(result.bundle, train, val, config);
  if (test != nullptr) {
    auto [prob, pred] = predict(result.bundle, test->x, test->s);
    (void)prob;
    result.trace.test = evaluate_metrics(pred, *test, &train.strata);
  }
  return result;
}

namespace {

const char* activation_name(Activation a) {
  switch (a) {
    case Activation::Identity: return "identity";
    case Activation::Relu: return "relu";
    case Activation::Sigmoid: return "sigmoid";
  }
  return "?";
}

Activation activation_from(const std::string& name) {
  if (name == "identity") return Activation::Identity;
  if (name == "relu") return Activation::Relu;
  if (name == "sigmoid") return Activation::Sigmoid;
  throw std::runtime_error("checkpoint: unknown activation " + name);
}

const char* adv_input_name(AdversaryInput a) {
  switch (a) {
    case AdversaryInput::Z: return "z";
    case AdversaryInput::ZOneHotY: return "zy";
    case AdversaryInput::ZOneHotF: return "zf";
  }
  return "?";
}

AdversaryInput adv_input_from(const std::string& name) {
  if (name == "z") return AdversaryInput::Z;
  if (name == "zy") return AdversaryInput::ZOneHotY;
  if (name == "zf") return AdversaryInput::ZOneHotF;
  throw std::runtime_error("checkpoint: unknown adversary input " + name);
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_net(std::ostream& out, const char* name, const DenseNet& net) {
  out << "net " << name << " " << net.layers.size() << "\n";
  for (const auto& layer : net.layers) {
    out << "layer " << layer.weight.rows() << " " << layer.weight.cols() << " "
        << activation_name(layer.act) << "\n";
    for (Eigen::Index r = 0; r < layer.weight.rows(); ++r) {
      for (Eigen::Index c = 0; c < layer.weight.cols(); ++c) {
        out << (c ? " " : "") << fmt_double(layer.weight(r, c));
      }
      out << "\n";
    }
    for (Eigen::Index c = 0; c < layer.bias.cols(); ++c) {
      out << (c ? " " : "") << fmt_double(layer.bias(c));
    }
    out << "\n";
  }
}

DenseNet read_net(std::istream& in, const std::string& expected_name) {
  std::string tag, name;
  std::size_t n_layers = 0;
  in >> tag >> name >> n_layers;
  if (tag != "net" || name != expected_name) {
    throw std::runtime_error("checkpoint: expected net " + expected_name);
  }
  DenseNet net;
  for (std::size_t l = 0; l < n_layers; ++l) {
    std::string layer_tag, act;
    Eigen::Index rows = 0, cols = 0;
    in >> layer_tag >> rows >> cols >> act;
    if (layer_tag != "layer" || rows <= 0 || cols <= 0) {
      throw std::runtime_error("checkpoint: malformed layer header");
    }
    DenseLayer layer;
    layer.act = activation_from(act);
    layer.weight.resize(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
      for (Eigen::Index c = 0; c < cols; ++c) in >> layer.weight(r, c);
    }
    layer.bias.resize(cols);
    for (Eigen::Index c = 0; c < cols; ++c) in >> layer.bias(c);
    if (!in) throw std::runtime_error("checkpoint: truncated parameters");
    net.layers.push_back(std::move(layer));
  }
  return net;
}

}  // namespace

void save_model(const ModelBundle& bundle, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
  out << "dcfr-model v1\n";
  out << "mode " << to_string(bundle.mode) << "\n";
  out << "adv_input " << adv_input_name(bundle.adv_input) << "\n";
  out << "dims " << bundle.m_x << " " << bundle.m_z << " " << bundle.extra_dim << "\n";
  write_net(out, "encoder", bundle.encoder);
  write_net(out, "head", bundle.head);
  write_net(out, "adversary", bundle.adversary);
  out << "end\n";
  if (!out) throw std::runtime_error("failed writing checkpoint: " + path);
}

ModelBundle load_model(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
  std::string magic, version;
  in >> magic >> version;
  if (magic != "dcfr-model" || version != "v1") {
    throw std::runtime_error("checkpoint: unsupported format/version");
  }
  ModelBundle bundle;
  std::string tag, value;
  in >> tag >> value;
  if (tag != "mode") throw std::runtime_error("checkpoint: missing mode");
  bundle.mode = train_mode_from_string(value);
  in >> tag >> value;
  if (tag != "adv_input") throw std::runtime_error("checkpoint: missing adv_input");
  bundle.adv_input = adv_input_from(value);
  in >> tag >> bundle.m_x >> bundle.m_z >> bundle.extra_dim;
  if (tag != "dims") throw std::runtime_error("checkpoint: missing dims");
  bundle.encoder = read_net(in, "encoder");
  bundle.head = read_net(in, "head");
  bundle.adversary = read_net(in, "adversary");
  in >> tag;
  if (tag != "end") throw std::runtime_error("checkpoint: missing end marker");
  bundle.encoder_state = make_adadelta(bundle.encoder);
  bundle.head_state = make_adadelta(bundle.head);
  bundle.adversary_state = make_adadelta(bundle.adversary);
  return bundle;
}

void write_trace_csv(const TrainTrace& trace, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write trace: " + path);
  out << "epoch,pred_loss,adversary_error,q_value,val_accuracy\n";
  for (std::size_t e = 0; e < trace.epochs.size(); ++e) {
    const auto& st = trace.epochs[e];
    out << e << "," << fmt_double(st.pred_loss) << "," << fmt_double(st.adversary_error) << ","
        << fmt_double(st.q_value) << "," << fmt_double(st.val_accuracy) << "\n";
  }
}

}  // namespace dcfr
