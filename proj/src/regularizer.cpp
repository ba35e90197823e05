#include "dcfr/regularizer.hpp"

#include <stdexcept>

namespace dcfr {

namespace {

void validate(const AdversaryBatch& batch) {
  if (batch.h_out.size() != batch.s.size() || batch.h_out.size() != batch.w.size() ||
      batch.h_out.size() == 0) {
    throw std::invalid_argument("AdversaryBatch: empty or mismatched fields");
  }
  if ((batch.h_out.array() < 0.0).any() || (batch.h_out.array() > 1.0).any()) {
    throw std::invalid_argument("AdversaryBatch: h_out outside [0,1]");
  }
  if ((batch.w.array() < 0.0).any() || !batch.w.allFinite()) {
    throw std::invalid_argument("AdversaryBatch: weights must be finite and nonnegative");
  }
}

}  // namespace

double q_l1(const AdversaryBatch& batch) {
  validate(batch);
  const auto residual = (batch.h_out.array() - batch.s.cast<double>().array()).abs();
  return batch.c - (batch.w.array() * residual).sum();
}

double q_l2(const AdversaryBatch& batch) {
  validate(batch);
  const auto residual = (batch.h_out.array() - batch.s.cast<double>().array()).square();
  return batch.c - (batch.w.array() * residual).sum();
}

double adversary_loss(const AdversaryBatch& batch) {
  validate(batch);
  const auto residual = (batch.h_out.array() - batch.s.cast<double>().array()).square();
  return (batch.w.array() * residual).sum();
}

Eigen::VectorXd adversary_loss_grad(const AdversaryBatch& batch) {
  validate(batch);
  return (2.0 * batch.w.array() * (batch.h_out.array() - batch.s.cast<double>().array()))
      .matrix();
}

double adversary_loss_l1(const AdversaryBatch& batch) {
  validate(batch);
  const auto residual = (batch.h_out.array() - batch.s.cast<double>().array()).abs();
  return (batch.w.array() * residual).sum();
}

Eigen::VectorXd adversary_loss_l1_grad(const AdversaryBatch& batch) {
  validate(batch);
  const auto diff = batch.h_out.array() - batch.s.cast<double>().array();
  return (batch.w.array() * diff.sign()).matrix();
}

double fairness_penalty(const AdversaryBatch& batch, double lambda) {
  return lambda * q_l2(batch);
}

Eigen::VectorXd fairness_penalty_grad(const AdversaryBatch& batch, double lambda) {
  validate(batch);
  return (-2.0 * lambda * batch.w.array() *
          (batch.h_out.array() - batch.s.cast<double>().array()))
      .matrix();
}

}  // namespace dcfr
