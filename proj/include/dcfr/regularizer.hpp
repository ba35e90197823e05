#pragma once

#include <Eigen/Core>

namespace dcfr {

/// One adversary evaluation on a batch. `w` carries the batch-scaled sample
/// weights (stored per-sample weight times N/B so that sums here estimate the
/// full-data weighted sums); `c` is the dataset constant for the mode.
struct AdversaryBatch {
  Eigen::VectorXd h_out;  // adversary outputs, within [0,1]
  Eigen::VectorXi s;      // {0,1}
  Eigen::VectorXd w;      // nonnegative
  double c = 0.0;
};

/// Q(h) = C - sum_i w_i |h_i - S_i|  (weighted L1 form).
double q_l1(const AdversaryBatch& batch);

/// Q'(h) = C - sum_i w_i (h_i - S_i)^2  (L2 surrogate; Q' >= Q on [0,1]).
double q_l2(const AdversaryBatch& batch);

/// What the adversary descends: sum_i w_i (h_i - S_i)^2 = C - Q'(h).
double adversary_loss(const AdversaryBatch& batch);
Eigen::VectorXd adversary_loss_grad(const AdversaryBatch& batch);

/// L1 variant of the adversary loss (ablation path; subgradient at h = S).
double adversary_loss_l1(const AdversaryBatch& batch);
Eigen::VectorXd adversary_loss_l1_grad(const AdversaryBatch& batch);

/// What the encoder/head add to their loss: lambda * Q'(h). Minimizing it
/// drives the adversary's weighted error up; gradients flow through h_out's
/// dependence on Z only (the adversary is frozen during this step).
double fairness_penalty(const AdversaryBatch& batch, double lambda);
Eigen::VectorXd fairness_penalty_grad(const AdversaryBatch& batch, double lambda);

}  // namespace dcfr
