#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "dcfr/rng.hpp"

namespace dcfr {

/// Exact joint distribution of (Z, F, S) on a small finite support, with S
/// binary. All expectations below are finite sums, so the conditional
/// independence characterizations can be checked without sampling error.
class FiniteJoint {
 public:
  FiniteJoint(int nz, int nf);

  double& at(int z, int f, int s) { return p_[idx(z, f, s)]; }
  double at(int z, int f, int s) const { return p_[idx(z, f, s)]; }

  int nz() const { return nz_; }
  int nf() const { return nf_; }

  void normalize();
  /// Throws unless entries are nonnegative and sum to 1 within 1e-12.
  void validate() const;

  double p_f(int f) const;
  double p_zf(int z, int f) const;          // marginal over s
  double p_s_given_f(int s, int f) const;   // 0 when p(f) = 0

  /// Q(h) = E[I(S=1)P(S=0|F)h] - E[I(S=0)P(S=1|F)h], h as an [nz x nf] table.
  double q(const Eigen::Ref<const Eigen::MatrixXd>& h) const;

  /// Q'(h) = C - E[I(S=1)P(S=0|F)(1-h)^2] - E[I(S=0)P(S=1|F)h^2].
  double q_l2(const Eigen::Ref<const Eigen::MatrixXd>& h) const;

  /// C = E[I(S=1)P(S=0|F)].
  double constant() const;

 private:
  int idx(int z, int f, int s) const { return (z * nf_ + f) * 2 + s; }
  int nz_, nf_;
  std::vector<double> p_;
};

/// Definitional check: p(z,s|f) = p(z|f)p(s|f) on every cell with p(f) > 0.
bool is_cond_independent(const FiniteJoint& joint, double tol = 1e-10);

/// Evaluates Q on every indicator h = I(Z=z, F=f). These span all tables on
/// the finite support, so all-zero is equivalent to Q vanishing on L2_ZF.
/// On failure `witness` (if given) names the offending indicator.
bool q_exhaustive_zero(const FiniteJoint& joint, double tol = 1e-10,
                       std::string* witness = nullptr);

/// Q(h) + Q(1-h) = 0 for `trials` random h tables in [0,1].
bool sup_symmetry_check(const FiniteJoint& joint, int trials, Rng& rng, double tol = 1e-10);

/// Q'(h) >= Q(h) - 1e-12 for `trials` random h tables in [0,1].
bool l2_dominates_l1(const FiniteJoint& joint, int trials, Rng& rng);

/// Random joint, uniform on the simplex over the support.
FiniteJoint random_joint(int nz, int nf, Rng& rng);

/// Random conditionally independent joint: p(f) p(z|f) p(s|f).
FiniteJoint random_ci_joint(int nz, int nf, Rng& rng);

/// Deterministic corner cases: product joints, Z = S copies, degenerate
/// S|F conditionals, single-atom masses.
std::vector<FiniteJoint> corner_joints();

/// i.i.d. draws (z, f, s) from the joint, for estimator-convergence checks.
struct JointSample {
  Eigen::VectorXi z, f, s;
};
JointSample sample_joint(const FiniteJoint& joint, int n, Rng& rng);

struct TheoremCheck {
  std::string name;
  bool pass = false;
  long trials = 0;
  std::string detail;
};

struct TheorySuiteReport {
  std::vector<TheoremCheck> checks;
  bool all_pass = true;
};

/// The full brute-force suite: equivalence of the definitional CI check and
/// the indicator Q-test on random + corner joints, the Q(h) + Q(1-h) = 0
/// identity, and the L2-dominates-L1 bound.
TheorySuiteReport run_theory_suite(int joints = 1000, int h_trials = 1000,
                                   std::uint64_t seed = 2024);

}  // namespace dcfr
