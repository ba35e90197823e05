#include "dcfr/theory.hpp"

#include <cmath>
#include <stdexcept>

namespace dcfr {

FiniteJoint::FiniteJoint(int nz, int nf) : nz_(nz), nf_(nf) {
  if (nz < 1 || nf < 1) throw std::invalid_argument("FiniteJoint: supports must be nonempty");
  p_.assign(static_cast<std::size_t>(nz) * nf * 2, 0.0);
}

void FiniteJoint::normalize() {
  double total = 0.0;
  for (double v : p_) total += v;
  if (total <= 0.0) throw std::invalid_argument("FiniteJoint: cannot normalize zero mass");
  for (double& v : p_) v /= total;
}

void FiniteJoint::validate() const {
  double total = 0.0;
  for (double v : p_) {
    if (v < 0.0) throw std::invalid_argument("FiniteJoint: negative probability");
    total += v;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    throw std::invalid_argument("FiniteJoint: probabilities sum to " + std::to_string(total));
  }
}

double FiniteJoint::p_f(int f) const {
  double total = 0.0;
  for (int z = 0; z < nz_; ++z) total += at(z, f, 0) + at(z, f, 1);
  return total;
}

double FiniteJoint::p_zf(int z, int f) const { return at(z, f, 0) + at(z, f, 1); }

double FiniteJoint::p_s_given_f(int s, int f) const {
  const double pf = p_f(f);
  if (pf <= 0.0) return 0.0;
  double total = 0.0;
  for (int z = 0; z < nz_; ++z) total += at(z, f, s);
  return total / pf;
}

double FiniteJoint::q(const Eigen::Ref<const Eigen::MatrixXd>& h) const {
  if (h.rows() != nz_ || h.cols() != nf_) {
    throw std::invalid_argument("q: h table must be [nz x nf]");
  }
  double value = 0.0;
  for (int f = 0; f < nf_; ++f) {
    const double ps0 = p_s_given_f(0, f);
    const double ps1 = p_s_given_f(1, f);
    for (int z = 0; z < nz_; ++z) {
      value += (at(z, f, 1) * ps0 - at(z, f, 0) * ps1) * h(z, f);
    }
  }
  return value;
}

double FiniteJoint::q_l2(const Eigen::Ref<const Eigen::MatrixXd>& h) const {
  if (h.rows() != nz_ || h.cols() != nf_) {
    throw std::invalid_argument("q_l2: h table must be [nz x nf]");
  }
  double loss = 0.0;
  for (int f = 0; f < nf_; ++f) {
    const double ps0 = p_s_given_f(0, f);
    const double ps1 = p_s_given_f(1, f);
    for (int z = 0; z < nz_; ++z) {
      const double hv = h(z, f);
      loss += at(z, f, 1) * ps0 * (1.0 - hv) * (1.0 - hv) + at(z, f, 0) * ps1 * hv * hv;
    }
  }
  return constant() - loss;
}

double FiniteJoint::constant() const {
  double c = 0.0;
  for (int f = 0; f < nf_; ++f) {
    const double ps0 = p_s_given_f(0, f);
    for (int z = 0; z < nz_; ++z) c += at(z, f, 1) * ps0;
  }
  return c;
}

bool is_cond_independent(const FiniteJoint& joint, double tol) {
  for (int f = 0; f < joint.nf(); ++f) {
    const double pf = joint.p_f(f);
    if (pf <= 0.0) continue;
    for (int z = 0; z < joint.nz(); ++z) {
      const double pz_f = joint.p_zf(z, f) / pf;
      for (int s = 0; s < 2; ++s) {
        const double lhs = joint.at(z, f, s) / pf;
        const double rhs = pz_f * joint.p_s_given_f(s, f);
        if (std::abs(lhs - rhs) > tol) return false;
      }
    }
  }
  return true;
}

bool q_exhaustive_zero(const FiniteJoint& joint, double tol, std::string* witness) {
  for (int z = 0; z < joint.nz(); ++z) {
    for (int f = 0; f < joint.nf(); ++f) {
      const double value =
          joint.at(z, f, 1) * joint.p_s_given_f(0, f) - joint.at(z, f, 0) * joint.p_s_given_f(1, f);
      if (std::abs(value) > tol) {
        if (witness) {
          *witness = "Q(indicator z=" + std::to_string(z) + ", f=" + std::to_string(f) +
                     ") = " + std::to_string(value);
        }
        return false;
      }
    }
  }
  return true;
}

namespace {

Eigen::MatrixXd random_h(int nz, int nf, Rng& rng) {
  Eigen::MatrixXd h(nz, nf);
  for (int z = 0; z < nz; ++z) {
    for (int f = 0; f < nf; ++f) h(z, f) = rng.uniform01();
  }
  return h;
}

}  // namespace

bool sup_symmetry_check(const FiniteJoint& joint, int trials, Rng& rng, double tol) {
  for (int t = 0; t < trials; ++t) {
    const Eigen::MatrixXd h = random_h(joint.nz(), joint.nf(), rng);
    const Eigen::MatrixXd h_flip = Eigen::MatrixXd::Ones(joint.nz(), joint.nf()) - h;
    if (std::abs(joint.q(h) + joint.q(h_flip)) > tol) return false;
  }
  return true;
}

bool l2_dominates_l1(const FiniteJoint& joint, int trials, Rng& rng) {
  for (int t = 0; t < trials; ++t) {
    const Eigen::MatrixXd h = random_h(joint.nz(), joint.nf(), rng);
    if (joint.q_l2(h) < joint.q(h) - 1e-12) return false;
  }
  return true;
}

FiniteJoint random_joint(int nz, int nf, Rng& rng) {
  FiniteJoint joint(nz, nf);
  for (int z = 0; z < nz; ++z) {
    for (int f = 0; f < nf; ++f) {
      for (int s = 0; s < 2; ++s) {
        // -log(u) gives Exp(1); normalizing yields a uniform simplex draw.
        double u = rng.uniform01();
        while (u <= 0.0) u = rng.uniform01();
        joint.at(z, f, s) = -std::log(u);
      }
    }
  }
  joint.normalize();
  return joint;
}

FiniteJoint random_ci_joint(int nz, int nf, Rng& rng) {
  std::vector<double> pf(nf);
  double pf_total = 0.0;
  for (int f = 0; f < nf; ++f) {
    pf[f] = -std::log(std::max(rng.uniform01(), 1e-300));
    pf_total += pf[f];
  }
  FiniteJoint joint(nz, nf);
  for (int f = 0; f < nf; ++f) {
    std::vector<double> pz(nz);
    double pz_total = 0.0;
    for (int z = 0; z < nz; ++z) {
      pz[z] = -std::log(std::max(rng.uniform01(), 1e-300));
      pz_total += pz[z];
    }
    const double ps1 = rng.uniform01();
    for (int z = 0; z < nz; ++z) {
      const double base = pf[f] / pf_total * pz[z] / pz_total;
      joint.at(z, f, 0) = base * (1.0 - ps1);
      joint.at(z, f, 1) = base * ps1;
    }
  }
  joint.normalize();
  return joint;
}

std::vector<FiniteJoint> corner_joints() {
  std::vector<FiniteJoint> joints;

  {  // uniform product distribution
    FiniteJoint j(2, 2);
    for (int z = 0; z < 2; ++z)
      for (int f = 0; f < 2; ++f)
        for (int s = 0; s < 2; ++s) j.at(z, f, s) = 0.125;
    joints.push_back(j);
  }
  {  // Z = S exact copy with nondegenerate S|F
    FiniteJoint j(2, 2);
    j.at(0, 0, 0) = 0.2;
    j.at(1, 0, 1) = 0.3;
    j.at(0, 1, 0) = 0.25;
    j.at(1, 1, 1) = 0.25;
    joints.push_back(j);
  }
  {  // degenerate S|F: p(S=1|f) in {0,1} for every f
    FiniteJoint j(3, 2);
    j.at(0, 0, 1) = 0.2;
    j.at(1, 0, 1) = 0.2;
    j.at(2, 0, 1) = 0.1;
    j.at(0, 1, 0) = 0.3;
    j.at(2, 1, 0) = 0.2;
    joints.push_back(j);
  }
  {  // single atom
    FiniteJoint j(2, 2);
    j.at(1, 1, 1) = 1.0;
    joints.push_back(j);
  }
  {  // Z depends on F but not on S given F
    FiniteJoint j(2, 3);
    for (int f = 0; f < 3; ++f) {
      const double pf = f == 0 ? 0.5 : 0.25;
      const double pz1 = 0.2 + 0.3 * f;
      const double ps1 = 0.3 + 0.2 * f;
      for (int z = 0; z < 2; ++z) {
        const double pz = z == 1 ? pz1 : 1.0 - pz1;
        j.at(z, f, 0) = pf * pz * (1.0 - ps1);
        j.at(z, f, 1) = pf * pz * ps1;
      }
    }
    joints.push_back(j);
  }
  return joints;
}

JointSample sample_joint(const FiniteJoint& joint, int n, Rng& rng) {
  std::vector<double> cdf;
  cdf.reserve(static_cast<std::size_t>(joint.nz()) * joint.nf() * 2);
  double cum = 0.0;
  for (int z = 0; z < joint.nz(); ++z)
    for (int f = 0; f < joint.nf(); ++f)
      for (int s = 0; s < 2; ++s) {
        cum += joint.at(z, f, s);
        cdf.push_back(cum);
      }
  JointSample sample;
  sample.z.resize(n);
  sample.f.resize(n);
  sample.s.resize(n);
  for (int i = 0; i < n; ++i) {
    const double u = rng.uniform01() * cum;
    const auto it = std::lower_bound(cdf.begin(), cdf.end(), u);
    int flat = static_cast<int>(it - cdf.begin());
    if (flat >= static_cast<int>(cdf.size())) flat = static_cast<int>(cdf.size()) - 1;
    sample.s[i] = flat % 2;
    sample.f[i] = (flat / 2) % joint.nf();
    sample.z[i] = flat / (2 * joint.nf());
  }
  return sample;
}

TheorySuiteReport run_theory_suite(int joints, int h_trials, std::uint64_t seed) {
  TheorySuiteReport report;

  {  // Thm 1: definitional CI check agrees with the indicator Q-test.
    Rng rng(derive_seed(seed, "thm1"));
    long tested = 0;
    bool pass = true;
    std::string detail;
    auto check = [&](const FiniteJoint& j, bool expect_ci_known, bool expect_ci) {
      ++tested;
      const bool ci = is_cond_independent(j);
      const bool qzero = q_exhaustive_zero(j);
      if (ci != qzero) {
        pass = false;
        detail = "disagreement on joint #" + std::to_string(tested);
      }
      if (expect_ci_known && ci != expect_ci) {
        pass = false;
        detail = "unexpected CI verdict on joint #" + std::to_string(tested);
      }
    };
    for (const auto& j : corner_joints()) check(j, false, false);
    for (int t = 0; t < joints; ++t) {
      const int nz = 2 + rng.index(3);
      const int nf = 1 + rng.index(3);
      check(random_joint(nz, nf, rng), false, false);
      check(random_ci_joint(nz, nf, rng), true, true);
    }
    report.checks.push_back({"thm1_ci_equivalence", pass, tested, detail});
  }

  {  // Thm 2 identity: Q(h) + Q(1-h) = 0.
    Rng rng(derive_seed(seed, "thm2"));
    bool pass = true;
    long tested = 0;
    const int joints_here = std::max(1, h_trials / 50);
    for (int j = 0; j < joints_here && pass; ++j) {
      const FiniteJoint joint = random_joint(2 + rng.index(3), 1 + rng.index(3), rng);
      pass = sup_symmetry_check(joint, 50, rng);
      tested += 50;
    }
    report.checks.push_back({"thm2_sup_symmetry", pass, tested, ""});
  }

  {  // Thm 3 bound: Q'(h) >= Q(h).
    Rng rng(derive_seed(seed, "thm3"));
    bool pass = true;
    long tested = 0;
    for (int t = 0; t < h_trials && pass; ++t) {
      const FiniteJoint joint = random_joint(2 + rng.index(3), 1 + rng.index(3), rng);
      pass = l2_dominates_l1(joint, 1, rng);
      ++tested;
    }
    report.checks.push_back({"thm3_l2_upper_bound", pass, tested, ""});
  }

  for (const auto& c : report.checks) report.all_pass = report.all_pass && c.pass;
  return report;
}

}  // namespace dcfr
