#pragma once

#include <cstdint>

#include "dcfr/data.hpp"

namespace dcfr {

/// College-admission toy generator: gender S drives department choice D and
/// (with a direct bias term) the historical decision Y; qualification Q is
/// independent of S. D is the fair variable, so a predictor of the form
/// f(Q, D) is conditionally fair while unconstrained training picks up the
/// direct S effect.
struct AdmissionToyConfig {
  int n = 5000;
  std::uint64_t seed = 0;
  double p_s1 = 0.5;          // P(S=1)
  double dept_skew = 0.8;     // P(D=eng | S=1); P(D=eng | S=0) = 1 - dept_skew
  double qual_weight = 2.0;   // Y-logit weight on Q ~ N(0,1)
  double dept_effect = 1.4;   // +- on the Y logit for eng/law
  double direct_bias = 1.2;   // direct S -> Y logit effect
  double intercept = -0.2;
};

/// Rows with columns gender, dept, qual, admit; flows through the normal
/// CSV/schema pipeline.
CsvTable admission_toy_table(const AdmissionToyConfig& config);

SchemaSpec admission_toy_schema();

void write_csv(const CsvTable& table, const std::string& path);

}  // namespace dcfr
