#include "dcfr/synthetic.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <stdexcept>

#include "dcfr/rng.hpp"

namespace dcfr {

CsvTable admission_toy_table(const AdmissionToyConfig& config) {
  if (config.n <= 0) throw std::invalid_argument("admission_toy_table: n must be positive");
  Rng rng(derive_seed(config.seed, "admission-toy"));
  CsvTable table;
  table.header = {"gender", "dept", "qual", "admit"};
  table.rows.reserve(config.n);
  char qual[32];
  for (int i = 0; i < config.n; ++i) {
    const int s = rng.bernoulli(config.p_s1) ? 1 : 0;
    const double p_eng = s == 1 ? config.dept_skew : 1.0 - config.dept_skew;
    const int d = rng.bernoulli(p_eng) ? 1 : 0;  // 1 = eng, 0 = law
    const double q = rng.normal();
    const double logit = config.qual_weight * q +
                         (d == 1 ? config.dept_effect : -config.dept_effect) +
                         config.direct_bias * static_cast<double>(s) + config.intercept;
    const int y = rng.bernoulli(1.0 / (1.0 + std::exp(-logit))) ? 1 : 0;
    std::snprintf(qual, sizeof(qual), "%.6f", q);
    table.rows.push_back({s == 1 ? "male" : "female", d == 1 ? "eng" : "law", qual,
                          y == 1 ? "yes" : "no"});
  }
  return table;
}

SchemaSpec admission_toy_schema() {
  SchemaSpec schema;
  schema.sensitive_column = "gender";
  schema.sensitive_positive = "male";
  schema.fair_columns = {"dept"};
  schema.outcome_column = "admit";
  schema.outcome_positive = "yes";
  return schema;
}

void write_csv(const CsvTable& table, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write csv: " + path);
  for (std::size_t c = 0; c < table.header.size(); ++c) {
    out << (c ? "," : "") << table.header[c];
  }
  out << "\n";
  for (const auto& row : table.rows) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      out << (c ? "," : "") << row[c];
    }
    out << "\n";
  }
}

}  // namespace dcfr
