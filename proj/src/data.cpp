#include "dcfr/data.hpp"

#include <algorithm>
#include <cmath>
#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "dcfr/rng.hpp"

namespace dcfr {

const char* to_string(FairnessMode mode) {
  switch (mode) {
    case FairnessMode::Dp: return "dp";
    case FairnessMode::Eo: return "eo";
    case FairnessMode::Cf: return "cf";
    case FairnessMode::LaftrCf: return "laftr-cf";
  }
  return "?";
}

FairnessMode fairness_mode_from_string(const std::string& name) {
  if (name == "dp") return FairnessMode::Dp;
  if (name == "eo") return FairnessMode::Eo;
  if (name == "cf") return FairnessMode::Cf;
  if (name == "laftr-cf" || name == "laftr_cf") return FairnessMode::LaftrCf;
  throw std::invalid_argument("unknown fairness mode: " + name);
}

namespace {

std::string trim(const std::string& s) {
  std::size_t a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  std::size_t b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

// UCI label cells sometimes carry a trailing period (">50K." in adult.test);
// strip it when matching binary labels.
std::string label_key(const std::string& s) {
  std::string t = trim(s);
  if (!t.empty() && t.back() == '.') t.pop_back();
  return t;
}

bool parse_double(const std::string& s, double& out) {
  const std::string t = trim(s);
  if (t.empty()) return false;
  char* end = nullptr;
  out = std::strtod(t.c_str(), &end);
  return end == t.c_str() + t.size();
}

int column_index(const std::vector<std::string>& header, const std::string& name,
                 const char* what) {
  auto it = std::find(header.begin(), header.end(), name);
  if (it == header.end()) {
    throw std::runtime_error(std::string("unknown ") + what + " column: " + name);
  }
  return static_cast<int>(it - header.begin());
}

}  // namespace

SchemaSpec load_schema(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open schema file: " + path);
  SchemaSpec schema;
  std::string line;
  while (std::getline(in, line)) {
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const std::size_t eq = line.find('=');
    if (eq == std::string::npos) {
      throw std::runtime_error("schema line is not key = value: " + line);
    }
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "sensitive") schema.sensitive_column = value;
    else if (key == "sensitive_positive") schema.sensitive_positive = value;
    else if (key == "fair") schema.fair_columns = split_list(value);
    else if (key == "outcome") schema.outcome_column = value;
    else if (key == "outcome_positive") schema.outcome_positive = value;
    else if (key == "drop") schema.drop_columns = split_list(value);
    else if (key == "columns") schema.columns = split_list(value);
    else if (key == "missing") schema.missing_token = value;
    else throw std::runtime_error("unknown schema key: " + key);
  }
  if (schema.sensitive_column.empty() || schema.outcome_column.empty()) {
    throw std::runtime_error("schema must name sensitive and outcome columns");
  }
  return schema;
}

CsvTable read_csv(const std::string& path, const std::vector<std::string>& columns) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open csv file: " + path);
  CsvTable table;
  table.header = columns;
  std::string line;
  auto parse_row = [](const std::string& l) {
    std::vector<std::string> cells;
    std::stringstream ss(l);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(trim(cell));
    if (!l.empty() && l.back() == ',') cells.push_back("");
    return cells;
  };
  while (std::getline(in, line)) {
    const std::string t = trim(line);
    if (t.empty() || t[0] == '|') continue;
    if (table.header.empty()) {
      table.header = parse_row(t);
    } else {
      auto row = parse_row(t);
      if (row.size() != table.header.size()) {
        throw std::runtime_error("csv row has " + std::to_string(row.size()) +
                                 " cells, header has " + std::to_string(table.header.size()));
      }
      table.rows.push_back(std::move(row));
    }
  }
  if (table.header.empty()) throw std::runtime_error("empty csv file: " + path);
  return table;
}

namespace {

struct ColumnRoles {
  int sensitive = -1;
  int outcome = -1;
  std::vector<int> fair;
  std::vector<int> features;  // fair columns first, then the rest
};

ColumnRoles resolve_roles(const std::vector<std::string>& header, const SchemaSpec& schema) {
  ColumnRoles roles;
  roles.sensitive = column_index(header, schema.sensitive_column, "sensitive");
  roles.outcome = column_index(header, schema.outcome_column, "outcome");
  std::set<int> taken{roles.sensitive, roles.outcome};
  for (const auto& name : schema.fair_columns) {
    const int idx = column_index(header, name, "fair");
    if (taken.count(idx)) throw std::runtime_error("column used twice in schema: " + name);
    taken.insert(idx);
    roles.fair.push_back(idx);
  }
  std::set<int> dropped;
  for (const auto& name : schema.drop_columns) {
    dropped.insert(column_index(header, name, "drop"));
  }
  roles.features = roles.fair;
  for (int c = 0; c < static_cast<int>(header.size()); ++c) {
    if (taken.count(c) || dropped.count(c)) continue;
    roles.features.push_back(c);
  }
  return roles;
}

bool row_has_missing(const std::vector<std::string>& row, const ColumnRoles& roles,
                     const std::string& missing) {
  if (row[roles.sensitive] == missing || row[roles.outcome] == missing) return true;
  for (int c : roles.features) {
    if (row[c] == missing) return true;
  }
  return false;
}

// Maps a binary column's two levels onto {0,1}; the positive label (if given)
// becomes 1, otherwise the lexicographically larger level does.
struct BinaryMap {
  std::string one, zero;
};

BinaryMap fit_binary(const CsvTable& table, const ColumnRoles& roles, int col,
                     const std::string& positive, const std::string& missing, const char* what) {
  std::set<std::string> values;
  for (const auto& row : table.rows) {
    if (row_has_missing(row, roles, missing)) continue;
    values.insert(label_key(row[col]));
  }
  if (values.size() != 2) {
    throw std::runtime_error(std::string(what) + " column must be binary, found " +
                             std::to_string(values.size()) + " distinct values");
  }
  auto it = values.begin();
  const std::string a = *it++;
  const std::string b = *it;
  if (!positive.empty()) {
    const std::string p = label_key(positive);
    if (p != a && p != b) {
      throw std::runtime_error(std::string(what) + " positive label '" + positive +
                               "' not found among {" + a + ", " + b + "}");
    }
    return p == a ? BinaryMap{a, b} : BinaryMap{b, a};
  }
  return BinaryMap{b, a};
}

}  // namespace

StratumTable build_strata(const Eigen::VectorXi& s, const Eigen::VectorXi& y,
                          const Eigen::VectorXi& f_id, int num_strata) {
  StratumTable t;
  t.n = s.size();
  t.count_f.assign(num_strata, 0);
  t.count_sf.assign(num_strata, {0, 0});
  t.count_sy.assign(2, {0, 0});
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    const int si = s[i], yi = y[i], fi = f_id[i];
    t.count_s[si] += 1;
    t.count_y[yi] += 1;
    t.count_sy[yi][si] += 1;
    if (fi >= static_cast<int>(t.count_f.size())) {
      t.count_f.resize(fi + 1, 0);
      t.count_sf.resize(fi + 1, {0, 0});
    }
    t.count_f[fi] += 1;
    t.count_sf[fi][si] += 1;
  }
  return t;
}

Encoding fit_encoding(const CsvTable& table, const SchemaSpec& schema) {
  const ColumnRoles roles = resolve_roles(table.header, schema);
  Encoding enc;
  for (int c : roles.features) {
    ColumnEncoding col;
    col.name = table.header[c];
    double value = 0.0;
    bool numeric = true;
    for (const auto& row : table.rows) {
      if (row[c] == schema.missing_token) continue;
      if (!parse_double(row[c], value)) {
        numeric = false;
        break;
      }
    }
    col.numeric = numeric;
    if (numeric) {
      double sum = 0.0, sum2 = 0.0;
      long n = 0;
      for (const auto& row : table.rows) {
        if (row_has_missing(row, roles, schema.missing_token)) continue;
        parse_double(row[c], value);
        sum += value;
        sum2 += value * value;
        ++n;
      }
      if (n == 0) throw std::runtime_error("no usable rows while fitting column " + col.name);
      col.mean = sum / static_cast<double>(n);
      const double var = sum2 / static_cast<double>(n) - col.mean * col.mean;
      col.stdev = var > 1e-12 ? std::sqrt(var) : 1.0;
      enc.x_dim += 1;
    } else {
      std::set<std::string> values;
      for (const auto& row : table.rows) {
        if (row_has_missing(row, roles, schema.missing_token)) continue;
        values.insert(row[c]);
      }
      col.vocab.assign(values.begin(), values.end());
      enc.x_dim += static_cast<int>(col.vocab.size());
    }
    enc.features.push_back(std::move(col));
  }

  // Joint fair strata, labeled "v1|v2|..." over the fair columns.
  std::set<std::string> strata;
  for (const auto& row : table.rows) {
    if (row_has_missing(row, roles, schema.missing_token)) continue;
    std::string key;
    for (std::size_t k = 0; k < roles.fair.size(); ++k) {
      if (k) key += '|';
      key += row[roles.fair[k]];
    }
    strata.insert(key);
  }
  enc.stratum_labels.assign(strata.begin(), strata.end());
  return enc;
}

FairDataset encode_table(const CsvTable& table, const SchemaSpec& schema, const Encoding& enc) {
  const ColumnRoles roles = resolve_roles(table.header, schema);
  const BinaryMap s_map =
      fit_binary(table, roles, roles.sensitive, schema.sensitive_positive, schema.missing_token,
                 "sensitive");
  const BinaryMap y_map = fit_binary(table, roles, roles.outcome, schema.outcome_positive,
                                     schema.missing_token, "outcome");

  std::vector<int> kept;
  for (int r = 0; r < static_cast<int>(table.rows.size()); ++r) {
    if (!row_has_missing(table.rows[r], roles, schema.missing_token)) kept.push_back(r);
  }
  if (kept.empty()) throw std::runtime_error("no rows left after dropping missing values");

  FairDataset ds;
  ds.dropped_rows = static_cast<long>(table.rows.size()) - static_cast<long>(kept.size());
  ds.s.resize(kept.size());
  ds.y.resize(kept.size());
  ds.f_id.resize(kept.size());
  ds.x = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(kept.size()), enc.x_dim);
  ds.stratum_labels = enc.stratum_labels;

  std::map<std::string, int> stratum_of;
  for (int f = 0; f < enc.num_strata(); ++f) stratum_of[enc.stratum_labels[f]] = f;

  long unseen_levels = 0;
  for (std::size_t out = 0; out < kept.size(); ++out) {
    const auto& row = table.rows[kept[out]];
    ds.s[out] = label_key(row[roles.sensitive]) == s_map.one ? 1 : 0;
    ds.y[out] = label_key(row[roles.outcome]) == y_map.one ? 1 : 0;

    std::string key;
    for (std::size_t k = 0; k < roles.fair.size(); ++k) {
      if (k) key += '|';
      key += row[roles.fair[k]];
    }
    auto it = stratum_of.find(key);
    if (it == stratum_of.end()) {
      const int fresh = static_cast<int>(ds.stratum_labels.size());
      it = stratum_of.emplace(key, fresh).first;
      ds.stratum_labels.push_back(key);
      ds.warnings.push_back("stratum '" + key + "' absent from the fitted encoding");
    }
    ds.f_id[out] = it->second;

    int offset = 0;
    for (std::size_t j = 0; j < enc.features.size(); ++j) {
      const auto& col = enc.features[j];
      const std::string& cell = row[roles.features[j]];
      if (col.numeric) {
        double value = 0.0;
        if (!parse_double(cell, value)) {
          throw std::runtime_error("non-numeric cell '" + cell + "' in numeric column " +
                                   col.name);
        }
        ds.x(out, offset) = (value - col.mean) / col.stdev;
        offset += 1;
      } else {
        auto pos = std::lower_bound(col.vocab.begin(), col.vocab.end(), cell);
        if (pos != col.vocab.end() && *pos == cell) {
          ds.x(out, offset + static_cast<int>(pos - col.vocab.begin())) = 1.0;
        } else {
          ++unseen_levels;  // all-zero one-hot
        }
        offset += static_cast<int>(col.vocab.size());
      }
    }
  }
  if (unseen_levels > 0) {
    ds.warnings.push_back(std::to_string(unseen_levels) +
                          " cells held categorical levels absent from the fitted encoding");
  }
  ds.strata = build_strata(ds.s, ds.y, ds.f_id, ds.num_strata());
  return ds;
}

FairDataset load_csv(const std::string& path, const SchemaSpec& schema) {
  const CsvTable table = read_csv(path, schema.columns);
  return encode_table(table, schema, fit_encoding(table, schema));
}

std::pair<FairDataset, FairDataset> load_train_test(const std::string& train_path,
                                                    const std::string& test_path,
                                                    const SchemaSpec& schema) {
  const CsvTable train_table = read_csv(train_path, schema.columns);
  const CsvTable test_table = read_csv(test_path, schema.columns);
  const Encoding enc = fit_encoding(train_table, schema);
  return {encode_table(train_table, schema, enc), encode_table(test_table, schema, enc)};
}

namespace {

FairDataset take_rows(const FairDataset& ds, const std::vector<int>& idx) {
  FairDataset part;
  part.s.resize(idx.size());
  part.y.resize(idx.size());
  part.f_id.resize(idx.size());
  part.x.resize(static_cast<Eigen::Index>(idx.size()), ds.x.cols());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    part.s[i] = ds.s[idx[i]];
    part.y[i] = ds.y[idx[i]];
    part.f_id[i] = ds.f_id[idx[i]];
    part.x.row(i) = ds.x.row(idx[i]);
  }
  part.stratum_labels = ds.stratum_labels;
  part.strata = build_strata(part.s, part.y, part.f_id, part.num_strata());
  return part;
}

}  // namespace

std::vector<FairDataset> split(const FairDataset& ds, const std::vector<double>& fractions,
                               std::uint64_t seed) {
  if (fractions.empty()) throw std::invalid_argument("split: no fractions given");
  double total = 0.0;
  for (double f : fractions) {
    if (f < 0.0) throw std::invalid_argument("split: negative fraction");
    total += f;
  }
  if (std::abs(total - 1.0) > 1e-9) throw std::invalid_argument("split: fractions must sum to 1");

  std::vector<int> order(ds.n());
  for (int i = 0; i < ds.n(); ++i) order[i] = i;
  Rng rng(derive_seed(seed, "split"));
  rng.shuffle(order);

  std::vector<FairDataset> parts;
  double cum = 0.0;
  int start = 0;
  for (std::size_t k = 0; k < fractions.size(); ++k) {
    cum += fractions[k];
    const int stop = (k + 1 == fractions.size())
                         ? ds.n()
                         : static_cast<int>(std::llround(cum * static_cast<double>(ds.n())));
    if (stop <= start) {
      throw std::runtime_error("split: part " + std::to_string(k) + " is empty");
    }
    parts.push_back(take_rows(ds, {order.begin() + start, order.begin() + stop}));
    start = stop;
  }

  // Flag strata that appear in later parts but not in the training part.
  const auto& train_f = parts.front().strata.count_f;
  for (std::size_t k = 1; k < parts.size(); ++k) {
    for (int f = 0; f < static_cast<int>(parts[k].strata.count_f.size()); ++f) {
      if (parts[k].strata.count_f[f] == 0) continue;
      if (f >= static_cast<int>(train_f.size()) || train_f[f] == 0) {
        parts[k].warnings.push_back("stratum '" + parts[k].stratum_labels[f] +
                                    "' missing from the training part");
      }
    }
  }
  return parts;
}

WeightScheme compute_weights(const FairDataset& train, FairnessMode mode) {
  const StratumTable& t = train.strata;
  const double n = static_cast<double>(t.n);
  WeightScheme scheme;
  scheme.mode = mode;
  scheme.w.resize(train.n());

  auto warn_single_group = [&scheme, &train](int f) {
    scheme.warnings.push_back("stratum '" + train.stratum_labels[f] +
                              "' has a single S group; its weights are zero");
  };

  switch (mode) {
    case FairnessMode::Cf: {
      scheme.adversary_input = AdversaryInput::ZOneHotF;
      std::vector<bool> warned(t.count_f.size(), false);
      for (int i = 0; i < train.n(); ++i) {
        const int f = train.f_id[i];
        const long opposite = t.count_sf[f][1 - train.s[i]];
        scheme.w[i] = static_cast<double>(opposite) / (n * static_cast<double>(t.count_f[f]));
        if (opposite == 0 && !warned[f]) {
          warned[f] = true;
          warn_single_group(f);
        }
      }
      break;
    }
    case FairnessMode::Dp: {
      scheme.adversary_input = AdversaryInput::Z;
      if (t.count_s[0] == 0 || t.count_s[1] == 0) {
        throw std::runtime_error("compute_weights: a sensitive group is empty");
      }
      for (int i = 0; i < train.n(); ++i) {
        scheme.w[i] = 1.0 / static_cast<double>(t.count_s[train.s[i]]);
      }
      break;
    }
    case FairnessMode::Eo: {
      scheme.adversary_input = AdversaryInput::ZOneHotY;
      std::array<bool, 2> warned{false, false};
      for (int i = 0; i < train.n(); ++i) {
        const int yi = train.y[i];
        const long opposite = t.count_sy[yi][1 - train.s[i]];
        scheme.w[i] = static_cast<double>(opposite) / (n * static_cast<double>(t.count_y[yi]));
        if (opposite == 0 && !warned[yi]) {
          warned[yi] = true;
          scheme.warnings.push_back("outcome cell Y=" + std::to_string(yi) +
                                    " has a single S group; its weights are zero");
        }
      }
      break;
    }
    case FairnessMode::LaftrCf: {
      scheme.adversary_input = AdversaryInput::Z;
      std::vector<bool> warned(t.count_f.size(), false);
      for (int i = 0; i < train.n(); ++i) {
        const int f = train.f_id[i];
        if (t.count_sf[f][1 - train.s[i]] == 0) {
          scheme.w[i] = 0.0;  // degenerate stratum cannot constrain the adversary
          if (!warned[f]) {
            warned[f] = true;
            warn_single_group(f);
          }
        } else {
          scheme.w[i] = 1.0 / static_cast<double>(t.count_sf[f][train.s[i]]);
        }
      }
      break;
    }
  }
  return scheme;
}

double constant_c(const FairDataset& train, FairnessMode mode) {
  const StratumTable& t = train.strata;
  const double n = static_cast<double>(t.n);
  switch (mode) {
    case FairnessMode::Cf:
    case FairnessMode::LaftrCf: {
      double c = 0.0;
      for (std::size_t f = 0; f < t.count_f.size(); ++f) {
        if (t.count_f[f] == 0) continue;
        c += static_cast<double>(t.count_sf[f][1]) * static_cast<double>(t.count_sf[f][0]) /
             static_cast<double>(t.count_f[f]);
      }
      return c / n;
    }
    case FairnessMode::Eo: {
      double c = 0.0;
      for (int y = 0; y < 2; ++y) {
        if (t.count_y[y] == 0) continue;
        c += static_cast<double>(t.count_sy[y][1]) * static_cast<double>(t.count_sy[y][0]) /
             static_cast<double>(t.count_y[y]);
      }
      return c / n;
    }
    case FairnessMode::Dp:
      return static_cast<double>(t.count_s[1]) * static_cast<double>(t.count_s[0]) / (n * n);
  }
  return 0.0;
}

double q_constant_for_mode(const FairDataset& train, FairnessMode mode) {
  switch (mode) {
    case FairnessMode::Cf:
    case FairnessMode::Eo:
      return constant_c(train, mode);
    case FairnessMode::Dp:
      return 1.0;
    case FairnessMode::LaftrCf: {
      // Count only strata present in training data.
      long populated = 0;
      for (long c : train.strata.count_f) populated += c > 0 ? 1 : 0;
      return static_cast<double>(populated);
    }
  }
  return 0.0;
}

}  // namespace dcfr
