#pragma once

#include <Eigen/Core>
#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace dcfr {

// Which conditional-independence target the adversary weights realize.
enum class FairnessMode { Dp, Eo, Cf, LaftrCf };

// What gets concatenated to Z at the adversary input.
enum class AdversaryInput { Z, ZOneHotY, ZOneHotF };

const char* to_string(FairnessMode mode);
FairnessMode fairness_mode_from_string(const std::string& name);

/// Column roles for a tabular fairness dataset. Sensitive and outcome columns
/// must be binary; the listed label maps to 1 (privileged group / favored
/// outcome). Fair columns are categorical and jointly define the strata.
struct SchemaSpec {
  std::string sensitive_column;
  std::string sensitive_positive;
  std::vector<std::string> fair_columns;
  std::string outcome_column;
  std::string outcome_positive;
  std::vector<std::string> drop_columns;
  std::vector<std::string> columns;  // set for headerless files (UCI layout)
  std::string missing_token = "?";
};

/// Parse a key = value schema file ('#' starts a comment). Keys: sensitive,
/// sensitive_positive, fair, outcome, outcome_positive, drop, columns,
/// missing.
SchemaSpec load_schema(const std::string& path);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

/// Comma-separated with header row; cells trimmed; blank lines and lines
/// starting with '|' skipped (UCI files carry such preamble comments). When
/// `columns` is nonempty the file is read headerless under those names.
CsvTable read_csv(const std::string& path, const std::vector<std::string>& columns = {});

struct ColumnEncoding {
  std::string name;
  bool numeric = false;
  std::vector<std::string> vocab;  // categorical levels, sorted
  double mean = 0.0;
  double stdev = 1.0;
};

/// Feature layout frozen from a training table: one-hot vocabularies,
/// standardization statistics, and the fair-stratum vocabulary.
struct Encoding {
  std::vector<ColumnEncoding> features;      // fair columns first, then others
  std::vector<std::string> stratum_labels;   // joint fair-value label per f_id
  int x_dim = 0;
  int num_strata() const { return static_cast<int>(stratum_labels.size()); }
};

struct StratumTable {
  long n = 0;
  std::array<long, 2> count_s{0, 0};             // |D(S=s)|
  std::array<long, 2> count_y{0, 0};             // |D(Y=y)|
  std::vector<long> count_f;                     // |D(F=f)| by f_id
  std::vector<std::array<long, 2>> count_sf;     // |D(S=s, F=f)|
  std::vector<std::array<long, 2>> count_sy;     // |D(S=s, Y=y)| indexed [y][s]
};

StratumTable build_strata(const Eigen::VectorXi& s, const Eigen::VectorXi& y,
                          const Eigen::VectorXi& f_id, int num_strata);

struct FairDataset {
  Eigen::VectorXi s;      // {0,1}
  Eigen::VectorXi y;      // {0,1}
  Eigen::VectorXi f_id;   // stratum index; ids >= encoding strata are unseen-at-fit
  Eigen::MatrixXd x;      // [N x m_X], one-hot categoricals + standardized numerics
  StratumTable strata;
  std::vector<std::string> stratum_labels;  // label per f_id incl. unseen extras
  long dropped_rows = 0;
  std::vector<std::string> warnings;

  int n() const { return static_cast<int>(s.size()); }
  int x_dim() const { return static_cast<int>(x.cols()); }
  int num_strata() const { return static_cast<int>(stratum_labels.size()); }
};

Encoding fit_encoding(const CsvTable& table, const SchemaSpec& schema);

/// Encode with a frozen layout. Unseen categorical levels one-hot to all
/// zeros; unseen fair strata get fresh ids past the fitted range.
FairDataset encode_table(const CsvTable& table, const SchemaSpec& schema, const Encoding& enc);

/// Load one file, fitting the encoding on it.
FairDataset load_csv(const std::string& path, const SchemaSpec& schema);

/// Load a train/test pair with the encoding frozen from the training file.
std::pair<FairDataset, FairDataset> load_train_test(const std::string& train_path,
                                                    const std::string& test_path,
                                                    const SchemaSpec& schema);

/// Seeded partition into |fractions| parts (fractions sum to 1). Throws if a
/// part comes out empty. Parts past the first are checked for strata missing
/// from the first (training) part; offenders are flagged in warnings.
std::vector<FairDataset> split(const FairDataset& ds, const std::vector<double>& fractions,
                               std::uint64_t seed);

/// Per-sample adversary weights realizing the mode's weighted loss.
struct WeightScheme {
  FairnessMode mode = FairnessMode::Cf;
  Eigen::VectorXd w;  // nonnegative; finite
  AdversaryInput adversary_input = AdversaryInput::ZOneHotF;
  std::vector<std::string> warnings;
};

WeightScheme compute_weights(const FairDataset& train, FairnessMode mode);

/// Empirical C = E[I(S=1) P(S=0|V)] with V the mode's conditioning variable
/// (CF, LAFTR-CF: V=F; EO: V=Y; DP: V constant, giving P(S=1)P(S=0)).
double constant_c(const FairDataset& train, FairnessMode mode);

/// Constant paired with the mode's weight scale so that Q(h==1/2) = 0:
/// CF -> C, EO -> C over Y, DP -> 1 (the a-scaled C of the DP reduction),
/// LAFTR-CF -> |F|.
double q_constant_for_mode(const FairDataset& train, FairnessMode mode);

}  // namespace dcfr
