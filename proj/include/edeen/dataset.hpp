#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "edeen/matrix.hpp"

namespace edeen {

enum class Label : std::uint8_t { Normal, Anomaly };

enum class ColumnOrigin { Numeric, OneHot };

struct ColumnMeta {
  std::string name;
  ColumnOrigin origin = ColumnOrigin::Numeric;
  std::string source;  // categorical column a one-hot slot came from
  std::string value;   // vocabulary entry of that slot

  friend bool operator==(const ColumnMeta&, const ColumnMeta&) = default;
};

/// Per-column min/max fitted on training data.
struct ScalingStats {
  std::vector<double> min;
  std::vector<double> max;

  friend bool operator==(const ScalingStats&, const ScalingStats&) = default;
};

/// Immutable sample matrix with column metadata and optional labels.
class Dataset {
 public:
  Dataset() = default;
  Dataset(Matrix features, std::vector<ColumnMeta> columns,
          std::optional<std::vector<Label>> labels = std::nullopt,
          std::optional<ScalingStats> scaling = std::nullopt);

  const Matrix& features() const noexcept { return features_; }
  const std::vector<ColumnMeta>& columns() const noexcept { return columns_; }
  const std::optional<std::vector<Label>>& labels() const noexcept { return labels_; }
  const std::optional<ScalingStats>& scaling() const noexcept { return scaling_; }
  bool has_labels() const noexcept { return labels_.has_value(); }

  std::size_t size() const noexcept { return features_.rows(); }
  std::size_t dim() const noexcept { return features_.cols(); }

  Dataset subset(const std::vector<std::size_t>& rows) const;
  std::size_t count(Label label) const;

 private:
  Matrix features_;
  std::vector<ColumnMeta> columns_;
  std::optional<std::vector<Label>> labels_;
  std::optional<ScalingStats> scaling_;
};

enum class ColumnKind { Numeric, Categorical };

struct ColumnDecl {
  std::string name;
  ColumnKind kind = ColumnKind::Numeric;
  std::vector<std::string> vocabulary;  // categorical only; one-hot slot order
};

/// How CSV columns map onto features and labels.
///
/// JSON form:
///   {"columns": [{"name": "x", "type": "numeric"},
///                {"name": "proto", "type": "categorical", "vocabulary": ["tcp", "udp"]}],
///    "label_column": "label", "normal_value": "normal", "invert_labels": false,
///    "has_header": true}
///
/// A row is Normal when its label text equals normal_value; invert_labels
/// swaps the two classes. Without a header, CSV fields follow the declaration
/// order with the label column last.
struct Schema {
  std::vector<ColumnDecl> columns;
  std::string label_column = "label";
  std::string normal_value = "normal";
  bool invert_labels = false;
  bool has_header = true;

  /// Width of the expanded feature vector.
  std::size_t feature_dim() const;
  Label label_of(const std::string& value) const;

  static Schema from_json_text(const std::string& text);
  static Schema load(const std::filesystem::path& path);
  std::string to_json_text() const;
  void save(const std::filesystem::path& path) const;

  /// Every header column numeric except `label_column`.
  static Schema numeric(const std::vector<std::string>& feature_names,
                        std::string label_column = "label", std::string normal_value = "normal");
};

/// Parses a CSV file under `schema`. Labels are read when the label column is
/// present; `require_labels` turns its absence into a SchemaError.
Dataset load_csv(const std::filesystem::path& path, const Schema& schema,
                 bool require_labels = false);
Dataset parse_csv(const std::string& text, const Schema& schema, bool require_labels = false);

/// Writes features (17 significant digits) and, when present, a label column
/// holding "normal"/"anomaly". Readable back through Schema::numeric.
void write_csv(const std::filesystem::path& path, const Dataset& data,
               const std::string& label_column = "label");

/// Min-max scaler fitted on training rows. Transformed values are clipped to
/// [-0.5, 1.5]; rows inside the fitted range land in [0, 1].
class MinMaxScaler {
 public:
  MinMaxScaler() = default;
  explicit MinMaxScaler(ScalingStats stats);

  void fit(const Dataset& train);
  bool fitted() const noexcept { return stats_.has_value(); }
  const ScalingStats& stats() const;
  Dataset transform(const Dataset& data) const;
  Matrix transform(const Matrix& data) const;

 private:
  std::optional<ScalingStats> stats_;
};

ScalingStats fit_scale(const Dataset& train);
Dataset apply_scale(const Dataset& data, const ScalingStats& stats);

struct Split {
  Dataset train;  // Normal rows of the sampled fraction
  Dataset test;   // everything else, both classes
};

/// Samples round(fraction * N) rows; their Normal rows become the training
/// set and all remaining rows (including sampled anomalies) the test set.
/// Row order is preserved within each side.
Split split_normal_train(const Dataset& data, double train_fraction, std::uint64_t seed);

/// Rows labeled Normal (all rows when unlabeled).
Dataset normal_rows(const Dataset& data);

/// n_normal rows from N(0, I_d) followed by n_anomaly rows from N(shift * 1, I_d).
Dataset generate_synthetic(std::size_t dim, std::size_t n_normal, std::size_t n_anomaly,
                           double anomaly_shift, std::uint64_t seed);

std::string label_text(Label label);

}  // namespace edeen
