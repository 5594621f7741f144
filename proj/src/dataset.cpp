#include "edeen/dataset.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "edeen/error.hpp"
#include "edeen/rng.hpp"
#include "json.hpp"

namespace edeen {

using nlohmann::json;

// ---- Dataset ----------------------------------------------------------------

Dataset::Dataset(Matrix features, std::vector<ColumnMeta> columns,
                 std::optional<std::vector<Label>> labels, std::optional<ScalingStats> scaling)
    : features_(std::move(features)),
      columns_(std::move(columns)),
      labels_(std::move(labels)),
      scaling_(std::move(scaling)) {
  if (columns_.size() != features_.cols())
    throw ShapeError("dataset: " + std::to_string(columns_.size()) + " column names for " +
                     std::to_string(features_.cols()) + " features");
  if (labels_ && labels_->size() != features_.rows())
    throw ShapeError("dataset: label count does not match row count");
  if (scaling_ && (scaling_->min.size() != features_.cols() || scaling_->max.size() != features_.cols()))
    throw ShapeError("dataset: scaling stats do not match feature count");
}

Dataset Dataset::subset(const std::vector<std::size_t>& rows) const {
  std::optional<std::vector<Label>> labels;
  if (labels_) {
    labels.emplace();
    labels->reserve(rows.size());
    for (std::size_t r : rows) labels->push_back(labels_->at(r));
  }
  return Dataset(features_.gather_rows(rows), columns_, std::move(labels), scaling_);
}

std::size_t Dataset::count(Label label) const {
  if (!labels_) return 0;
  return static_cast<std::size_t>(std::ranges::count(*labels_, label));
}

std::string label_text(Label label) { return label == Label::Normal ? "normal" : "anomaly"; }

// ---- Schema -----------------------------------------------------------------

std::size_t Schema::feature_dim() const {
  std::size_t d = 0;
  for (const ColumnDecl& c : columns) d += c.kind == ColumnKind::Numeric ? 1 : c.vocabulary.size();
  return d;
}

Label Schema::label_of(const std::string& value) const {
  const bool normal = (value == normal_value) != invert_labels;
  return normal ? Label::Normal : Label::Anomaly;
}

Schema Schema::from_json_text(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw SchemaError(std::string("schema is not valid JSON: ") + e.what());
  }
  try {
    Schema s;
    std::set<std::string> seen;
    for (const json& c : j.at("columns")) {
      ColumnDecl decl;
      decl.name = c.at("name").get<std::string>();
      const std::string type = c.value("type", std::string("numeric"));
      if (type == "numeric") {
        decl.kind = ColumnKind::Numeric;
      } else if (type == "categorical") {
        decl.kind = ColumnKind::Categorical;
        decl.vocabulary = c.at("vocabulary").get<std::vector<std::string>>();
        if (decl.vocabulary.empty())
          throw SchemaError("categorical column '" + decl.name + "' has an empty vocabulary");
        if (std::set<std::string>(decl.vocabulary.begin(), decl.vocabulary.end()).size() !=
            decl.vocabulary.size())
          throw SchemaError("categorical column '" + decl.name + "' repeats a vocabulary value");
      } else {
        throw SchemaError("column '" + decl.name + "' has unknown type '" + type + "'");
      }
      if (!seen.insert(decl.name).second)
        throw SchemaError("column '" + decl.name + "' declared twice");
      s.columns.push_back(std::move(decl));
    }
    s.label_column = j.value("label_column", std::string("label"));
    s.normal_value = j.value("normal_value", std::string("normal"));
    s.invert_labels = j.value("invert_labels", false);
    s.has_header = j.value("has_header", true);
    if (seen.contains(s.label_column))
      throw SchemaError("label column '" + s.label_column + "' is also declared as a feature");
    return s;
  } catch (const json::exception& e) {
    throw SchemaError(std::string("malformed schema: ") + e.what());
  }
}

Schema Schema::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open schema file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

std::string Schema::to_json_text() const {
  json cols = json::array();
  for (const ColumnDecl& c : columns) {
    json jc{{"name", c.name}, {"type", c.kind == ColumnKind::Numeric ? "numeric" : "categorical"}};
    if (c.kind == ColumnKind::Categorical) jc["vocabulary"] = c.vocabulary;
    cols.push_back(std::move(jc));
  }
  json j{{"columns", cols},
         {"label_column", label_column},
         {"normal_value", normal_value},
         {"invert_labels", invert_labels},
         {"has_header", has_header}};
  return j.dump(2) + "\n";
}

void Schema::save(const std::filesystem::path& path) const {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write schema file " + path.string());
  out << to_json_text();
  if (!out) throw IoError("failed writing schema file " + path.string());
}

Schema Schema::numeric(const std::vector<std::string>& feature_names, std::string label_column,
                       std::string normal_value) {
  Schema s;
  for (const std::string& n : feature_names) s.columns.push_back({n, ColumnKind::Numeric, {}});
  s.label_column = std::move(label_column);
  s.normal_value = std::move(normal_value);
  return s;
}

// ---- Scaling ----------------------------------------------------------------

MinMaxScaler::MinMaxScaler(ScalingStats stats) : stats_(std::move(stats)) {
  if (stats_->min.size() != stats_->max.size()) throw ShapeError("scaler: min/max size mismatch");
}

void MinMaxScaler::fit(const Dataset& train) {
  const Matrix& x = train.features();
  if (x.rows() == 0) throw PreconditionError("scaler: cannot fit on an empty dataset");
  ScalingStats s;
  s.min.assign(x.cols(), 0.0);
  s.max.assign(x.cols(), 0.0);
  for (std::size_t c = 0; c < x.cols(); ++c) {
    double lo = x(0, c);
    double hi = x(0, c);
    for (std::size_t r = 1; r < x.rows(); ++r) {
      lo = std::min(lo, x(r, c));
      hi = std::max(hi, x(r, c));
    }
    s.min[c] = lo;
    s.max[c] = hi;
  }
  stats_ = std::move(s);
}

const ScalingStats& MinMaxScaler::stats() const {
  if (!stats_) throw StateError("scaler used before fit");
  return *stats_;
}

Matrix MinMaxScaler::transform(const Matrix& data) const {
  const ScalingStats& s = stats();
  if (data.cols() != s.min.size())
    throw ShapeError("scaler fitted on " + std::to_string(s.min.size()) + " columns, got " +
                     std::to_string(data.cols()));
  Matrix out(data.rows(), data.cols());
  for (std::size_t c = 0; c < data.cols(); ++c) {
    const double range = s.max[c] - s.min[c];
    for (std::size_t r = 0; r < data.rows(); ++r) {
      const double v = range > 0.0 ? (data(r, c) - s.min[c]) / range : 0.0;
      out(r, c) = std::clamp(v, -0.5, 1.5);
    }
  }
  return out;
}

Dataset MinMaxScaler::transform(const Dataset& data) const {
  return Dataset(transform(data.features()), data.columns(), data.labels(), stats());
}

ScalingStats fit_scale(const Dataset& train) {
  MinMaxScaler s;
  s.fit(train);
  return s.stats();
}

Dataset apply_scale(const Dataset& data, const ScalingStats& stats) {
  return MinMaxScaler(stats).transform(data);
}

// ---- Splits and synthetic data ---------------------------------------------

Split split_normal_train(const Dataset& data, double train_fraction, std::uint64_t seed) {
  if (!data.has_labels()) throw PreconditionError("split: dataset has no labels");
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw PreconditionError("split: train fraction must lie in (0, 1)");
  if (data.count(Label::Normal) == 0) throw PreconditionError("split: no Normal rows");

  const std::size_t n = data.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(seed);
  for (std::size_t i = n; i > 1; --i) std::swap(order[i - 1], order[rng.uniform_index(i)]);

  const auto take = static_cast<std::size_t>(std::llround(train_fraction * static_cast<double>(n)));
  std::vector<bool> in_train(n, false);
  const auto& labels = *data.labels();
  for (std::size_t k = 0; k < take; ++k)
    if (labels[order[k]] == Label::Normal) in_train[order[k]] = true;

  std::vector<std::size_t> train_rows;
  std::vector<std::size_t> test_rows;
  for (std::size_t r = 0; r < n; ++r) (in_train[r] ? train_rows : test_rows).push_back(r);
  if (train_rows.empty()) throw PreconditionError("split: sampled fraction holds no Normal rows");
  return {data.subset(train_rows), data.subset(test_rows)};
}

Dataset normal_rows(const Dataset& data) {
  if (!data.has_labels()) return data;
  std::vector<std::size_t> rows;
  for (std::size_t r = 0; r < data.size(); ++r)
    if ((*data.labels())[r] == Label::Normal) rows.push_back(r);
  return data.subset(rows);
}

Dataset generate_synthetic(std::size_t dim, std::size_t n_normal, std::size_t n_anomaly,
                           double anomaly_shift, std::uint64_t seed) {
  Rng rng(seed);
  Matrix x(n_normal + n_anomaly, dim);
  std::vector<Label> labels(n_normal + n_anomaly, Label::Normal);
  for (std::size_t r = 0; r < x.rows(); ++r) {
    const bool anomaly = r >= n_normal;
    if (anomaly) labels[r] = Label::Anomaly;
    for (std::size_t c = 0; c < dim; ++c) x(r, c) = rng.normal() + (anomaly ? anomaly_shift : 0.0);
  }
  std::vector<ColumnMeta> cols;
  for (std::size_t c = 0; c < dim; ++c) cols.push_back({"f" + std::to_string(c), ColumnOrigin::Numeric, {}, {}});
  return Dataset(std::move(x), std::move(cols), std::move(labels));
}

}  // namespace edeen
