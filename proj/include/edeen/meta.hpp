#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "edeen/arch.hpp"
#include "edeen/dataset.hpp"
#include "edeen/ensemble.hpp"
#include "edeen/matrix.hpp"

namespace edeen {

/// 3 (mean - median) / sigma with the population sigma; 0 when sigma == 0.
/// Even-length medians average the two central order statistics.
double pearson_skewness(std::span<const double> column);

struct MetaFeatures {
  std::size_t n_instances = 0;
  std::size_t n_sparse = 0;    // columns with strictly more than half exact zeros
  std::size_t n_pos_skew = 0;  // skewness > 0
  std::size_t n_neg_skew = 0;  // skewness < 0

  friend bool operator==(const MetaFeatures&, const MetaFeatures&) = default;
};

MetaFeatures extract_meta_features(const Matrix& data);
MetaFeatures extract_meta_features(const Dataset& data);

/// One (dataset features, base-model count, AUROC) observation.
struct MetaRecord {
  MetaFeatures features;
  std::size_t base_models = 1;
  double performance = 0.0;
};

/// [n_instances, n_sparse, n_pos_skew, n_neg_skew, I].
std::vector<double> meta_input(const MetaFeatures& f, std::size_t base_models);

struct MetaTask {
  std::string name;
  Dataset data;  // raw (unscaled) labeled rows
};

struct MetaBuildConfig {
  ArchSpec arch;  // input_dim and latent_dim are filled per task
  bool default_latent = true;
  TrainConfig train;
  double train_fraction = 0.8;
  std::uint64_t seed = 0;
};

struct MetaBuildResult {
  std::vector<MetaRecord> records;
  std::vector<std::string> warnings;
};

/// For every task and candidate I: split, scale, train an I-member ensemble on
/// the Normal training rows, and record the test AUROC. Tasks whose test split
/// holds one class are skipped with a warning.
MetaBuildResult build_meta_dataset(const std::vector<MetaTask>& tasks,
                                   const std::vector<std::size_t>& candidates,
                                   const MetaBuildConfig& cfg);

void write_meta_csv(const std::filesystem::path& path, const std::vector<MetaRecord>& records);
std::vector<MetaRecord> read_meta_csv(const std::filesystem::path& path);
std::string meta_csv_text(const std::vector<MetaRecord>& records);
std::vector<MetaRecord> parse_meta_csv(const std::string& text);

struct SvrSettings {
  double gamma = 0.0;  // 0: 1 / (p * mean variance of the standardized inputs)
  double c = 1.0;
  double epsilon = 0.01;
  double tolerance = 1e-6;
  std::size_t max_sweeps = 100000;
};

/// Epsilon-insensitive RBF kernel regression on z-scored inputs, solved in the
/// dual by coordinate descent with box projection. The bias is folded into the
/// kernel (K + 1), so it equals the sum of the dual coefficients.
class SvrModel {
 public:
  SvrModel() = default;

  static SvrModel fit(const Matrix& inputs, std::span<const double> targets,
                      const SvrSettings& settings = {});
  static SvrModel fit(const std::vector<MetaRecord>& records, const SvrSettings& settings = {});

  bool fitted() const noexcept { return !coef_.empty(); }
  double predict(std::span<const double> input) const;
  double predict(const MetaFeatures& features, std::size_t base_models) const;

  const std::vector<double>& coefficients() const noexcept { return coef_; }
  double bias() const noexcept { return bias_; }
  double gamma() const noexcept { return gamma_; }
  double c() const noexcept { return c_; }
  double epsilon() const noexcept { return epsilon_; }
  std::size_t sweeps() const noexcept { return sweeps_; }

  std::string to_json_text() const;
  static SvrModel from_json_text(const std::string& text);
  void save(const std::filesystem::path& path) const;
  static SvrModel load(const std::filesystem::path& path);

 private:
  std::vector<double> mean_;
  std::vector<double> scale_;
  Matrix support_;  // standardized training inputs
  std::vector<double> coef_;
  double bias_ = 0.0;
  double gamma_ = 1.0;
  double c_ = 1.0;
  double epsilon_ = 0.01;
  std::size_t sweeps_ = 0;
};

struct Selection {
  std::size_t chosen = 0;
  std::vector<std::pair<std::size_t, double>> predictions;  // (I, predicted AUROC)
};

/// Predicts each candidate's performance on `task` and returns the argmax;
/// ties go to the smaller I.
Selection select_hyperparams(const SvrModel& model, const MetaFeatures& task,
                             std::span<const std::size_t> candidates);
Selection select_hyperparams(const SvrModel& model, const Dataset& task,
                             std::span<const std::size_t> candidates);

}  // namespace edeen
