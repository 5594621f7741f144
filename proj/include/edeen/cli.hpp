#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "edeen/arch.hpp"
#include "edeen/dataset.hpp"
#include "edeen/ensemble.hpp"

namespace edeen::cli {

/// Process exit codes.
enum ExitCode : int {
  kExitOk = 0,
  kExitConfig = 2,
  kExitNumeric = 3,
  kExitIo = 4,
};

/// Invalid configuration or command-line usage (exit 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DataPaths {
  std::string train;   // training CSV (Normal rows are used)
  std::string test;    // CSV to score / labels for eval
  std::string schema;  // empty: every header column except label_column is numeric
  std::string label_column = "label";
};

struct MetaTaskPath {
  std::string name;
  std::string data;
  std::string schema;
};

struct MetaPaths {
  std::vector<MetaTaskPath> tasks;
  std::string csv;    // meta dataset
  std::string model;  // fitted SVR
};

/// Everything a command needs. Every field has a default, so `{}` is a valid
/// config file; flags override file values.
struct RunConfig {
  DataPaths data;
  std::string encoder = "feedforward";
  std::size_t latent_dim = 0;  // 0: max(1, d / 4)
  std::vector<std::size_t> hidden_sizes{64, 32};
  std::size_t lstm_hidden = 32;
  std::size_t seq_len = 1;
  std::size_t recurrent_layers = 1;
  double alpha = 1.0;
  double beta = 1.0;

  std::size_t epochs = 20;
  std::size_t iterations = 0;
  std::size_t batch_size = 128;
  std::string optimizer = "adam";
  double lr = 1e-3;
  double reweight_eps = 0.05;
  std::string weighting = "sampling";
  bool pin_uniform_weights = false;

  std::size_t members = 3;
  std::vector<std::size_t> candidates{1, 3, 5, 7, 10, 15};
  double q = 0.2;
  std::uint64_t seed = 0;
  std::vector<std::uint64_t> seeds{0};
  double train_fraction = 0.8;
  std::vector<std::string> methods{"EDE", "EDE_en"};
  MetaPaths meta;
  std::string output_dir;  // empty: $EDEEN_OUTPUT_ROOT, else "runs"

  void validate() const;
  std::filesystem::path output_path() const;

  ArchSpec arch_for(std::size_t input_dim) const;
  TrainConfig train_config(std::uint64_t seed) const;

  static RunConfig from_json_text(const std::string& text);
  static RunConfig load(const std::filesystem::path& path);
  std::string to_json_text() const;
};

/// Schema from `schema_path`, or an all-numeric schema built from the CSV header.
Schema resolve_schema(const std::string& schema_path, const std::filesystem::path& csv,
                      const std::string& label_column);

void write_text(const std::filesystem::path& path, const std::string& text);
std::string read_text(const std::filesystem::path& path);

/// Entry point shared by the executable and the tests. args excludes argv[0].
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace edeen::cli
