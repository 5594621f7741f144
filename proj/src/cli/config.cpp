#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

#include "edeen/cli.hpp"
#include "edeen/error.hpp"
#include "json.hpp"

namespace edeen::cli {

using nlohmann::ordered_json;

namespace {

// Rejects keys outside `known` so typos fail loudly.
void check_keys(const ordered_json& obj, const std::set<std::string>& known,
                const std::string& where) {
  if (!obj.is_object()) throw ConfigError("config: '" + where + "' must be an object");
  for (const auto& item : obj.items())
    if (!known.contains(item.key()))
      throw ConfigError("config: unknown key '" + item.key() + "' in " + where);
}

template <typename T>
void read(const ordered_json& obj, const char* key, T& field) {
  if (!obj.contains(key)) return;
  try {
    field = obj.at(key).get<T>();
  } catch (const nlohmann::json::exception&) {
    throw ConfigError(std::string("config: wrong type for '") + key + "'");
  }
}

}  // namespace

void RunConfig::validate() const {
  if (encoder != "feedforward" && encoder != "lstm")
    throw ConfigError("config: encoder must be 'feedforward' or 'lstm', got '" + encoder + "'");
  if (optimizer != "adam" && optimizer != "sgd")
    throw ConfigError("config: optimizer must be 'adam' or 'sgd', got '" + optimizer + "'");
  if (weighting != "sampling" && weighting != "loss")
    throw ConfigError("config: weighting must be 'sampling' or 'loss', got '" + weighting + "'");
  if (members == 0) throw ConfigError("config: members must be >= 1");
  if (batch_size == 0) throw ConfigError("config: batch_size must be >= 1");
  if (!(lr > 0.0)) throw ConfigError("config: lr must be positive");
  if (!(reweight_eps > 0.0)) throw ConfigError("config: reweight_eps must be positive");
  if (!(q > 0.0 && q < 1.0)) throw ConfigError("config: q must lie in (0, 1)");
  if (!(train_fraction > 0.0 && train_fraction < 1.0))
    throw ConfigError("config: train_fraction must lie in (0, 1)");
  if (alpha < 0.0 || beta < 0.0 || alpha + beta <= 0.0)
    throw ConfigError("config: alpha and beta must be >= 0 and not both 0");
  if (encoder == "feedforward" && hidden_sizes.size() != 2)
    throw ConfigError("config: hidden_sizes needs exactly two widths");
  for (std::size_t h : hidden_sizes)
    if (h == 0) throw ConfigError("config: hidden_sizes entries must be >= 1");
  if (encoder == "lstm" && (lstm_hidden == 0 || seq_len == 0 || recurrent_layers == 0))
    throw ConfigError("config: lstm_hidden, seq_len and recurrent_layers must be >= 1");
  for (std::size_t c : candidates)
    if (c == 0) throw ConfigError("config: candidates must be >= 1");
  for (const std::string& m : methods)
    if (m != "EDE" && m != "EDE_en" && m != "EDE_en_meta")
      throw ConfigError("config: unknown method '" + m + "' (EDE, EDE_en, EDE_en_meta)");
}

std::filesystem::path RunConfig::output_path() const {
  if (!output_dir.empty()) return output_dir;
  if (const char* root = std::getenv("EDEEN_OUTPUT_ROOT"); root && *root) return root;
  return "runs";
}

ArchSpec RunConfig::arch_for(std::size_t input_dim) const {
  ArchSpec spec;
  spec.input_dim = input_dim;
  spec.latent_dim = latent_dim == 0 ? default_latent_dim(input_dim) : latent_dim;
  spec.encoder_kind = encoder_kind_from_string(encoder);
  spec.hidden_sizes = hidden_sizes;
  spec.lstm_hidden = lstm_hidden;
  spec.seq_len = seq_len;
  spec.recurrent_layers = recurrent_layers;
  spec.alpha = alpha;
  spec.beta = beta;
  try {
    spec.validate();
  } catch (const PreconditionError& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return spec;
}

TrainConfig RunConfig::train_config(std::uint64_t run_seed) const {
  TrainConfig cfg;
  cfg.epochs = epochs;
  cfg.iterations = iterations;
  cfg.batch_size = batch_size;
  cfg.optimizer.kind = optimizer == "sgd" ? OptimizerKind::Sgd : OptimizerKind::Adam;
  cfg.optimizer.lr = lr;
  cfg.reweight_eps = reweight_eps;
  cfg.weighting = weighting == "loss" ? WeightingMode::LossMultiplier : WeightingMode::Sampling;
  cfg.pin_uniform_weights = pin_uniform_weights;
  cfg.seed = run_seed;
  return cfg;
}

RunConfig RunConfig::from_json_text(const std::string& text) {
  ordered_json j;
  try {
    j = ordered_json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("config: not valid JSON (") + e.what() + ")");
  }
  check_keys(j,
             {"data", "arch", "train", "members", "candidates", "q", "seed", "seeds",
              "train_fraction", "methods", "meta", "output_dir"},
             "config");
  RunConfig c;
  if (j.contains("data")) {
    const auto& d = j["data"];
    check_keys(d, {"train", "test", "schema", "label_column"}, "data");
    read(d, "train", c.data.train);
    read(d, "test", c.data.test);
    read(d, "schema", c.data.schema);
    read(d, "label_column", c.data.label_column);
  }
  if (j.contains("arch")) {
    const auto& a = j["arch"];
    check_keys(a,
               {"encoder", "latent_dim", "hidden_sizes", "lstm_hidden", "seq_len",
                "recurrent_layers", "alpha", "beta"},
               "arch");
    read(a, "encoder", c.encoder);
    read(a, "latent_dim", c.latent_dim);
    read(a, "hidden_sizes", c.hidden_sizes);
    read(a, "lstm_hidden", c.lstm_hidden);
    read(a, "seq_len", c.seq_len);
    read(a, "recurrent_layers", c.recurrent_layers);
    read(a, "alpha", c.alpha);
    read(a, "beta", c.beta);
  }
  if (j.contains("train")) {
    const auto& t = j["train"];
    check_keys(t,
               {"epochs", "iterations", "batch_size", "optimizer", "lr", "reweight_eps",
                "weighting", "pin_uniform_weights"},
               "train");
    read(t, "epochs", c.epochs);
    read(t, "iterations", c.iterations);
    read(t, "batch_size", c.batch_size);
    read(t, "optimizer", c.optimizer);
    read(t, "lr", c.lr);
    read(t, "reweight_eps", c.reweight_eps);
    read(t, "weighting", c.weighting);
    read(t, "pin_uniform_weights", c.pin_uniform_weights);
  }
  if (j.contains("meta")) {
    const auto& m = j["meta"];
    check_keys(m, {"tasks", "csv", "model"}, "meta");
    read(m, "csv", c.meta.csv);
    read(m, "model", c.meta.model);
    if (m.contains("tasks")) {
      if (!m["tasks"].is_array()) throw ConfigError("config: meta.tasks must be an array");
      for (const auto& t : m["tasks"]) {
        check_keys(t, {"name", "data", "schema"}, "meta.tasks[]");
        MetaTaskPath task;
        read(t, "name", task.name);
        read(t, "data", task.data);
        read(t, "schema", task.schema);
        if (task.data.empty()) throw ConfigError("config: meta task without a data path");
        if (task.name.empty()) task.name = task.data;
        c.meta.tasks.push_back(std::move(task));
      }
    }
  }
  read(j, "members", c.members);
  read(j, "candidates", c.candidates);
  read(j, "q", c.q);
  read(j, "seed", c.seed);
  read(j, "seeds", c.seeds);
  read(j, "train_fraction", c.train_fraction);
  read(j, "methods", c.methods);
  read(j, "output_dir", c.output_dir);
  return c;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  return from_json_text(read_text(path));
}

std::string RunConfig::to_json_text() const {
  ordered_json j;
  j["data"] = {{"train", data.train},
               {"test", data.test},
               {"schema", data.schema},
               {"label_column", data.label_column}};
  j["arch"] = {{"encoder", encoder},
               {"latent_dim", latent_dim},
               {"hidden_sizes", hidden_sizes},
               {"lstm_hidden", lstm_hidden},
               {"seq_len", seq_len},
               {"recurrent_layers", recurrent_layers},
               {"alpha", alpha},
               {"beta", beta}};
  j["train"] = {{"epochs", epochs},
                {"iterations", iterations},
                {"batch_size", batch_size},
                {"optimizer", optimizer},
                {"lr", lr},
                {"reweight_eps", reweight_eps},
                {"weighting", weighting},
                {"pin_uniform_weights", pin_uniform_weights}};
  j["members"] = members;
  j["candidates"] = candidates;
  j["q"] = q;
  j["seed"] = seed;
  j["seeds"] = seeds;
  j["train_fraction"] = train_fraction;
  j["methods"] = methods;
  ordered_json tasks = ordered_json::array();
  for (const MetaTaskPath& t : meta.tasks)
    tasks.push_back({{"name", t.name}, {"data", t.data}, {"schema", t.schema}});
  j["meta"] = {{"tasks", tasks}, {"csv", meta.csv}, {"model", meta.model}};
  j["output_dir"] = output_dir;
  return j.dump(2) + "\n";
}

Schema resolve_schema(const std::string& schema_path, const std::filesystem::path& csv,
                      const std::string& label_column) {
  if (!schema_path.empty()) return Schema::load(schema_path);
  std::ifstream in(csv, std::ios::binary);
  if (!in) throw IoError("cannot open " + csv.string());
  std::string header;
  std::getline(in, header);
  if (!header.empty() && header.back() == '\r') header.pop_back();
  std::vector<std::string> names;
  std::stringstream fields(header);
  for (std::string name; std::getline(fields, name, ',');)
    if (name != label_column) names.push_back(name);
  if (names.empty()) throw SchemaError(csv.string() + ": header has no feature columns");
  return Schema::numeric(names, label_column);
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::error_code ec;
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path(), ec);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed for " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

}  // namespace edeen::cli
