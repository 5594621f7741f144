#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "edeen/error.hpp"
#include "edeen/evaluation.hpp"
#include "edeen/meta.hpp"
#include "edeen/rng.hpp"

namespace edeen {

std::vector<double> meta_input(const MetaFeatures& f, std::size_t base_models) {
  return {static_cast<double>(f.n_instances), static_cast<double>(f.n_sparse),
          static_cast<double>(f.n_pos_skew), static_cast<double>(f.n_neg_skew),
          static_cast<double>(base_models)};
}

MetaBuildResult build_meta_dataset(const std::vector<MetaTask>& tasks,
                                   const std::vector<std::size_t>& candidates,
                                   const MetaBuildConfig& cfg) {
  if (candidates.empty()) throw PreconditionError("meta build: empty candidate list");
  MetaBuildResult result;
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    const MetaTask& task = tasks[t];
    if (!task.data.has_labels())
      throw PreconditionError("meta build: task '" + task.name + "' has no labels");
    const MetaFeatures features = extract_meta_features(task.data);
    const Split split = split_normal_train(task.data, cfg.train_fraction, mix_seed(cfg.seed, t));
    if (split.test.count(Label::Normal) == 0 || split.test.count(Label::Anomaly) == 0) {
      result.warnings.push_back("task '" + task.name +
                                "': test split has a single class, AUROC undefined; skipped");
      continue;
    }
    MinMaxScaler scaler;
    scaler.fit(split.train);
    const Matrix train = scaler.transform(split.train.features());
    const Matrix test = scaler.transform(split.test.features());

    ArchSpec arch = cfg.arch;
    arch.input_dim = task.data.dim();
    if (cfg.default_latent || arch.latent_dim == 0 || arch.latent_dim > arch.input_dim)
      arch.latent_dim = default_latent_dim(arch.input_dim);
    if (arch.encoder_kind == EncoderKind::Lstm) arch.seq_len = std::min(arch.seq_len, arch.input_dim);

    for (std::size_t members : candidates) {
      EnsembleModel model = init_ensemble(arch, members, mix_seed(cfg.seed, 1000 + members));
      TrainConfig tc = cfg.train;
      tc.seed = mix_seed(cfg.train.seed, t * 1000 + members);
      train_ensemble(model, train, tc);
      const std::vector<double> scores = ensemble_score(model, test);
      MetaRecord rec;
      rec.features = features;
      rec.base_models = members;
      rec.performance = auroc(scores, *split.test.labels());
      result.records.push_back(rec);
    }
  }
  return result;
}

std::string meta_csv_text(const std::vector<MetaRecord>& records) {
  std::string out = "n_instances,n_sparse,n_pos_skew,n_neg_skew,I,auroc\n";
  char buf[160];
  for (const MetaRecord& r : records) {
    std::snprintf(buf, sizeof buf, "%zu,%zu,%zu,%zu,%zu,%.17g\n", r.features.n_instances,
                  r.features.n_sparse, r.features.n_pos_skew, r.features.n_neg_skew,
                  r.base_models, r.performance);
    out += buf;
  }
  return out;
}

std::vector<MetaRecord> parse_meta_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  std::vector<MetaRecord> records;
  bool header = false;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!header) {
      if (line != "n_instances,n_sparse,n_pos_skew,n_neg_skew,I,auroc")
        throw ParseError(line_no, "unexpected meta-dataset header");
      header = true;
      continue;
    }
    std::vector<std::string> fields;
    std::stringstream ls(line);
    std::string f;
    while (std::getline(ls, f, ',')) fields.push_back(f);
    if (fields.size() != 6) throw ParseError(line_no, "expected 6 fields");
    const auto count = [&](const std::string& s) {
      std::size_t v = 0;
      const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (ec != std::errc() || p != s.data() + s.size())
        throw ParseError(line_no, "'" + s + "' is not a count");
      return v;
    };
    MetaRecord r;
    r.features = {count(fields[0]), count(fields[1]), count(fields[2]), count(fields[3])};
    r.base_models = count(fields[4]);
    const std::string& a = fields[5];
    const auto [p, ec] = std::from_chars(a.data(), a.data() + a.size(), r.performance);
    if (ec != std::errc() || p != a.data() + a.size() || !(r.performance >= 0.0 && r.performance <= 1.0))
      throw ParseError(line_no, "auroc '" + a + "' is not a number in [0, 1]");
    records.push_back(r);
  }
  if (!header) throw ParseError(1, "missing meta-dataset header");
  return records;
}

void write_meta_csv(const std::filesystem::path& path, const std::vector<MetaRecord>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << meta_csv_text(records);
  if (!out) throw IoError("failed writing " + path.string());
}

std::vector<MetaRecord> read_meta_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_meta_csv(ss.str());
}

Selection select_hyperparams(const SvrModel& model, const MetaFeatures& task,
                             std::span<const std::size_t> candidates) {
  if (candidates.empty()) throw PreconditionError("select: empty candidate list");
  Selection s;
  double best = 0.0;
  for (std::size_t members : candidates) {
    const double predicted = model.predict(task, members);
    s.predictions.emplace_back(members, predicted);
    const bool better = s.predictions.size() == 1 || predicted > best ||
                        (predicted == best && members < s.chosen);
    if (better) {
      best = predicted;
      s.chosen = members;
    }
  }
  return s;
}

Selection select_hyperparams(const SvrModel& model, const Dataset& task,
                             std::span<const std::size_t> candidates) {
  if (candidates.empty()) throw PreconditionError("select: empty candidate list");
  return select_hyperparams(model, extract_meta_features(task), candidates);
}

}  // namespace edeen
