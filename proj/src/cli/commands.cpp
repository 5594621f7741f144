#include <algorithm>
#include <array>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <functional>
#include <memory>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"
#include "edeen/cli.hpp"
#include "edeen/error.hpp"
#include "edeen/evaluation.hpp"
#include "edeen/meta.hpp"
#include "edeen/model_io.hpp"
#include "json.hpp"

namespace edeen::cli {

namespace {

namespace fs = std::filesystem;

std::string fmt_double(double v, const char* spec = "%.17g") {
  char buf[64];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

// Collects flag overrides; applied on top of the config file after parsing.
class Overrides {
 public:
  template <typename T>
  CLI::Option* add(CLI::App* app, const std::string& name, const std::string& help,
                   std::function<void(RunConfig&, const T&)> apply) {
    auto value = std::make_shared<T>();
    CLI::Option* opt = app->add_option(name, *value, help);
    items_.push_back({opt, [value, apply](RunConfig& c) { apply(c, *value); }});
    return opt;
  }

  CLI::Option* add_flag(CLI::App* app, const std::string& name, const std::string& help,
                        std::function<void(RunConfig&)> apply) {
    CLI::Option* opt = app->add_flag(name, help);
    items_.push_back({opt, std::move(apply)});
    return opt;
  }

  void apply(RunConfig& c) const {
    for (const auto& [opt, fn] : items_)
      if (opt->count() > 0) fn(c);
  }

 private:
  std::vector<std::pair<CLI::Option*, std::function<void(RunConfig&)>>> items_;
};

struct Command {
  CLI::App* app = nullptr;
  Overrides overrides;
  std::string config_path;
  std::function<void(const RunConfig&, std::ostream&, std::ostream&)> run;
};

void add_common(Command& cmd) {
  cmd.app->add_option("-c,--config", cmd.config_path, "JSON run config");
  cmd.overrides.add<std::string>(cmd.app, "-o,--out", "Output directory",
                                 [](RunConfig& c, const std::string& v) { c.output_dir = v; });
  cmd.overrides.add<std::uint64_t>(cmd.app, "--seed", "Random seed",
                                   [](RunConfig& c, const std::uint64_t& v) { c.seed = v; });
  cmd.overrides.add<std::string>(cmd.app, "--schema", "Schema JSON for the input CSV",
                                 [](RunConfig& c, const std::string& v) { c.data.schema = v; });
  cmd.overrides.add<std::string>(cmd.app, "--label-column", "Label column name",
                                 [](RunConfig& c, const std::string& v) { c.data.label_column = v; });
}

void add_model_options(Command& cmd) {
  auto* app = cmd.app;
  auto& o = cmd.overrides;
  o.add<std::string>(app, "--encoder", "feedforward or lstm",
                     [](RunConfig& c, const std::string& v) { c.encoder = v; });
  o.add<std::size_t>(app, "--latent-dim", "Latent width (0: d/4)",
                     [](RunConfig& c, const std::size_t& v) { c.latent_dim = v; });
  o.add<std::vector<std::size_t>>(app, "--hidden", "Feed-forward hidden widths",
                                  [](RunConfig& c, const std::vector<std::size_t>& v) {
                                    c.hidden_sizes = v;
                                  })
      ->delimiter(',');
  o.add<std::size_t>(app, "--lstm-hidden", "LSTM hidden width",
                     [](RunConfig& c, const std::size_t& v) { c.lstm_hidden = v; });
  o.add<std::size_t>(app, "--seq-len", "LSTM sequence length",
                     [](RunConfig& c, const std::size_t& v) { c.seq_len = v; });
  o.add<std::size_t>(app, "--layers", "Stacked LSTM layers",
                     [](RunConfig& c, const std::size_t& v) { c.recurrent_layers = v; });
  o.add<double>(app, "--alpha", "Reconstruction loss weight",
                [](RunConfig& c, const double& v) { c.alpha = v; });
  o.add<double>(app, "--beta", "Encoding loss weight",
                [](RunConfig& c, const double& v) { c.beta = v; });
  o.add<std::size_t>(app, "-E,--epochs", "Training epochs",
                     [](RunConfig& c, const std::size_t& v) { c.epochs = v; });
  o.add<std::size_t>(app, "--iterations", "Iterations per epoch (0: I*ceil(N/B))",
                     [](RunConfig& c, const std::size_t& v) { c.iterations = v; });
  o.add<std::size_t>(app, "--batch-size", "Minibatch size",
                     [](RunConfig& c, const std::size_t& v) { c.batch_size = v; });
  o.add<std::string>(app, "--optimizer", "adam or sgd",
                     [](RunConfig& c, const std::string& v) { c.optimizer = v; });
  o.add<double>(app, "--lr", "Learning rate", [](RunConfig& c, const double& v) { c.lr = v; });
  o.add<double>(app, "--reweight-eps", "Re-weighting smoothing",
                [](RunConfig& c, const double& v) { c.reweight_eps = v; });
  o.add<std::string>(app, "--weighting", "sampling or loss",
                     [](RunConfig& c, const std::string& v) { c.weighting = v; });
  o.add_flag(app, "--pin-uniform", "Keep sample weights uniform",
             [](RunConfig& c) { c.pin_uniform_weights = true; });
  o.add<std::size_t>(app, "-I,--members", "Ensemble size",
                     [](RunConfig& c, const std::size_t& v) { c.members = v; });
}

void add_candidates(Command& cmd) {
  cmd.overrides
      .add<std::vector<std::size_t>>(cmd.app, "--candidates", "Candidate ensemble sizes",
                                     [](RunConfig& c, const std::vector<std::size_t>& v) {
                                       c.candidates = v;
                                     })
      ->delimiter(',');
}

fs::path require_path(const std::string& path, const std::string& what) {
  if (path.empty()) throw ConfigError("missing " + what);
  if (!fs::exists(path)) throw IoError(what + " not found: " + path);
  return path;
}

Dataset load_input(const std::string& path, const RunConfig& cfg, const std::string& what,
                   bool require_labels) {
  const fs::path csv = require_path(path, what);
  const Schema schema = resolve_schema(cfg.data.schema, csv, cfg.data.label_column);
  return load_csv(csv, schema, require_labels);
}

std::string trace_csv(const std::vector<EpochTrace>& trace) {
  std::string out = "epoch,mean_Lr,mean_Le,combined\n";
  for (const EpochTrace& t : trace)
    out += std::to_string(t.epoch) + "," + fmt_double(t.reconstruction) + "," +
           fmt_double(t.encoding) + "," + fmt_double(t.combined) + "\n";
  return out;
}

std::string scores_csv(const std::vector<double>& raw) {
  std::string out = "row_index,raw_score,normalized_score\n";
  if (raw.empty()) return out;
  const std::vector<double> norm = normalize_scores(raw);
  for (std::size_t i = 0; i < raw.size(); ++i)
    out += std::to_string(i) + "," + fmt_double(raw[i]) + "," + fmt_double(norm[i]) + "\n";
  return out;
}

std::vector<double> parse_scores_csv(const std::string& text, const std::string& origin) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line.rfind("row_index,raw_score", 0) != 0)
    throw FormatError(origin + ": expected a row_index,raw_score,normalized_score header");
  std::vector<double> raw;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::size_t index = 0;
    double value = 0.0;
    int consumed = 0;
    if (std::sscanf(line.c_str(), "%zu,%lf%n", &index, &value, &consumed) != 2 ||
        index != raw.size() || !std::isfinite(value))
      throw ParseError(line_no, origin + ": malformed score row");
    raw.push_back(value);
  }
  return raw;
}

struct TrainedRun {
  ModelFile file;
  std::vector<EpochTrace> trace;
};

// Fits the scaler on `train`, then trains an ensemble of `members` nets.
TrainedRun train_on(const Dataset& train, const RunConfig& cfg, std::size_t members,
                    std::uint64_t seed) {
  if (train.size() == 0) throw ConfigError("training set has no Normal rows");
  const ArchSpec spec = cfg.arch_for(train.dim());
  MinMaxScaler scaler;
  scaler.fit(train);
  TrainedRun run;
  run.file.model = init_ensemble(spec, members, seed);
  run.file.scaling = scaler.stats();
  run.trace =
      train_ensemble(run.file.model, scaler.transform(train.features()), cfg.train_config(seed));
  return run;
}

std::vector<double> score_with(const ModelFile& file, const Matrix& features) {
  const std::size_t expected = file.model.spec().input_dim;
  if (features.cols() != expected)
    throw ConfigError("dimension mismatch: model expects d=" + std::to_string(expected) +
                      ", data has d=" + std::to_string(features.cols()));
  if (features.rows() == 0) return {};
  const Matrix x =
      file.scaling ? MinMaxScaler(*file.scaling).transform(features) : features;
  return ensemble_score(file.model, x);
}

void echo_config(const RunConfig& cfg, const fs::path& dir) {
  write_text(dir / "config.json", cfg.to_json_text());
}

// ---- train ----------------------------------------------------------------

void cmd_train(const RunConfig& cfg, std::ostream& out, std::ostream&) {
  const Dataset data = load_input(cfg.data.train, cfg, "training data", false);
  const Dataset train = normal_rows(data);
  const TrainedRun run = train_on(train, cfg, cfg.members, cfg.seed);
  const fs::path dir = cfg.output_path();
  write_text(dir / "model.json", ensemble_to_json(run.file.model, run.file.scaling));
  write_text(dir / "trace.csv", trace_csv(run.trace));
  echo_config(cfg, dir);
  out << "trained " << cfg.members << " member(s) on " << train.size() << " rows, d="
      << train.dim() << ", " << run.trace.size() << " epoch(s)\n";
  if (!run.trace.empty())
    out << "combined loss " << fmt_double(run.trace.front().combined, "%.6g") << " -> "
        << fmt_double(run.trace.back().combined, "%.6g") << "\n";
  out << "wrote " << (dir / "model.json").string() << "\n";
}

// ---- score ----------------------------------------------------------------

struct ScoreArgs {
  std::string model;
};

void cmd_score(const RunConfig& cfg, const ScoreArgs& args, std::ostream& out) {
  const ModelFile file = load_model(require_path(args.model, "model file"));
  const Dataset data = load_input(cfg.data.test, cfg, "data to score", false);
  const std::vector<double> raw = score_with(file, data.features());
  const fs::path path = cfg.output_path() / "scores.csv";
  write_text(path, scores_csv(raw));
  out << "scored " << raw.size() << " rows, wrote " << path.string() << "\n";
}

// ---- eval -----------------------------------------------------------------

struct EvalArgs {
  std::string scores;
};

void cmd_eval(const RunConfig& cfg, const EvalArgs& args, std::ostream& out, std::ostream& err) {
  const fs::path score_path = require_path(args.scores, "score CSV");
  const std::vector<double> raw = parse_scores_csv(read_text(score_path), score_path.string());
  const Dataset labeled = load_input(cfg.data.test, cfg, "label data", true);
  if (labeled.size() != raw.size())
    throw ConfigError("score/label row mismatch: " + std::to_string(raw.size()) + " scores, " +
                      std::to_string(labeled.size()) + " labeled rows");
  const EvalReport report = evaluate(raw, *labeled.labels(), cfg.q);
  if (!report.auroc)
    err << "warning: labels hold a single class; auroc is undefined\n";
  const fs::path dir = cfg.output_path();
  write_text(dir / "report.json", report_to_json(report));
  write_text(dir / "report.csv", report_csv_header() + "\n" + report_csv_row(report) + "\n");
  out << report_to_json(report);
}

// ---- meta -----------------------------------------------------------------

fs::path meta_csv_path(const RunConfig& cfg) {
  return cfg.meta.csv.empty() ? cfg.output_path() / "meta.csv" : fs::path(cfg.meta.csv);
}

fs::path meta_model_path(const RunConfig& cfg) {
  return cfg.meta.model.empty() ? cfg.output_path() / "meta_model.json"
                                : fs::path(cfg.meta.model);
}

void require_candidates(const RunConfig& cfg) {
  if (cfg.candidates.empty()) throw ConfigError("candidate list is empty");
}

void cmd_meta_build(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  require_candidates(cfg);
  if (cfg.meta.tasks.empty()) throw ConfigError("meta build: no tasks configured");
  std::vector<MetaTask> tasks;
  for (const MetaTaskPath& t : cfg.meta.tasks) {
    RunConfig task_cfg = cfg;
    if (!t.schema.empty()) task_cfg.data.schema = t.schema;
    tasks.push_back({t.name, load_input(t.data, task_cfg, "meta task data", true)});
  }
  MetaBuildConfig build;
  build.arch = cfg.arch_for(tasks.front().data.dim());
  build.default_latent = cfg.latent_dim == 0;
  build.train = cfg.train_config(cfg.seed);
  build.train_fraction = cfg.train_fraction;
  build.seed = cfg.seed;
  const MetaBuildResult result = build_meta_dataset(tasks, cfg.candidates, build);
  for (const std::string& w : result.warnings) err << "warning: " << w << "\n";
  const fs::path path = meta_csv_path(cfg);
  write_text(path, meta_csv_text(result.records));
  echo_config(cfg, cfg.output_path());
  out << "wrote " << result.records.size() << " meta records to " << path.string() << "\n";
}

void cmd_meta_fit(const RunConfig& cfg, std::ostream& out) {
  const fs::path csv = require_path(meta_csv_path(cfg).string(), "meta CSV");
  const std::vector<MetaRecord> records = read_meta_csv(csv);
  if (records.empty()) throw ConfigError("meta fit: " + csv.string() + " has no records");
  const SvrModel model = SvrModel::fit(records);
  const fs::path path = meta_model_path(cfg);
  write_text(path, model.to_json_text());
  out << "fitted meta model on " << records.size() << " records (" << model.sweeps()
      << " sweeps), wrote " << path.string() << "\n";
}

Selection select_for(const RunConfig& cfg, const Dataset& task) {
  require_candidates(cfg);
  const fs::path path = require_path(meta_model_path(cfg).string(), "meta model");
  const SvrModel model = SvrModel::from_json_text(read_text(path));
  return select_hyperparams(model, task, cfg.candidates);
}

void cmd_meta_select(const RunConfig& cfg, std::ostream& out) {
  require_candidates(cfg);
  const Dataset task = load_input(cfg.data.train, cfg, "task data", false);
  const Selection s = select_for(cfg, task);
  nlohmann::ordered_json j;
  j["chosen"] = s.chosen;
  j["predictions"] = nlohmann::ordered_json::array();
  for (const auto& [members, predicted] : s.predictions) {
    out << "I=" << members << " predicted_auroc=" << fmt_double(predicted, "%.6f") << "\n";
    j["predictions"].push_back({{"I", members}, {"predicted_auroc", predicted}});
  }
  out << "chosen I=" << s.chosen << "\n";
  write_text(cfg.output_path() / "selection.json", j.dump(2) + "\n");
}

// ---- bench ----------------------------------------------------------------

const char* const kMetrics[] = {"precision", "recall", "f1", "accuracy", "auroc"};

std::array<double, 5> metric_values(const EvalReport& r) {
  return {r.precision, r.recall, r.f1, r.accuracy, *r.auroc};
}

void cmd_bench(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  if (cfg.seeds.empty()) throw ConfigError("bench: seed list is empty");
  if (cfg.methods.empty()) throw ConfigError("bench: method list is empty");
  const Dataset data = load_input(cfg.data.train, cfg, "benchmark data", true);
  const fs::path dir = cfg.output_path();

  std::size_t meta_members = 0;
  if (std::ranges::find(cfg.methods, "EDE_en_meta") != cfg.methods.end()) {
    meta_members = select_for(cfg, data).chosen;
    out << "meta selection: I=" << meta_members << "\n";
  }

  // values[method][metric][seed]
  std::vector<std::array<std::vector<double>, 5>> values(cfg.methods.size());
  for (std::uint64_t seed : cfg.seeds) {
    try {
      const Split split = split_normal_train(data, cfg.train_fraction, seed);
      for (std::size_t m = 0; m < cfg.methods.size(); ++m) {
        const std::string& method = cfg.methods[m];
        const std::size_t members =
            method == "EDE" ? 1 : method == "EDE_en" ? cfg.members : meta_members;
        const TrainedRun run = train_on(split.train, cfg, members, seed);
        const std::vector<double> scores = score_with(run.file, split.test.features());
        const EvalReport report = evaluate(scores, *split.test.labels(), cfg.q);
        if (!report.auroc) throw UndefinedMetricError("test split holds a single class");
        const fs::path run_dir = dir / ("seed_" + std::to_string(seed)) / method;
        write_text(run_dir / "model.json", ensemble_to_json(run.file.model, run.file.scaling));
        write_text(run_dir / "trace.csv", trace_csv(run.trace));
        write_text(run_dir / "scores.csv", scores_csv(scores));
        write_text(run_dir / "report.json", report_to_json(report));
        const auto v = metric_values(report);
        for (std::size_t k = 0; k < 5; ++k) values[m][k].push_back(v[k]);
        out << "seed " << seed << " " << method << " auroc "
            << fmt_double(*report.auroc, "%.4f") << "\n";
      }
    } catch (const std::exception&) {
      err << "bench: seed " << seed << " failed\n";
      throw;
    }
  }

  std::string table = "method,seeds";
  for (const char* metric : kMetrics) table += std::string(",") + metric + "," + metric + "_std";
  table += "\n";
  std::string plot = "method,metric,mean,stddev\n";
  for (std::size_t m = 0; m < cfg.methods.size(); ++m) {
    table += cfg.methods[m] + "," + std::to_string(cfg.seeds.size());
    for (std::size_t k = 0; k < 5; ++k) {
      const auto& xs = values[m][k];
      double mean = 0.0;
      for (double x : xs) mean += x;
      mean /= static_cast<double>(xs.size());
      std::string sd;
      if (xs.size() >= 2) {
        double ss = 0.0;
        for (double x : xs) ss += (x - mean) * (x - mean);
        sd = fmt_double(std::sqrt(ss / static_cast<double>(xs.size() - 1)));
      }
      table += "," + fmt_double(mean) + "," + sd;
      plot += cfg.methods[m] + "," + kMetrics[k] + "," + fmt_double(mean) + "," + sd + "\n";
    }
    table += "\n";
  }
  write_text(dir / "table.csv", table);
  write_text(dir / "plot.csv", plot);
  echo_config(cfg, dir);
  out << "wrote " << (dir / "table.csv").string() << "\n";
}

// ---- synth ----------------------------------------------------------------

struct SynthArgs {
  std::size_t dim = 10;
  std::size_t normals = 2000;
  std::size_t anomalies = 100;
  double shift = 4.0;
};

void cmd_synth(const RunConfig& cfg, const SynthArgs& args, std::ostream& out) {
  if (args.dim == 0) throw ConfigError("synth: dim must be >= 1");
  const Dataset data =
      generate_synthetic(args.dim, args.normals, args.anomalies, args.shift, cfg.seed);
  const fs::path dir = cfg.output_path();
  std::error_code ec;
  fs::create_directories(dir, ec);
  std::vector<std::string> names;
  for (const ColumnMeta& c : data.columns()) names.push_back(c.name);
  write_text(dir / "schema.json", Schema::numeric(names, cfg.data.label_column).to_json_text());
  write_csv(dir / "data.csv", data, cfg.data.label_column);
  if (args.normals > 0) {
    const Split split = split_normal_train(data, cfg.train_fraction, cfg.seed);
    write_csv(dir / "train.csv", split.train, cfg.data.label_column);
    write_csv(dir / "test.csv", split.test, cfg.data.label_column);
  }
  out << "wrote " << data.size() << " rows (d=" << args.dim << ") to " << dir.string() << "\n";
}

int exit_code_for(const std::exception& e) {
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const PreconditionError*>(&e) ||
      dynamic_cast<const ShapeError*>(&e) || dynamic_cast<const SchemaError*>(&e) ||
      dynamic_cast<const StateError*>(&e))
    return kExitConfig;
  if (dynamic_cast<const DivergenceError*>(&e) || dynamic_cast<const DegenerateWeightsError*>(&e) ||
      dynamic_cast<const FitError*>(&e) || dynamic_cast<const UndefinedMetricError*>(&e))
    return kExitNumeric;
  if (dynamic_cast<const IoError*>(&e) || dynamic_cast<const FormatError*>(&e)) return kExitIo;
  return 1;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"edeen: encoder-decoder-encoder ensembles for anomaly detection", "edeen"};
  app.require_subcommand(1);

  std::vector<std::unique_ptr<Command>> commands;
  auto make = [&](CLI::App* parent, const std::string& name, const std::string& help) {
    auto cmd = std::make_unique<Command>();
    cmd->app = parent->add_subcommand(name, help);
    add_common(*cmd);
    commands.push_back(std::move(cmd));
    return commands.back().get();
  };

  Command* train = make(&app, "train", "Train an ensemble on the Normal rows of a CSV");
  add_model_options(*train);
  train->overrides.add<std::string>(train->app, "-d,--data", "Training CSV",
                                    [](RunConfig& c, const std::string& v) { c.data.train = v; });
  train->run = cmd_train;

  ScoreArgs score_args;
  Command* score = make(&app, "score", "Score a CSV with a trained model");
  score->app->add_option("-m,--model", score_args.model, "Model file")->required();
  score->overrides.add<std::string>(score->app, "-d,--data", "CSV to score",
                                    [](RunConfig& c, const std::string& v) { c.data.test = v; });
  score->run = [&](const RunConfig& c, std::ostream& o, std::ostream&) {
    cmd_score(c, score_args, o);
  };

  EvalArgs eval_args;
  Command* eval = make(&app, "eval", "Evaluate a score CSV against labels");
  eval->app->add_option("-s,--scores", eval_args.scores, "Score CSV from 'score'")->required();
  eval->overrides.add<std::string>(eval->app, "-l,--labels", "Labeled CSV aligned with scores",
                                   [](RunConfig& c, const std::string& v) { c.data.test = v; });
  eval->overrides.add<double>(eval->app, "-q", "Top fraction flagged as anomalies",
                              [](RunConfig& c, const double& v) { c.q = v; });
  eval->run = [&](const RunConfig& c, std::ostream& o, std::ostream& e) {
    cmd_eval(c, eval_args, o, e);
  };

  CLI::App* meta = app.add_subcommand("meta", "Meta-learning of the ensemble size");
  meta->require_subcommand(1);
  Command* build = make(meta, "build", "Train every candidate on every task, write the meta CSV");
  add_model_options(*build);
  add_candidates(*build);
  build->overrides.add<std::vector<std::string>>(
      build->app, "--task", "Labeled task CSV (repeatable)",
      [](RunConfig& c, const std::vector<std::string>& v) {
        c.meta.tasks.clear();
        for (const std::string& p : v) c.meta.tasks.push_back({fs::path(p).stem().string(), p, ""});
      });
  build->overrides.add<std::string>(build->app, "--meta-csv", "Meta CSV path",
                                    [](RunConfig& c, const std::string& v) { c.meta.csv = v; });
  build->run = cmd_meta_build;

  Command* fit = make(meta, "fit", "Fit the SVR meta-learner on a meta CSV");
  fit->overrides.add<std::string>(fit->app, "--meta-csv", "Meta CSV path",
                                  [](RunConfig& c, const std::string& v) { c.meta.csv = v; });
  fit->overrides.add<std::string>(fit->app, "--meta-model", "Output meta model path",
                                  [](RunConfig& c, const std::string& v) { c.meta.model = v; });
  fit->run = [](const RunConfig& c, std::ostream& o, std::ostream&) { cmd_meta_fit(c, o); };

  Command* select = make(meta, "select", "Pick the ensemble size for a dataset");
  add_candidates(*select);
  select->overrides.add<std::string>(select->app, "-d,--data", "Task CSV",
                                     [](RunConfig& c, const std::string& v) { c.data.train = v; });
  select->overrides.add<std::string>(select->app, "--meta-model", "Meta model path",
                                     [](RunConfig& c, const std::string& v) { c.meta.model = v; });
  select->run = [](const RunConfig& c, std::ostream& o, std::ostream&) { cmd_meta_select(c, o); };

  Command* bench = make(&app, "bench", "Replicate train/score/eval over seeds and tabulate");
  add_model_options(*bench);
  add_candidates(*bench);
  bench->overrides.add<std::string>(bench->app, "-d,--data", "Labeled CSV",
                                    [](RunConfig& c, const std::string& v) { c.data.train = v; });
  bench->overrides
      .add<std::vector<std::uint64_t>>(bench->app, "--seeds", "Replication seeds",
                                       [](RunConfig& c, const std::vector<std::uint64_t>& v) {
                                         c.seeds = v;
                                       })
      ->delimiter(',');
  bench->overrides
      .add<std::vector<std::string>>(bench->app, "--methods", "EDE, EDE_en, EDE_en_meta",
                                     [](RunConfig& c, const std::vector<std::string>& v) {
                                       c.methods = v;
                                     })
      ->delimiter(',');
  bench->overrides.add<double>(bench->app, "-q", "Top fraction flagged as anomalies",
                               [](RunConfig& c, const double& v) { c.q = v; });
  bench->overrides.add<double>(bench->app, "--train-fraction", "Fraction sampled for training",
                               [](RunConfig& c, const double& v) { c.train_fraction = v; });
  bench->overrides.add<std::string>(bench->app, "--meta-model", "Meta model for EDE_en_meta",
                                    [](RunConfig& c, const std::string& v) { c.meta.model = v; });
  bench->run = cmd_bench;

  SynthArgs synth_args;
  Command* synth = make(&app, "synth", "Write a synthetic Gaussian dataset");
  synth->app->add_option("--dim", synth_args.dim, "Feature count");
  synth->app->add_option("--normals", synth_args.normals, "Normal rows");
  synth->app->add_option("--anomalies", synth_args.anomalies, "Anomalous rows");
  synth->app->add_option("--shift", synth_args.shift, "Anomaly mean offset per coordinate");
  synth->overrides.add<double>(synth->app, "--train-fraction", "Fraction sampled for train.csv",
                               [](RunConfig& c, const double& v) { c.train_fraction = v; });
  synth->run = [&](const RunConfig& c, std::ostream& o, std::ostream&) {
    cmd_synth(c, synth_args, o);
  };

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }

  for (const auto& cmd : commands) {
    if (!cmd->app->parsed()) continue;
    try {
      RunConfig cfg = cmd->config_path.empty() ? RunConfig{} : RunConfig::load(cmd->config_path);
      cmd->overrides.apply(cfg);
      cfg.validate();
      cmd->run(cfg, out, err);
      return kExitOk;
    } catch (const std::exception& e) {
      err << "edeen: error: " << e.what() << "\n";
      return exit_code_for(e);
    }
  }
  err << "edeen: no command given\n";
  return kExitConfig;
}

}  // namespace edeen::cli
