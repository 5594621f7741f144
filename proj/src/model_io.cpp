#include "edeen/model_io.hpp"

#include <fstream>
#include <map>
#include <sstream>

#include "edeen/error.hpp"
#include "json.hpp"

namespace edeen {

using nlohmann::json;

namespace {

json arch_to_json(const ArchSpec& a) {
  return json{{"input_dim", a.input_dim},
              {"latent_dim", a.latent_dim},
              {"encoder", to_string(a.encoder_kind)},
              {"hidden_sizes", a.hidden_sizes},
              {"recurrent_layers", a.recurrent_layers},
              {"lstm_hidden", a.lstm_hidden},
              {"seq_len", a.seq_len},
              {"alpha", a.alpha},
              {"beta", a.beta}};
}

ArchSpec arch_from_json(const json& j) {
  ArchSpec a;
  a.input_dim = j.at("input_dim").get<std::size_t>();
  a.latent_dim = j.at("latent_dim").get<std::size_t>();
  a.encoder_kind = encoder_kind_from_string(j.at("encoder").get<std::string>());
  a.hidden_sizes = j.at("hidden_sizes").get<std::vector<std::size_t>>();
  a.recurrent_layers = j.at("recurrent_layers").get<std::size_t>();
  a.lstm_hidden = j.at("lstm_hidden").get<std::size_t>();
  a.seq_len = j.at("seq_len").get<std::size_t>();
  a.alpha = j.at("alpha").get<double>();
  a.beta = j.at("beta").get<double>();
  try {
    a.validate();
  } catch (const PreconditionError& e) {
    throw FormatError(std::string("model file: invalid architecture: ") + e.what());
  }
  return a;
}

json params_to_json(const EdeNet& net) {
  json p = json::object();
  for (const ConstNamedTensor& t : net.parameters())
    p[t.name] = std::vector<double>(t.values.begin(), t.values.end());
  return p;
}

EdeNet net_from_params(const ArchSpec& arch, std::uint64_t seed, const json& params) {
  EdeNet net = EdeNet::zeros(arch, seed);
  std::size_t used = 0;
  for (NamedTensor& t : net.mutable_parameters()) {
    if (!params.contains(t.name)) throw FormatError("model file: missing parameter " + t.name);
    const auto& arr = params.at(t.name);
    if (!arr.is_array() || arr.size() != t.values.size())
      throw FormatError("model file: parameter " + t.name + " has " + std::to_string(arr.size()) +
                        " values, expected " + std::to_string(t.values.size()));
    for (std::size_t i = 0; i < t.values.size(); ++i) t.values[i] = arr[i].get<double>();
    ++used;
  }
  if (used != params.size()) throw FormatError("model file: unexpected extra parameters");
  return net;
}

json parse_checked(const std::string& text, const char* kind) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw FormatError(std::string("model file is truncated or not JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("format") || j["format"] != "edeen-model")
    throw FormatError("model file: bad magic (format marker 'edeen-model' missing)");
  if (!j.contains("format_version") || j["format_version"] != kModelFormatVersion)
    throw FormatError("model file: unsupported format_version");
  if (j.value("kind", std::string()) != kind)
    throw FormatError(std::string("model file: expected kind '") + kind + "'");
  return j;
}

}  // namespace

std::string ensemble_to_json(const EnsembleModel& model, const std::optional<ScalingStats>& scaling) {
  json j;
  j["format"] = "edeen-model";
  j["format_version"] = kModelFormatVersion;
  j["kind"] = "ensemble";
  j["arch"] = arch_to_json(model.spec());
  j["seed"] = model.seed();
  json members = json::array();
  for (const EdeNet& m : model.members())
    members.push_back(json{{"seed", m.seed()}, {"params", params_to_json(m)}});
  j["members"] = std::move(members);
  if (scaling) j["scaling"] = json{{"min", scaling->min}, {"max", scaling->max}};
  return j.dump() + "\n";
}

ModelFile ensemble_from_json(const std::string& text) {
  const json j = parse_checked(text, "ensemble");
  try {
    const ArchSpec arch = arch_from_json(j.at("arch"));
    std::vector<EdeNet> nets;
    for (const json& m : j.at("members")) {
      nets.push_back(net_from_params(arch, m.at("seed").get<std::uint64_t>(), m.at("params")));
    }
    if (nets.empty()) throw FormatError("model file: ensemble has no members");
    ModelFile out{EnsembleModel(arch, j.at("seed").get<std::uint64_t>(), std::move(nets)), std::nullopt};
    if (j.contains("scaling")) {
      ScalingStats s{j["scaling"].at("min").get<std::vector<double>>(),
                     j["scaling"].at("max").get<std::vector<double>>()};
      if (s.min.size() != arch.input_dim || s.max.size() != arch.input_dim)
        throw FormatError("model file: scaling stats do not match input_dim");
      out.scaling = std::move(s);
    }
    return out;
  } catch (const json::exception& e) {
    throw FormatError(std::string("model file: ") + e.what());
  }
}

std::string net_to_json(const EdeNet& net) {
  json j;
  j["format"] = "edeen-model";
  j["format_version"] = kModelFormatVersion;
  j["kind"] = "ede";
  j["arch"] = arch_to_json(net.spec());
  j["seed"] = net.seed();
  j["params"] = params_to_json(net);
  return j.dump() + "\n";
}

EdeNet net_from_json(const std::string& text) {
  const json j = parse_checked(text, "ede");
  try {
    const ArchSpec arch = arch_from_json(j.at("arch"));
    return net_from_params(arch, j.at("seed").get<std::uint64_t>(), j.at("params"));
  } catch (const json::exception& e) {
    throw FormatError(std::string("model file: ") + e.what());
  }
}

void save_model(const std::filesystem::path& path, const EnsembleModel& model,
                const std::optional<ScalingStats>& scaling) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write model file " + path.string());
  out << ensemble_to_json(model, scaling);
  if (!out) throw IoError("failed writing model file " + path.string());
}

ModelFile load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open model file " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ensemble_from_json(ss.str());
}

}  // namespace edeen
