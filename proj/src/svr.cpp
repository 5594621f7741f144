#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "edeen/error.hpp"
#include "edeen/meta.hpp"
#include "json.hpp"

namespace edeen {
namespace {

double rbf(std::span<const double> a, std::span<const double> b, double gamma) {
  double d2 = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d2 += (a[i] - b[i]) * (a[i] - b[i]);
  return std::exp(-gamma * d2);
}

double soft_threshold(double v, double t) {
  if (v > t) return v - t;
  if (v < -t) return v + t;
  return 0.0;
}

}  // namespace

SvrModel SvrModel::fit(const Matrix& inputs, std::span<const double> targets,
                       const SvrSettings& settings) {
  const std::size_t m = inputs.rows();
  const std::size_t p = inputs.cols();
  if (m < 2) throw PreconditionError("svr_fit: need at least two records");
  if (targets.size() != m) throw ShapeError("svr_fit: target count differs from record count");
  if (!(settings.c > 0.0) || !(settings.epsilon >= 0.0) || !(settings.gamma >= 0.0))
    throw PreconditionError("svr_fit: C must be > 0, epsilon >= 0, gamma >= 0");

  SvrModel model;
  model.mean_.assign(p, 0.0);
  model.scale_.assign(p, 1.0);
  std::size_t varying = 0;
  for (std::size_t c = 0; c < p; ++c) {
    double mu = 0.0;
    for (std::size_t r = 0; r < m; ++r) mu += inputs(r, c);
    mu /= static_cast<double>(m);
    double var = 0.0;
    for (std::size_t r = 0; r < m; ++r) var += (inputs(r, c) - mu) * (inputs(r, c) - mu);
    var /= static_cast<double>(m);
    model.mean_[c] = mu;
    if (var > 0.0) {
      model.scale_[c] = std::sqrt(var);
      ++varying;
    }
  }
  if (varying == 0) throw FitError("svr_fit: all meta-inputs are identical");

  model.support_ = Matrix(m, p);
  for (std::size_t r = 0; r < m; ++r)
    for (std::size_t c = 0; c < p; ++c)
      model.support_(r, c) = (inputs(r, c) - model.mean_[c]) / model.scale_[c];

  // Standardized columns have variance 1 (varying) or 0 (constant).
  const double mean_variance = static_cast<double>(varying) / static_cast<double>(p);
  model.gamma_ = settings.gamma > 0.0 ? settings.gamma : 1.0 / (static_cast<double>(p) * mean_variance);
  model.c_ = settings.c;
  model.epsilon_ = settings.epsilon;

  Matrix q(m, m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i; j < m; ++j)
      q(i, j) = q(j, i) = rbf(model.support_.row(i), model.support_.row(j), model.gamma_) + 1.0;

  // Minimize 0.5 b'Qb - y'b + eps |b|_1 subject to -C <= b_j <= C.
  std::vector<double> beta(m, 0.0);
  std::vector<double> qbeta(m, 0.0);
  std::size_t sweep = 0;
  for (; sweep < settings.max_sweeps; ++sweep) {
    double max_step = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      const double grad = qbeta[j] - targets[j];
      const double qjj = q(j, j);
      double next = soft_threshold(beta[j] - grad / qjj, settings.epsilon / qjj);
      next = std::clamp(next, -settings.c, settings.c);
      const double delta = next - beta[j];
      if (delta != 0.0) {
        beta[j] = next;
        for (std::size_t i = 0; i < m; ++i) qbeta[i] += delta * q(i, j);
        max_step = std::max(max_step, std::abs(delta));
      }
    }
    if (max_step < settings.tolerance) {
      ++sweep;
      break;
    }
  }
  model.sweeps_ = sweep;
  model.coef_ = std::move(beta);
  model.bias_ = 0.0;
  for (double b : model.coef_) model.bias_ += b;
  return model;
}

SvrModel SvrModel::fit(const std::vector<MetaRecord>& records, const SvrSettings& settings) {
  if (records.empty()) throw PreconditionError("svr_fit: no records");
  Matrix inputs(records.size(), 5);
  std::vector<double> targets;
  for (std::size_t r = 0; r < records.size(); ++r) {
    const std::vector<double> x = meta_input(records[r].features, records[r].base_models);
    std::copy(x.begin(), x.end(), inputs.row(r).begin());
    targets.push_back(records[r].performance);
  }
  return fit(inputs, targets, settings);
}

double SvrModel::predict(std::span<const double> input) const {
  if (!fitted()) throw StateError("svr_predict: model is not fitted");
  if (input.size() != mean_.size())
    throw ShapeError("svr_predict: expected " + std::to_string(mean_.size()) + " inputs, got " +
                     std::to_string(input.size()));
  std::vector<double> z(input.size());
  for (std::size_t c = 0; c < z.size(); ++c) z[c] = (input[c] - mean_[c]) / scale_[c];
  double out = bias_;
  for (std::size_t j = 0; j < coef_.size(); ++j) out += coef_[j] * rbf(z, support_.row(j), gamma_);
  return out;
}

double SvrModel::predict(const MetaFeatures& features, std::size_t base_models) const {
  return predict(meta_input(features, base_models));
}

std::string SvrModel::to_json_text() const {
  if (!fitted()) throw StateError("svr: cannot serialize an unfitted model");
  nlohmann::json j;
  j["format"] = "edeen-svr";
  j["format_version"] = 1;
  j["kernel"] = "rbf";
  j["gamma"] = gamma_;
  j["C"] = c_;
  j["epsilon"] = epsilon_;
  j["bias"] = bias_;
  j["input_mean"] = mean_;
  j["input_scale"] = scale_;
  j["support_rows"] = support_.rows();
  j["support"] = support_.storage();
  j["coefficients"] = coef_;
  return j.dump() + "\n";
}

SvrModel SvrModel::from_json_text(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("svr model: not valid JSON (") + e.what() + ")");
  }
  if (!j.is_object() || j.value("format", std::string()) != "edeen-svr")
    throw FormatError("svr model: missing edeen-svr format marker");
  if (j.value("format_version", 0) != 1) throw FormatError("svr model: unsupported format_version");
  try {
    SvrModel m;
    m.gamma_ = j.at("gamma").get<double>();
    m.c_ = j.at("C").get<double>();
    m.epsilon_ = j.at("epsilon").get<double>();
    m.bias_ = j.at("bias").get<double>();
    m.mean_ = j.at("input_mean").get<std::vector<double>>();
    m.scale_ = j.at("input_scale").get<std::vector<double>>();
    m.coef_ = j.at("coefficients").get<std::vector<double>>();
    const auto rows = j.at("support_rows").get<std::size_t>();
    auto support = j.at("support").get<std::vector<double>>();
    if (m.scale_.size() != m.mean_.size() || rows != m.coef_.size() ||
        support.size() != rows * m.mean_.size() || rows == 0)
      throw FormatError("svr model: inconsistent array sizes");
    m.support_ = Matrix(rows, m.mean_.size(), std::move(support));
    return m;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("svr model: ") + e.what());
  }
}

void SvrModel::save(const std::filesystem::path& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << to_json_text();
  if (!out) throw IoError("failed writing " + path.string());
}

SvrModel SvrModel::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str());
}

}  // namespace edeen
