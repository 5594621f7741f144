#include "edeen/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "edeen/error.hpp"
#include "json.hpp"

namespace edeen {

std::vector<Label> threshold_top_q(std::span<const double> scores, double q) {
  if (scores.empty()) throw PreconditionError("threshold_top_q: empty score vector");
  if (!(q > 0.0 && q < 1.0)) throw PreconditionError("threshold_top_q: q must lie in (0, 1)");
  const std::size_t n = scores.size();
  // The small slack keeps q * n from rounding up past an exact integer.
  auto flagged = static_cast<std::size_t>(std::ceil(q * static_cast<double>(n) - 1e-9));
  flagged = std::clamp<std::size_t>(flagged, 1, n);

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  std::vector<Label> out(n, Label::Normal);
  for (std::size_t k = 0; k < flagged; ++k) out[order[k]] = Label::Anomaly;
  return out;
}

EvalReport confusion_metrics(std::span<const Label> predicted, std::span<const Label> truth) {
  if (predicted.size() != truth.size())
    throw ShapeError("confusion_metrics: " + std::to_string(predicted.size()) + " predictions for " +
                     std::to_string(truth.size()) + " labels");
  EvalReport r;
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const bool p = predicted[i] == Label::Anomaly;
    const bool t = truth[i] == Label::Anomaly;
    if (p && t) ++r.tp;
    else if (p) ++r.fp;
    else if (t) ++r.fn;
    else ++r.tn;
  }
  const auto ratio = [](std::size_t num, std::size_t den) {
    return den == 0 ? 0.0 : static_cast<double>(num) / static_cast<double>(den);
  };
  r.precision = ratio(r.tp, r.tp + r.fp);
  r.recall = ratio(r.tp, r.tp + r.fn);
  r.f1 = r.precision + r.recall > 0.0 ? 2.0 * r.precision * r.recall / (r.precision + r.recall) : 0.0;
  r.accuracy = ratio(r.tp + r.tn, truth.size());
  return r;
}

double auroc(std::span<const double> scores, std::span<const Label> truth) {
  if (scores.size() != truth.size()) throw ShapeError("auroc: scores and labels differ in length");
  const std::size_t n = scores.size();
  const auto n_pos = static_cast<std::size_t>(std::ranges::count(truth, Label::Anomaly));
  const std::size_t n_neg = n - n_pos;
  if (n_pos == 0 || n_neg == 0) throw UndefinedMetricError("auroc: both classes must be present");

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

  // Rank sum of anomalies, tied blocks sharing their average 1-based rank.
  double rank_sum = 0.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i + 1;
    while (j < n && scores[order[j]] == scores[order[i]]) ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + 1 + j);
    for (std::size_t k = i; k < j; ++k)
      if (truth[order[k]] == Label::Anomaly) rank_sum += avg_rank;
    i = j;
  }
  const double p = static_cast<double>(n_pos);
  const double u = rank_sum - p * (p + 1.0) / 2.0;
  return u / (p * static_cast<double>(n_neg));
}

EvalReport evaluate(std::span<const double> scores, std::span<const Label> truth, double q) {
  EvalReport r = confusion_metrics(threshold_top_q(scores, q), truth);
  r.threshold_used = q;
  try {
    r.auroc = auroc(scores, truth);
  } catch (const UndefinedMetricError&) {
    r.auroc.reset();
  }
  return r;
}

std::string report_to_json(const EvalReport& r) {
  nlohmann::json j{{"precision", r.precision}, {"recall", r.recall},   {"f1", r.f1},
                   {"accuracy", r.accuracy},   {"threshold_used", r.threshold_used},
                   {"tp", r.tp},               {"fp", r.fp},           {"tn", r.tn},
                   {"fn", r.fn}};
  j["auroc"] = r.auroc ? nlohmann::json(*r.auroc) : nlohmann::json(nullptr);
  return j.dump(2) + "\n";
}

EvalReport report_from_json(const std::string& text) {
  try {
    const auto j = nlohmann::json::parse(text);
    EvalReport r;
    r.precision = j.at("precision").get<double>();
    r.recall = j.at("recall").get<double>();
    r.f1 = j.at("f1").get<double>();
    r.accuracy = j.at("accuracy").get<double>();
    r.threshold_used = j.at("threshold_used").get<double>();
    r.tp = j.at("tp").get<std::size_t>();
    r.fp = j.at("fp").get<std::size_t>();
    r.tn = j.at("tn").get<std::size_t>();
    r.fn = j.at("fn").get<std::size_t>();
    if (!j.at("auroc").is_null()) r.auroc = j.at("auroc").get<double>();
    return r;
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed report: ") + e.what());
  }
}

std::string report_csv_header() {
  return "precision,recall,f1,accuracy,auroc,threshold_used,tp,fp,tn,fn";
}

std::string report_csv_row(const EvalReport& r) {
  char buf[256];
  char auc[32] = "";
  if (r.auroc) std::snprintf(auc, sizeof auc, "%.17g", *r.auroc);
  std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%s,%.17g,%zu,%zu,%zu,%zu", r.precision,
                r.recall, r.f1, r.accuracy, auc, r.threshold_used, r.tp, r.fp, r.tn, r.fn);
  return buf;
}

}  // namespace edeen
