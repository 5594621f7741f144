#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "edeen/dataset.hpp"

namespace edeen {

struct EvalReport {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double accuracy = 0.0;
  std::optional<double> auroc;  // empty when the truth has a single class
  double threshold_used = 0.0;  // q of the top-q rule
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t tn = 0;
  std::size_t fn = 0;
};

/// Flags the ceil(q * n) highest scores as anomalies. Among equal scores the
/// earlier index is flagged first.
std::vector<Label> threshold_top_q(std::span<const double> scores, double q);

/// Counts and ratio metrics; zero denominators give 0. auroc is left empty.
EvalReport confusion_metrics(std::span<const Label> predicted, std::span<const Label> truth);

/// Mann-Whitney AUROC with average ranks for ties. Anomaly is the positive
/// class. Throws UndefinedMetricError when one class is missing.
double auroc(std::span<const double> scores, std::span<const Label> truth);

/// Top-q metrics plus AUROC (left empty on single-class truth).
EvalReport evaluate(std::span<const double> scores, std::span<const Label> truth, double q);

std::string report_to_json(const EvalReport& report);
EvalReport report_from_json(const std::string& text);
std::string report_csv_header();
std::string report_csv_row(const EvalReport& report);

}  // namespace edeen
