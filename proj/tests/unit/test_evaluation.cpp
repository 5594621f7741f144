#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

#include "edeen/error.hpp"
#include "edeen/evaluation.hpp"
#include "edeen/rng.hpp"
#include "oracles.hpp"

using namespace edeen;
using edeen::testing::four_counters;
using edeen::testing::pairwise_auroc;

namespace {

constexpr Label N = Label::Normal;
constexpr Label A = Label::Anomaly;

std::vector<std::size_t> flagged(const std::vector<Label>& labels) {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] == A) out.push_back(i);
  return out;
}

}  // namespace

TEST(TopQ, WorkedExamples) {
  EXPECT_EQ(flagged(threshold_top_q(std::vector<double>{0.1, 0.9, 0.5, 0.2}, 0.25)),
            std::vector<std::size_t>{1});
  EXPECT_EQ(flagged(threshold_top_q(std::vector<double>(4, 0.3), 0.5)),
            (std::vector<std::size_t>{0, 1}));
  EXPECT_EQ(flagged(threshold_top_q(std::vector<double>(10, 0.0), 0.2)).size(), 2u);
  EXPECT_EQ(flagged(threshold_top_q(std::vector<double>{1, 2, 3}, 0.01)).size(), 1u);
}

TEST(TopQ, Errors) {
  EXPECT_THROW(threshold_top_q(std::vector<double>{1.0}, 0.0), PreconditionError);
  EXPECT_THROW(threshold_top_q(std::vector<double>{1.0}, 1.0), PreconditionError);
  EXPECT_THROW(threshold_top_q(std::vector<double>{}, 0.5), PreconditionError);
}

TEST(TopQ, AlwaysFlagsCeilQn) {
  Rng rng(5);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> s(1 + rng.uniform_index(150));
    for (double& v : s) v = static_cast<double>(rng.uniform_index(4));
    const double q = rng.uniform(0.01, 0.99);
    const auto labels = threshold_top_q(s, q);
    const auto idx = flagged(labels);
    EXPECT_EQ(idx.size(), static_cast<std::size_t>(std::ceil(q * s.size() - 1e-9)));
    for (std::size_t i = 0; i < s.size(); ++i) {
      if (labels[i] != N) continue;
      for (std::size_t j : idx) {
        EXPECT_LE(s[i], s[j]);
        if (s[i] == s[j]) EXPECT_LT(j, i);
      }
    }
  }
}

TEST(Confusion, WorkedExamples) {
  const std::vector<Label> truth{A, A, A, A, A, N, N, N, N, N};
  const std::vector<Label> pred{A, A, A, N, N, A, N, N, N, N};
  const EvalReport r = confusion_metrics(pred, truth);
  EXPECT_EQ(r.tp, 3u);
  EXPECT_EQ(r.fp, 1u);
  EXPECT_EQ(r.fn, 2u);
  EXPECT_EQ(r.tn, 4u);
  EXPECT_DOUBLE_EQ(r.precision, 0.75);
  EXPECT_DOUBLE_EQ(r.recall, 0.6);
  EXPECT_NEAR(r.f1, 2.0 / 3.0, 1e-12);
  EXPECT_DOUBLE_EQ(r.accuracy, 0.7);

  const EvalReport perfect = confusion_metrics(truth, truth);
  EXPECT_EQ(perfect.precision, 1.0);
  EXPECT_EQ(perfect.recall, 1.0);
  EXPECT_EQ(perfect.f1, 1.0);
  EXPECT_EQ(perfect.accuracy, 1.0);

  const EvalReport quiet = confusion_metrics(std::vector<Label>(10, N), truth);
  EXPECT_EQ(quiet.precision, 0.0);
  EXPECT_EQ(quiet.recall, 0.0);
  EXPECT_EQ(quiet.f1, 0.0);
  EXPECT_THROW(confusion_metrics(std::vector<Label>(3, N), truth), ShapeError);
}

TEST(Confusion, MatchesFourCounterOracle) {
  Rng rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng.uniform_index(200);
    std::vector<Label> pred(n), truth(n);
    for (std::size_t i = 0; i < n; ++i) {
      pred[i] = rng.uniform() < 0.3 ? A : N;
      truth[i] = rng.uniform() < 0.3 ? A : N;
    }
    const auto c = four_counters(pred, truth);
    const EvalReport r = confusion_metrics(pred, truth);
    EXPECT_EQ(r.tp, c.tp);
    EXPECT_EQ(r.fp, c.fp);
    EXPECT_EQ(r.tn, c.tn);
    EXPECT_EQ(r.fn, c.fn);
    EXPECT_EQ(r.tp + r.fp + r.tn + r.fn, n);
    const double p = c.tp + c.fp ? static_cast<double>(c.tp) / (c.tp + c.fp) : 0.0;
    const double rc = c.tp + c.fn ? static_cast<double>(c.tp) / (c.tp + c.fn) : 0.0;
    EXPECT_EQ(r.precision, p);
    EXPECT_EQ(r.recall, rc);
    EXPECT_EQ(r.f1, p + rc > 0 ? 2 * p * rc / (p + rc) : 0.0);
    EXPECT_EQ(r.accuracy, static_cast<double>(c.tp + c.tn) / n);
  }
}

TEST(Auroc, WorkedExamples) {
  EXPECT_DOUBLE_EQ(auroc(std::vector<double>{0.1, 0.4, 0.35, 0.8}, std::vector<Label>{N, N, A, A}), 0.75);
  EXPECT_DOUBLE_EQ(auroc(std::vector<double>{0, 1, 2, 3}, std::vector<Label>{N, N, A, A}), 1.0);
  EXPECT_DOUBLE_EQ(auroc(std::vector<double>(4, 0.5), std::vector<Label>{N, A, N, A}), 0.5);
  EXPECT_THROW(auroc(std::vector<double>{1, 2}, std::vector<Label>{N, N}), UndefinedMetricError);
  EXPECT_THROW(auroc(std::vector<double>{1, 2}, std::vector<Label>{N}), ShapeError);
}

TEST(Auroc, MatchesPairwiseOracleWithTies) {
  Rng rng(23);
  for (int trial = 0; trial < 150; ++trial) {
    const std::size_t n = 2 + rng.uniform_index(199);
    std::vector<double> s(n);
    std::vector<Label> t(n);
    const bool tie_heavy = trial % 2 == 0;
    for (std::size_t i = 0; i < n; ++i) {
      s[i] = tie_heavy ? static_cast<double>(rng.uniform_index(3)) : rng.normal();
      t[i] = rng.uniform() < 0.4 ? A : N;
    }
    t[0] = A;
    t[1] = N;
    EXPECT_NEAR(auroc(s, t), pairwise_auroc(s, t), 1e-12);
    std::vector<double> neg = s, mono = s;
    for (double& v : neg) v = -v;
    for (double& v : mono) v = std::exp(v) * 3.0 + 1.0;
    EXPECT_NEAR(auroc(s, t) + auroc(neg, t), 1.0, 1e-12);
    EXPECT_NEAR(auroc(mono, t), auroc(s, t), 1e-12);
  }
}

TEST(Evaluate, SingleClassLeavesAurocEmpty) {
  const EvalReport r = evaluate(std::vector<double>{0.2, 0.3}, std::vector<Label>{N, N}, 0.5);
  EXPECT_FALSE(r.auroc.has_value());
  EXPECT_EQ(r.threshold_used, 0.5);
  EXPECT_EQ(r.fp, 1u);
}

TEST(Evaluate, JsonAndCsvRoundTrip) {
  const EvalReport r = evaluate(std::vector<double>{0.1, 0.9, 0.5, 0.2}, std::vector<Label>{N, A, A, N}, 0.25);
  EXPECT_EQ(*r.auroc, 1.0);
  const EvalReport back = report_from_json(report_to_json(r));
  EXPECT_EQ(back.precision, r.precision);
  EXPECT_EQ(back.recall, r.recall);
  EXPECT_EQ(back.auroc, r.auroc);
  EXPECT_EQ(back.tp, r.tp);
  EXPECT_EQ(back.threshold_used, 0.25);
  EvalReport undefined = r;
  undefined.auroc.reset();
  EXPECT_FALSE(report_from_json(report_to_json(undefined)).auroc.has_value());
  EXPECT_NE(report_to_json(undefined).find("null"), std::string::npos);
  const auto header = report_csv_header();
  const auto row = report_csv_row(r);
  EXPECT_EQ(std::count(header.begin(), header.end(), ','), std::count(row.begin(), row.end(), ','));
  EXPECT_THROW(report_from_json("[1,2"), FormatError);
}
