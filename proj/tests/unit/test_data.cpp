#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <set>

#include "edeen/dataset.hpp"
#include "edeen/error.hpp"
#include "edeen/rng.hpp"

using namespace edeen;

namespace {

Schema categorical_schema() {
  Schema s;
  s.columns = {{"x", ColumnKind::Numeric, {}}, {"c", ColumnKind::Categorical, {"a", "b", "c"}}};
  return s;
}

std::filesystem::path temp_path(const std::string& name) {
  return std::filesystem::temp_directory_path() / ("edeen_test_" + name);
}

}  // namespace

TEST(ParseCsv, NumericColumn) {
  const Dataset d = parse_csv("x\n1\n2\n3\n", Schema::numeric({"x"}));
  EXPECT_EQ(d.size(), 3u);
  EXPECT_EQ(d.dim(), 1u);
  EXPECT_EQ(d.features()(2, 0), 3.0);
  EXPECT_FALSE(d.has_labels());
}

TEST(ParseCsv, OneHotBlockFollowsVocabulary) {
  const Dataset d = parse_csv("x,c,label\n1.5,b,normal\n2,c,attack\n0,z,normal\n",
                              categorical_schema());
  ASSERT_EQ(d.dim(), 4u);
  EXPECT_EQ(d.features(), (Matrix{{1.5, 0, 1, 0}, {2, 0, 0, 1}, {0, 0, 0, 0}}));
  EXPECT_EQ(*d.labels(), (std::vector<Label>{Label::Normal, Label::Anomaly, Label::Normal}));
  EXPECT_EQ(d.columns()[2].source, "c");
  EXPECT_EQ(d.columns()[2].value, "b");
  EXPECT_EQ(d.columns()[2].origin, ColumnOrigin::OneHot);
}

TEST(ParseCsv, OneHotRowsHaveAtMostOneOne) {
  const Dataset d = parse_csv("x,c\n0,a\n0,b\n0,c\n0,q\n", categorical_schema());
  for (std::size_t r = 0; r < d.size(); ++r) {
    double total = 0.0;
    for (std::size_t k = 1; k < 4; ++k) total += d.features()(r, k);
    EXPECT_EQ(total, r < 3 ? 1.0 : 0.0);
  }
}

TEST(ParseCsv, HeaderColumnOrderIsFree) {
  const Dataset d = parse_csv("label,c,x\nnormal,a,4\n", categorical_schema());
  EXPECT_EQ(d.features(), (Matrix{{4, 1, 0, 0}}));
}

TEST(ParseCsv, ErrorsCarryLineNumbers) {
  try {
    parse_csv("x\n1\nabc\n", Schema::numeric({"x"}));
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  try {
    parse_csv("x,label\n1,normal\n2\n", Schema::numeric({"x"}));
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
  EXPECT_THROW(parse_csv("x\ninf\n", Schema::numeric({"x"})), ParseError);
}

TEST(ParseCsv, SchemaCoverage) {
  EXPECT_THROW(parse_csv("x,y\n1,2\n", Schema::numeric({"x"})), SchemaError);
  EXPECT_THROW(parse_csv("y\n1\n", Schema::numeric({"x"})), SchemaError);
  EXPECT_THROW(parse_csv("x\n1\n", Schema::numeric({"x"}), true), SchemaError);
}

TEST(ParseCsv, HeaderOnlyGivesEmptyDataset) {
  const Dataset d = parse_csv("x,label\n", Schema::numeric({"x"}));
  EXPECT_EQ(d.size(), 0u);
  EXPECT_EQ(d.dim(), 1u);
}

TEST(ParseCsv, HeaderlessWithInvertedLabels) {
  Schema s = categorical_schema();
  s.has_header = false;
  s.normal_value = "normal.";
  s.invert_labels = true;
  const Dataset d = parse_csv("1,a,normal.\n2,b,smurf.\n", s);
  EXPECT_EQ(*d.labels(), (std::vector<Label>{Label::Anomaly, Label::Normal}));
  EXPECT_EQ(parse_csv("1,a\n", s).size(), 1u);
}

TEST(Schema, JsonRoundTrip) {
  Schema s = categorical_schema();
  s.invert_labels = true;
  s.normal_value = "ok";
  const Schema back = Schema::from_json_text(s.to_json_text());
  EXPECT_EQ(back.feature_dim(), 4u);
  EXPECT_EQ(back.normal_value, "ok");
  EXPECT_TRUE(back.invert_labels);
  EXPECT_EQ(back.columns[1].vocabulary, (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_THROW(Schema::from_json_text("{\"columns\": 3}"), SchemaError);
  EXPECT_THROW(Schema::from_json_text("{not json"), SchemaError);
}

TEST(Schema, Kdd99ExpandsTo121) {
  const Schema s = Schema::load(std::filesystem::path(EDEEN_SOURCE_DIR) / "schemas/kdd99.json");
  EXPECT_EQ(s.columns.size(), 41u);
  EXPECT_EQ(s.feature_dim(), 121u);
  const std::string line =
      "0,tcp,http,SF,181,5450,0,0,0,0,0,1,0,0,0,0,0,0,0,0,0,0,8,8,0.00,0.00,0.00,0.00,1.00,"
      "0.00,0.00,9,9,1.00,0.00,0.11,0.00,0.00,0.00,0.00,0.00,normal.\n";
  const Dataset d = parse_csv(line, s, true);
  EXPECT_EQ(d.dim(), 121u);
  // Normal traffic is the minority class after inversion.
  EXPECT_EQ((*d.labels())[0], Label::Anomaly);
  double ones = 0.0;
  for (std::size_t k = 0; k < d.dim(); ++k)
    if (d.columns()[k].origin == ColumnOrigin::OneHot) ones += d.features()(0, k);
  EXPECT_EQ(ones, 7.0);
}

TEST(WriteCsv, RoundTripIsExact) {
  Dataset d = generate_synthetic(4, 20, 5, 3.0, 9);
  const auto path = temp_path("roundtrip.csv");
  write_csv(path, d);
  const Dataset back = load_csv(path, Schema::numeric({"f0", "f1", "f2", "f3"}), true);
  EXPECT_EQ(back.features(), d.features());
  EXPECT_EQ(*back.labels(), *d.labels());
  std::filesystem::remove(path);
  EXPECT_THROW(load_csv(temp_path("missing.csv"), Schema::numeric({"x"})), IoError);
}

TEST(Scaling, WorkedExamples) {
  const Dataset train(Matrix{{0, 7}, {5, 7}, {10, 7}}, {{"a"}, {"b"}});
  MinMaxScaler scaler;
  EXPECT_THROW(scaler.transform(train), StateError);
  scaler.fit(train);
  EXPECT_EQ(scaler.transform(train.features()), (Matrix{{0, 0}, {0.5, 0}, {1, 0}}));
  EXPECT_EQ(scaler.transform(Matrix{{20, 8}, {-20, 6}}), (Matrix{{1.5, 0}, {-0.5, 0}}));
  EXPECT_EQ(scaler.transform(Matrix{{12, 7}}), (Matrix{{1.2, 0}}));
  const Dataset scaled = apply_scale(train, fit_scale(train));
  EXPECT_EQ(scaled.scaling()->max, (std::vector<double>{10, 7}));
}

TEST(Scaling, TrainingDataLandsInUnitInterval) {
  const Dataset d = generate_synthetic(5, 100, 0, 0.0, 3);
  const Dataset scaled = apply_scale(d, fit_scale(d));
  for (double v : scaled.features().storage()) {
    EXPECT_GE(v, 0.0);
    EXPECT_LE(v, 1.0);
  }
  EXPECT_THROW(apply_scale(d, ScalingStats{{0}, {1}}), ShapeError);
}

TEST(Split, AllNormalSizes) {
  const Dataset d = generate_synthetic(2, 50, 0, 0.0, 1);
  const Split s = split_normal_train(d, 0.8, 4);
  EXPECT_EQ(s.train.size(), 40u);
  EXPECT_EQ(s.test.size(), 10u);
}

TEST(Split, DeterministicDisjointAndCovering) {
  const Dataset d = generate_synthetic(3, 60, 20, 2.0, 2);
  const Split a = split_normal_train(d, 0.7, 11);
  const Split b = split_normal_train(d, 0.7, 11);
  EXPECT_EQ(a.train.features(), b.train.features());
  EXPECT_EQ(a.test.features(), b.test.features());
  EXPECT_EQ(a.train.count(Label::Anomaly), 0u);
  EXPECT_EQ(a.train.size() + a.test.size(), d.size());
  std::set<std::vector<double>> seen;
  for (const Dataset* part : {&a.train, &a.test})
    for (std::size_t r = 0; r < part->size(); ++r) {
      const auto row = part->features().row(r);
      seen.insert({row.begin(), row.end()});
    }
  EXPECT_EQ(seen.size(), d.size());
  const Split c = split_normal_train(d, 0.7, 12);
  EXPECT_NE(a.train.features(), c.train.features());
}

TEST(Split, Preconditions) {
  const Dataset d = generate_synthetic(2, 10, 0, 0.0, 1);
  EXPECT_THROW(split_normal_train(d, 0.0, 1), PreconditionError);
  EXPECT_THROW(split_normal_train(d, 1.0, 1), PreconditionError);
  const Dataset anomalies = generate_synthetic(2, 0, 10, 1.0, 1);
  EXPECT_THROW(split_normal_train(anomalies, 0.5, 1), PreconditionError);
  const Dataset unlabeled(Matrix(4, 2), {{"a"}, {"b"}});
  EXPECT_THROW(split_normal_train(unlabeled, 0.5, 1), PreconditionError);
}

TEST(Synthetic, LabelsAndMeans) {
  const Dataset none = generate_synthetic(3, 5, 0, 4.0, 1);
  EXPECT_EQ(none.count(Label::Anomaly), 0u);
  const std::size_t n = 400;
  const Dataset d = generate_synthetic(10, 100, n, 4.0, 8);
  EXPECT_EQ(d.count(Label::Anomaly), n);
  for (std::size_t k = 0; k < 10; ++k) {
    double mean = 0.0;
    for (std::size_t r = 100; r < 100 + n; ++r) mean += d.features()(r, k);
    mean /= static_cast<double>(n);
    EXPECT_NEAR(mean, 4.0, 3.0 / std::sqrt(static_cast<double>(n)));
  }
  EXPECT_EQ(generate_synthetic(3, 5, 2, 1.0, 7).features(),
            generate_synthetic(3, 5, 2, 1.0, 7).features());
}
