#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>

#include "edeen/error.hpp"
#include "edeen/model_io.hpp"
#include "edeen/rng.hpp"
#include "oracles.hpp"

#include "json.hpp"

using namespace edeen;
using edeen::testing::random_matrix;

namespace {

EnsembleModel trained(const ArchSpec& spec, std::size_t members) {
  EnsembleModel m = init_ensemble(spec, members, 3);
  Rng rng(3);
  TrainConfig cfg;
  cfg.epochs = 1;
  cfg.iterations = 4;
  cfg.batch_size = 8;
  train_ensemble(m, random_matrix(20, spec.input_dim, rng, 0.0, 1.0), cfg);
  return m;
}

}  // namespace

TEST(ModelIo, EnsembleRoundTripIsBitExact) {
  for (const ArchSpec& spec : {make_feedforward_spec(6), make_lstm_spec(6, 4, 2, 2)}) {
    const EnsembleModel m = trained(spec, 2);
    const ScalingStats stats{{0, 1, 2, 3, 4, 5}, {1, 2, 3, 4, 5, 6.5}};
    const std::string text = ensemble_to_json(m, stats);
    const ModelFile back = ensemble_from_json(text);
    EXPECT_EQ(back.model, m);
    EXPECT_EQ(back.scaling, stats);
    EXPECT_EQ(ensemble_to_json(back.model, back.scaling), text);
    Rng rng(1);
    const Matrix x = random_matrix(5, 6, rng);
    EXPECT_EQ(ensemble_score(back.model, x), ensemble_score(m, x));
  }
}

TEST(ModelIo, NetRoundTrip) {
  const EdeNet net(make_feedforward_spec(5), 9);
  EXPECT_EQ(net_from_json(net_to_json(net)), net);
  EXPECT_THROW(net_from_json(ensemble_to_json(init_ensemble(make_feedforward_spec(5), 1, 1))),
               FormatError);
}

TEST(ModelIo, RejectsCorruptFiles) {
  const std::string good = ensemble_to_json(init_ensemble(make_feedforward_spec(4), 1, 2));
  EXPECT_THROW(ensemble_from_json(good.substr(0, good.size() / 2)), FormatError);
  auto mutate = [&](auto&& edit) {
    nlohmann::json j = nlohmann::json::parse(good);
    edit(j);
    return j.dump();
  };
  EXPECT_THROW(ensemble_from_json(mutate([](auto& j) { j["format"] = "nope"; })), FormatError);
  EXPECT_THROW(ensemble_from_json(mutate([](auto& j) { j["format_version"] = 99; })), FormatError);
  EXPECT_THROW(ensemble_from_json(mutate([](auto& j) {
                 j["members"][0]["params"]["e1.layer0.bias"].erase(0);
               })),
               FormatError);
  EXPECT_THROW(ensemble_from_json(mutate([](auto& j) {
                 j["members"][0]["params"]["bogus"] = nlohmann::json::array({1.0});
               })),
               FormatError);
  EXPECT_THROW(ensemble_from_json(mutate([](auto& j) { j["members"][0]["params"].erase("d.layer2.weights"); })),
               FormatError);
}

TEST(ModelIo, FileRoundTripAndIoErrors) {
  const auto path = std::filesystem::temp_directory_path() / "edeen_test_model.json";
  const EnsembleModel m = trained(make_feedforward_spec(4), 3);
  save_model(path, m);
  const ModelFile back = load_model(path);
  EXPECT_EQ(back.model, m);
  EXPECT_FALSE(back.scaling.has_value());
  std::filesystem::remove(path);
  EXPECT_THROW(load_model(path), IoError);
}
