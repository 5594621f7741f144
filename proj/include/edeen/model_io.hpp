#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "edeen/dataset.hpp"
#include "edeen/ede.hpp"
#include "edeen/ensemble.hpp"

namespace edeen {

inline constexpr int kModelFormatVersion = 1;

/// What a model file holds: the ensemble plus the scaling fitted on its
/// training data, so scoring can reproduce the preprocessing.
struct ModelFile {
  EnsembleModel model;
  std::optional<ScalingStats> scaling;
};

// JSON: {"format": "edeen-model", "format_version": 1, "kind": "ensemble"|"ede",
//        "arch": {...}, "seed": n, "members": [{"seed": n, "params": {name: [...]}}]
//        (or "params" directly for kind "ede"), "scaling": {"min": [...], "max": [...]}}
// Doubles are written in shortest round-trip form, so reloading is bit-exact.
std::string ensemble_to_json(const EnsembleModel& model,
                             const std::optional<ScalingStats>& scaling = std::nullopt);
ModelFile ensemble_from_json(const std::string& text);

std::string net_to_json(const EdeNet& net);
EdeNet net_from_json(const std::string& text);

void save_model(const std::filesystem::path& path, const EnsembleModel& model,
                const std::optional<ScalingStats>& scaling = std::nullopt);
ModelFile load_model(const std::filesystem::path& path);

}  // namespace edeen
