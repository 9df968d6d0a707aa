#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "pbda/manifest.hpp"

namespace pbda {

struct ClassPlan {
    std::size_t real = 0;  // records present in the input
    std::size_t keep = 0;  // min(real, target): survivors after capping
    std::size_t pbda = 0;  // blended composites to synthesize
    std::size_t iida = 0;  // inpainted samples to merge
};

// Per-class synthesis budget. For every class:
//   keep + pbda + iida == target_per_class
//   pbda + iida == max(0, target_per_class - real)
struct AugmentationPlan {
    std::size_t target_per_class = 0;
    int mix_pbda_percent = 0;
    std::vector<std::pair<std::string, ClassPlan>> classes;  // input class order

    const ClassPlan* find(const std::string& name) const;
};

// Split each class's deficit d = max(0, target - real) into
// pbda = round-half-up(d * percent / 100) and iida = d - pbda. Classes above
// the target are capped to it (the capping draw happens when a manifest is
// materialized, not here).
AugmentationPlan plan_augmentation(const std::vector<std::pair<std::string, std::size_t>>& counts,
                                   std::size_t target_per_class, int mix_pbda_percent);

std::string plan_to_json(const AugmentationPlan& plan);

enum class SamplingMode { ros, rus, threshold, threshold_ros };

struct SamplingStrategy {
    SamplingMode mode = SamplingMode::ros;
    std::string reference_class;  // anchor for the threshold modes
};

SamplingMode sampling_mode_from_string(const std::string& text);

// Classic rebalancing by record duplication/removal:
//   ros            every class oversampled (uniform, with replacement) to the majority count
//   rus            every class undersampled to the minority count
//   threshold      classes above the reference class's count undersampled to it
//   threshold_ros  classes below the reference oversampled to it, above undersampled
// Duplicated records get fresh ids ("<id>-ros<n>") but keep their file path;
// output is deterministic per seed.
Manifest resample(const Manifest& manifest, const SamplingStrategy& strategy,
                  std::uint64_t seed);

// Inverse-frequency weights w_c = N / (C * n_c); their mean under the class
// distribution is 1.
std::vector<std::pair<std::string, double>> class_weights(
    const std::vector<std::pair<std::string, std::size_t>>& counts);

}  // namespace pbda
