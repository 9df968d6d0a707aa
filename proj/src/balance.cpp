#include "pbda/balance.hpp"

#include <algorithm>
#include <unordered_map>

#include "json.hpp"
#include "pbda/errors.hpp"
#include "pbda/rng.hpp"

namespace pbda {

const ClassPlan* AugmentationPlan::find(const std::string& name) const {
    for (const auto& [cls, plan] : classes)
        if (cls == name) return &plan;
    return nullptr;
}

AugmentationPlan plan_augmentation(const std::vector<std::pair<std::string, std::size_t>>& counts,
                                   std::size_t target_per_class, int mix_pbda_percent) {
    if (counts.empty()) throw ValidationError("cannot plan over an empty class list");
    if (target_per_class < 1) throw ValidationError("target per class must be at least 1");
    if (mix_pbda_percent < 0 || mix_pbda_percent > 100)
        throw ValidationError("mix percentage must lie in [0, 100]");

    AugmentationPlan plan;
    plan.target_per_class = target_per_class;
    plan.mix_pbda_percent = mix_pbda_percent;
    plan.classes.reserve(counts.size());
    for (const auto& [name, real] : counts) {
        ClassPlan cp;
        cp.real = real;
        cp.keep = std::min(real, target_per_class);
        const std::size_t deficit = target_per_class > real ? target_per_class - real : 0;
        // round-half-up of deficit * percent / 100, in exact integer arithmetic
        cp.pbda = (deficit * static_cast<std::size_t>(mix_pbda_percent) + 50) / 100;
        cp.iida = deficit - cp.pbda;
        plan.classes.emplace_back(name, cp);
    }
    return plan;
}

std::string plan_to_json(const AugmentationPlan& plan) {
    nlohmann::ordered_json obj;
    obj["target_per_class"] = plan.target_per_class;
    obj["mix_pbda_percent"] = plan.mix_pbda_percent;
    auto classes = nlohmann::ordered_json::object();
    for (const auto& [name, cp] : plan.classes) {
        classes[name] = {{"real", cp.real},
                         {"keep", cp.keep},
                         {"pbda", cp.pbda},
                         {"iida", cp.iida}};
    }
    obj["classes"] = std::move(classes);
    return obj.dump(2) + "\n";
}

SamplingMode sampling_mode_from_string(const std::string& text) {
    if (text == "ros") return SamplingMode::ros;
    if (text == "rus") return SamplingMode::rus;
    if (text == "threshold") return SamplingMode::threshold;
    if (text == "threshold_ros" || text == "threshold-ros") return SamplingMode::threshold_ros;
    throw ValidationError("unknown sampling strategy \"" + text + "\"");
}

Manifest resample(const Manifest& manifest, const SamplingStrategy& strategy,
                  std::uint64_t seed) {
    if (manifest.samples.empty())
        throw ValidationError("cannot resample an empty manifest");

    // Per-class member indices, classes in first-appearance order.
    std::unordered_map<std::string, std::vector<std::size_t>> members;
    for (std::size_t i = 0; i < manifest.samples.size(); ++i)
        members[manifest.samples[i].label].push_back(i);

    const auto counts = manifest.class_counts();
    std::size_t lo = manifest.samples.size(), hi = 0;
    for (const auto& [name, count] : counts) {
        lo = std::min(lo, count);
        hi = std::max(hi, count);
    }

    const bool threshold_mode = strategy.mode == SamplingMode::threshold ||
                                strategy.mode == SamplingMode::threshold_ros;
    std::size_t reference = 0;
    if (threshold_mode) {
        const auto it = counts.find(strategy.reference_class);
        if (it == counts.end())
            throw ValidationError("reference class \"" + strategy.reference_class +
                                  "\" not present in the manifest");
        reference = it->second;
    }

    // Per-class quota: how many records the class should end with.
    // threshold only shrinks; the other modes equalize.
    auto quota_for = [&](std::size_t count) -> std::size_t {
        switch (strategy.mode) {
            case SamplingMode::ros: return hi;
            case SamplingMode::rus: return lo;
            case SamplingMode::threshold: return std::min(count, reference);
            case SamplingMode::threshold_ros: return reference;
        }
        return count;
    };

    std::vector<char> keep(manifest.samples.size(), 1);
    // Extra draws per class, appended after the originals in class order.
    std::vector<std::size_t> extra_sources;
    std::vector<std::string> extra_ids;
    std::unordered_map<std::string, std::size_t> dup_counter;

    for (const std::string& name : manifest.class_names) {
        const std::vector<std::size_t>& idx = members[name];
        const std::size_t quota = quota_for(idx.size());
        Rng rng(derive_seed(seed, fnv1a64(name)));
        if (quota < idx.size()) {
            const auto chosen = sample_without_replacement(idx, quota, rng);
            for (const std::size_t i : idx) keep[i] = 0;
            for (const std::size_t i : chosen) keep[i] = 1;
        } else if (quota > idx.size()) {
            for (std::size_t k = idx.size(); k < quota; ++k) {
                const std::size_t src = idx[rng.uniform_index(idx.size())];
                const std::string& base = manifest.samples[src].id;
                extra_sources.push_back(src);
                extra_ids.push_back(base + "-ros" + std::to_string(++dup_counter[base]));
            }
        }
    }

    Manifest out;
    out.class_names = manifest.class_names;
    for (std::size_t i = 0; i < manifest.samples.size(); ++i)
        if (keep[i]) out.samples.push_back(manifest.samples[i]);
    for (std::size_t k = 0; k < extra_sources.size(); ++k) {
        Sample dup = manifest.samples[extra_sources[k]];
        dup.id = extra_ids[k];
        out.samples.push_back(std::move(dup));
    }
    return out;
}

std::vector<std::pair<std::string, double>> class_weights(
    const std::vector<std::pair<std::string, std::size_t>>& counts) {
    if (counts.empty()) throw ValidationError("cannot weight an empty class list");
    std::size_t total = 0;
    for (const auto& [name, count] : counts) {
        if (count < 1)
            throw ValidationError("class \"" + name + "\" has zero samples");
        total += count;
    }
    std::vector<std::pair<std::string, double>> weights;
    weights.reserve(counts.size());
    const double c = static_cast<double>(counts.size());
    for (const auto& [name, count] : counts)
        weights.emplace_back(name, static_cast<double>(total) / (c * static_cast<double>(count)));
    return weights;
}

}  // namespace pbda
