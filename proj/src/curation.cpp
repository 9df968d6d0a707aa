#include "pbda/curation.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_map>

#include "json.hpp"
#include "pbda/errors.hpp"
#include "pbda/kernels.hpp"
#include "pbda/rng.hpp"

namespace pbda {

double embedding_distance(std::span<const float> a, std::span<const float> b) {
    if (a.size() != b.size())
        throw ValidationError("embedding dimension mismatch: " + std::to_string(a.size()) +
                              " vs " + std::to_string(b.size()));
    return std::sqrt(kernels::active_ops().sq_dist_f32(a.data(), b.data(), a.size()));
}

double embedding_distance(const EmbeddingTable& table, std::size_t i, std::size_t j) {
    if (i >= table.count || j >= table.count)
        throw ValidationError("embedding row index out of range");
    return embedding_distance(table.row(i), table.row(j));
}

namespace {

std::size_t checked_row(const Sample& s, const EmbeddingTable& table) {
    if (!s.embedding_index)
        throw ValidationError("sample \"" + s.id + "\" has no embedding_index");
    if (*s.embedding_index >= table.count)
        throw ValidationError("sample \"" + s.id + "\" references embedding row " +
                              std::to_string(*s.embedding_index) + " of a " +
                              std::to_string(table.count) + "-row table");
    return *s.embedding_index;
}

}  // namespace

Manifest deduplicate(const Manifest& manifest, const EmbeddingTable& table,
                     const DedupConfig& cfg) {
    if (!(cfg.threshold > 0.0))
        throw ValidationError("dedup threshold must be positive");

    std::vector<std::size_t> rows(manifest.samples.size());
    for (std::size_t i = 0; i < manifest.samples.size(); ++i)
        rows[i] = checked_row(manifest.samples[i], table);

    // Patient groups in first-appearance order.
    std::vector<std::string> group_order;
    std::unordered_map<std::string, std::vector<std::size_t>> groups;
    for (std::size_t i = 0; i < manifest.samples.size(); ++i) {
        const std::string& key = manifest.samples[i].patient_id;
        auto [it, inserted] = groups.try_emplace(key);
        if (inserted) group_order.push_back(key);
        it->second.push_back(i);
    }

    std::vector<char> kept(manifest.samples.size(), 0);
    for (const std::string& key : group_order) {
        std::vector<std::size_t>& remaining = groups[key];
        Rng rng(derive_seed(cfg.seed, fnv1a64(key)));
        while (!remaining.empty()) {
            const std::size_t pick = rng.uniform_index(remaining.size());
            const std::size_t query = remaining[pick];
            kept[query] = 1;
            remaining.erase(remaining.begin() + static_cast<std::ptrdiff_t>(pick));

            const auto query_row = table.row(rows[query]);
            std::erase_if(remaining, [&](std::size_t i) {
                return embedding_distance(query_row, table.row(rows[i])) <= cfg.threshold;
            });
        }
    }

    Manifest out;
    out.class_names = manifest.class_names;
    for (std::size_t i = 0; i < manifest.samples.size(); ++i)
        if (kept[i]) out.samples.push_back(manifest.samples[i]);
    return out;
}

PairAssignment select_pairs(const Sample& lesion, const Manifest& normals,
                            const EmbeddingTable& table, std::size_t k) {
    if (k < 1) throw ValidationError("pair count k must be at least 1");
    const std::size_t lesion_row = checked_row(lesion, table);

    struct Candidate {
        double distance;
        const Sample* sample;
    };
    std::vector<Candidate> candidates;
    candidates.reserve(normals.samples.size());
    for (const Sample& s : normals.samples) {
        if (s.patient_id == lesion.patient_id) continue;
        const std::size_t row = checked_row(s, table);
        candidates.push_back({embedding_distance(table.row(lesion_row), table.row(row)), &s});
    }
    if (candidates.empty())
        throw ValidationError("no eligible pair target for lesion \"" + lesion.id +
                              "\": every candidate shares patient \"" + lesion.patient_id + "\"");

    const std::size_t take = std::min(k, candidates.size());
    std::partial_sort(candidates.begin(), candidates.begin() + static_cast<std::ptrdiff_t>(take),
                      candidates.end(), [](const Candidate& a, const Candidate& b) {
                          if (a.distance != b.distance) return a.distance < b.distance;
                          return a.sample->id < b.sample->id;
                      });

    PairAssignment out;
    out.lesion_id = lesion.id;
    out.targets.reserve(take);
    for (std::size_t i = 0; i < take; ++i)
        out.targets.push_back({candidates[i].sample->id, candidates[i].distance});
    return out;
}

std::string pair_assignments_to_jsonl(const std::vector<PairAssignment>& assignments) {
    std::string out;
    for (const PairAssignment& pa : assignments) {
        nlohmann::ordered_json obj;
        obj["lesion_id"] = pa.lesion_id;
        auto targets = nlohmann::ordered_json::array();
        for (const PairTarget& t : pa.targets)
            targets.push_back({{"id", t.id}, {"distance", t.distance}});
        obj["targets"] = std::move(targets);
        out += obj.dump();
        out += '\n';
    }
    return out;
}

}  // namespace pbda
