#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "pbda/embedding.hpp"
#include "pbda/manifest.hpp"

namespace pbda {

struct DedupConfig {
    double threshold = 356.0;  // Euclidean distance below/at which frames count as duplicates
    std::uint64_t seed = 0;
};

struct PairTarget {
    std::string id;
    double distance;
};

// K nearest healthy-tissue targets for one lesion sample, nearest first.
struct PairAssignment {
    std::string lesion_id;
    std::vector<PairTarget> targets;
};

// Euclidean distance between embedding rows.
double embedding_distance(std::span<const float> a, std::span<const float> b);
double embedding_distance(const EmbeddingTable& table, std::size_t i, std::size_t j);

// Near-duplicate removal, independently per patient group: repeatedly keep a
// uniformly sampled remaining image and drop every remaining image within
// `threshold` of it. Kept samples preserve their original relative order and
// the result is a pure function of (manifest, table, seed); per-group RNG
// streams derive from the patient id, so group order does not matter.
Manifest deduplicate(const Manifest& manifest, const EmbeddingTable& table,
                     const DedupConfig& cfg);

// Exhaustive nearest-neighbour scan over `normals`, excluding candidates that
// share the lesion's patient_id. Returns the k nearest (all eligible ones if
// fewer), ties broken by ascending id.
PairAssignment select_pairs(const Sample& lesion, const Manifest& normals,
                            const EmbeddingTable& table, std::size_t k);

// JSONL export: {"lesion_id":...,"targets":[{"id":...,"distance":...},...]}
std::string pair_assignments_to_jsonl(const std::vector<PairAssignment>& assignments);

}  // namespace pbda
