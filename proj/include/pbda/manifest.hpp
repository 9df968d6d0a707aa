#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pbda/image.hpp"

namespace pbda {

enum class Origin { real, pbda, iida };

const char* to_string(Origin origin);
Origin origin_from_string(const std::string& text);  // throws ValidationError

// One dataset record. `path` is relative to the image root the caller chose
// (by convention the manifest's directory).
struct Sample {
    std::string id;
    std::string path;
    std::string label;
    std::string patient_id;
    std::string split;
    std::optional<BBox> bbox;
    std::optional<std::size_t> embedding_index;
    Origin origin = Origin::real;
};

struct Manifest {
    std::vector<Sample> samples;
    std::vector<std::string> class_names;  // first-appearance order

    // Recompute class_names from the samples.
    void rebuild_class_names();

    std::map<std::string, std::size_t> class_counts() const;
};

// JSON-lines serialization. One object per line with the fields
// id, path, label, patient_id, split, bbox ([x,y,w,h], optional),
// embedding_index (optional) and origin. Parsing validates id uniqueness and
// bbox shape (w, h >= 3) and reports the offending line on error.
Manifest manifest_from_jsonl(const std::string& text);
std::string manifest_to_jsonl(const Manifest& manifest);

Manifest load_manifest(const std::filesystem::path& path);
void save_manifest(const Manifest& manifest, const std::filesystem::path& path);

}  // namespace pbda
