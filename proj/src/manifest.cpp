#include "pbda/manifest.hpp"

#include <fstream>
#include <sstream>
#include <unordered_set>

#include "json.hpp"
#include "pbda/errors.hpp"

namespace pbda {

using ordered_json = nlohmann::ordered_json;

const char* to_string(Origin origin) {
    switch (origin) {
        case Origin::real: return "real";
        case Origin::pbda: return "pbda";
        case Origin::iida: return "iida";
    }
    return "real";
}

Origin origin_from_string(const std::string& text) {
    if (text == "real") return Origin::real;
    if (text == "pbda") return Origin::pbda;
    if (text == "iida") return Origin::iida;
    throw ValidationError("unknown origin value \"" + text + "\"");
}

void Manifest::rebuild_class_names() {
    class_names.clear();
    std::unordered_set<std::string> seen;
    for (const Sample& s : samples) {
        if (seen.insert(s.label).second) class_names.push_back(s.label);
    }
}

std::map<std::string, std::size_t> Manifest::class_counts() const {
    std::map<std::string, std::size_t> counts;
    for (const Sample& s : samples) ++counts[s.label];
    return counts;
}

namespace {

std::string require_string(const ordered_json& obj, const char* key) {
    auto it = obj.find(key);
    if (it == obj.end() || !it->is_string())
        throw ValidationError(std::string("missing or non-string field \"") + key + "\"");
    return it->get<std::string>();
}

Sample parse_sample(const ordered_json& obj) {
    Sample s;
    s.id = require_string(obj, "id");
    s.path = require_string(obj, "path");
    s.label = require_string(obj, "label");
    s.patient_id = require_string(obj, "patient_id");
    s.split = require_string(obj, "split");

    if (auto it = obj.find("bbox"); it != obj.end() && !it->is_null()) {
        if (!it->is_array() || it->size() != 4)
            throw ValidationError("bbox must be a [x,y,w,h] array");
        BBox b{it->at(0).get<int>(), it->at(1).get<int>(),
               it->at(2).get<int>(), it->at(3).get<int>()};
        if (b.x < 0 || b.y < 0)
            throw ValidationError("bbox for \"" + s.id + "\" has a negative corner");
        if (b.w < 3 || b.h < 3)
            throw ValidationError("bbox for \"" + s.id +
                                  "\" is smaller than 3x3 (no usable perimeter)");
        s.bbox = b;
    }
    if (auto it = obj.find("embedding_index"); it != obj.end() && !it->is_null()) {
        if (!it->is_number_integer() || it->get<long long>() < 0)
            throw ValidationError("embedding_index for \"" + s.id +
                                  "\" must be a non-negative integer");
        s.embedding_index = it->get<std::size_t>();
    }
    if (auto it = obj.find("origin"); it != obj.end() && !it->is_null())
        s.origin = origin_from_string(it->get<std::string>());
    return s;
}

}  // namespace

Manifest manifest_from_jsonl(const std::string& text) {
    Manifest manifest;
    std::unordered_set<std::string> ids;
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        ordered_json obj;
        try {
            obj = ordered_json::parse(line);
        } catch (const nlohmann::json::parse_error& e) {
            throw ValidationError("manifest line " + std::to_string(line_no) +
                                  ": " + e.what());
        }
        if (!obj.is_object())
            throw ValidationError("manifest line " + std::to_string(line_no) +
                                  ": expected a JSON object");
        Sample s;
        try {
            s = parse_sample(obj);
        } catch (const ValidationError& e) {
            throw ValidationError("manifest line " + std::to_string(line_no) +
                                  ": " + e.what());
        } catch (const nlohmann::json::exception& e) {
            throw ValidationError("manifest line " + std::to_string(line_no) +
                                  ": " + e.what());
        }
        if (!ids.insert(s.id).second)
            throw ValidationError("manifest line " + std::to_string(line_no) +
                                  ": duplicate id \"" + s.id + "\"");
        manifest.samples.push_back(std::move(s));
    }
    manifest.rebuild_class_names();
    return manifest;
}

std::string manifest_to_jsonl(const Manifest& manifest) {
    std::string out;
    for (const Sample& s : manifest.samples) {
        ordered_json obj;
        obj["id"] = s.id;
        obj["path"] = s.path;
        obj["label"] = s.label;
        obj["patient_id"] = s.patient_id;
        obj["split"] = s.split;
        if (s.bbox) obj["bbox"] = {s.bbox->x, s.bbox->y, s.bbox->w, s.bbox->h};
        if (s.embedding_index) obj["embedding_index"] = *s.embedding_index;
        obj["origin"] = to_string(s.origin);
        out += obj.dump();
        out += '\n';
    }
    return out;
}

Manifest load_manifest(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open manifest " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    try {
        return manifest_from_jsonl(buf.str());
    } catch (const ValidationError& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
}

void save_manifest(const Manifest& manifest, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw PipelineError("cannot write manifest " + path.string());
    out << manifest_to_jsonl(manifest);
    if (!out) throw PipelineError("short write on manifest " + path.string());
}

}  // namespace pbda
