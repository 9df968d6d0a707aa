#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "pbda/balance.hpp"
#include "pbda/manifest.hpp"

namespace pbda {

struct PipelineConfig {
    std::filesystem::path manifest_path;
    std::filesystem::path embeddings_path;
    std::filesystem::path output_dir;
    std::filesystem::path image_root;  // empty: the manifest's directory
    std::filesystem::path iida_dir;    // inventory of pre-generated inpainted samples

    std::uint64_t seed = 0;
    double dedup_threshold = 356.0;
    std::size_t pairs_k = 1;
    int roi_stride = 8;
    double solver_tol = 1e-6;
    std::size_t target_per_class = 0;
    int mix_pbda_percent = 100;
    unsigned workers = 1;
    std::string normal_class = "normal";  // blend targets; never synthesized
};

struct BlendJobRecord {
    std::string id;
    std::string label;
    std::string source_id;
    std::string target_id;
    BBox roi_bbox;
    double roi_score = 0.0;
    std::array<int, 3> solver_iterations{};
};

struct RunReport {
    AugmentationPlan plan;
    std::vector<BlendJobRecord> jobs;
    std::size_t total_samples = 0;
    std::size_t total_real = 0;
    std::size_t total_pbda = 0;
    std::size_t total_iida = 0;
    double mean_roi_score = 0.0;
    double wall_time_seconds = 0.0;
};

std::string report_to_json(const RunReport& report, const PipelineConfig& cfg);

// Full batch run: deduplicate, pick source/target pairs, search blending
// locations, solve one Poisson composite per planned sample, merge inpainted
// inventory and write the balanced dataset to
//   <output_dir>/images/<class>/<id>.png, manifest.jsonl, plan.json, report.json.
// Per-job RNG streams derive from (seed, job index), so results are identical
// across reruns and worker counts.
RunReport run_pipeline(const PipelineConfig& cfg);

struct StatsRow {
    std::string split;
    std::string label;
    std::size_t images = 0;
    std::size_t bboxes = 0;
};

// Image and bounding-box counts grouped by (split, label), sorted.
std::vector<StatsRow> stats(const Manifest& manifest);
std::string stats_to_text(const std::vector<StatsRow>& rows);
std::string stats_to_json(const std::vector<StatsRow>& rows);

}  // namespace pbda
