// pbda: dataset curation and Poisson-blend augmentation for bounding-box
// annotated image datasets. Subcommands expose each pipeline stage; `run`
// composes them into one reproducible batch job.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <thread>

#include "CLI11.hpp"
#include "pbda/balance.hpp"
#include "pbda/curation.hpp"
#include "pbda/embedding.hpp"
#include "pbda/errors.hpp"
#include "pbda/image_io.hpp"
#include "pbda/pipeline.hpp"
#include "pbda/poisson.hpp"
#include "pbda/roi.hpp"

namespace {

pbda::BBox parse_bbox(const std::string& text) {
    pbda::BBox b;
    char extra = 0;
    if (std::sscanf(text.c_str(), "%d,%d,%d,%d%c", &b.x, &b.y, &b.w, &b.h, &extra) != 4)
        throw pbda::ValidationError("bbox must be \"x,y,w,h\", got \"" + text + "\"");
    return b;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw pbda::PipelineError("cannot write " + path.string());
    out << text;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Poisson-blend data augmentation pipeline"};
    app.require_subcommand(1);

    std::string manifest_path, embeddings_path, output;
    std::string source_path, target_path, src_bbox_text, dst_bbox_text;
    std::string strategy_text, reference_class;
    pbda::PipelineConfig cfg;
    cfg.workers = std::max(1u, std::thread::hardware_concurrency());
    double solver_tol = 1e-6;
    int max_iter = 0;
    int stride = 8, margin = 1;
    std::uint64_t seed = 0;
    std::size_t pairs_k = 1, target_per_class = 0;
    double dedup_threshold = 356.0;
    int mix_pbda_percent = 100;
    std::string normal_class = "normal";
    bool as_json = false;

    auto* dedup = app.add_subcommand("dedup", "drop near-duplicate frames per patient group");
    dedup->add_option("-m,--manifest", manifest_path)->required();
    dedup->add_option("-e,--embeddings", embeddings_path)->required();
    dedup->add_option("-o,--output", output, "deduplicated manifest (JSONL)")->required();
    dedup->add_option("--dedup-threshold", dedup_threshold, "distance at or below which frames are duplicates");
    dedup->add_option("--seed", seed);

    auto* pairs = app.add_subcommand("pairs", "nearest healthy-tissue targets per lesion");
    pairs->add_option("-m,--manifest", manifest_path)->required();
    pairs->add_option("-e,--embeddings", embeddings_path)->required();
    pairs->add_option("-o,--output", output, "pair assignments (JSONL)")->required();
    pairs->add_option("--pairs-k", pairs_k, "targets per lesion");
    pairs->add_option("--normal-class", normal_class);

    auto* roi = app.add_subcommand("roi", "best blending window in a target image");
    roi->add_option("--source", source_path)->required();
    roi->add_option("--src-bbox", src_bbox_text, "x,y,w,h")->required();
    roi->add_option("--target", target_path)->required();
    roi->add_option("--roi-stride", stride);
    roi->add_option("--margin", margin);

    auto* blend = app.add_subcommand("blend", "seamless-clone one region");
    blend->add_option("--source", source_path)->required();
    blend->add_option("--src-bbox", src_bbox_text, "x,y,w,h")->required();
    blend->add_option("--target", target_path)->required();
    blend->add_option("--dst-bbox", dst_bbox_text, "x,y,w,h")->required();
    blend->add_option("-o,--output", output, "composite PNG")->required();
    blend->add_option("--solver-tol", solver_tol);
    blend->add_option("--max-iter", max_iter, "0 selects 10x unknowns");

    auto* plan = app.add_subcommand("plan", "per-class synthesis budget");
    plan->add_option("-m,--manifest", manifest_path)->required();
    plan->add_option("--target-per-class", target_per_class)->required();
    plan->add_option("--mix-pbda-percent", mix_pbda_percent);
    plan->add_option("-o,--output", output, "plan JSON (stdout when omitted)");

    auto* balance = app.add_subcommand("balance", "classic resampling baselines");
    balance->add_option("-m,--manifest", manifest_path)->required();
    balance->add_option("--strategy", strategy_text, "ros|rus|threshold|threshold_ros")->required();
    balance->add_option("--reference-class", reference_class, "anchor for threshold modes");
    balance->add_option("--seed", seed);
    balance->add_option("-o,--output", output, "resampled manifest (JSONL)")->required();

    auto* stats_cmd = app.add_subcommand("stats", "per-class, per-split counts");
    stats_cmd->add_option("-m,--manifest", manifest_path)->required();
    stats_cmd->add_flag("--json", as_json);

    auto* run = app.add_subcommand("run", "full curation + blending + balancing batch");
    run->add_option("-m,--manifest", cfg.manifest_path)->required();
    run->add_option("-e,--embeddings", cfg.embeddings_path)->required();
    run->add_option("-o,--output-dir", cfg.output_dir)->required();
    run->add_option("--image-root", cfg.image_root, "base for relative image paths (default: manifest dir)");
    run->add_option("--iida-dir", cfg.iida_dir, "inventory of pre-generated inpainted samples");
    run->add_option("--seed", cfg.seed);
    run->add_option("--dedup-threshold", cfg.dedup_threshold);
    run->add_option("--pairs-k", cfg.pairs_k);
    run->add_option("--roi-stride", cfg.roi_stride);
    run->add_option("--solver-tol", cfg.solver_tol);
    run->add_option("--target-per-class", cfg.target_per_class)->required();
    run->add_option("--mix-pbda-percent", cfg.mix_pbda_percent);
    run->add_option("--workers", cfg.workers);
    run->add_option("--normal-class", cfg.normal_class);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (dedup->parsed()) {
            const auto manifest = pbda::load_manifest(manifest_path);
            const auto table = pbda::load_embeddings(embeddings_path);
            const auto result = pbda::deduplicate(manifest, table, {dedup_threshold, seed});
            pbda::save_manifest(result, output);
            std::fprintf(stderr, "kept %zu of %zu samples\n", result.samples.size(),
                         manifest.samples.size());
        } else if (pairs->parsed()) {
            const auto manifest = pbda::load_manifest(manifest_path);
            const auto table = pbda::load_embeddings(embeddings_path);
            pbda::Manifest normals;
            normals.class_names = manifest.class_names;
            for (const auto& s : manifest.samples)
                if (s.label == normal_class) normals.samples.push_back(s);
            std::vector<pbda::PairAssignment> assignments;
            for (const auto& s : manifest.samples)
                if (s.label != normal_class)
                    assignments.push_back(pbda::select_pairs(s, normals, table, pairs_k));
            write_text(output, pbda::pair_assignments_to_jsonl(assignments));
        } else if (roi->parsed()) {
            const auto source = pbda::decode_image(source_path);
            const auto target = pbda::decode_image(target_path);
            pbda::RoiSearchConfig rc;
            rc.stride = stride;
            rc.margin = margin;
            const auto result = pbda::select_roi(source, parse_bbox(src_bbox_text), target, rc);
            std::printf("{\"bbox\": [%d, %d, %d, %d], \"score\": %.9g, \"candidates\": %zu}\n",
                        result.bbox.x, result.bbox.y, result.bbox.w, result.bbox.h,
                        result.score, result.candidates_evaluated);
        } else if (blend->parsed()) {
            const auto source = pbda::decode_image(source_path);
            const auto target = pbda::decode_image(target_path);
            const auto composite =
                pbda::seamless_clone(source, parse_bbox(src_bbox_text), target,
                                     parse_bbox(dst_bbox_text), solver_tol, max_iter);
            pbda::encode_png(composite, output);
        } else if (plan->parsed()) {
            const auto manifest = pbda::load_manifest(manifest_path);
            std::vector<std::pair<std::string, std::size_t>> counts;
            const auto by_class = manifest.class_counts();
            for (const auto& name : manifest.class_names)
                counts.emplace_back(name, by_class.at(name));
            const auto result =
                pbda::plan_augmentation(counts, target_per_class, mix_pbda_percent);
            const std::string text = pbda::plan_to_json(result);
            if (output.empty())
                std::fputs(text.c_str(), stdout);
            else
                write_text(output, text);
        } else if (balance->parsed()) {
            const auto manifest = pbda::load_manifest(manifest_path);
            pbda::SamplingStrategy strategy;
            strategy.mode = pbda::sampling_mode_from_string(strategy_text);
            strategy.reference_class = reference_class;
            pbda::save_manifest(pbda::resample(manifest, strategy, seed), output);
        } else if (stats_cmd->parsed()) {
            const auto manifest = pbda::load_manifest(manifest_path);
            const auto rows = pbda::stats(manifest);
            std::fputs((as_json ? pbda::stats_to_json(rows) : pbda::stats_to_text(rows)).c_str(),
                       stdout);
        } else if (run->parsed()) {
            const auto report = pbda::run_pipeline(cfg);
            std::fprintf(stderr,
                         "wrote %zu samples (%zu real, %zu blended, %zu inpainted) in %.2fs\n",
                         report.total_samples, report.total_real, report.total_pbda,
                         report.total_iida, report.wall_time_seconds);
        }
    } catch (const pbda::ValidationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
