#include "pbda/pipeline.hpp"

#include <chrono>
#include <cstdio>
#include <map>
#include <unordered_map>

#include "json.hpp"
#include "pbda/curation.hpp"
#include "pbda/embedding.hpp"
#include "pbda/errors.hpp"
#include "pbda/image_io.hpp"
#include "pbda/poisson.hpp"
#include "pbda/rng.hpp"
#include "pbda/roi.hpp"
#include "pbda/worker_pool.hpp"

namespace pbda {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

namespace {

std::vector<std::pair<std::string, std::size_t>> counts_in_class_order(const Manifest& m) {
    const auto counts = m.class_counts();
    std::vector<std::pair<std::string, std::size_t>> out;
    out.reserve(m.class_names.size());
    for (const std::string& name : m.class_names) {
        const auto it = counts.find(name);
        out.emplace_back(name, it == counts.end() ? 0 : it->second);
    }
    return out;
}

void validate_config(const PipelineConfig& cfg) {
    if (cfg.output_dir.empty()) throw ValidationError("output directory is required");
    if (cfg.target_per_class < 1) throw ValidationError("target per class must be at least 1");
    if (cfg.mix_pbda_percent < 0 || cfg.mix_pbda_percent > 100)
        throw ValidationError("mix percentage must lie in [0, 100]");
    if (cfg.pairs_k < 1) throw ValidationError("pair count k must be at least 1");
    if (cfg.roi_stride < 1) throw ValidationError("roi stride must be at least 1");
    if (!(cfg.solver_tol > 0.0)) throw ValidationError("solver tolerance must be positive");
    if (!(cfg.dedup_threshold > 0.0)) throw ValidationError("dedup threshold must be positive");
    if (cfg.workers < 1) throw ValidationError("worker count must be at least 1");
}

struct BlendJob {
    std::size_t index = 0;  // global job index; salts the per-job RNG stream
    std::string id;
    std::string label;
    const Sample* source = nullptr;
    const Sample* target = nullptr;
};

}  // namespace

RunReport run_pipeline(const PipelineConfig& cfg) {
    const auto t_start = std::chrono::steady_clock::now();
    validate_config(cfg);

    const Manifest manifest = load_manifest(cfg.manifest_path);
    if (manifest.samples.empty()) throw ValidationError("input manifest is empty");
    const EmbeddingTable table = load_embeddings(cfg.embeddings_path);
    const fs::path image_root =
        cfg.image_root.empty() ? cfg.manifest_path.parent_path() : cfg.image_root;

    RunReport report;
    report.plan = plan_augmentation(counts_in_class_order(manifest), cfg.target_per_class,
                                    cfg.mix_pbda_percent);

    for (const auto& [name, cp] : report.plan.classes) {
        if (name == cfg.normal_class && cp.pbda + cp.iida > 0)
            throw ValidationError(
                "class \"" + name + "\" serves as the blend-target pool but the plan asks for " +
                std::to_string(cp.pbda + cp.iida) +
                " synthetic samples of it; lower the target or supply more real samples");
    }

    // Inpainted inventory, checked up front so shortfalls fail before any solve.
    Manifest iida_inventory;
    std::unordered_map<std::string, std::vector<std::size_t>> inventory_members;
    bool need_iida = false;
    for (const auto& [name, cp] : report.plan.classes) need_iida |= cp.iida > 0;
    if (need_iida) {
        const fs::path inventory_path = cfg.iida_dir / "manifest.jsonl";
        if (!cfg.iida_dir.empty() && fs::exists(inventory_path))
            iida_inventory = load_manifest(inventory_path);
        for (std::size_t i = 0; i < iida_inventory.samples.size(); ++i)
            inventory_members[iida_inventory.samples[i].label].push_back(i);
        for (const auto& [name, cp] : report.plan.classes) {
            const auto it = inventory_members.find(name);
            const std::size_t have = it == inventory_members.end() ? 0 : it->second.size();
            if (cp.iida > have)
                throw ValidationError("insufficient inpainted inventory for class \"" + name +
                                      "\": need " + std::to_string(cp.iida) + ", have " +
                                      std::to_string(have));
        }
    }

    // Deduplication shapes the pairing pool; the planned `keep` records still
    // come from the full input manifest.
    const Manifest deduped = deduplicate(manifest, table, {cfg.dedup_threshold, cfg.seed});

    Manifest normal_pool;
    normal_pool.class_names = manifest.class_names;
    for (const Sample& s : deduped.samples)
        if (s.label == cfg.normal_class) normal_pool.samples.push_back(s);
    std::unordered_map<std::string, const Sample*> normal_by_id;
    for (const Sample& s : normal_pool.samples) normal_by_id[s.id] = &s;

    // Resolve every blend job up front: sources round-robin over the selected
    // pairs until the class quota is met.
    std::vector<BlendJob> jobs;
    for (const auto& [name, cp] : report.plan.classes) {
        if (cp.pbda == 0) continue;
        std::vector<const Sample*> sources;
        for (const Sample& s : deduped.samples)
            if (s.label == name && s.bbox) sources.push_back(&s);
        if (sources.empty())
            throw ValidationError("class \"" + name + "\" needs " + std::to_string(cp.pbda) +
                                  " blended samples but has no deduplicated source with a "
                                  "bounding box");
        if (normal_pool.samples.empty())
            throw ValidationError("no \"" + cfg.normal_class +
                                  "\" samples available as blend targets");

        std::vector<std::pair<const Sample*, const Sample*>> pairs;
        for (const Sample* lesion : sources) {
            const PairAssignment pa = select_pairs(*lesion, normal_pool, table, cfg.pairs_k);
            for (const PairTarget& t : pa.targets)
                pairs.emplace_back(lesion, normal_by_id.at(t.id));
        }
        for (std::size_t j = 0; j < cp.pbda; ++j) {
            BlendJob job;
            job.index = jobs.size();
            job.id = "pbda-" + name + "-" + std::to_string(j);
            job.label = name;
            job.source = pairs[j % pairs.size()].first;
            job.target = pairs[j % pairs.size()].second;
            jobs.push_back(std::move(job));
        }
    }

    fs::create_directories(cfg.output_dir);
    for (const auto& [name, cp] : report.plan.classes)
        if (cp.pbda + cp.iida > 0) fs::create_directories(cfg.output_dir / "images" / name);

    struct BlendOutcome {
        Sample sample;
        BlendJobRecord record;
    };
    std::vector<BlendOutcome> outcomes(jobs.size());

    parallel_for_index(jobs.size(), cfg.workers, [&](std::size_t i) {
        const BlendJob& job = jobs[i];
        try {
            Rng rng(derive_seed(cfg.seed, job.index));
            const ImageBuffer src_img = decode_image(image_root / job.source->path);
            const ImageBuffer tgt_img = decode_image(image_root / job.target->path);

            RoiSearchConfig roi_cfg;
            roi_cfg.stride = cfg.roi_stride;
            // Per-job grid phase: reused pairs land on different windows.
            roi_cfg.phase_x = static_cast<int>(rng.uniform_index(cfg.roi_stride));
            roi_cfg.phase_y = static_cast<int>(rng.uniform_index(cfg.roi_stride));
            const RoiResult roi = select_roi(src_img, *job.source->bbox, tgt_img, roi_cfg);

            CloneStats stats;
            const ImageBuffer composite = seamless_clone(src_img, *job.source->bbox, tgt_img,
                                                         roi.bbox, cfg.solver_tol, 0, &stats);

            const fs::path rel = fs::path("images") / job.label / (job.id + ".png");
            encode_png(composite, cfg.output_dir / rel);

            Sample s;
            s.id = job.id;
            s.path = rel.generic_string();
            s.label = job.label;
            s.patient_id = job.target->patient_id;
            s.split = job.target->split;
            s.bbox = roi.bbox;
            s.origin = Origin::pbda;
            outcomes[i].sample = std::move(s);
            outcomes[i].record = {job.id,   job.label, job.source->id,  job.target->id,
                                  roi.bbox, roi.score, stats.iterations};
        } catch (const std::exception& e) {
            throw PipelineError("blend job " + std::to_string(job.index) + " (class " +
                                job.label + ", source " + job.source->id + ", target " +
                                job.target->id + "): " + e.what());
        }
    });

    // Assemble the balanced manifest: per class, capped real records, then the
    // blended composites, then the merged inpainted samples.
    std::unordered_map<std::string, std::vector<std::size_t>> real_members;
    for (std::size_t i = 0; i < manifest.samples.size(); ++i)
        real_members[manifest.samples[i].label].push_back(i);

    Manifest out;
    out.class_names = manifest.class_names;
    for (const auto& [name, cp] : report.plan.classes) {
        std::vector<std::size_t>& members = real_members[name];
        if (cp.keep < members.size()) {
            Rng rng(derive_seed(cfg.seed, fnv1a64("cap:" + name)));
            for (const std::size_t i : sample_without_replacement(members, cp.keep, rng))
                out.samples.push_back(manifest.samples[i]);
        } else {
            for (const std::size_t i : members) out.samples.push_back(manifest.samples[i]);
        }

        for (const BlendOutcome& o : outcomes)
            if (o.sample.label == name) out.samples.push_back(o.sample);

        if (cp.iida > 0) {
            Rng rng(derive_seed(cfg.seed, fnv1a64("iida:" + name)));
            const auto chosen =
                sample_without_replacement(inventory_members[name], cp.iida, rng);
            std::size_t ordinal = 0;
            for (const std::size_t i : chosen) {
                Sample s = iida_inventory.samples[i];
                const std::string ext = fs::path(s.path).extension().string();
                s.id = "iida-" + name + "-" + std::to_string(ordinal++);
                const fs::path rel = fs::path("images") / name / (s.id + ext);
                fs::copy_file(cfg.iida_dir / iida_inventory.samples[i].path,
                              cfg.output_dir / rel, fs::copy_options::overwrite_existing);
                s.path = rel.generic_string();
                s.origin = Origin::iida;
                out.samples.push_back(std::move(s));
            }
        }
    }

    report.jobs.reserve(outcomes.size());
    for (const BlendOutcome& o : outcomes) report.jobs.push_back(o.record);

    report.total_samples = out.samples.size();
    for (const Sample& s : out.samples) {
        switch (s.origin) {
            case Origin::real: ++report.total_real; break;
            case Origin::pbda: ++report.total_pbda; break;
            case Origin::iida: ++report.total_iida; break;
        }
    }
    double score_sum = 0.0;
    for (const BlendJobRecord& r : report.jobs) score_sum += r.roi_score;
    report.mean_roi_score = report.jobs.empty() ? 0.0 : score_sum / double(report.jobs.size());
    report.wall_time_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();

    save_manifest(out, cfg.output_dir / "manifest.jsonl");
    {
        std::FILE* f = std::fopen((cfg.output_dir / "plan.json").string().c_str(), "wb");
        if (!f) throw PipelineError("cannot write plan.json");
        const std::string text = plan_to_json(report.plan);
        std::fwrite(text.data(), 1, text.size(), f);
        std::fclose(f);
    }
    {
        std::FILE* f = std::fopen((cfg.output_dir / "report.json").string().c_str(), "wb");
        if (!f) throw PipelineError("cannot write report.json");
        const std::string text = report_to_json(report, cfg);
        std::fwrite(text.data(), 1, text.size(), f);
        std::fclose(f);
    }
    return report;
}

std::string report_to_json(const RunReport& report, const PipelineConfig& cfg) {
    ordered_json obj;
    obj["config"] = {{"manifest", cfg.manifest_path.generic_string()},
                     {"embeddings", cfg.embeddings_path.generic_string()},
                     {"output_dir", cfg.output_dir.generic_string()},
                     {"image_root", cfg.image_root.generic_string()},
                     {"iida_dir", cfg.iida_dir.generic_string()},
                     {"seed", cfg.seed},
                     {"dedup_threshold", cfg.dedup_threshold},
                     {"pairs_k", cfg.pairs_k},
                     {"roi_stride", cfg.roi_stride},
                     {"solver_tol", cfg.solver_tol},
                     {"target_per_class", cfg.target_per_class},
                     {"mix_pbda_percent", cfg.mix_pbda_percent},
                     {"workers", cfg.workers},
                     {"normal_class", cfg.normal_class}};

    auto classes = ordered_json::object();
    for (const auto& [name, cp] : report.plan.classes)
        classes[name] = {{"real", cp.real}, {"keep", cp.keep}, {"pbda", cp.pbda},
                         {"iida", cp.iida}};
    obj["classes"] = std::move(classes);

    obj["totals"] = {{"samples", report.total_samples},
                     {"real", report.total_real},
                     {"pbda", report.total_pbda},
                     {"iida", report.total_iida}};
    obj["mean_roi_score"] = report.mean_roi_score;

    std::map<int, int> histogram;
    for (const BlendJobRecord& r : report.jobs)
        for (const int it : r.solver_iterations) ++histogram[it];
    auto hist = ordered_json::object();
    for (const auto& [iters, freq] : histogram) hist[std::to_string(iters)] = freq;
    obj["solver_iterations"] = std::move(hist);

    auto jobs = ordered_json::array();
    for (const BlendJobRecord& r : report.jobs) {
        jobs.push_back({{"id", r.id},
                        {"class", r.label},
                        {"source_id", r.source_id},
                        {"target_id", r.target_id},
                        {"roi_bbox", {r.roi_bbox.x, r.roi_bbox.y, r.roi_bbox.w, r.roi_bbox.h}},
                        {"roi_score", r.roi_score},
                        {"solver_iterations",
                         {r.solver_iterations[0], r.solver_iterations[1], r.solver_iterations[2]}}});
    }
    obj["blend_jobs"] = std::move(jobs);
    obj["wall_time_seconds"] = report.wall_time_seconds;
    return obj.dump(2) + "\n";
}

std::vector<StatsRow> stats(const Manifest& manifest) {
    std::map<std::pair<std::string, std::string>, StatsRow> rows;
    for (const Sample& s : manifest.samples) {
        StatsRow& row = rows[{s.split, s.label}];
        if (row.images == 0) {
            row.split = s.split;
            row.label = s.label;
        }
        ++row.images;
        if (s.bbox) ++row.bboxes;
    }
    std::vector<StatsRow> out;
    out.reserve(rows.size());
    for (auto& [key, row] : rows) out.push_back(std::move(row));
    return out;
}

std::string stats_to_text(const std::vector<StatsRow>& rows) {
    std::size_t split_w = 5, label_w = 5;
    for (const StatsRow& r : rows) {
        split_w = std::max(split_w, r.split.size());
        label_w = std::max(label_w, r.label.size());
    }
    std::string out;
    char line[256];
    std::snprintf(line, sizeof line, "%-*s  %-*s  %10s  %10s\n", int(split_w), "split",
                  int(label_w), "label", "images", "bboxes");
    out += line;
    for (const StatsRow& r : rows) {
        std::snprintf(line, sizeof line, "%-*s  %-*s  %10zu  %10zu\n", int(split_w),
                      r.split.c_str(), int(label_w), r.label.c_str(), r.images, r.bboxes);
        out += line;
    }
    return out;
}

std::string stats_to_json(const std::vector<StatsRow>& rows) {
    auto arr = ordered_json::array();
    for (const StatsRow& r : rows)
        arr.push_back({{"split", r.split},
                       {"label", r.label},
                       {"images", r.images},
                       {"bboxes", r.bboxes}});
    return arr.dump(2) + "\n";
}

}  // namespace pbda
