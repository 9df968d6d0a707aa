#include "fixtures.hpp"

#include <unistd.h>

#include <atomic>
#include <cmath>

#include "pbda/embedding.hpp"
#include "pbda/image_io.hpp"
#include "pbda/rng.hpp"

namespace pbda::testing {

namespace fs = std::filesystem;

TempDir::TempDir(const std::string& prefix) {
    static std::atomic<unsigned> counter{0};
    const unsigned n = counter.fetch_add(1);
    path = fs::temp_directory_path() /
           (prefix + "-" + std::to_string(::getpid()) + "-" + std::to_string(n));
    fs::create_directories(path);
}

TempDir::~TempDir() {
    std::error_code ec;
    fs::remove_all(path, ec);
}

std::span<const std::uint8_t> reference_png_1x1() {
    static const std::uint8_t bytes[] = {
        0x89, 0x50, 0x4e, 0x47, 0x0d, 0x0a, 0x1a, 0x0a, 0x00, 0x00, 0x00, 0x0d, 0x49, 0x48,
        0x44, 0x52, 0x00, 0x00, 0x00, 0x01, 0x00, 0x00, 0x00, 0x01, 0x08, 0x02, 0x00, 0x00,
        0x00, 0x90, 0x77, 0x53, 0xde, 0x00, 0x00, 0x00, 0x0c, 0x49, 0x44, 0x41, 0x54, 0x78,
        0x9c, 0x63, 0xf8, 0xcf, 0xd0, 0x00, 0x00, 0x03, 0x81, 0x01, 0x80, 0xa2, 0xad, 0x96,
        0x81, 0x00, 0x00, 0x00, 0x00, 0x49, 0x45, 0x4e, 0x44, 0xae, 0x42, 0x60, 0x82};
    return bytes;
}

std::span<const std::uint8_t> reference_jpeg_4x3() {
    static const std::uint8_t bytes[] = {
        0xff, 0xd8, 0xff, 0xe0, 0x00, 0x10, 0x4a, 0x46, 0x49, 0x46, 0x00, 0x01, 0x01, 0x00,
        0x00, 0x01, 0x00, 0x01, 0x00, 0x00, 0xff, 0xdb, 0x00, 0x43, 0x00, 0x02, 0x01, 0x01,
        0x01, 0x01, 0x01, 0x02, 0x01, 0x01, 0x01, 0x02, 0x02, 0x02, 0x02, 0x02, 0x04, 0x03,
        0x02, 0x02, 0x02, 0x02, 0x05, 0x04, 0x04, 0x03, 0x04, 0x06, 0x05, 0x06, 0x06, 0x06,
        0x05, 0x06, 0x06, 0x06, 0x07, 0x09, 0x08, 0x06, 0x07, 0x09, 0x07, 0x06, 0x06, 0x08,
        0x0b, 0x08, 0x09, 0x0a, 0x0a, 0x0a, 0x0a, 0x0a, 0x06, 0x08, 0x0b, 0x0c, 0x0b, 0x0a,
        0x0c, 0x09, 0x0a, 0x0a, 0x0a, 0xff, 0xdb, 0x00, 0x43, 0x01, 0x02, 0x02, 0x02, 0x02,
        0x02, 0x02, 0x05, 0x03, 0x03, 0x05, 0x0a, 0x07, 0x06, 0x07, 0x0a, 0x0a, 0x0a, 0x0a,
        0x0a, 0x0a, 0x0a, 0x0a, 0x0a, 0x0a, 0x0a, 0x0a, 0x0a, 0x0a, 0x0a, 0x0a, 0x0a, 0x0a,
        0x0a, 0x0a, 0x0a, 0x0a, 0x0a, 0x0a, 0x0a, 0x0a, 0x0a, 0x0a, 0x0a, 0x0a, 0x0a, 0x0a,
        0x0a, 0x0a, 0x0a, 0x0a, 0x0a, 0x0a, 0x0a, 0x0a, 0x0a, 0x0a, 0x0a, 0x0a, 0x0a, 0x0a,
        0x0a, 0x0a, 0x0a, 0x0a, 0xff, 0xc0, 0x00, 0x11, 0x08, 0x00, 0x03, 0x00, 0x04, 0x03,
        0x01, 0x22, 0x00, 0x02, 0x11, 0x01, 0x03, 0x11, 0x01, 0xff, 0xc4, 0x00, 0x1f, 0x00,
        0x00, 0x01, 0x05, 0x01, 0x01, 0x01, 0x01, 0x01, 0x01, 0x00, 0x00, 0x00, 0x00, 0x00,
        0x00, 0x00, 0x00, 0x01, 0x02, 0x03, 0x04, 0x05, 0x06, 0x07, 0x08, 0x09, 0x0a, 0x0b,
        0xff, 0xc4, 0x00, 0xb5, 0x10, 0x00, 0x02, 0x01, 0x03, 0x03, 0x02, 0x04, 0x03, 0x05,
        0x05, 0x04, 0x04, 0x00, 0x00, 0x01, 0x7d, 0x01, 0x02, 0x03, 0x00, 0x04, 0x11, 0x05,
        0x12, 0x21, 0x31, 0x41, 0x06, 0x13, 0x51, 0x61, 0x07, 0x22, 0x71, 0x14, 0x32, 0x81,
        0x91, 0xa1, 0x08, 0x23, 0x42, 0xb1, 0xc1, 0x15, 0x52, 0xd1, 0xf0, 0x24, 0x33, 0x62,
        0x72, 0x82, 0x09, 0x0a, 0x16, 0x17, 0x18, 0x19, 0x1a, 0x25, 0x26, 0x27, 0x28, 0x29,
        0x2a, 0x34, 0x35, 0x36, 0x37, 0x38, 0x39, 0x3a, 0x43, 0x44, 0x45, 0x46, 0x47, 0x48,
        0x49, 0x4a, 0x53, 0x54, 0x55, 0x56, 0x57, 0x58, 0x59, 0x5a, 0x63, 0x64, 0x65, 0x66,
        0x67, 0x68, 0x69, 0x6a, 0x73, 0x74, 0x75, 0x76, 0x77, 0x78, 0x79, 0x7a, 0x83, 0x84,
        0x85, 0x86, 0x87, 0x88, 0x89, 0x8a, 0x92, 0x93, 0x94, 0x95, 0x96, 0x97, 0x98, 0x99,
        0x9a, 0xa2, 0xa3, 0xa4, 0xa5, 0xa6, 0xa7, 0xa8, 0xa9, 0xaa, 0xb2, 0xb3, 0xb4, 0xb5,
        0xb6, 0xb7, 0xb8, 0xb9, 0xba, 0xc2, 0xc3, 0xc4, 0xc5, 0xc6, 0xc7, 0xc8, 0xc9, 0xca,
        0xd2, 0xd3, 0xd4, 0xd5, 0xd6, 0xd7, 0xd8, 0xd9, 0xda, 0xe1, 0xe2, 0xe3, 0xe4, 0xe5,
        0xe6, 0xe7, 0xe8, 0xe9, 0xea, 0xf1, 0xf2, 0xf3, 0xf4, 0xf5, 0xf6, 0xf7, 0xf8, 0xf9,
        0xfa, 0xff, 0xc4, 0x00, 0x1f, 0x01, 0x00, 0x03, 0x01, 0x01, 0x01, 0x01, 0x01, 0x01,
        0x01, 0x01, 0x01, 0x00, 0x00, 0x00, 0x00, 0x00, 0x00, 0x01, 0x02, 0x03, 0x04, 0x05,
        0x06, 0x07, 0x08, 0x09, 0x0a, 0x0b, 0xff, 0xc4, 0x00, 0xb5, 0x11, 0x00, 0x02, 0x01,
        0x02, 0x04, 0x04, 0x03, 0x04, 0x07, 0x05, 0x04, 0x04, 0x00, 0x01, 0x02, 0x77, 0x00,
        0x01, 0x02, 0x03, 0x11, 0x04, 0x05, 0x21, 0x31, 0x06, 0x12, 0x41, 0x51, 0x07, 0x61,
        0x71, 0x13, 0x22, 0x32, 0x81, 0x08, 0x14, 0x42, 0x91, 0xa1, 0xb1, 0xc1, 0x09, 0x23,
        0x33, 0x52, 0xf0, 0x15, 0x62, 0x72, 0xd1, 0x0a, 0x16, 0x24, 0x34, 0xe1, 0x25, 0xf1,
        0x17, 0x18, 0x19, 0x1a, 0x26, 0x27, 0x28, 0x29, 0x2a, 0x35, 0x36, 0x37, 0x38, 0x39,
        0x3a, 0x43, 0x44, 0x45, 0x46, 0x47, 0x48, 0x49, 0x4a, 0x53, 0x54, 0x55, 0x56, 0x57,
        0x58, 0x59, 0x5a, 0x63, 0x64, 0x65, 0x66, 0x67, 0x68, 0x69, 0x6a, 0x73, 0x74, 0x75,
        0x76, 0x77, 0x78, 0x79, 0x7a, 0x82, 0x83, 0x84, 0x85, 0x86, 0x87, 0x88, 0x89, 0x8a,
        0x92, 0x93, 0x94, 0x95, 0x96, 0x97, 0x98, 0x99, 0x9a, 0xa2, 0xa3, 0xa4, 0xa5, 0xa6,
        0xa7, 0xa8, 0xa9, 0xaa, 0xb2, 0xb3, 0xb4, 0xb5, 0xb6, 0xb7, 0xb8, 0xb9, 0xba, 0xc2,
        0xc3, 0xc4, 0xc5, 0xc6, 0xc7, 0xc8, 0xc9, 0xca, 0xd2, 0xd3, 0xd4, 0xd5, 0xd6, 0xd7,
        0xd8, 0xd9, 0xda, 0xe2, 0xe3, 0xe4, 0xe5, 0xe6, 0xe7, 0xe8, 0xe9, 0xea, 0xf2, 0xf3,
        0xf4, 0xf5, 0xf6, 0xf7, 0xf8, 0xf9, 0xfa, 0xff, 0xda, 0x00, 0x0c, 0x03, 0x01, 0x00,
        0x02, 0x11, 0x03, 0x11, 0x00, 0x3f, 0x00, 0x28, 0xa2, 0x8a, 0xf7, 0x0f, 0x1c, 0xff,
        0xd9};
    return bytes;
}

Manifest make_capsule_manifest(bool with_split0, bool with_split1) {
    Manifest m;
    std::size_t serial = 0;
    for (const CapsuleClassCount& cc : kCapsuleCounts) {
        for (int split = 0; split < 2; ++split) {
            if (split == 0 && !with_split0) continue;
            if (split == 1 && !with_split1) continue;
            const std::size_t images = split == 0 ? cc.images_split0 : cc.images_split1;
            const std::size_t bboxes = split == 0 ? cc.bboxes_split0 : cc.bboxes_split1;
            for (std::size_t i = 0; i < images; ++i) {
                Sample s;
                s.id = "s" + std::to_string(serial++);
                s.path = "images/" + std::string(cc.label) + "/" + s.id + ".png";
                s.label = cc.label;
                // a few dozen samples per synthetic patient
                s.patient_id = std::string(cc.label) + "-v" + std::to_string(split) + "-" +
                               std::to_string(i / 64);
                s.split = split == 0 ? "split0" : "split1";
                if (i < bboxes) s.bbox = BBox{5, 5, 8, 8};
                m.samples.push_back(std::move(s));
            }
        }
    }
    m.rebuild_class_names();
    return m;
}

std::vector<std::pair<std::string, std::size_t>> capsule_counts(bool split1) {
    std::vector<std::pair<std::string, std::size_t>> out;
    for (const CapsuleClassCount& cc : kCapsuleCounts)
        out.emplace_back(cc.label, split1 ? cc.images_split1 : cc.images_split0);
    return out;
}

ImageBuffer random_lattice_image(int width, int height, std::uint64_t seed) {
    ImageBuffer img(width, height);
    Rng rng(seed);
    for (float& v : img.data())
        v = static_cast<float>(rng.uniform_index(256)) / 255.0f;
    return img;
}

ImageBuffer random_image(int width, int height, std::uint64_t seed) {
    ImageBuffer img(width, height);
    Rng rng(seed);
    for (float& v : img.data())
        v = static_cast<float>(rng.next_u64() >> 11) * 0x1.0p-53f;
    return img;
}

namespace {

ImageBuffer toy_background(int size, int variant) {
    ImageBuffer img(size, size);
    const float shade = 0.35f + 0.04f * static_cast<float>(variant % 8);
    for (int y = 0; y < size; ++y) {
        for (int x = 0; x < size; ++x) {
            const float gx = static_cast<float>(x) / static_cast<float>(size);
            const float gy = static_cast<float>(y) / static_cast<float>(size);
            img.at(x, y, 0) = std::min(1.0f, shade + 0.25f * gx);
            img.at(x, y, 1) = std::min(1.0f, shade * 0.6f + 0.20f * gy);
            img.at(x, y, 2) = std::min(1.0f, shade * 0.4f + 0.10f * gx * gy);
        }
    }
    return img;
}

void paint_lesion(ImageBuffer& img, const BBox& b, int variant) {
    const float cx = b.x + b.w / 2.0f;
    const float cy = b.y + b.h / 2.0f;
    const float radius = std::min(b.w, b.h) / 2.5f;
    for (int y = b.y; y < b.y + b.h; ++y) {
        for (int x = b.x; x < b.x + b.w; ++x) {
            const float d = std::hypot(x - cx, y - cy);
            if (d > radius) continue;
            const float t = 1.0f - d / radius;
            img.at(x, y, 0) = std::min(1.0f, 0.55f + 0.05f * (variant % 4) + 0.2f * t);
            img.at(x, y, 1) = 0.10f * t;
            img.at(x, y, 2) = 0.08f * t;
        }
    }
}

}  // namespace

ToyDataset make_toy_dataset(const fs::path& dir, int lesions, int normals, int image_size) {
    ToyDataset out;
    out.dir = dir;
    out.manifest_path = dir / "manifest.jsonl";
    out.embeddings_path = dir / "embeddings.bin";
    out.lesion_bbox = BBox{image_size / 3, image_size / 3, image_size / 4, image_size / 4};
    fs::create_directories(dir / "images" / "lesion");
    fs::create_directories(dir / "images" / "normal");

    Manifest m;
    EmbeddingTable table;
    table.dim = 4;
    table.count = static_cast<std::size_t>(lesions + normals);
    table.values.assign(table.dim * table.count, 0.0f);

    for (int i = 0; i < lesions; ++i) {
        Sample s;
        s.id = "lesion-" + std::to_string(i);
        s.path = "images/lesion/" + s.id + ".png";
        s.label = "lesion";
        s.patient_id = "pL" + std::to_string(i);
        s.split = "train";
        s.bbox = out.lesion_bbox;
        s.embedding_index = static_cast<std::size_t>(i);
        // nearest normal is i % normals, at distance 1
        table.values[static_cast<std::size_t>(i) * 4] =
            static_cast<float>((i % normals) * 1000 + 1);

        ImageBuffer img = toy_background(image_size, i + 3);
        paint_lesion(img, *s.bbox, i);
        encode_png(img, dir / s.path);
        m.samples.push_back(std::move(s));
    }
    for (int j = 0; j < normals; ++j) {
        Sample s;
        s.id = "normal-" + std::to_string(j);
        s.path = "images/normal/" + s.id + ".png";
        s.label = "normal";
        s.patient_id = "pN" + std::to_string(j);
        s.split = "train";
        s.embedding_index = static_cast<std::size_t>(lesions + j);
        table.values[static_cast<std::size_t>(lesions + j) * 4] =
            static_cast<float>(j * 1000);

        encode_png(toy_background(image_size, j), dir / s.path);
        m.samples.push_back(std::move(s));
    }

    m.rebuild_class_names();
    save_manifest(m, out.manifest_path);
    save_embeddings(table, out.embeddings_path);
    return out;
}

void make_toy_inventory(const fs::path& dir, const std::string& label, int count,
                        int image_size) {
    fs::create_directories(dir / "files");
    Manifest m;
    for (int i = 0; i < count; ++i) {
        Sample s;
        s.id = "inv-" + label + "-" + std::to_string(i);
        s.path = "files/" + s.id + ".png";
        s.label = label;
        s.patient_id = "pI" + std::to_string(i);
        s.split = "train";
        s.origin = Origin::iida;
        ImageBuffer img = toy_background(image_size, i + 11);
        paint_lesion(img, BBox{image_size / 2, image_size / 4, image_size / 5, image_size / 5},
                     i);
        encode_png(img, dir / s.path);
        m.samples.push_back(std::move(s));
    }
    m.rebuild_class_names();
    save_manifest(m, dir / "manifest.jsonl");
}

}  // namespace pbda::testing
