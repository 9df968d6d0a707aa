#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "pbda/image.hpp"
#include "pbda/manifest.hpp"

namespace pbda::testing {

// Self-deleting scratch directory.
struct TempDir {
    std::filesystem::path path;
    explicit TempDir(const std::string& prefix);
    ~TempDir();
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
};

// Reference 1x1 PNG with pixel (255, 0, 128), written by an independent
// encoder (PIL).
std::span<const std::uint8_t> reference_png_1x1();

// Reference 4x3 JPEG, flat (120, 130, 140).
std::span<const std::uint8_t> reference_jpeg_4x3();

// Capsule-endoscopy class distribution used as an exact-arithmetic fixture.
struct CapsuleClassCount {
    const char* label;
    std::size_t images_split0;
    std::size_t images_split1;
    std::size_t bboxes_split0;
    std::size_t bboxes_split1;
};

inline constexpr CapsuleClassCount kCapsuleCounts[] = {
    {"normal", 20488, 19586, 0, 0},
    {"unclear-view", 1787, 1119, 0, 0},
    {"ulcer", 582, 272, 582, 272},
    {"blood-fresh", 424, 22, 424, 22},
    {"lymphangiectasia", 368, 224, 368, 224},
    {"foreign-body", 186, 590, 186, 590},
    {"erosion", 178, 345, 162, 345},
    {"angiectasia", 95, 771, 95, 771},
    {"erythema", 27, 132, 27, 90},
};

// Synthetic manifest mirroring the fixture counts; the first `bboxes` records
// of each class/split carry a bounding box.
Manifest make_capsule_manifest(bool with_split0, bool with_split1);

// (label, count) pairs for one split, in kCapsuleCounts order.
std::vector<std::pair<std::string, std::size_t>> capsule_counts(bool split1);

// Deterministic pseudo-random image with intensities on the k/255 lattice.
ImageBuffer random_lattice_image(int width, int height, std::uint64_t seed);

// Deterministic pseudo-random image with arbitrary float intensities in [0,1].
ImageBuffer random_image(int width, int height, std::uint64_t seed);

// Two-class dataset on disk: `lesions` bounding-boxed samples of class
// "lesion" plus `normals` samples of class "normal", PNG images, per-sample
// embeddings (dim 4) arranged so lesion i's nearest normal is i % normals.
// Every sample has its own patient id.
struct ToyDataset {
    std::filesystem::path dir;
    std::filesystem::path manifest_path;
    std::filesystem::path embeddings_path;
    BBox lesion_bbox;
};

ToyDataset make_toy_dataset(const std::filesystem::path& dir, int lesions, int normals,
                            int image_size = 32);

// Inventory of `count` pre-generated samples of `label` under dir/ with its
// own manifest.jsonl, as an inpainting stage would leave behind.
void make_toy_inventory(const std::filesystem::path& dir, const std::string& label, int count,
                        int image_size = 32);

}  // namespace pbda::testing
