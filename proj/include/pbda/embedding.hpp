#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

namespace pbda {

// Dense table of per-sample feature vectors, row-major f32.
struct EmbeddingTable {
    std::size_t dim = 0;
    std::size_t count = 0;
    std::vector<float> values;  // count * dim

    std::span<const float> row(std::size_t i) const {
        return {values.data() + i * dim, dim};
    }
};

// Binary format: magic "EMB1", u32 dim, u32 count, count*dim little-endian
// IEEE-754 f32. Load rejects bad magic, short payloads and non-finite values;
// save/load round-trips bit-exactly.
EmbeddingTable load_embeddings(const std::filesystem::path& path);
void save_embeddings(const EmbeddingTable& table, const std::filesystem::path& path);

}  // namespace pbda
