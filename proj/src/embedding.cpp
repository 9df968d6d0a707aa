#include "pbda/embedding.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "pbda/errors.hpp"

namespace pbda {

namespace {

constexpr char kMagic[4] = {'E', 'M', 'B', '1'};

// The float payload is read/written natively; the format is little-endian.
static_assert(std::endian::native == std::endian::little);

std::uint32_t read_u32_le(const unsigned char* p) {
    return std::uint32_t(p[0]) | std::uint32_t(p[1]) << 8 |
           std::uint32_t(p[2]) << 16 | std::uint32_t(p[3]) << 24;
}

void write_u32_le(std::ostream& out, std::uint32_t v) {
    const unsigned char bytes[4] = {
        static_cast<unsigned char>(v), static_cast<unsigned char>(v >> 8),
        static_cast<unsigned char>(v >> 16), static_cast<unsigned char>(v >> 24)};
    out.write(reinterpret_cast<const char*>(bytes), 4);
}

}  // namespace

EmbeddingTable load_embeddings(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open embedding file " + path.string());

    unsigned char header[12];
    in.read(reinterpret_cast<char*>(header), sizeof header);
    if (in.gcount() != sizeof header || std::memcmp(header, kMagic, 4) != 0)
        throw ValidationError(path.string() + ": bad magic, not an EMB1 file");

    EmbeddingTable table;
    table.dim = read_u32_le(header + 4);
    table.count = read_u32_le(header + 8);
    if (table.dim == 0 || table.count == 0)
        throw ValidationError(path.string() + ": zero dimension or row count");

    const std::size_t expected = table.dim * table.count;
    table.values.resize(expected);
    in.read(reinterpret_cast<char*>(table.values.data()),
            static_cast<std::streamsize>(expected * sizeof(float)));
    const std::size_t got = static_cast<std::size_t>(in.gcount()) / sizeof(float);
    if (got != expected || in.gcount() % sizeof(float) != 0)
        throw ValidationError(path.string() + ": truncated payload, expected " +
                              std::to_string(expected * sizeof(float)) +
                              " bytes of data, got " + std::to_string(in.gcount()));

    for (std::size_t i = 0; i < expected; ++i) {
        if (!std::isfinite(table.values[i]))
            throw ValidationError(path.string() + ": non-finite value at element " +
                                  std::to_string(i));
    }
    return table;
}

void save_embeddings(const EmbeddingTable& table, const std::filesystem::path& path) {
    if (table.dim == 0 || table.count == 0)
        throw ValidationError("refusing to write an empty embedding table");
    if (table.values.size() != table.dim * table.count)
        throw ValidationError("embedding table shape does not match its payload");

    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw PipelineError("cannot write embedding file " + path.string());
    out.write(kMagic, 4);
    write_u32_le(out, static_cast<std::uint32_t>(table.dim));
    write_u32_le(out, static_cast<std::uint32_t>(table.count));
    out.write(reinterpret_cast<const char*>(table.values.data()),
              static_cast<std::streamsize>(table.values.size() * sizeof(float)));
    if (!out) throw PipelineError("short write on embedding file " + path.string());
}

}  // namespace pbda
