#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "pbda/image.hpp"

namespace pbda {

// Decode PNG or JPEG (sniffed from the leading bytes) to an RGB float image;
// 8-bit channel value v maps to v/255.
ImageBuffer decode_image(const std::filesystem::path& path);
ImageBuffer decode_image_bytes(std::span<const std::uint8_t> bytes);

// Encode as 8-bit RGB PNG. Intensities quantize with round-half-up to the
// nearest 8-bit value, clamped to [0,255].
void encode_png(const ImageBuffer& image, const std::filesystem::path& path);
std::vector<std::uint8_t> encode_png_bytes(const ImageBuffer& image);

}  // namespace pbda
