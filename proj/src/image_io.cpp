#include "pbda/image_io.hpp"

#include <algorithm>
#include <cmath>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <fstream>

#include <jpeglib.h>
#include <png.h>

#include "pbda/errors.hpp"

namespace pbda {

namespace {

std::vector<std::uint8_t> read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot open image " + path.string());
    std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                    std::istreambuf_iterator<char>());
    return bytes;
}

bool looks_png(std::span<const std::uint8_t> b) {
    static const std::uint8_t sig[8] = {0x89, 'P', 'N', 'G', '\r', '\n', 0x1a, '\n'};
    return b.size() >= 8 && std::memcmp(b.data(), sig, 8) == 0;
}

bool looks_jpeg(std::span<const std::uint8_t> b) {
    return b.size() >= 3 && b[0] == 0xff && b[1] == 0xd8 && b[2] == 0xff;
}

ImageBuffer from_rgb8(const std::vector<std::uint8_t>& rgb, int width, int height) {
    ImageBuffer img(width, height);
    const std::size_t n = rgb.size();
    for (std::size_t i = 0; i < n; ++i)
        img.data()[i] = static_cast<float>(rgb[i]) / 255.0f;
    return img;
}

// --- PNG ---------------------------------------------------------------

struct PngReadCursor {
    const std::uint8_t* data;
    std::size_t size;
    std::size_t pos;
};

void png_read_from_memory(png_structp png, png_bytep out, png_size_t len) {
    auto* cur = static_cast<PngReadCursor*>(png_get_io_ptr(png));
    if (cur->pos + len > cur->size)
        png_error(png, "unexpected end of PNG stream");
    std::memcpy(out, cur->data + cur->pos, len);
    cur->pos += len;
}

void png_append_to_vector(png_structp png, png_bytep data, png_size_t len) {
    auto* out = static_cast<std::vector<std::uint8_t>*>(png_get_io_ptr(png));
    out->insert(out->end(), data, data + len);
}

void png_flush_noop(png_structp) {}

// default handlers write to stderr; route errors through longjmp quietly
void png_error_quiet(png_structp png, png_const_charp msg) {
    auto* buffer = static_cast<std::string*>(png_get_error_ptr(png));
    if (buffer) *buffer = msg;
    png_longjmp(png, 1);
}

void png_warn_quiet(png_structp, png_const_charp) {}

ImageBuffer decode_png(std::span<const std::uint8_t> bytes) {
    std::string error_text;
    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, &error_text,
                                             png_error_quiet, png_warn_quiet);
    if (!png) throw PipelineError("libpng: read struct allocation failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_read_struct(&png, nullptr, nullptr);
        throw PipelineError("libpng: info struct allocation failed");
    }

    std::vector<std::uint8_t> rgb;
    std::vector<png_bytep> rows;
    int width = 0, height = 0;

    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw ValidationError("corrupt PNG data" +
                              (error_text.empty() ? "" : ": " + error_text));
    }

    PngReadCursor cursor{bytes.data(), bytes.size(), 0};
    png_set_read_fn(png, &cursor, png_read_from_memory);
    png_read_info(png, info);

    width = static_cast<int>(png_get_image_width(png, info));
    height = static_cast<int>(png_get_image_height(png, info));
    const int color = png_get_color_type(png, info);
    const int depth = png_get_bit_depth(png, info);

    // Normalize everything to 8-bit RGB.
    if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    if (depth == 16) png_set_strip_16(png);
    if (color == PNG_COLOR_TYPE_GRAY || color == PNG_COLOR_TYPE_GRAY_ALPHA)
        png_set_gray_to_rgb(png);
    png_set_strip_alpha(png);
    png_read_update_info(png, info);

    if (width <= 0 || height <= 0) {
        png_destroy_read_struct(&png, &info, nullptr);
        throw ValidationError("PNG with zero dimension");
    }

    rgb.resize(static_cast<std::size_t>(width) * height * 3);
    rows.resize(height);
    for (int y = 0; y < height; ++y)
        rows[y] = rgb.data() + static_cast<std::size_t>(y) * width * 3;
    png_read_image(png, rows.data());
    png_read_end(png, nullptr);
    png_destroy_read_struct(&png, &info, nullptr);

    return from_rgb8(rgb, width, height);
}

// --- JPEG --------------------------------------------------------------

struct JpegErrorTrap {
    jpeg_error_mgr mgr;
    std::jmp_buf jump;
    char message[JMSG_LENGTH_MAX];
};

void jpeg_error_trap(j_common_ptr cinfo) {
    auto* trap = reinterpret_cast<JpegErrorTrap*>(cinfo->err);
    (*cinfo->err->format_message)(cinfo, trap->message);
    std::longjmp(trap->jump, 1);
}

ImageBuffer decode_jpeg(std::span<const std::uint8_t> bytes) {
    jpeg_decompress_struct cinfo;
    JpegErrorTrap trap;
    cinfo.err = jpeg_std_error(&trap.mgr);
    trap.mgr.error_exit = jpeg_error_trap;

    std::vector<std::uint8_t> rgb;
    if (setjmp(trap.jump)) {
        jpeg_destroy_decompress(&cinfo);
        throw ValidationError(std::string("corrupt JPEG data: ") + trap.message);
    }

    jpeg_create_decompress(&cinfo);
    jpeg_mem_src(&cinfo, bytes.data(), static_cast<unsigned long>(bytes.size()));
    jpeg_read_header(&cinfo, TRUE);
    cinfo.out_color_space = JCS_RGB;
    jpeg_start_decompress(&cinfo);

    const int width = static_cast<int>(cinfo.output_width);
    const int height = static_cast<int>(cinfo.output_height);
    if (width <= 0 || height <= 0) {
        jpeg_destroy_decompress(&cinfo);
        throw ValidationError("JPEG with zero dimension");
    }

    rgb.resize(static_cast<std::size_t>(width) * height * 3);
    while (cinfo.output_scanline < cinfo.output_height) {
        JSAMPROW row = rgb.data() + static_cast<std::size_t>(cinfo.output_scanline) * width * 3;
        jpeg_read_scanlines(&cinfo, &row, 1);
    }
    jpeg_finish_decompress(&cinfo);
    jpeg_destroy_decompress(&cinfo);

    return from_rgb8(rgb, width, height);
}

}  // namespace

ImageBuffer decode_image_bytes(std::span<const std::uint8_t> bytes) {
    if (looks_png(bytes)) return decode_png(bytes);
    if (looks_jpeg(bytes)) return decode_jpeg(bytes);
    throw ValidationError("unsupported image format (expected PNG or JPEG)");
}

ImageBuffer decode_image(const std::filesystem::path& path) {
    const auto bytes = read_file(path);
    try {
        return decode_image_bytes(bytes);
    } catch (const ValidationError& e) {
        throw ValidationError(path.string() + ": " + e.what());
    }
}

std::vector<std::uint8_t> encode_png_bytes(const ImageBuffer& image) {
    if (image.width() <= 0 || image.height() <= 0)
        throw ValidationError("cannot encode an image with zero dimension");

    // Quantize: round half up, clamped.
    const int width = image.width(), height = image.height();
    std::vector<std::uint8_t> rgb(static_cast<std::size_t>(width) * height * 3);
    const auto& data = image.data();
    for (std::size_t i = 0; i < rgb.size(); ++i) {
        const float scaled = data[i] * 255.0f + 0.5f;
        const int q = static_cast<int>(std::floor(scaled));
        rgb[i] = static_cast<std::uint8_t>(std::clamp(q, 0, 255));
    }

    std::string error_text;
    png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, &error_text,
                                              png_error_quiet, png_warn_quiet);
    if (!png) throw PipelineError("libpng: write struct allocation failed");
    png_infop info = png_create_info_struct(png);
    if (!info) {
        png_destroy_write_struct(&png, nullptr);
        throw PipelineError("libpng: info struct allocation failed");
    }

    std::vector<std::uint8_t> out;
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_write_struct(&png, &info);
        throw PipelineError("libpng: encode failed");
    }

    png_set_write_fn(png, &out, png_append_to_vector, png_flush_noop);
    png_set_IHDR(png, info, width, height, 8, PNG_COLOR_TYPE_RGB,
                 PNG_INTERLACE_NONE, PNG_COMPRESSION_TYPE_DEFAULT,
                 PNG_FILTER_TYPE_DEFAULT);
    png_write_info(png, info);
    for (int y = 0; y < height; ++y) {
        png_write_row(png, const_cast<png_bytep>(
                               rgb.data() + static_cast<std::size_t>(y) * width * 3));
    }
    png_write_end(png, nullptr);
    png_destroy_write_struct(&png, &info);
    return out;
}

void encode_png(const ImageBuffer& image, const std::filesystem::path& path) {
    const auto bytes = encode_png_bytes(image);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw PipelineError("cannot write image " + path.string());
    out.write(reinterpret_cast<const char*>(bytes.data()),
              static_cast<std::streamsize>(bytes.size()));
    if (!out) throw PipelineError("short write on image " + path.string());
}

}  // namespace pbda
