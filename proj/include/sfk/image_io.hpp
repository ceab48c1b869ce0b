#pragma once

#include <png.h>

#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <memory>
#include <string>
#include <vector>

#include <jpeglib.h>

#include "sfk/error.hpp"
#include "sfk/image.hpp"

namespace sfk {

namespace detail {

inline std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline Image8 decode_png(const std::vector<std::uint8_t>& bytes, const std::string& name) {
    png_image image;
    std::memset(&image, 0, sizeof image);
    image.version = PNG_IMAGE_VERSION;
    if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size()))
        throw IoError("cannot decode PNG " + name + ": " + image.message);
    const bool color = (image.format & PNG_FORMAT_FLAG_COLOR) != 0;
    image.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
    Image8 out;
    out.height = image.height;
    out.width = image.width;
    out.channels = color ? 3 : 1;
    out.data.resize(PNG_IMAGE_SIZE(image));
    if (!png_image_finish_read(&image, nullptr, out.data.data(), 0, nullptr)) {
        std::string msg = image.message;
        png_image_free(&image);
        throw IoError("cannot decode PNG " + name + ": " + msg);
    }
    return out;
}

struct JpegErrorManager {
    jpeg_error_mgr base;
    std::jmp_buf jump;
    char message[JMSG_LENGTH_MAX];
};

inline void jpeg_error_exit(j_common_ptr cinfo) {
    auto* err = reinterpret_cast<JpegErrorManager*>(cinfo->err);
    (*cinfo->err->format_message)(cinfo, err->message);
    std::longjmp(err->jump, 1);
}

// Decodes into `out`; returns false with `err.message` set on failure.
// No objects with non-trivial destructors live across the setjmp.
inline bool decode_jpeg_raw(const std::vector<std::uint8_t>& bytes, Image8& out, JpegErrorManager& err) {
    jpeg_decompress_struct cinfo;
    cinfo.err = jpeg_std_error(&err.base);
    err.base.error_exit = jpeg_error_exit;
    if (setjmp(err.jump)) {
        jpeg_destroy_decompress(&cinfo);
        return false;
    }
    jpeg_create_decompress(&cinfo);
    jpeg_mem_src(&cinfo, bytes.data(), static_cast<unsigned long>(bytes.size()));
    jpeg_read_header(&cinfo, TRUE);
    cinfo.out_color_space = cinfo.num_components == 1 ? JCS_GRAYSCALE : JCS_RGB;
    jpeg_start_decompress(&cinfo);
    out.height = cinfo.output_height;
    out.width = cinfo.output_width;
    out.channels = static_cast<std::size_t>(cinfo.output_components);
    out.data.resize(out.height * out.width * out.channels);
    const std::size_t stride = out.width * out.channels;
    while (cinfo.output_scanline < cinfo.output_height) {
        JSAMPROW row = out.data.data() + cinfo.output_scanline * stride;
        jpeg_read_scanlines(&cinfo, &row, 1);
    }
    jpeg_finish_decompress(&cinfo);
    jpeg_destroy_decompress(&cinfo);
    return true;
}

inline Image8 decode_jpeg(const std::vector<std::uint8_t>& bytes, const std::string& name) {
    Image8 out;
    JpegErrorManager err{};
    if (!decode_jpeg_raw(bytes, out, err))
        throw IoError("cannot decode JPEG " + name + ": " + err.message);
    return out;
}

} // namespace detail

/// Reads an 8-bit PNG or JPEG, dispatching on the file signature.
inline Image8 read_image(const std::filesystem::path& path) {
    const auto bytes = detail::read_file_bytes(path);
    static constexpr std::uint8_t png_sig[8] = {0x89, 'P', 'N', 'G', 0x0D, 0x0A, 0x1A, 0x0A};
    if (bytes.size() >= 8 && std::memcmp(bytes.data(), png_sig, 8) == 0)
        return detail::decode_png(bytes, path.string());
    if (bytes.size() >= 3 && bytes[0] == 0xFF && bytes[1] == 0xD8 && bytes[2] == 0xFF)
        return detail::decode_jpeg(bytes, path.string());
    throw IoError("unsupported image format: " + path.string());
}

/// Writes a 1- or 3-channel 8-bit PNG. Output bytes depend only on the pixels.
inline void write_png(const std::filesystem::path& path, const Image8& img) {
    if (img.channels != 1 && img.channels != 3)
        throw DimensionError("PNG writer supports 1 or 3 channels");
    if (img.data.size() != img.height * img.width * img.channels)
        throw DimensionError("image buffer does not match dimensions");
    png_image image;
    std::memset(&image, 0, sizeof image);
    image.version = PNG_IMAGE_VERSION;
    image.width = static_cast<png_uint_32>(img.width);
    image.height = static_cast<png_uint_32>(img.height);
    image.format = img.channels == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
    if (!png_image_write_to_file(&image, path.string().c_str(), 0, img.data.data(), 0, nullptr))
        throw IoError("cannot write PNG " + path.string() + ": " + image.message);
}

} // namespace sfk
