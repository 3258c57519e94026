#pragma once

#include <cctype>
#include <cmath>
#include <csetjmp>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <png.h>

#include "hvs/core.hpp"

namespace hvs {

namespace detail {

// PGM header token reader: skips whitespace and '#' comments.
inline std::string pnm_token(std::istream& is) {
    std::string tok;
    int c;
    while ((c = is.get()) != EOF) {
        if (c == '#') {
            while ((c = is.get()) != EOF && c != '\n') {
            }
            continue;
        }
        if (!std::isspace(c)) {
            tok.push_back(static_cast<char>(c));
            break;
        }
    }
    while ((c = is.get()) != EOF && !std::isspace(c) && c != '#') tok.push_back(static_cast<char>(c));
    if (c == '#') is.unget();
    if (tok.empty()) throw Error("pgm: truncated header");
    return tok;
}

inline std::uint32_t pnm_uint(std::istream& is, const char* what) {
    const std::string tok = pnm_token(is);
    std::uint64_t v = 0;
    for (const char ch : tok) {
        if (ch < '0' || ch > '9') throw Error(std::string("pgm: malformed ") + what);
        v = v * 10 + static_cast<std::uint64_t>(ch - '0');
        if (v > 0xffffffffull) throw Error(std::string("pgm: ") + what + " out of range");
    }
    return static_cast<std::uint32_t>(v);
}

}  // namespace detail

/// Binary PGM (P5), maxval 255.
inline Frame read_pgm(std::istream& is) {
    char magic[2] = {0, 0};
    is.read(magic, 2);
    if (!is || magic[0] != 'P' || magic[1] != '5') throw Error("pgm: not a P5 file");
    const std::uint32_t w = detail::pnm_uint(is, "width");
    const std::uint32_t h = detail::pnm_uint(is, "height");
    const std::uint32_t maxval = detail::pnm_uint(is, "maxval");
    if (w == 0 || h == 0) throw Error("pgm: zero dimensions");
    if (maxval == 0 || maxval > 255) throw Error("pgm: unsupported maxval");
    // The single whitespace after maxval was consumed by the token reader.
    std::vector<Sample> samples(static_cast<std::size_t>(w) * h);
    is.read(reinterpret_cast<char*>(samples.data()), static_cast<std::streamsize>(samples.size()));
    if (static_cast<std::size_t>(is.gcount()) != samples.size()) throw Error("pgm: truncated sample data");
    return Frame(w, h, std::move(samples));
}

inline Frame read_pgm(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open " + path.string());
    return read_pgm(f);
}

inline void write_pgm(const Frame& frame, std::ostream& os) {
    os << "P5\n" << frame.width << " " << frame.height << "\n255\n";
    os.write(reinterpret_cast<const char*>(frame.samples.data()),
             static_cast<std::streamsize>(frame.samples.size()));
}

inline void write_pgm(const Frame& frame, const std::filesystem::path& path) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open " + path.string() + " for writing");
    write_pgm(frame, f);
    if (!f) throw Error("write failed for " + path.string());
}

/// PNG input via libpng; color is converted to luma with
/// round(0.299 R + 0.587 G + 0.114 B).
inline Frame read_png(const std::filesystem::path& path) {
    std::FILE* fp = std::fopen(path.string().c_str(), "rb");
    if (!fp) throw Error("cannot open " + path.string());

    png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
    png_infop info = png ? png_create_info_struct(png) : nullptr;
    if (!png || !info) {
        if (png) png_destroy_read_struct(&png, &info, nullptr);
        std::fclose(fp);
        throw Error("png: initialization failed");
    }
    if (setjmp(png_jmpbuf(png))) {
        png_destroy_read_struct(&png, &info, nullptr);
        std::fclose(fp);
        throw Error("png: decode failed for " + path.string());
    }
    png_init_io(png, fp);
    png_read_info(png, info);

    const png_uint_32 w = png_get_image_width(png, info);
    const png_uint_32 h = png_get_image_height(png, info);
    const int color = png_get_color_type(png, info);
    const int depth = png_get_bit_depth(png, info);

    if (depth == 16) png_set_strip_16(png);
    if (color == PNG_COLOR_TYPE_PALETTE) png_set_palette_to_rgb(png);
    if (color == PNG_COLOR_TYPE_GRAY && depth < 8) png_set_expand_gray_1_2_4_to_8(png);
    if (png_get_valid(png, info, PNG_INFO_tRNS)) png_set_tRNS_to_alpha(png);
    png_set_strip_alpha(png);
    png_read_update_info(png, info);

    const std::size_t rowbytes = png_get_rowbytes(png, info);
    const std::size_t channels = png_get_channels(png, info);
    std::vector<std::uint8_t> data(rowbytes * h);
    std::vector<png_bytep> rows(h);
    for (png_uint_32 y = 0; y < h; ++y) rows[y] = data.data() + y * rowbytes;
    png_read_image(png, rows.data());
    png_destroy_read_struct(&png, &info, nullptr);
    std::fclose(fp);

    Frame out(w, h);
    if (channels == 1) {
        for (png_uint_32 y = 0; y < h; ++y)
            for (png_uint_32 x = 0; x < w; ++x) out.at(x, y) = data[y * rowbytes + x];
    } else if (channels == 3) {
        for (png_uint_32 y = 0; y < h; ++y)
            for (png_uint_32 x = 0; x < w; ++x) {
                const std::uint8_t* px = &data[y * rowbytes + 3 * x];
                const double luma = 0.299 * px[0] + 0.587 * px[1] + 0.114 * px[2];
                out.at(x, y) = static_cast<Sample>(std::lround(luma));
            }
    } else {
        throw Error("png: unsupported channel layout");
    }
    return out;
}

/// Dispatches on file magic: PGM P5 or PNG.
inline Frame read_image(const std::filesystem::path& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error("cannot open " + path.string());
    char magic[2] = {0, 0};
    f.read(magic, 2);
    f.close();
    if (magic[0] == 'P' && magic[1] == '5') return read_pgm(path);
    if (static_cast<unsigned char>(magic[0]) == 0x89 && magic[1] == 'P') return read_png(path);
    throw Error("unsupported image format: " + path.string());
}

}  // namespace hvs
