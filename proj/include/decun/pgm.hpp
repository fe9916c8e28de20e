#pragma once

#include <cctype>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <string>
#include <vector>

#include "decun/image.hpp"

namespace decun {

namespace detail {

// Skips PGM whitespace and '#' comment lines, then reads one ASCII integer.
inline int read_pnm_int(std::istream& in, const std::string& path) {
    int ch = in.get();
    while (ch != EOF) {
        if (ch == '#') {
            while (ch != EOF && ch != '\n') ch = in.get();
        } else if (!std::isspace(ch)) {
            break;
        }
        ch = in.get();
    }
    if (ch == EOF) throw FormatError("load_image: truncated header in " + path);
    int value = 0;
    bool any = false;
    while (ch != EOF && std::isdigit(ch)) {
        value = value * 10 + (ch - '0');
        any = true;
        ch = in.get();
    }
    if (!any) throw FormatError("load_image: malformed header token in " + path);
    return value;
}

inline bool has_suffix(const std::string& s, const std::string& suffix) {
    return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

} // namespace detail

/// Loads a binary grayscale PGM (P5, maxval 255); samples map to [0,1] by
/// division by 255.
inline ImageGrid load_image(const std::string& path) {
    if (!detail::has_suffix(path, ".pgm"))
        throw FormatError("load_image: unsupported format (grayscale .pgm required): " + path);
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("load_image: cannot open " + path);
    char magic[2] = {0, 0};
    in.read(magic, 2);
    if (!in || magic[0] != 'P' || magic[1] != '5')
        throw FormatError("load_image: not a binary PGM (P5): " + path);
    const int width = detail::read_pnm_int(in, path);
    const int height = detail::read_pnm_int(in, path);
    const int maxval = detail::read_pnm_int(in, path);
    if (maxval != 255) throw FormatError("load_image: only maxval 255 supported, got " + std::to_string(maxval));
    if (height < 1 || width < 1) throw FormatError("load_image: bad dimensions in " + path);
    std::vector<unsigned char> raw(static_cast<std::size_t>(height) * static_cast<std::size_t>(width));
    in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (static_cast<std::size_t>(in.gcount()) != raw.size())
        throw FormatError("load_image: truncated pixel data in " + path);
    ImageGrid g(height, width);
    for (std::size_t i = 0; i < raw.size(); ++i) g.data[i] = raw[i] / 255.0;
    return g;
}

/// Stores a grid as binary PGM; samples are clamped to [0,1] then quantized to
/// 8 bits by round(v*255).
inline void store_image(const ImageGrid& grid, const std::string& path) {
    if (!detail::has_suffix(path, ".pgm"))
        throw FormatError("store_image: unsupported format (grayscale .pgm required): " + path);
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("store_image: cannot open " + path);
    out << "P5\n" << grid.width << " " << grid.height << "\n255\n";
    std::vector<unsigned char> raw(grid.data.size());
    for (std::size_t i = 0; i < grid.data.size(); ++i) {
        double v = grid.data[i];
        if (v < 0.0) v = 0.0;
        if (v > 1.0) v = 1.0;
        raw[i] = static_cast<unsigned char>(std::lround(v * 255.0));
    }
    out.write(reinterpret_cast<const char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
    if (!out) throw IoError("store_image: write failed for " + path);
}

} // namespace decun
