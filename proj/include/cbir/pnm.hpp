#ifndef CBIR_PNM_HPP
#define CBIR_PNM_HPP

#include <fstream>
#include <string>

#include "cbir/errors.hpp"
#include "cbir/raster.hpp"

namespace cbir {

namespace detail {

// Skips whitespace and '#' comment lines, then reads one ASCII integer.
inline int pnm_read_int(std::istream& in) {
    int c = in.peek();
    while (c == '#' || std::isspace(c)) {
        if (c == '#') {
            std::string line;
            std::getline(in, line);
        } else {
            in.get();
        }
        c = in.peek();
    }
    int value = -1;
    in >> value;
    if (!in)
        throw input_error("pnm: truncated header");
    return value;
}

} // namespace detail

/**
 * Reads a portable anymap image. Supports the binary forms P5 (gray) and
 * P6 (RGB) plus their ASCII counterparts P2 and P3, with maxval <= 255.
 */
inline RasterImage read_pnm(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw input_error("pnm: cannot open " + path);

    char p = 0, digit = 0;
    in.get(p);
    in.get(digit);
    if (p != 'P' || (digit != '2' && digit != '3' && digit != '5' && digit != '6'))
        throw input_error("pnm: unsupported magic in " + path);

    const bool ascii = (digit == '2' || digit == '3');
    const int channels = (digit == '3' || digit == '6') ? 3 : 1;

    int width = detail::pnm_read_int(in);
    int height = detail::pnm_read_int(in);
    int maxval = detail::pnm_read_int(in);
    if (width <= 0 || height <= 0 || maxval <= 0 || maxval > 255)
        throw input_error("pnm: bad dimensions or maxval in " + path);

    RasterImage img = RasterImage::make(width, height, channels);
    const std::size_t count = img.pixels.size();

    if (ascii) {
        for (std::size_t i = 0; i < count; ++i) {
            int v = detail::pnm_read_int(in);
            if (v < 0 || v > maxval)
                throw input_error("pnm: sample out of range in " + path);
            img.pixels[i] = static_cast<std::uint8_t>(v);
        }
    } else {
        in.get(); // single whitespace byte after maxval
        in.read(reinterpret_cast<char*>(img.pixels.data()),
                static_cast<std::streamsize>(count));
        if (static_cast<std::size_t>(in.gcount()) != count)
            throw input_error("pnm: truncated pixel data in " + path);
    }
    return img;
}

inline void write_pnm(const RasterImage& img, const std::string& path) {
    if (img.empty())
        throw input_error("pnm: refusing to write empty image");
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw input_error("pnm: cannot open " + path + " for writing");
    out << (img.channels == 3 ? "P6" : "P5") << "\n"
        << img.width << " " << img.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.pixels.data()),
              static_cast<std::streamsize>(img.pixels.size()));
    if (!out)
        throw input_error("pnm: write failed for " + path);
}

} // namespace cbir

#endif // CBIR_PNM_HPP
