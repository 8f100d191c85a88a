// Grayscale image in [0,1] with binary PGM (P5, maxval 255) input/output.
#ifndef SCAIT_IMAGE_HPP
#define SCAIT_IMAGE_HPP

#include <cctype>
#include <cstdint>
#include <string>
#include <vector>

#include "scait/common.hpp"

namespace scait {

// Intensities live on the k/255 grid: images are stored and ingested as
// 8-bit and normalized on load.
struct Image {
    int width = 0;
    int height = 0;
    std::vector<double> pixels;  // row-major, size width*height

    Image() = default;
    Image(int w, int h) : width(w), height(h), pixels(static_cast<std::size_t>(w) * h, 0.0) {}

    double& at(int y, int x) { return pixels[static_cast<std::size_t>(y) * width + x]; }
    double at(int y, int x) const { return pixels[static_cast<std::size_t>(y) * width + x]; }

    bool operator==(const Image& o) const = default;
};

inline std::uint8_t to_byte(double v) {
    return static_cast<std::uint8_t>(clamp(round_half_away(v * 255.0), 0.0, 255.0));
}

// Snap an intensity to the 8-bit grid.
inline double quantize_intensity(double v) { return to_byte(v) / 255.0; }

inline byte_vec encode_pgm(const Image& img) {
    ByteWriter w;
    std::string header = "P5\n" + std::to_string(img.width) + " " + std::to_string(img.height) + "\n255\n";
    w.str(header);
    for (double p : img.pixels) w.u8(to_byte(p));
    return w.take();
}

namespace detail {

// Reads one whitespace-delimited PGM header token, skipping '#' comments.
inline std::string pgm_token(const byte_vec& data, std::size_t& pos, const std::string& name) {
    while (pos < data.size()) {
        if (std::isspace(data[pos])) {
            ++pos;
        } else if (data[pos] == '#') {
            while (pos < data.size() && data[pos] != '\n') ++pos;
        } else {
            break;
        }
    }
    std::size_t start = pos;
    while (pos < data.size() && !std::isspace(data[pos]) && data[pos] != '#') ++pos;
    if (pos == start) throw FormatError(name + ": truncated PGM header");
    return std::string(reinterpret_cast<const char*>(data.data() + start), pos - start);
}

inline int pgm_int(const byte_vec& data, std::size_t& pos, const std::string& name) {
    std::string tok = pgm_token(data, pos, name);
    for (char c : tok)
        if (!std::isdigit(static_cast<unsigned char>(c)))
            throw FormatError(name + ": non-numeric PGM header field '" + tok + "'");
    return std::stoi(tok);
}

}  // namespace detail

inline Image decode_pgm(const byte_vec& data, const std::string& name) {
    std::size_t pos = 0;
    std::string magic = detail::pgm_token(data, pos, name);
    if (magic != "P5") throw FormatError(name + ": not a binary PGM (magic '" + magic + "', expected P5)");
    int w = detail::pgm_int(data, pos, name);
    int h = detail::pgm_int(data, pos, name);
    int maxval = detail::pgm_int(data, pos, name);
    if (w <= 0 || h <= 0) throw FormatError(name + ": bad PGM dimensions");
    if (maxval != 255) throw FormatError(name + ": unsupported maxval " + std::to_string(maxval) + " (only 255)");
    if (pos >= data.size() || !std::isspace(data[pos]))
        throw FormatError(name + ": missing whitespace after PGM header");
    ++pos;  // exactly one whitespace byte separates header and raster
    std::size_t need = static_cast<std::size_t>(w) * h;
    if (data.size() - pos < need)
        throw FormatError(name + ": PGM raster truncated (" + std::to_string(data.size() - pos) + " of " +
                          std::to_string(need) + " bytes)");
    Image img(w, h);
    for (std::size_t i = 0; i < need; ++i) img.pixels[i] = data[pos + i] / 255.0;
    return img;
}

inline void save_pgm(const Image& img, const std::string& path) { write_file(path, encode_pgm(img)); }

inline Image load_pgm(const std::string& path) { return decode_pgm(read_file(path), path); }

}  // namespace scait

#endif  // SCAIT_IMAGE_HPP
