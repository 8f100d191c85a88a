// Baseline image codec: 8x8 orthonormal DCT-II, quality-scaled quantization,
// zigzag scan, run-length + order-0 Exp-Golomb entropy coding. Bitstreams ride
// the same technical layer as semantic frames; corrupted blocks decode to
// mid-gray so bit errors degrade the image instead of aborting.
#ifndef SCAIT_IMAGE_CODEC_HPP
#define SCAIT_IMAGE_CODEC_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "scait/common.hpp"
#include "scait/image.hpp"

namespace scait::codec {

// ---------------------------------------------------------------------------
// Orthonormal 2-D DCT-II on 8x8 blocks: F = C f C^T with
// C[u][x] = a(u) cos((2x+1) u pi / 16), a(0) = sqrt(1/8), a(u>0) = 1/2.

namespace detail {

inline const std::array<std::array<double, 8>, 8>& dct_basis() {
    static const std::array<std::array<double, 8>, 8> basis = [] {
        std::array<std::array<double, 8>, 8> b{};
        const double pi = std::acos(-1.0);
        for (int u = 0; u < 8; ++u) {
            double a = u == 0 ? std::sqrt(1.0 / 8.0) : 0.5;
            for (int x = 0; x < 8; ++x) b[u][x] = a * std::cos((2 * x + 1) * u * pi / 16.0);
        }
        return b;
    }();
    return basis;
}

}  // namespace detail

using Block = std::array<double, 64>;  // row-major 8x8

inline Block dct8x8(const Block& f) {
    const auto& c = detail::dct_basis();
    Block tmp{}, out{};
    // rows first: tmp[x][v] = sum_y f[x][y] c[v][y]
    for (int x = 0; x < 8; ++x)
        for (int v = 0; v < 8; ++v) {
            double s = 0.0;
            for (int y = 0; y < 8; ++y) s += f[x * 8 + y] * c[v][y];
            tmp[x * 8 + v] = s;
        }
    for (int u = 0; u < 8; ++u)
        for (int v = 0; v < 8; ++v) {
            double s = 0.0;
            for (int x = 0; x < 8; ++x) s += c[u][x] * tmp[x * 8 + v];
            out[u * 8 + v] = s;
        }
    return out;
}

inline Block idct8x8(const Block& F) {
    const auto& c = detail::dct_basis();
    Block tmp{}, out{};
    for (int u = 0; u < 8; ++u)
        for (int y = 0; y < 8; ++y) {
            double s = 0.0;
            for (int v = 0; v < 8; ++v) s += F[u * 8 + v] * c[v][y];
            tmp[u * 8 + y] = s;
        }
    for (int x = 0; x < 8; ++x)
        for (int y = 0; y < 8; ++y) {
            double s = 0.0;
            for (int u = 0; u < 8; ++u) s += c[u][x] * tmp[u * 8 + y];
            out[x * 8 + y] = s;
        }
    return out;
}

// ---------------------------------------------------------------------------
// Zigzag scan (anti-diagonal walk starting (0,0),(0,1),(1,0),...).

namespace detail {

inline const std::array<int, 64>& zigzag_table() {
    static const std::array<int, 64> table = [] {
        std::array<int, 64> t{};
        int pos = 0;
        for (int s = 0; s <= 14; ++s) {
            int y_lo = std::max(0, s - 7), y_hi = std::min(7, s);
            if (s % 2 == 0) {
                for (int y = y_hi; y >= y_lo; --y) t[pos++] = y * 8 + (s - y);
            } else {
                for (int y = y_lo; y <= y_hi; ++y) t[pos++] = y * 8 + (s - y);
            }
        }
        return t;
    }();
    return table;
}

}  // namespace detail

inline std::array<double, 64> zigzag(const Block& coeffs) {
    const auto& t = detail::zigzag_table();
    std::array<double, 64> out{};
    for (int i = 0; i < 64; ++i) out[i] = coeffs[static_cast<std::size_t>(t[i])];
    return out;
}

inline Block unzigzag(const std::array<double, 64>& seq) {
    const auto& t = detail::zigzag_table();
    Block out{};
    for (int i = 0; i < 64; ++i) out[static_cast<std::size_t>(t[i])] = seq[i];
    return out;
}

// ---------------------------------------------------------------------------
// Quantization tables. Qbase is the conventional 8x8 luminance matrix (also
// reproduced in the README); scale follows the usual quality mapping.

inline const std::array<int, 64>& base_quant_matrix() {
    static const std::array<int, 64> q = {16, 11, 10, 16, 24,  40,  51,  61,  12, 12, 14, 19, 26,  58,  60,  55,
                                          14, 13, 16, 24, 40,  57,  69,  56,  14, 17, 22, 29, 51,  87,  80,  62,
                                          18, 22, 37, 56, 68,  109, 103, 77,  24, 35, 55, 64, 81,  104, 113, 92,
                                          49, 64, 78, 87, 103, 121, 120, 101, 72, 92, 95, 98, 112, 100, 103, 99};
    return q;
}

inline std::array<int, 64> quant_matrix(int quality) {
    if (quality < 1 || quality > 100) throw std::invalid_argument("quality must be in [1,100]");
    double scale = (quality < 50 ? 5000.0 / quality : 200.0 - 2.0 * quality) / 100.0;
    const auto& base = base_quant_matrix();
    std::array<int, 64> q{};
    for (int i = 0; i < 64; ++i)
        q[i] = static_cast<int>(clamp(round_half_away(base[i] * scale), 1.0, 255.0));
    return q;
}

// ---------------------------------------------------------------------------
// Order-0 Exp-Golomb entropy coding of (zero-run, level) pairs.
// Unsigned n: floor(log2(n+1)) zeros, then n+1 in binary. Signed levels map
// n -> (n <= 0 ? -2n : 2n-1). End of block: run code 63 + level code 0; a
// block whose last nonzero level sits at position 63 carries no EOB.

namespace detail {

using BitVec = std::vector<std::uint8_t>;

inline void put_expgolomb(BitVec& bits, std::uint32_t n) {
    std::uint64_t m = static_cast<std::uint64_t>(n) + 1;
    int len = 0;
    for (std::uint64_t t = m; t > 1; t >>= 1) ++len;  // floor(log2 m)
    for (int i = 0; i < len; ++i) bits.push_back(0);
    for (int i = len; i >= 0; --i) bits.push_back(static_cast<std::uint8_t>((m >> i) & 1));
}

struct BitCursor {
    std::span<const std::uint8_t> bits;
    std::size_t pos = 0;
    bool ok = true;

    std::optional<std::uint32_t> get_expgolomb() {
        int zeros = 0;
        while (true) {
            if (pos >= bits.size()) return std::nullopt;
            if (bits[pos++]) break;
            if (++zeros > 31) return std::nullopt;  // implausible magnitude: corrupt
        }
        std::uint64_t m = 1;
        for (int i = 0; i < zeros; ++i) {
            if (pos >= bits.size()) return std::nullopt;
            m = (m << 1) | (bits[pos++] & 1);
        }
        return static_cast<std::uint32_t>(m - 1);
    }
};

inline std::uint32_t signed_to_code(int n) {
    return n <= 0 ? static_cast<std::uint32_t>(-2 * static_cast<std::int64_t>(n))
                  : static_cast<std::uint32_t>(2 * static_cast<std::int64_t>(n) - 1);
}

inline int code_to_signed(std::uint32_t c) {
    return (c % 2 == 0) ? -static_cast<int>(c / 2) : static_cast<int>((c + 1) / 2);
}

}  // namespace detail

inline std::vector<std::uint8_t> entropy_encode(const std::array<int, 64>& levels) {
    detail::BitVec bits;
    int run = 0;
    int last_written = -1;
    for (int i = 0; i < 64; ++i) {
        if (levels[i] == 0) {
            ++run;
            continue;
        }
        detail::put_expgolomb(bits, static_cast<std::uint32_t>(run));
        detail::put_expgolomb(bits, detail::signed_to_code(levels[i]));
        run = 0;
        last_written = i;
    }
    if (last_written != 63) {
        detail::put_expgolomb(bits, 63);  // EOB marker
        detail::put_expgolomb(bits, 0);
    }
    return bits;
}

// Returns nullopt when the bit sequence is malformed (the caller renders the
// block mid-gray).
inline std::optional<std::array<int, 64>> entropy_decode(std::span<const std::uint8_t> bits) {
    std::array<int, 64> levels{};
    detail::BitCursor cur{bits};
    int pos = 0;
    while (pos < 64) {
        auto run = cur.get_expgolomb();
        if (!run) return std::nullopt;
        auto code = cur.get_expgolomb();
        if (!code) return std::nullopt;
        if (*run == 63 && *code == 0) return levels;  // EOB: rest stays zero
        if (*code == 0) return std::nullopt;          // zero level outside EOB
        pos += static_cast<int>(*run);
        if (pos > 63) return std::nullopt;
        levels[static_cast<std::size_t>(pos)] = detail::code_to_signed(*code);
        ++pos;
    }
    return levels;  // last nonzero at position 63: no EOB follows
}

// ---------------------------------------------------------------------------
// Whole-image codec.

struct BlockStream {
    int width = 0;
    int height = 0;
    int quality = 0;
    std::vector<std::vector<std::uint8_t>> blocks;  // coded bits per block, raster order

    int blocks_x() const { return (width + 7) / 8; }
    int blocks_y() const { return (height + 7) / 8; }
};

namespace detail {

// Edge-replicated 8x8 block extraction, level-shifted to [-127.5, 127.5].
inline Block fetch_block(const Image& img, int by, int bx) {
    Block f{};
    for (int y = 0; y < 8; ++y) {
        int sy = std::min(by * 8 + y, img.height - 1);
        for (int x = 0; x < 8; ++x) {
            int sx = std::min(bx * 8 + x, img.width - 1);
            f[y * 8 + x] = 255.0 * img.at(sy, sx) - 127.5;
        }
    }
    return f;
}

}  // namespace detail

inline BlockStream encode_image(const Image& img, int quality) {
    std::array<int, 64> qm = quant_matrix(quality);
    BlockStream bs;
    bs.width = img.width;
    bs.height = img.height;
    bs.quality = quality;
    for (int by = 0; by < bs.blocks_y(); ++by) {
        for (int bx = 0; bx < bs.blocks_x(); ++bx) {
            Block f = detail::fetch_block(img, by, bx);
            Block F = dct8x8(f);
            std::array<double, 64> seq = zigzag(F);
            std::array<int, 64> levels{};
            for (int i = 0; i < 64; ++i) levels[i] = static_cast<int>(round_half_away(seq[i] / qm[i]));
            bs.blocks.push_back(entropy_encode(levels));
        }
    }
    return bs;
}

inline Image decode_image(const BlockStream& bs) {
    if (bs.width < 1 || bs.height < 1) throw FormatError("block stream: bad dimensions");
    std::array<int, 64> qm = quant_matrix(bs.quality);
    Image img;
    img.width = bs.width;
    img.height = bs.height;
    img.pixels.assign(static_cast<std::size_t>(bs.width) * bs.height, 0.0);
    for (int by = 0; by < bs.blocks_y(); ++by) {
        for (int bx = 0; bx < bs.blocks_x(); ++bx) {
            const auto& bits = bs.blocks[static_cast<std::size_t>(by) * bs.blocks_x() + bx];
            auto levels = entropy_decode(bits);
            Block pix{};
            if (levels) {
                std::array<double, 64> seq{};
                for (int i = 0; i < 64; ++i) seq[i] = static_cast<double>((*levels)[i]) * qm[i];
                pix = idct8x8(unzigzag(seq));
                for (double& v : pix) v = clamp(round_half_away(v + 127.5), 0.0, 255.0) / 255.0;
            } else {
                pix.fill(0.5);  // corrupted block renders mid-gray
            }
            for (int y = 0; y < 8; ++y) {
                int dy = by * 8 + y;
                if (dy >= bs.height) break;
                for (int x = 0; x < 8; ++x) {
                    int dx = bx * 8 + x;
                    if (dx >= bs.width) break;
                    img.pixels[static_cast<std::size_t>(dy) * bs.width + dx] = pix[y * 8 + x];
                }
            }
        }
    }
    return img;
}

// ---------------------------------------------------------------------------
// Serialization: magic "SCIM", w u16, h u16, quality u8, block count u16,
// then per block a u16 bit length followed by the bits packed MSB-first and
// zero-padded to a byte boundary. The per-block prefixes give resync points.

inline byte_vec serialize_blockstream(const BlockStream& bs) {
    if (bs.width < 1 || bs.width > 65535 || bs.height < 1 || bs.height > 65535)
        throw std::invalid_argument("block stream: bad dimensions");
    std::size_t expected = static_cast<std::size_t>(bs.blocks_x()) * bs.blocks_y();
    if (bs.blocks.size() != expected || expected > 65535)
        throw std::invalid_argument("block stream: bad block count");
    ByteWriter w;
    w.str("SCIM");
    w.u16(static_cast<std::uint16_t>(bs.width));
    w.u16(static_cast<std::uint16_t>(bs.height));
    w.u8(static_cast<std::uint8_t>(bs.quality));
    w.u16(static_cast<std::uint16_t>(bs.blocks.size()));
    for (const auto& bits : bs.blocks) {
        if (bits.size() > 65535) throw std::invalid_argument("block stream: block exceeds 65535 bits");
        w.u16(static_cast<std::uint16_t>(bits.size()));
        std::uint8_t acc = 0;
        int nb = 0;
        for (std::uint8_t b : bits) {
            acc = static_cast<std::uint8_t>((acc << 1) | (b & 1));
            if (++nb == 8) {
                w.u8(acc);
                acc = 0;
                nb = 0;
            }
        }
        if (nb) w.u8(static_cast<std::uint8_t>(acc << (8 - nb)));
    }
    return w.take();
}

inline BlockStream parse_blockstream(std::span<const std::uint8_t> bytes) {
    ByteReader r(bytes, "block stream");
    if (r.str(4) != "SCIM") throw FormatError("block stream: bad magic");
    BlockStream bs;
    bs.width = r.u16();
    bs.height = r.u16();
    bs.quality = r.u8();
    std::size_t count = r.u16();
    if (bs.width < 1 || bs.height < 1) throw FormatError("block stream: bad dimensions");
    if (bs.quality < 1 || bs.quality > 100) throw FormatError("block stream: bad quality");
    if (count != static_cast<std::size_t>(bs.blocks_x()) * bs.blocks_y())
        throw FormatError("block stream: block count mismatch");
    for (std::size_t i = 0; i < count; ++i) {
        std::size_t nbits = r.u16();
        byte_vec packed = r.bytes((nbits + 7) / 8);
        std::vector<std::uint8_t> bits(nbits);
        for (std::size_t j = 0; j < nbits; ++j) bits[j] = (packed[j / 8] >> (7 - j % 8)) & 1;
        bs.blocks.push_back(std::move(bits));
    }
    if (!r.done()) throw FormatError("block stream: trailing bytes");
    return bs;
}

// Byte ranges of the serialized stream holding coded block bits. The header
// and the per-block length prefixes are link-protected structure.
inline std::vector<std::pair<std::size_t, std::size_t>> payload_byte_ranges(const BlockStream& bs) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    std::size_t off = 11;  // magic 4 + w 2 + h 2 + quality 1 + count 2
    for (const auto& bits : bs.blocks) {
        std::size_t nbytes = (bits.size() + 7) / 8;
        out.emplace_back(off + 2, nbytes);
        off += 2 + nbytes;
    }
    return out;
}

// ---------------------------------------------------------------------------

inline double psnr(const Image& a, const Image& b) {
    if (a.width != b.width || a.height != b.height) throw std::invalid_argument("psnr: dimension mismatch");
    double mse = 0.0;
    for (std::size_t i = 0; i < a.pixels.size(); ++i) {
        double d = a.pixels[i] - b.pixels[i];
        mse += d * d;
    }
    mse /= static_cast<double>(a.pixels.size());
    if (mse == 0.0) return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(1.0 / mse);
}

}  // namespace scait::codec

#endif  // SCAIT_IMAGE_CODEC_HPP
