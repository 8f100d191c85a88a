// Semantic level: KB-driven feature-map selection, per-map 8-bit quantization,
// SemanticFrame serialization with receiver-side zero-fill, the random
// selection baseline, and the analog perturbation used for noise-aware
// training.
#ifndef SCAIT_SEMANTIC_HPP
#define SCAIT_SEMANTIC_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

#include "scait/common.hpp"
#include "scait/kb.hpp"
#include "scait/rng.hpp"
#include "scait/tensor.hpp"

namespace scait::sem {

// cr is the fraction of maps DISCARDED; at least one map is always kept.
inline int keep_count(double cr, int K) {
    if (!(cr >= 0.0 && cr < 1.0)) throw std::invalid_argument("compression ratio must be in [0,1)");
    if (K < 1) throw std::invalid_argument("keep_count: K must be >= 1");
    double kept = round_half_away((1.0 - cr) * K);
    return static_cast<int>(clamp(kept, 1.0, static_cast<double>(K)));
}

// Top n_keep entries of the ranking, reported in ascending index order.
inline std::vector<int> select_maps(const kb::MapRanking& ranking, double cr, int K) {
    if (static_cast<int>(ranking.order.size()) != K)
        throw std::invalid_argument("select_maps: ranking does not cover K maps");
    int n = keep_count(cr, K);
    std::vector<int> out(ranking.order.begin(), ranking.order.begin() + n);
    std::sort(out.begin(), out.end());
    return out;
}

// Uniform sample of n_keep map indices without replacement.
inline std::vector<int> random_select(int K, double cr, std::uint64_t seed) {
    int n = keep_count(cr, K);
    std::vector<int> idx(static_cast<std::size_t>(K));
    std::iota(idx.begin(), idx.end(), 0);
    Rng rng(seed);
    for (int i = 0; i < n; ++i) {
        std::size_t j = static_cast<std::size_t>(i) + rng.below(static_cast<std::uint64_t>(K - i));
        std::swap(idx[static_cast<std::size_t>(i)], idx[j]);
    }
    idx.resize(static_cast<std::size_t>(n));
    std::sort(idx.begin(), idx.end());
    return idx;
}

// ---------------------------------------------------------------------------
// Quantization. Range endpoints are stored as f32 (their wire precision) and
// rounded outward so every input value stays inside [vmin, vmax].

struct QuantizedMap {
    std::uint16_t map_index = 0;
    float vmin = 0.0f;
    float vmax = 0.0f;
    std::vector<std::uint8_t> codes;  // h*w values
};

inline QuantizedMap quantize_map(std::span<const double> values) {
    QuantizedMap q;
    q.codes.resize(values.size());
    double lo = values.empty() ? 0.0 : values[0];
    double hi = lo;
    for (double v : values) {
        if (!std::isfinite(v)) throw std::invalid_argument("quantize_map: non-finite value");
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    float flo = static_cast<float>(lo);
    if (static_cast<double>(flo) > lo) flo = std::nextafterf(flo, -std::numeric_limits<float>::infinity());
    float fhi = static_cast<float>(hi);
    if (static_cast<double>(fhi) < hi) fhi = std::nextafterf(fhi, std::numeric_limits<float>::infinity());
    q.vmin = flo;
    q.vmax = fhi;
    if (flo == fhi) return q;  // constant map: all codes zero
    double range = static_cast<double>(fhi) - static_cast<double>(flo);
    for (std::size_t i = 0; i < values.size(); ++i) {
        double code = round_half_away(255.0 * (values[i] - static_cast<double>(flo)) / range);
        q.codes[i] = static_cast<std::uint8_t>(clamp(code, 0.0, 255.0));
    }
    return q;
}

inline std::vector<double> dequantize_map(const QuantizedMap& q) {
    std::vector<double> out(q.codes.size());
    double lo = static_cast<double>(q.vmin);
    double step = (static_cast<double>(q.vmax) - lo) / 255.0;
    for (std::size_t i = 0; i < q.codes.size(); ++i) out[i] = lo + static_cast<double>(q.codes[i]) * step;
    return out;
}

// ---------------------------------------------------------------------------
// SemanticFrame: the semantic-level payload.

struct SemanticFrame {
    std::uint16_t K = 0;
    std::uint8_t map_h = 0;
    std::uint8_t map_w = 0;
    std::vector<QuantizedMap> maps;  // sorted by map_index ascending
};

inline SemanticFrame encode_frame(const Tensor& feature_maps, const std::vector<int>& indices) {
    if (feature_maps.shape.size() != 3) throw std::invalid_argument("encode_frame: expected K x h x w tensor");
    std::size_t K = feature_maps.shape[0], h = feature_maps.shape[1], w = feature_maps.shape[2];
    if (K > 65535 || h > 255 || w > 255) throw std::invalid_argument("encode_frame: dimensions exceed frame limits");
    if (indices.empty()) throw std::invalid_argument("encode_frame: no selected maps");
    for (std::size_t i = 0; i < indices.size(); ++i) {
        if (indices[i] < 0 || static_cast<std::size_t>(indices[i]) >= K)
            throw std::invalid_argument("encode_frame: map index out of range");
        if (i > 0 && indices[i] <= indices[i - 1])
            throw std::invalid_argument("encode_frame: indices must be strictly increasing");
    }
    SemanticFrame f;
    f.K = static_cast<std::uint16_t>(K);
    f.map_h = static_cast<std::uint8_t>(h);
    f.map_w = static_cast<std::uint8_t>(w);
    for (int idx : indices) {
        std::span<const double> vals(feature_maps.ptr() + static_cast<std::size_t>(idx) * h * w, h * w);
        QuantizedMap q = quantize_map(vals);
        q.map_index = static_cast<std::uint16_t>(idx);
        f.maps.push_back(std::move(q));
    }
    return f;
}

// Dequantized values at transmitted indices, exact zeros elsewhere.
inline Tensor decode_frame(const SemanticFrame& f) {
    if (f.maps.empty()) throw std::invalid_argument("decode_frame: frame has no maps");
    std::size_t h = f.map_h, w = f.map_w;
    Tensor out({static_cast<std::size_t>(f.K), h, w});
    for (const auto& q : f.maps) {
        if (q.map_index >= f.K) throw std::invalid_argument("decode_frame: map index out of range");
        if (q.codes.size() != h * w) throw std::invalid_argument("decode_frame: map size mismatch");
        std::vector<double> vals = dequantize_map(q);
        std::copy(vals.begin(), vals.end(), out.data.begin() + static_cast<std::ptrdiff_t>(q.map_index * h * w));
    }
    return out;
}

// Wire layout: K u16, n_keep u16, map_h u8, map_w u8, pad u16 = 0, then per
// map: index u16, vmin f32, vmax f32, h*w code bytes. Little-endian.
inline constexpr std::size_t kFrameHeaderBytes = 8;
inline constexpr std::size_t kMapHeaderBytes = 10;

inline std::size_t frame_byte_size(std::size_t n_keep, std::size_t map_h, std::size_t map_w) {
    return kFrameHeaderBytes + n_keep * (kMapHeaderBytes + map_h * map_w);
}

inline byte_vec serialize_frame(const SemanticFrame& f) {
    ByteWriter w;
    w.u16(f.K);
    w.u16(static_cast<std::uint16_t>(f.maps.size()));
    w.u8(f.map_h);
    w.u8(f.map_w);
    w.u16(0);
    for (const auto& q : f.maps) {
        w.u16(q.map_index);
        w.f32(q.vmin);
        w.f32(q.vmax);
        w.bytes(q.codes);
    }
    return w.take();
}

inline SemanticFrame parse_frame(std::span<const std::uint8_t> bytes) {
    ByteReader r(bytes, "semantic frame");
    SemanticFrame f;
    f.K = r.u16();
    std::size_t n_keep = r.u16();
    f.map_h = r.u8();
    f.map_w = r.u8();
    std::uint16_t pad = r.u16();
    if (pad != 0) throw FormatError("semantic frame: nonzero pad field");
    if (n_keep < 1) throw FormatError("semantic frame: n_keep must be >= 1");
    if (n_keep > f.K) throw FormatError("semantic frame: n_keep exceeds K");
    if (f.map_h == 0 || f.map_w == 0) throw FormatError("semantic frame: empty map geometry");
    std::size_t px = static_cast<std::size_t>(f.map_h) * f.map_w;
    int prev = -1;
    for (std::size_t i = 0; i < n_keep; ++i) {
        QuantizedMap q;
        q.map_index = r.u16();
        q.vmin = r.f32();
        q.vmax = r.f32();
        if (q.map_index >= f.K) throw FormatError("semantic frame: map index out of range");
        if (static_cast<int>(q.map_index) <= prev) throw FormatError("semantic frame: map indices not increasing");
        if (!(q.vmin <= q.vmax) || !std::isfinite(q.vmin) || !std::isfinite(q.vmax))
            throw FormatError("semantic frame: bad quantization range");
        prev = q.map_index;
        q.codes = r.bytes(px);
        f.maps.push_back(std::move(q));
    }
    if (!r.done()) throw FormatError("semantic frame: trailing bytes");
    return f;
}

// Byte ranges of the serialized frame that carry quantized values. Structure
// fields (frame header, per-map index and range) are link-protected; only
// these ranges are exposed to channel impairment in simulation.
inline std::vector<std::pair<std::size_t, std::size_t>> code_byte_ranges(const SemanticFrame& f) {
    std::vector<std::pair<std::size_t, std::size_t>> out;
    std::size_t px = static_cast<std::size_t>(f.map_h) * f.map_w;
    std::size_t off = kFrameHeaderBytes;
    for (std::size_t i = 0; i < f.maps.size(); ++i) {
        out.emplace_back(off + kMapHeaderBytes, px);
        off += kMapHeaderBytes + px;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Analog perturbation for noise-aware training: SNR-scaled Gaussian noise
// where signal power is the mean square of the tensor entries.

inline Tensor analog_perturb(const Tensor& t, double snr_db, std::uint64_t seed) {
    if (!t.all_finite()) throw std::invalid_argument("analog_perturb: non-finite input");
    Tensor out = t;
    double p = mean_square(t);
    if (p == 0.0) return out;
    double sigma = std::sqrt(p * std::pow(10.0, -snr_db / 10.0));
    Rng rng(seed);
    for (double& v : out.data) v += sigma * rng.normal();
    return out;
}

}  // namespace scait::sem

#endif  // SCAIT_SEMANTIC_HPP
