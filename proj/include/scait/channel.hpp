// Technical level: byte/bit packing, Hamming(7,4) FEC, BPSK over a complex
// baseband, AWGN simulation, and the end-to-end transmit chain with BER
// measurement.
#ifndef SCAIT_CHANNEL_HPP
#define SCAIT_CHANNEL_HPP

#include <cmath>
#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include "scait/common.hpp"
#include "scait/rng.hpp"

namespace scait::ch {

struct Bitstream {
    std::vector<std::uint8_t> bits;  // one 0/1 value per entry
    std::size_t origin_len_bytes = 0;
};

// MSB-first within each byte.
inline Bitstream pack_bits(std::span<const std::uint8_t> bytes) {
    Bitstream s;
    s.origin_len_bytes = bytes.size();
    s.bits.reserve(bytes.size() * 8);
    for (std::uint8_t b : bytes)
        for (int i = 7; i >= 0; --i) s.bits.push_back(static_cast<std::uint8_t>((b >> i) & 1));
    return s;
}

inline byte_vec unpack_bits(const Bitstream& s) {
    if (s.bits.size() % 8 != 0)
        throw FormatError("unpack_bits: bit count " + std::to_string(s.bits.size()) + " is not a multiple of 8");
    byte_vec out(s.bits.size() / 8, 0);
    for (std::size_t i = 0; i < s.bits.size(); ++i)
        out[i / 8] = static_cast<std::uint8_t>((out[i / 8] << 1) | (s.bits[i] & 1));
    return out;
}

// ---------------------------------------------------------------------------
// Hamming(7,4). Codeword layout [p1 p2 d1 p3 d2 d3 d4]; the syndrome value is
// the 1-indexed position of a single flipped bit.

inline std::vector<std::uint8_t> hamming74_encode(std::span<const std::uint8_t> bits) {
    if (bits.size() % 4 != 0)
        throw FormatError("hamming74_encode: bit count " + std::to_string(bits.size()) + " is not a multiple of 4");
    std::vector<std::uint8_t> out;
    out.reserve(bits.size() / 4 * 7);
    for (std::size_t i = 0; i < bits.size(); i += 4) {
        std::uint8_t d1 = bits[i] & 1, d2 = bits[i + 1] & 1, d3 = bits[i + 2] & 1, d4 = bits[i + 3] & 1;
        std::uint8_t p1 = d1 ^ d2 ^ d4;
        std::uint8_t p2 = d1 ^ d3 ^ d4;
        std::uint8_t p3 = d2 ^ d3 ^ d4;
        out.push_back(p1);
        out.push_back(p2);
        out.push_back(d1);
        out.push_back(p3);
        out.push_back(d2);
        out.push_back(d3);
        out.push_back(d4);
    }
    return out;
}

inline std::vector<std::uint8_t> hamming74_decode(std::span<const std::uint8_t> bits) {
    if (bits.size() % 7 != 0)
        throw FormatError("hamming74_decode: bit count " + std::to_string(bits.size()) + " is not a multiple of 7");
    std::vector<std::uint8_t> out;
    out.reserve(bits.size() / 7 * 4);
    std::uint8_t c[7];
    for (std::size_t i = 0; i < bits.size(); i += 7) {
        for (int j = 0; j < 7; ++j) c[j] = bits[i + static_cast<std::size_t>(j)] & 1;
        std::uint8_t s1 = c[0] ^ c[2] ^ c[4] ^ c[6];
        std::uint8_t s2 = c[1] ^ c[2] ^ c[5] ^ c[6];
        std::uint8_t s3 = c[3] ^ c[4] ^ c[5] ^ c[6];
        int syndrome = s1 | (s2 << 1) | (s3 << 2);
        if (syndrome != 0) c[syndrome - 1] ^= 1;
        out.push_back(c[2]);
        out.push_back(c[4]);
        out.push_back(c[5]);
        out.push_back(c[6]);
    }
    return out;
}

// ---------------------------------------------------------------------------
// BPSK on the real axis of a complex baseband symbol: bit 0 -> +1, 1 -> -1.

using Symbol = std::complex<double>;

inline std::vector<Symbol> bpsk_modulate(std::span<const std::uint8_t> bits) {
    std::vector<Symbol> out;
    out.reserve(bits.size());
    for (std::uint8_t b : bits) out.emplace_back((b & 1) ? -1.0 : 1.0, 0.0);
    return out;
}

inline std::vector<std::uint8_t> bpsk_demodulate(std::span<const Symbol> symbols) {
    std::vector<std::uint8_t> out;
    out.reserve(symbols.size());
    // sign(0) decides for bit 0.
    for (const Symbol& s : symbols) out.push_back(s.real() < 0.0 ? 1 : 0);
    return out;
}

// Complex AWGN at Es/N0 = snr_db for unit-energy symbols: total noise power
// 10^(-snr_db/10), split evenly across the two quadratures.
inline std::vector<Symbol> awgn(std::span<const Symbol> symbols, double snr_db, std::uint64_t seed) {
    std::vector<Symbol> out(symbols.begin(), symbols.end());
    double n0 = std::pow(10.0, -snr_db / 10.0);
    double sigma_q = std::sqrt(n0 / 2.0);
    Rng rng(seed);
    for (Symbol& s : out) {
        double nr = rng.normal();
        double ni = rng.normal();
        s += Symbol(sigma_q * nr, sigma_q * ni);
    }
    return out;
}

// Gaussian right-tail probability; the closed-form BPSK BER oracle is
// q_function(sqrt(2 * 10^(snr_db/10))).
inline double q_function(double x) { return 0.5 * std::erfc(x / std::sqrt(2.0)); }

// ---------------------------------------------------------------------------
// End-to-end chain.

enum class Fec { None, Hamming74 };

inline double fec_expansion(Fec f) { return f == Fec::Hamming74 ? 7.0 / 4.0 : 1.0; }

struct ChannelConfig {
    double snr_db = 10.0;
    Fec fec = Fec::None;
    std::uint64_t seed = 1;
};

struct TransmitResult {
    byte_vec received;
    double measured_ber = 0.0;  // pre-FEC-decode, against the coded bits sent
};

inline TransmitResult transmit(std::span<const std::uint8_t> payload, const ChannelConfig& cfg) {
    TransmitResult res;
    if (payload.empty()) return res;
    Bitstream source = pack_bits(payload);
    std::vector<std::uint8_t> coded =
        cfg.fec == Fec::Hamming74 ? hamming74_encode(source.bits) : source.bits;
    std::vector<Symbol> sent = bpsk_modulate(coded);
    std::vector<Symbol> received = awgn(sent, cfg.snr_db, cfg.seed);
    std::vector<std::uint8_t> rx_bits = bpsk_demodulate(received);

    std::size_t flips = 0;
    for (std::size_t i = 0; i < coded.size(); ++i) flips += (rx_bits[i] != coded[i]);
    res.measured_ber = static_cast<double>(flips) / static_cast<double>(coded.size());

    std::vector<std::uint8_t> decoded = cfg.fec == Fec::Hamming74 ? hamming74_decode(rx_bits) : std::move(rx_bits);
    res.received = unpack_bits(Bitstream{std::move(decoded), source.origin_len_bytes});
    res.received.resize(source.origin_len_bytes);
    return res;
}

}  // namespace scait::ch

#endif  // SCAIT_CHANNEL_HPP
