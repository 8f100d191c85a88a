// Datagram framing: WireFrame layout with CRC32 payload integrity, shared by
// the UDP link and its tests.
#ifndef SCAIT_WIRE_HPP
#define SCAIT_WIRE_HPP

#include <array>
#include <cstdint>
#include <span>
#include <string>

#include "scait/common.hpp"

namespace scait::wire {

// IEEE CRC-32 (reflected, poly 0xEDB88320, init and final xor 0xFFFFFFFF).
inline std::uint32_t crc32(std::span<const std::uint8_t> data) {
    static const std::array<std::uint32_t, 256> table = [] {
        std::array<std::uint32_t, 256> t{};
        for (std::uint32_t i = 0; i < 256; ++i) {
            std::uint32_t c = i;
            for (int k = 0; k < 8; ++k) c = (c & 1) ? 0xEDB88320u ^ (c >> 1) : c >> 1;
            t[i] = c;
        }
        return t;
    }();
    std::uint32_t crc = 0xFFFFFFFFu;
    for (std::uint8_t b : data) crc = table[(crc ^ b) & 0xFFu] ^ (crc >> 8);
    return crc ^ 0xFFFFFFFFu;
}

enum class FrameType : std::uint8_t { KbSync = 1, Semantic = 2, Image = 3, Ack = 4 };

inline constexpr std::uint32_t kMagic = 0x53434149;  // "SCAI"
inline constexpr std::uint8_t kVersion = 1;
inline constexpr std::size_t kOverheadBytes = 16;  // header 12 + crc 4
inline constexpr std::size_t kMaxPayload = 65507 - kOverheadBytes;

struct WireFrame {
    FrameType frame_type = FrameType::Ack;
    std::uint16_t task_id = 0;
    byte_vec payload;
};

// Integrity failure distinct from structural parse errors: the frame arrived
// but its payload bits did not.
struct CrcError : FormatError {
    explicit CrcError(const std::string& msg) : FormatError(msg) {}
};

inline byte_vec encode_wire(const WireFrame& f) {
    if (f.payload.size() > kMaxPayload)
        throw std::invalid_argument("wire: payload " + std::to_string(f.payload.size()) +
                                    " exceeds single-datagram limit");
    std::uint8_t type = static_cast<std::uint8_t>(f.frame_type);
    if (type < 1 || type > 4) throw std::invalid_argument("wire: bad frame type");
    ByteWriter w;
    w.u32(kMagic);
    w.u8(kVersion);
    w.u8(type);
    w.u16(f.task_id);
    w.u32(static_cast<std::uint32_t>(f.payload.size()));
    w.bytes(f.payload);
    w.u32(crc32(f.payload));
    return w.take();
}

inline WireFrame decode_wire(std::span<const std::uint8_t> bytes) {
    ByteReader r(bytes, "wire frame");
    if (r.u32() != kMagic) throw FormatError("wire frame: bad magic");
    std::uint8_t version = r.u8();
    if (version != kVersion) throw FormatError("wire frame: unsupported version " + std::to_string(version));
    std::uint8_t type = r.u8();
    if (type < 1 || type > 4) throw FormatError("wire frame: unknown frame type " + std::to_string(type));
    WireFrame f;
    f.frame_type = static_cast<FrameType>(type);
    f.task_id = r.u16();
    std::size_t len = r.u32();
    if (len > kMaxPayload) throw FormatError("wire frame: payload length exceeds datagram limit");
    f.payload = r.bytes(len);
    std::uint32_t got = r.u32();
    if (!r.done()) throw FormatError("wire frame: trailing bytes");
    std::uint32_t want = crc32(f.payload);
    if (got != want) throw CrcError("wire frame: crc mismatch (got " + hex64(got) + ", want " + hex64(want) + ")");
    return f;
}

}  // namespace scait::wire

#endif  // SCAIT_WIRE_HPP
