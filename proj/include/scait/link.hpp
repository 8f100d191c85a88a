// UDP realization of the sensor-to-edge path: WireFrame datagrams with
// stop-and-wait acknowledgements, KB synchronization, seeded in-process
// channel impairment, and per-frame CSV logs.
#ifndef SCAIT_LINK_HPP
#define SCAIT_LINK_HPP

#include <arpa/inet.h>
#include <netinet/in.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <chrono>
#include <cstdint>
#include <cstring>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "scait/common.hpp"
#include "scait/harness.hpp"
#include "scait/kb.hpp"
#include "scait/nn.hpp"
#include "scait/semantic.hpp"
#include "scait/wire.hpp"

namespace scait::link {

// ---------------------------------------------------------------------------
// Socket plumbing (IPv4 literals only; the link is a loopback-scale tool).

inline sockaddr_in make_ipv4(const std::string& host, std::uint16_t port) {
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    if (inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1)
        throw IoError("bad IPv4 address '" + host + "'");
    return addr;
}

class UdpSocket {
  public:
    UdpSocket() : fd_(::socket(AF_INET, SOCK_DGRAM, 0)) {
        if (fd_ < 0) throw IoError(std::string("socket: ") + std::strerror(errno));
    }
    ~UdpSocket() {
        if (fd_ >= 0) ::close(fd_);
    }
    UdpSocket(const UdpSocket&) = delete;
    UdpSocket& operator=(const UdpSocket&) = delete;
    UdpSocket(UdpSocket&& o) noexcept : fd_(o.fd_) { o.fd_ = -1; }
    UdpSocket& operator=(UdpSocket&& o) noexcept {
        std::swap(fd_, o.fd_);
        return *this;
    }

    void bind_to(const std::string& host, std::uint16_t port) {
        sockaddr_in addr = make_ipv4(host, port);
        if (::bind(fd_, reinterpret_cast<const sockaddr*>(&addr), sizeof addr) != 0)
            throw IoError("bind " + host + ":" + std::to_string(port) + ": " + std::strerror(errno));
    }

    std::uint16_t local_port() const {
        sockaddr_in addr{};
        socklen_t len = sizeof addr;
        if (::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len) != 0)
            throw IoError(std::string("getsockname: ") + std::strerror(errno));
        return ntohs(addr.sin_port);
    }

    void set_recv_timeout_ms(int ms) {
        timeval tv{};
        tv.tv_sec = ms / 1000;
        tv.tv_usec = (ms % 1000) * 1000;
        if (::setsockopt(fd_, SOL_SOCKET, SO_RCVTIMEO, &tv, sizeof tv) != 0)
            throw IoError(std::string("setsockopt: ") + std::strerror(errno));
    }

    void send_to(const sockaddr_in& dest, std::span<const std::uint8_t> bytes) {
        ssize_t n = ::sendto(fd_, bytes.data(), bytes.size(), 0, reinterpret_cast<const sockaddr*>(&dest),
                             sizeof dest);
        if (n < 0 || static_cast<std::size_t>(n) != bytes.size())
            throw IoError(std::string("sendto: ") + std::strerror(errno));
    }

    // nullopt on timeout.
    std::optional<byte_vec> recv_from(sockaddr_in* from) {
        byte_vec buf(65536);
        socklen_t len = sizeof(sockaddr_in);
        sockaddr_in src{};
        ssize_t n = ::recvfrom(fd_, buf.data(), buf.size(), 0, reinterpret_cast<sockaddr*>(&src), &len);
        if (n < 0) {
            if (errno == EAGAIN || errno == EWOULDBLOCK || errno == EINTR) return std::nullopt;
            throw IoError(std::string("recvfrom: ") + std::strerror(errno));
        }
        if (from) *from = src;
        buf.resize(static_cast<std::size_t>(n));
        return buf;
    }

  private:
    int fd_;
};

// ---------------------------------------------------------------------------
// Logs.

inline const char* frame_type_name(wire::FrameType t) {
    switch (t) {
        case wire::FrameType::KbSync: return "kb_sync";
        case wire::FrameType::Semantic: return "semantic";
        case wire::FrameType::Image: return "image";
        case wire::FrameType::Ack: return "ack";
    }
    return "?";
}

struct RecvLogEntry {
    int seq = -1;  // -1 for KB_SYNC
    wire::FrameType frame_type = wire::FrameType::Ack;
    std::size_t bytes = 0;
    int predicted_class = -1;  // -1 when the frame carries no classification
    double latency_ms = 0.0;
};

struct SendLogEntry {
    int seq = -1;
    wire::FrameType frame_type = wire::FrameType::Ack;
    std::size_t bytes = 0;
    bool acked = false;
    int attempts = 0;
    double latency_ms = 0.0;
};

inline std::string recv_log_csv(const std::vector<RecvLogEntry>& log) {
    std::string out = "seq,frame_type,bytes,predicted_class,latency_ms\n";
    for (const auto& e : log) {
        char buf[128];
        std::snprintf(buf, sizeof buf, "%d,%s,%zu,%d,%.3f\n", e.seq, frame_type_name(e.frame_type), e.bytes,
                      e.predicted_class, e.latency_ms);
        out += buf;
    }
    return out;
}

inline std::string send_log_csv(const std::vector<SendLogEntry>& log) {
    std::string out = "seq,frame_type,bytes,acked,attempts,latency_ms\n";
    for (const auto& e : log) {
        char buf[128];
        std::snprintf(buf, sizeof buf, "%d,%s,%zu,%d,%d,%.3f\n", e.seq, frame_type_name(e.frame_type), e.bytes,
                      e.acked ? 1 : 0, e.attempts, e.latency_ms);
        out += buf;
    }
    return out;
}

// ---------------------------------------------------------------------------
// Receiver: validates frames, deduplicates by sequence number, classifies
// semantic and image payloads, ACKs every valid frame.

struct ReceiverConfig {
    std::string host = "127.0.0.1";
    std::uint16_t port = 0;        // 0 picks an ephemeral port (see Receiver::port)
    std::string kb_out_path;       // where KB_SYNC contents land; empty keeps them in memory
    int expected_data_frames = -1; // stop after this many unique data frames; -1 runs until idle
    int idle_timeout_ms = 2000;
};

class Receiver {
  public:
    explicit Receiver(const ReceiverConfig& cfg) : cfg_(cfg) {
        sock_.bind_to(cfg.host, cfg.port);
        sock_.set_recv_timeout_ms(cfg.idle_timeout_ms);
    }

    std::uint16_t port() const { return sock_.local_port(); }

    std::vector<RecvLogEntry> run(const nn::Model& model) {
        std::vector<RecvLogEntry> log;
        std::set<std::uint16_t> seen;
        int unique_data = 0;
        while (cfg_.expected_data_frames < 0 || unique_data < cfg_.expected_data_frames) {
            sockaddr_in from{};
            auto datagram = sock_.recv_from(&from);
            if (!datagram) break;  // idle timeout
            auto t0 = std::chrono::steady_clock::now();
            wire::WireFrame frame;
            try {
                frame = wire::decode_wire(*datagram);
            } catch (const wire::CrcError&) {
                continue;  // no ACK: the sender will retransmit
            } catch (const FormatError&) {
                continue;  // not ours
            }
            switch (frame.frame_type) {
                case wire::FrameType::KbSync: {
                    kb::KnowledgeBase k = kb::parse_kb(std::string(frame.payload.begin(), frame.payload.end()));
                    if (!cfg_.kb_out_path.empty()) kb::sync_kb(k, cfg_.kb_out_path);
                    send_ack(from, frame.task_id, {});
                    log.push_back({-1, frame.frame_type, datagram->size(), -1, elapsed_ms(t0)});
                    break;
                }
                case wire::FrameType::Semantic:
                case wire::FrameType::Image: {
                    if (frame.payload.size() < 2) break;  // malformed: drop silently
                    std::uint16_t seq =
                        static_cast<std::uint16_t>(frame.payload[0] | (frame.payload[1] << 8));
                    byte_vec ack_payload = {frame.payload[0], frame.payload[1]};
                    if (seen.count(seq)) {
                        send_ack(from, frame.task_id, ack_payload);  // duplicate: re-ACK, log once
                        break;
                    }
                    std::span<const std::uint8_t> body(frame.payload.data() + 2, frame.payload.size() - 2);
                    int pred;
                    if (frame.frame_type == wire::FrameType::Semantic) {
                        sem::SemanticFrame sf = sem::parse_frame(body);
                        Tensor cut = sem::decode_frame(sf);
                        pred = nn::predict(nn::forward_from_cut(model, cut));
                    } else {
                        codec::BlockStream bs = codec::parse_blockstream(body);
                        Image img = codec::decode_image(bs);
                        pred = nn::predict(nn::forward(model, img).logits);
                    }
                    seen.insert(seq);
                    ++unique_data;
                    send_ack(from, frame.task_id, ack_payload);
                    log.push_back({seq, frame.frame_type, datagram->size(), pred, elapsed_ms(t0)});
                    break;
                }
                case wire::FrameType::Ack:
                    break;  // receivers do not consume ACKs
            }
        }
        return log;
    }

  private:
    static double elapsed_ms(std::chrono::steady_clock::time_point t0) {
        return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    }

    void send_ack(const sockaddr_in& to, std::uint16_t task_id, byte_vec payload) {
        wire::WireFrame ack;
        ack.frame_type = wire::FrameType::Ack;
        ack.task_id = task_id;
        ack.payload = std::move(payload);
        sock_.send_to(to, wire::encode_wire(ack));
    }

    ReceiverConfig cfg_;
    UdpSocket sock_;
};

// ---------------------------------------------------------------------------
// Transmitter: KB sync first, then one data frame per image with stop-and-wait
// acknowledgement and seeded payload impairment applied before framing.

struct TransmitterConfig {
    std::string host = "127.0.0.1";
    std::uint16_t port = 0;
    std::uint16_t task_id = 1;
    harness::Scheme scheme = harness::Scheme::ScAit;
    double cr = 0.0;       // sc schemes
    int quality = 75;      // baseline scheme
    double snr_db = 100.0;
    ch::Fec fec = ch::Fec::None;
    std::uint64_t row_seed = 1;  // shared with the offline harness for path equivalence
    int timeout_ms = 500;
    int retries = 3;
};

inline std::vector<SendLogEntry> run_transmitter(const TransmitterConfig& cfg, const nn::Model& model,
                                                 const kb::KnowledgeBase& kbase,
                                                 std::span<const ds::LabeledExample> images) {
    if (cfg.scheme == harness::Scheme::ScAit && !kb::fingerprint_matches(kbase, model))
        throw std::runtime_error("transmitter: KB fingerprint does not match the loaded model; rebuild the KB");

    UdpSocket sock;
    sock.bind_to("0.0.0.0", 0);
    sock.set_recv_timeout_ms(cfg.timeout_ms);
    sockaddr_in dest = make_ipv4(cfg.host, cfg.port);

    std::vector<SendLogEntry> log;
    kb::MapRanking ranking = kb::rank_maps(kbase);

    // Sends one frame and waits for its ACK, retrying on timeout. An ACK
    // matches when its payload echoes `expect_echo` (empty expectation matches
    // an empty-payload ACK).
    auto send_with_ack = [&](const wire::WireFrame& frame, const byte_vec& expect_echo, int seq) {
        byte_vec bytes = wire::encode_wire(frame);
        SendLogEntry entry;
        entry.seq = seq;
        entry.frame_type = frame.frame_type;
        entry.bytes = bytes.size();
        auto t0 = std::chrono::steady_clock::now();
        for (int attempt = 0; attempt <= cfg.retries && !entry.acked; ++attempt) {
            entry.attempts = attempt + 1;
            sock.send_to(dest, bytes);
            auto deadline = std::chrono::steady_clock::now() + std::chrono::milliseconds(cfg.timeout_ms);
            while (std::chrono::steady_clock::now() < deadline) {
                auto reply = sock.recv_from(nullptr);
                if (!reply) break;  // socket timeout
                try {
                    wire::WireFrame ack = wire::decode_wire(*reply);
                    if (ack.frame_type == wire::FrameType::Ack && ack.payload == expect_echo) {
                        entry.acked = true;
                        break;
                    }
                } catch (const FormatError&) {
                    // stray or corrupt datagram while waiting: keep listening
                }
            }
        }
        entry.latency_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
        log.push_back(entry);
        return entry.acked;
    };

    wire::WireFrame kb_frame;
    kb_frame.frame_type = wire::FrameType::KbSync;
    kb_frame.task_id = cfg.task_id;
    std::string kb_text = kb::serialize_kb(kbase);
    kb_frame.payload.assign(kb_text.begin(), kb_text.end());
    if (!send_with_ack(kb_frame, {}, -1))
        throw IoError("transmitter: no ACK for KB sync from " + cfg.host + ":" + std::to_string(cfg.port));

    for (std::size_t i = 0; i < images.size(); ++i) {
        byte_vec payload_bytes;
        wire::FrameType type;
        if (cfg.scheme == harness::Scheme::BaselineCodec) {
            codec::BlockStream bs = codec::encode_image(images[i].image, cfg.quality);
            byte_vec bytes = codec::serialize_blockstream(bs);
            ch::ChannelConfig ccfg{cfg.snr_db, cfg.fec, derive_seed(cfg.row_seed, harness::kChannelTag, i)};
            payload_bytes = harness::impair_regions(bytes, codec::payload_byte_ranges(bs), ccfg).bytes;
            type = wire::FrameType::Image;
        } else {
            Tensor cut = nn::extract_features(model, images[i].image);
            std::vector<int> indices =
                cfg.scheme == harness::Scheme::ScRandom
                    ? sem::random_select(model.spec.conv3, cfg.cr, derive_seed(cfg.row_seed, harness::kSelectTag, i))
                    : sem::select_maps(ranking, cfg.cr, model.spec.conv3);
            sem::SemanticFrame frame = sem::encode_frame(cut, indices);
            byte_vec bytes = sem::serialize_frame(frame);
            ch::ChannelConfig ccfg{cfg.snr_db, cfg.fec, derive_seed(cfg.row_seed, harness::kChannelTag, i)};
            payload_bytes = harness::impair_regions(bytes, sem::code_byte_ranges(frame), ccfg).bytes;
            type = wire::FrameType::Semantic;
        }

        wire::WireFrame data;
        data.frame_type = type;
        data.task_id = cfg.task_id;
        std::uint16_t seq = static_cast<std::uint16_t>(i);
        data.payload.push_back(static_cast<std::uint8_t>(seq & 0xff));
        data.payload.push_back(static_cast<std::uint8_t>(seq >> 8));
        data.payload.insert(data.payload.end(), payload_bytes.begin(), payload_bytes.end());
        byte_vec echo = {data.payload[0], data.payload[1]};
        send_with_ack(data, echo, static_cast<int>(i));  // un-ACKed frames stay logged as drops
    }
    return log;
}

}  // namespace scait::link

#endif  // SCAIT_LINK_HPP
