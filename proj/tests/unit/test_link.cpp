#include <catch2/catch_amalgamated.hpp>

#include <future>
#include <thread>

#include <scait/link.hpp>

#include "testutil.hpp"

using namespace scait;
using Catch::Matchers::ContainsSubstring;

TEST_CASE("loopback semantic transmission matches the offline evaluator") {
    const nn::Model& model = testutil::tiny_model();
    const kb::KnowledgeBase& kbase = testutil::tiny_kb();
    auto images = std::span<const ds::LabeledExample>(testutil::tiny_split().test).subspan(0, 6);

    testutil::TempDir tmp;
    link::ReceiverConfig rcfg;
    rcfg.kb_out_path = tmp.file("received.kb");
    rcfg.expected_data_frames = static_cast<int>(images.size());
    link::Receiver receiver(rcfg);

    link::TransmitterConfig tcfg;
    tcfg.port = receiver.port();
    tcfg.scheme = harness::Scheme::ScAit;
    tcfg.cr = 0.5;
    tcfg.snr_db = 12.0;
    tcfg.fec = ch::Fec::None;
    tcfg.row_seed = harness::row_seed_for(5, harness::Scheme::ScAit, 0.5, 12.0, ch::Fec::None, 0);

    auto recv_future = std::async(std::launch::async, [&] { return receiver.run(model); });
    std::vector<link::SendLogEntry> sent = link::run_transmitter(tcfg, model, kbase, images);
    std::vector<link::RecvLogEntry> got = recv_future.get();

    REQUIRE(sent.size() == images.size() + 1);  // KB sync first
    CHECK(sent[0].seq == -1);
    CHECK(sent[0].frame_type == wire::FrameType::KbSync);
    for (std::size_t i = 0; i < sent.size(); ++i) {
        INFO("send entry " << i);
        CHECK(sent[i].acked);
        CHECK(sent[i].attempts == 1);
    }
    for (std::size_t i = 1; i < sent.size(); ++i) CHECK(sent[i].seq == static_cast<int>(i - 1));

    REQUIRE(got.size() == images.size() + 1);
    CHECK(got[0].frame_type == wire::FrameType::KbSync);
    CHECK(got[0].predicted_class == -1);

    // the wire path and the in-process evaluator must agree frame for frame
    harness::CutCache cache = harness::CutCache::build(model, images);
    harness::EvalResult offline = harness::evaluate_semantic(model, cache, kb::rank_maps(kbase), tcfg.cr,
                                                             tcfg.snr_db, tcfg.fec, tcfg.row_seed, false);
    for (std::size_t i = 0; i < images.size(); ++i) {
        INFO("frame " << i);
        CHECK(got[i + 1].seq == static_cast<int>(i));
        CHECK(got[i + 1].frame_type == wire::FrameType::Semantic);
        CHECK(got[i + 1].predicted_class == offline.predictions[i]);
    }

    // the synchronized KB lands on disk byte-identical to the source
    CHECK(kb::serialize_kb(kb::load_kb(rcfg.kb_out_path)) == kb::serialize_kb(kbase));
}

TEST_CASE("loopback image transmission matches the offline evaluator") {
    const nn::Model& model = testutil::tiny_model();
    const kb::KnowledgeBase& kbase = testutil::tiny_kb();
    auto images = std::span<const ds::LabeledExample>(testutil::tiny_split().test).subspan(0, 3);

    link::ReceiverConfig rcfg;
    rcfg.expected_data_frames = static_cast<int>(images.size());
    link::Receiver receiver(rcfg);

    link::TransmitterConfig tcfg;
    tcfg.port = receiver.port();
    tcfg.scheme = harness::Scheme::BaselineCodec;
    tcfg.quality = 40;
    tcfg.snr_db = 8.0;
    tcfg.fec = ch::Fec::Hamming74;
    tcfg.row_seed = harness::row_seed_for(5, harness::Scheme::BaselineCodec, 40.0, 8.0, ch::Fec::Hamming74, 0);

    auto recv_future = std::async(std::launch::async, [&] { return receiver.run(model); });
    std::vector<link::SendLogEntry> sent = link::run_transmitter(tcfg, model, kbase, images);
    std::vector<link::RecvLogEntry> got = recv_future.get();

    REQUIRE(sent.size() == images.size() + 1);
    REQUIRE(got.size() == images.size() + 1);
    harness::EvalResult offline =
        harness::evaluate_baseline(model, images, tcfg.quality, tcfg.snr_db, tcfg.fec, tcfg.row_seed);
    for (std::size_t i = 0; i < images.size(); ++i) {
        INFO("frame " << i);
        CHECK(got[i + 1].frame_type == wire::FrameType::Image);
        CHECK(got[i + 1].predicted_class == offline.predictions[i]);
    }
}

TEST_CASE("receiver deduplicates retransmissions and ignores corrupt datagrams") {
    const nn::Model& model = testutil::tiny_model();
    auto images = std::span<const ds::LabeledExample>(testutil::tiny_split().test).subspan(0, 2);

    link::ReceiverConfig rcfg;
    rcfg.expected_data_frames = 2;
    link::Receiver receiver(rcfg);
    auto recv_future = std::async(std::launch::async, [&] { return receiver.run(model); });

    link::UdpSocket sock;
    sock.bind_to("0.0.0.0", 0);
    sock.set_recv_timeout_ms(200);
    sockaddr_in dest = link::make_ipv4("127.0.0.1", receiver.port());

    auto wait_ack = [&](const byte_vec& echo) {
        auto reply = sock.recv_from(nullptr);
        REQUIRE(reply.has_value());
        wire::WireFrame ack = wire::decode_wire(*reply);
        REQUIRE(ack.frame_type == wire::FrameType::Ack);
        CHECK(ack.payload == echo);
    };

    wire::WireFrame kb_frame;
    kb_frame.frame_type = wire::FrameType::KbSync;
    std::string kb_text = kb::serialize_kb(testutil::tiny_kb());
    kb_frame.payload.assign(kb_text.begin(), kb_text.end());
    sock.send_to(dest, wire::encode_wire(kb_frame));
    wait_ack({});

    auto data_frame = [&](std::uint16_t seq, const ds::LabeledExample& ex) {
        Tensor cut = nn::extract_features(model, ex.image);
        std::vector<int> all(static_cast<std::size_t>(model.spec.conv3));
        for (std::size_t k = 0; k < all.size(); ++k) all[k] = static_cast<int>(k);
        byte_vec body = sem::serialize_frame(sem::encode_frame(cut, all));
        wire::WireFrame f;
        f.frame_type = wire::FrameType::Semantic;
        f.payload = {static_cast<std::uint8_t>(seq & 0xff), static_cast<std::uint8_t>(seq >> 8)};
        f.payload.insert(f.payload.end(), body.begin(), body.end());
        return wire::encode_wire(f);
    };

    byte_vec first = data_frame(0, images[0]);
    sock.send_to(dest, first);
    wait_ack({0, 0});
    sock.send_to(dest, first);  // retransmission: re-ACKed but logged once
    wait_ack({0, 0});

    byte_vec mangled = data_frame(1, images[1]);
    mangled[mangled.size() - 1] ^= 0xFF;  // breaks the checksum
    sock.send_to(dest, mangled);
    CHECK(!sock.recv_from(nullptr).has_value());  // corrupt datagrams earn no ACK

    sock.send_to(dest, data_frame(1, images[1]));
    wait_ack({1, 0});

    std::vector<link::RecvLogEntry> got = recv_future.get();
    REQUIRE(got.size() == 3);
    CHECK(got[0].frame_type == wire::FrameType::KbSync);
    CHECK(got[1].seq == 0);
    CHECK(got[2].seq == 1);
    int expect0 = nn::predict(nn::forward(model, images[0].image).logits);
    CHECK(got[1].predicted_class == expect0);  // all maps kept, so the cut is near-lossless
}

TEST_CASE("transmitter gives up cleanly when nobody acknowledges") {
    link::UdpSocket silent;
    silent.bind_to("127.0.0.1", 0);

    link::TransmitterConfig tcfg;
    tcfg.port = silent.local_port();
    tcfg.timeout_ms = 50;
    tcfg.retries = 1;
    auto images = std::span<const ds::LabeledExample>(testutil::tiny_split().test).subspan(0, 1);
    CHECK_THROWS_WITH(link::run_transmitter(tcfg, testutil::tiny_model(), testutil::tiny_kb(), images),
                      ContainsSubstring("no ACK for KB sync"));
}

TEST_CASE("transmitter refuses a knowledge base built for another model") {
    kb::KnowledgeBase stale = testutil::tiny_kb();
    stale.model_fingerprint ^= 1;
    link::TransmitterConfig tcfg;
    tcfg.port = 9;  // never reached
    auto images = std::span<const ds::LabeledExample>(testutil::tiny_split().test).subspan(0, 1);
    CHECK_THROWS_WITH(link::run_transmitter(tcfg, testutil::tiny_model(), stale, images),
                      ContainsSubstring("fingerprint does not match"));
}

TEST_CASE("log serialization is stable") {
    std::vector<link::RecvLogEntry> rlog = {{3, wire::FrameType::Semantic, 82, 4, 1.25}};
    CHECK(link::recv_log_csv(rlog) == "seq,frame_type,bytes,predicted_class,latency_ms\n3,semantic,82,4,1.250\n");
    std::vector<link::SendLogEntry> slog = {{-1, wire::FrameType::KbSync, 100, true, 1, 0.5}};
    CHECK(link::send_log_csv(slog) == "seq,frame_type,bytes,acked,attempts,latency_ms\n-1,kb_sync,100,1,1,0.500\n");
}

TEST_CASE("bad addresses are rejected") {
    CHECK_THROWS_WITH(link::make_ipv4("not-an-ip", 80), ContainsSubstring("bad IPv4 address"));
}
