#include <catch2/catch_amalgamated.hpp>

#include <scait/config.hpp>
#include <scait/wire.hpp>

#include "testutil.hpp"

using namespace scait;
using Catch::Matchers::ContainsSubstring;

TEST_CASE("crc32 check value and empty input") {
    const std::string check = "123456789";
    byte_vec data(check.begin(), check.end());
    CHECK(wire::crc32(data) == 0xCBF43926u);
    CHECK(wire::crc32(byte_vec{}) == 0u);
}

TEST_CASE("wire frames round-trip for every type with fixed overhead") {
    Rng rng(61);
    for (auto type : {wire::FrameType::KbSync, wire::FrameType::Semantic, wire::FrameType::Image,
                      wire::FrameType::Ack}) {
        wire::WireFrame f;
        f.frame_type = type;
        f.task_id = 0xBEEF;
        f.payload.resize(rng.below(200));
        for (auto& b : f.payload) b = static_cast<std::uint8_t>(rng.below(256));

        byte_vec bytes = wire::encode_wire(f);
        CHECK(bytes.size() == f.payload.size() + wire::kOverheadBytes);
        wire::WireFrame back = wire::decode_wire(bytes);
        CHECK(back.frame_type == f.frame_type);
        CHECK(back.task_id == f.task_id);
        CHECK(back.payload == f.payload);
    }
}

TEST_CASE("wire encoder enforces the single-datagram limit and type range") {
    wire::WireFrame f;
    f.frame_type = wire::FrameType::Semantic;
    f.payload.assign(wire::kMaxPayload, 0xAB);
    byte_vec bytes = wire::encode_wire(f);
    CHECK(wire::decode_wire(bytes).payload.size() == wire::kMaxPayload);

    f.payload.push_back(0);
    CHECK_THROWS_AS(wire::encode_wire(f), std::invalid_argument);

    wire::WireFrame bad;
    bad.frame_type = static_cast<wire::FrameType>(0);
    CHECK_THROWS_AS(wire::encode_wire(bad), std::invalid_argument);
}

TEST_CASE("wire decoder pinpoints structural faults") {
    wire::WireFrame f;
    f.frame_type = wire::FrameType::Image;
    f.task_id = 3;
    f.payload = {1, 2, 3, 4, 5};
    byte_vec good = wire::encode_wire(f);

    byte_vec bad_magic = good;
    bad_magic[0] ^= 0xFF;
    CHECK_THROWS_WITH(wire::decode_wire(bad_magic), ContainsSubstring("bad magic"));

    byte_vec bad_version = good;
    bad_version[4] = 7;
    CHECK_THROWS_WITH(wire::decode_wire(bad_version), ContainsSubstring("unsupported version 7"));

    byte_vec bad_type = good;
    bad_type[5] = 5;
    CHECK_THROWS_WITH(wire::decode_wire(bad_type), ContainsSubstring("unknown frame type 5"));

    byte_vec oversize = good;
    oversize[8] = 0xFF;
    oversize[9] = 0xFF;
    oversize[10] = 0xFF;
    oversize[11] = 0x00;  // length 16777215
    CHECK_THROWS_WITH(wire::decode_wire(oversize), ContainsSubstring("exceeds datagram limit"));

    byte_vec truncated(good.begin(), good.end() - 1);
    CHECK_THROWS_AS(wire::decode_wire(truncated), FormatError);

    byte_vec trailing = good;
    trailing.push_back(0);
    CHECK_THROWS_WITH(wire::decode_wire(trailing), ContainsSubstring("trailing bytes"));
}

TEST_CASE("any payload bit flip is caught by the crc") {
    wire::WireFrame f;
    f.frame_type = wire::FrameType::Semantic;
    f.payload.resize(100);
    Rng fill(62);
    for (auto& b : f.payload) b = static_cast<std::uint8_t>(fill.below(256));
    byte_vec good = wire::encode_wire(f);

    Rng rng(63);
    for (int trial = 0; trial < 50; ++trial) {
        std::size_t bit = rng.below(100 * 8);
        byte_vec hit = good;
        hit[12 + bit / 8] ^= static_cast<std::uint8_t>(1u << (bit % 8));
        CHECK_THROWS_AS(wire::decode_wire(hit), wire::CrcError);
    }
}

TEST_CASE("config parsing: comments, trimming, overrides, lists") {
    std::string text =
        "# a comment\n"
        "alpha = 1.5\n"
        "name =  hello world \t\n"
        "flag = yes # inline comment\n"
        "list = 1, 2.5 , -3\n"
        "alpha = 2.5\n"
        "empty_list =\n";
    cfg::Config c = cfg::Config::parse(text);

    CHECK(c.get_real("alpha", 0.0) == 2.5);  // later assignment wins
    CHECK(c.get_string("name", "") == "hello world");
    CHECK(c.get_bool("flag", false));
    CHECK(c.get_list("list") == std::vector<std::string>{"1", "2.5", "-3"});
    CHECK(c.get_real_list("list") == std::vector<double>{1.0, 2.5, -3.0});
    CHECK(c.get_list("empty_list").empty());
    CHECK(c.has("alpha"));
    CHECK_FALSE(c.has("beta"));
    CHECK(c.get_real("beta", -7.0) == -7.0);
    CHECK(c.get_int("beta", 42) == 42);
    CHECK(c.get_string("beta", "dflt") == "dflt");
    CHECK(c.entries().size() == 5);

    CHECK(cfg::Config::parse("b = off\n").get_bool("b", true) == false);
    CHECK(cfg::Config::parse("b = 1\n").get_bool("b", false) == true);
}

TEST_CASE("config errors name the line or key") {
    CHECK_THROWS_WITH(cfg::Config::parse("alpha\n"), ContainsSubstring("line 1"));
    CHECK_THROWS_WITH(cfg::Config::parse("ok = 1\n = 5\n"), ContainsSubstring("line 2"));
    CHECK_THROWS_WITH(cfg::Config::parse("x = 12q\n").get_real("x", 0.0), ContainsSubstring("bad number '12q'"));
    CHECK_THROWS_WITH(cfg::Config::parse("y = 1.5\n").get_int("y", 0), ContainsSubstring("bad integer '1.5'"));
    CHECK_THROWS_WITH(cfg::Config::parse("z = maybe\n").get_bool("z", false), ContainsSubstring("bad boolean 'maybe'"));
}

TEST_CASE("config loads from a file") {
    testutil::TempDir tmp;
    write_file(tmp.file("run.cfg"), byte_vec{'k', ' ', '=', ' ', '9', '\n'});
    cfg::Config c = cfg::Config::load(tmp.file("run.cfg"));
    CHECK(c.get_int("k", 0) == 9);
}
