#include <catch2/catch_amalgamated.hpp>

#include <scait/common.hpp>

#include "testutil.hpp"

using namespace scait;

TEST_CASE("round_half_away rounds halves away from zero") {
    CHECK(round_half_away(0.5) == 1.0);
    CHECK(round_half_away(-0.5) == -1.0);
    CHECK(round_half_away(2.5) == 3.0);
    CHECK(round_half_away(-2.5) == -3.0);
    CHECK(round_half_away(0.49) == 0.0);
    CHECK(round_half_away(-0.49) == 0.0);
    CHECK(round_half_away(127.5) == 128.0);
    CHECK(round_half_away(0.0) == 0.0);
}

TEST_CASE("clamp pins to range") {
    CHECK(clamp(5, 0, 10) == 5);
    CHECK(clamp(-1, 0, 10) == 0);
    CHECK(clamp(11, 0, 10) == 10);
    CHECK(clamp(1.5, 2.0, 3.0) == 2.0);
}

TEST_CASE("byte writer and reader round-trip mixed fields little-endian") {
    ByteWriter w;
    w.u8(0xAB);
    w.u16(0x1234);
    w.u32(0xDEADBEEF);
    w.u64(0x0102030405060708ull);
    w.f32(1.5f);
    w.str("hi");

    byte_vec bytes = w.data();
    REQUIRE(bytes.size() == 1 + 2 + 4 + 8 + 4 + 2);
    // u16 is little-endian on the wire
    CHECK(bytes[1] == 0x34);
    CHECK(bytes[2] == 0x12);
    // u32 likewise
    CHECK(bytes[3] == 0xEF);
    CHECK(bytes[6] == 0xDE);

    ByteReader r(bytes);
    CHECK(r.u8() == 0xAB);
    CHECK(r.u16() == 0x1234);
    CHECK(r.u32() == 0xDEADBEEF);
    CHECK(r.u64() == 0x0102030405060708ull);
    CHECK(r.f32() == 1.5f);
    CHECK(r.str(2) == "hi");
    CHECK(r.done());
}

TEST_CASE("byte reader reports truncation with offset") {
    byte_vec bytes = {1, 2, 3};
    ByteReader r(bytes, "testbuf");
    r.u16();
    try {
        r.u32();
        FAIL("expected FormatError");
    } catch (const FormatError& e) {
        std::string msg = e.what();
        CHECK(msg.find("testbuf") != std::string::npos);
        CHECK(msg.find("offset 2") != std::string::npos);
    }
}

TEST_CASE("fnv1a64 matches published vectors") {
    auto hash_str = [](const std::string& s) {
        return fnv1a64(std::span<const std::uint8_t>(reinterpret_cast<const std::uint8_t*>(s.data()), s.size()));
    };
    CHECK(hash_str("") == 0xcbf29ce484222325ull);
    CHECK(hash_str("a") == 0xaf63dc4c8601ec8cull);
    CHECK(hash_str("foobar") == 0x85944171f73967e8ull);
}

TEST_CASE("hex64 zero-pads to 16 digits") {
    CHECK(hex64(0xdeadbeefull) == "00000000deadbeef");
    CHECK(hex64(0) == "0000000000000000");
    CHECK(hex64(0xffffffffffffffffull) == "ffffffffffffffff");
}

TEST_CASE("file helpers round-trip and report missing files") {
    testutil::TempDir dir;
    std::string path = dir.file("blob.bin");
    byte_vec data = {0, 1, 2, 255, 128};
    write_file(path, data);
    CHECK(read_file(path) == data);

    atomic_write_file(path, byte_vec{9, 9});
    CHECK(read_file(path) == byte_vec{9, 9});
    CHECK_FALSE(std::filesystem::exists(path + ".tmp"));

    try {
        read_file(dir.file("missing.bin"));
        FAIL("expected IoError");
    } catch (const IoError& e) {
        CHECK(std::string(e.what()).find("missing.bin") != std::string::npos);
    }
}
