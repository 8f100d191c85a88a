#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include <scait/image_codec.hpp>

#include "testutil.hpp"

using namespace scait;
using Catch::Matchers::ContainsSubstring;

namespace {

codec::Block random_block(std::uint64_t seed) {
    Rng rng(seed);
    codec::Block b{};
    for (double& v : b) v = rng.uniform(-127.5, 127.5);
    return b;
}

Image gradient_image(int w, int h) {
    Image img(w, h);
    for (int y = 0; y < h; ++y)
        for (int x = 0; x < w; ++x)
            img.at(y, x) = quantize_intensity(static_cast<double>(x + y) / static_cast<double>(w + h - 2));
    return img;
}

}  // namespace

TEST_CASE("8x8 dct is orthonormal") {
    codec::Block f = random_block(2);
    codec::Block F = codec::dct8x8(f);
    codec::Block back = codec::idct8x8(F);

    double e_f = 0.0, e_F = 0.0, worst = 0.0;
    for (int i = 0; i < 64; ++i) {
        e_f += f[static_cast<std::size_t>(i)] * f[static_cast<std::size_t>(i)];
        e_F += F[static_cast<std::size_t>(i)] * F[static_cast<std::size_t>(i)];
        worst = std::max(worst, std::fabs(back[static_cast<std::size_t>(i)] - f[static_cast<std::size_t>(i)]));
    }
    CHECK(worst < 1e-9);                                   // inverse
    CHECK(std::fabs(e_f - e_F) < 1e-9 * std::max(e_f, 1.0));  // energy preserved

    codec::Block ones{};
    ones.fill(1.0);
    codec::Block dc = codec::dct8x8(ones);
    CHECK(dc[0] == Catch::Approx(8.0).epsilon(1e-12));
    for (int i = 1; i < 64; ++i) CHECK(std::fabs(dc[static_cast<std::size_t>(i)]) < 1e-12);
}

TEST_CASE("zigzag walks the anti-diagonals and inverts exactly") {
    codec::Block b{};
    for (int i = 0; i < 64; ++i) b[static_cast<std::size_t>(i)] = i;
    auto seq = codec::zigzag(b);
    CHECK(seq[0] == 0.0);
    CHECK(seq[1] == 1.0);
    CHECK(seq[2] == 8.0);
    CHECK(seq[3] == 16.0);
    CHECK(seq[4] == 9.0);
    CHECK(seq[5] == 2.0);
    CHECK(seq[6] == 3.0);
    CHECK(seq[7] == 10.0);
    CHECK(seq[8] == 17.0);
    CHECK(seq[9] == 24.0);
    CHECK(seq[63] == 63.0);

    codec::Block r = random_block(3);
    CHECK(codec::unzigzag(codec::zigzag(r)) == r);
}

TEST_CASE("quality scaling of the quantization table") {
    CHECK(codec::quant_matrix(50) == codec::base_quant_matrix());

    auto q100 = codec::quant_matrix(100);
    for (int v : q100) CHECK(v == 1);

    auto q75 = codec::quant_matrix(75);
    CHECK(q75[0] == 8);  // 16 * 0.5

    auto q1 = codec::quant_matrix(1);
    CHECK(q1[0] == 255);  // clamped

    CHECK_THROWS_AS(codec::quant_matrix(0), std::invalid_argument);
    CHECK_THROWS_AS(codec::quant_matrix(101), std::invalid_argument);
}

TEST_CASE("exp-golomb codes match the textbook prefix table") {
    using codec::detail::BitVec;
    auto enc = [](std::uint32_t n) {
        BitVec bits;
        codec::detail::put_expgolomb(bits, n);
        return bits;
    };
    CHECK(enc(0) == BitVec{1});
    CHECK(enc(1) == BitVec{0, 1, 0});
    CHECK(enc(2) == BitVec{0, 1, 1});
    CHECK(enc(3) == BitVec{0, 0, 1, 0, 0});

    BitVec all;
    for (std::uint32_t n = 0; n <= 200; ++n) codec::detail::put_expgolomb(all, n);
    codec::detail::BitCursor cur{all};
    for (std::uint32_t n = 0; n <= 200; ++n) {
        auto got = cur.get_expgolomb();
        REQUIRE(got.has_value());
        CHECK(*got == n);
    }
    CHECK(cur.pos == all.size());

    BitVec zeros(33, 0);
    CHECK_FALSE(codec::detail::BitCursor{zeros}.get_expgolomb().has_value());
    BitVec cut = {0, 0, 1};
    CHECK_FALSE(codec::detail::BitCursor{cut}.get_expgolomb().has_value());

    CHECK(codec::detail::signed_to_code(0) == 0);
    CHECK(codec::detail::signed_to_code(1) == 1);
    CHECK(codec::detail::signed_to_code(-1) == 2);
    CHECK(codec::detail::signed_to_code(2) == 3);
    CHECK(codec::detail::signed_to_code(-2) == 4);
    for (int n = -100; n <= 100; ++n) CHECK(codec::detail::code_to_signed(codec::detail::signed_to_code(n)) == n);
}

TEST_CASE("run-level entropy coding round-trips and flags corruption") {
    std::array<int, 64> sparse{};
    sparse[0] = 5;
    sparse[10] = -3;
    sparse[40] = 1;
    auto dec = codec::entropy_decode(codec::entropy_encode(sparse));
    REQUIRE(dec.has_value());
    CHECK(*dec == sparse);

    std::array<int, 64> tail{};
    tail[0] = 2;
    tail[63] = -7;  // last nonzero at 63: stream carries no EOB
    auto dec_tail = codec::entropy_decode(codec::entropy_encode(tail));
    REQUIRE(dec_tail.has_value());
    CHECK(*dec_tail == tail);

    std::array<int, 64> empty{};
    auto dec_empty = codec::entropy_decode(codec::entropy_encode(empty));
    REQUIRE(dec_empty.has_value());
    CHECK(*dec_empty == empty);

    CHECK_FALSE(codec::entropy_decode(std::vector<std::uint8_t>{}).has_value());
    // run 0 with level code 0 is only legal as part of the EOB pair
    CHECK_FALSE(codec::entropy_decode(std::vector<std::uint8_t>{1, 1}).has_value());
    // a run past the end of the block is corrupt
    codec::detail::BitVec overrun;
    codec::detail::put_expgolomb(overrun, 70);
    codec::detail::put_expgolomb(overrun, 1);
    CHECK_FALSE(codec::entropy_decode(overrun).has_value());
}

TEST_CASE("quality 100 reconstructs every 8-bit image to within one grid step") {
    double worst = 0.0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        Image img = testutil::random_image(32, 32, seed);
        Image back = codec::decode_image(codec::encode_image(img, 100));
        for (std::size_t i = 0; i < img.pixels.size(); ++i)
            worst = std::max(worst, std::fabs(back.pixels[i] - img.pixels[i]));
    }
    Image odd = testutil::random_image(20, 12, 9);
    Image odd_back = codec::decode_image(codec::encode_image(odd, 100));
    for (std::size_t i = 0; i < odd.pixels.size(); ++i)
        worst = std::max(worst, std::fabs(odd_back.pixels[i] - odd.pixels[i]));
    INFO("worst pixel error " << worst);
    CHECK(worst <= 1.0 / 255.0 + 1e-12);
}

TEST_CASE("bit errors stay confined to their own block") {
    Image img = testutil::random_image(32, 32, 21);
    codec::BlockStream bs = codec::encode_image(img, 75);
    byte_vec bytes = codec::serialize_blockstream(bs);
    Image clean = codec::decode_image(codec::parse_blockstream(bytes));

    auto ranges = codec::payload_byte_ranges(bs);
    REQUIRE(ranges.size() == 16);
    const std::size_t victim = 5;  // block row 1, column 1
    byte_vec hit = bytes;
    for (std::size_t i = 0; i < ranges[victim].second; ++i) hit[ranges[victim].first + i] ^= 0xFF;

    Image damaged = codec::decode_image(codec::parse_blockstream(hit));
    for (int y = 0; y < 32; ++y)
        for (int x = 0; x < 32; ++x) {
            bool inside = (y >= 8 && y < 16 && x >= 8 && x < 16);
            if (!inside) {
                INFO("pixel " << y << "," << x);
                CHECK(damaged.at(y, x) == clean.at(y, x));
            }
        }
}

TEST_CASE("psnr reference values") {
    Image a(4, 4), b(4, 4);
    for (auto& p : a.pixels) p = 0.3;
    for (auto& p : b.pixels) p = 0.4;
    CHECK(codec::psnr(a, a) == std::numeric_limits<double>::infinity());
    CHECK(codec::psnr(a, b) == Catch::Approx(20.0).epsilon(1e-9));
    Image c(5, 4);
    CHECK_THROWS_AS(codec::psnr(a, c), std::invalid_argument);
}

TEST_CASE("default quality is a sane rate-distortion point on smooth content") {
    Image img = gradient_image(32, 32);
    codec::BlockStream bs = codec::encode_image(img, 75);
    Image back = codec::decode_image(bs);
    CHECK(codec::psnr(img, back) > 25.0);
    double bpp = static_cast<double>(codec::serialize_blockstream(bs).size()) * 8.0 / (32.0 * 32.0);
    CHECK(bpp < 8.0);
}

TEST_CASE("block stream serialization round-trips and rejects malformed bytes") {
    Image img = testutil::random_image(24, 16, 33);
    codec::BlockStream bs = codec::encode_image(img, 40);
    byte_vec bytes = codec::serialize_blockstream(bs);

    codec::BlockStream back = codec::parse_blockstream(bytes);
    CHECK(back.width == bs.width);
    CHECK(back.height == bs.height);
    CHECK(back.quality == bs.quality);
    CHECK(back.blocks == bs.blocks);
    CHECK(codec::serialize_blockstream(back) == bytes);

    byte_vec bad_magic = bytes;
    bad_magic[0] = 'X';
    CHECK_THROWS_WITH(codec::parse_blockstream(bad_magic), ContainsSubstring("bad magic"));

    byte_vec bad_quality = bytes;
    bad_quality[8] = 0;
    CHECK_THROWS_WITH(codec::parse_blockstream(bad_quality), ContainsSubstring("bad quality"));

    byte_vec bad_count = bytes;
    bad_count[9] = static_cast<std::uint8_t>(bad_count[9] + 1);
    CHECK_THROWS_WITH(codec::parse_blockstream(bad_count), ContainsSubstring("block count mismatch"));

    byte_vec trailing = bytes;
    trailing.push_back(0);
    CHECK_THROWS_WITH(codec::parse_blockstream(trailing), ContainsSubstring("trailing bytes"));

    byte_vec truncated(bytes.begin(), bytes.end() - 1);
    CHECK_THROWS_AS(codec::parse_blockstream(truncated), FormatError);
}

TEST_CASE("payload ranges tile the stream after the protected structure") {
    Image img = testutil::random_image(16, 16, 44);
    codec::BlockStream bs = codec::encode_image(img, 60);
    byte_vec bytes = codec::serialize_blockstream(bs);
    auto ranges = codec::payload_byte_ranges(bs);
    REQUIRE(ranges.size() == bs.blocks.size());

    std::size_t off = 11;
    for (std::size_t i = 0; i < bs.blocks.size(); ++i) {
        std::size_t nbytes = (bs.blocks[i].size() + 7) / 8;
        CHECK(ranges[i].first == off + 2);
        CHECK(ranges[i].second == nbytes);
        off += 2 + nbytes;
    }
    CHECK(off == bytes.size());
}
