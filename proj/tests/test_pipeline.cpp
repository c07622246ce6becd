// Copyright 2026 the plcie authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "plcie/pipeline.hpp"
#include "plcie/statistics.hpp"
#include "test_util.hpp"

using namespace plcie;

namespace {

GrayImage random_image(std::mt19937_64& rng, std::uint32_t w, std::uint32_t h) {
    GrayImage img;
    img.width = w;
    img.height = h;
    img.pixels.resize(std::size_t(w) * h);
    for (auto& p : img.pixels) p = static_cast<std::uint8_t>(rng() & 0xFF);
    return img;
}

} // namespace

TEST_CASE("symbol streams round-trip through both modes") {
    std::mt19937_64 rng(0x8001);
    const Field field = Field::gf16();
    const KeyMaterial key = generate_key(16, rng);
    for (const auto mode : {CipherMode::self_synchronous, CipherMode::synchronous}) {
        const CipherParams params = derive_params(key, field, mode);
        const InitVector iv = random_iv(params.ell(), field, rng);
        const auto whitening = random_whitening(params.iota(), field, rng);
        std::vector<std::uint8_t> payload(301);
        for (auto& s : payload) s = static_cast<std::uint8_t>(rng() & 0xF);

        const auto flat = encrypt_stream(params, iv, payload, whitening);
        CHECK(flat.size() == (payload.size() + params.iota()) * params.ell());
        CHECK(decrypt_stream(params, iv, flat) == payload);
    }
}

TEST_CASE("stream endpoints validate their inputs") {
    std::mt19937_64 rng(0x8002);
    const Field field = Field::gf16();
    const CipherParams params =
        derive_params(generate_key(16, rng), field, CipherMode::self_synchronous);
    const InitVector iv = random_iv(params.ell(), field, rng);
    const auto whitening = random_whitening(params.iota(), field, rng);
    const std::vector<std::uint8_t> payload(10, 3);

    CHECK_THROWS_AS(
        encrypt_stream(params, iv, payload, std::vector<std::uint8_t>(params.iota() - 1, 0)),
        std::invalid_argument);
    const auto flat = encrypt_stream(params, iv, payload, whitening);
    CHECK_THROWS_AS(decrypt_stream(params, iv,
                                   std::vector<std::uint8_t>(flat.begin(), flat.end() - 1)),
                    std::invalid_argument);
    CHECK_THROWS_AS(decrypt_stream(params, iv, std::vector<std::uint8_t>(params.ell() * 2, 0)),
                    std::invalid_argument);
}

TEST_CASE("images round-trip through the container pipeline") {
    std::mt19937_64 rng(0x8003);
    const Field field = Field::gf16();
    const KeyMaterial key = generate_key(16, rng);
    const CipherParams params = derive_params(key, field, CipherMode::self_synchronous);
    const GrayImage img = random_image(rng, 17, 9);
    const InitVector iv = random_iv(params.ell(), field, rng);
    const auto whitening = random_whitening(params.iota(), field, rng);

    const CipherContainer c = encrypt_image(params, key.prec, img, iv, whitening);
    CHECK(c.width == 17);
    CHECK(c.height == 9);
    CHECK(c.iota == 32);
    CHECK(c.prec_flag == 0);
    CHECK(c.iv_words == iv.words);
    CHECK(c.cipher_symbols.size() == 8 * (32 + 2 * 17 * 9));
    CHECK(decrypt_image(params, key.prec, c) == img);

    // the encoded file round-trips too
    CHECK(decrypt_image(params, key.prec, decode_container(encode_container(c))) == img);
}

TEST_CASE("decryption rejects mismatched parameters") {
    std::mt19937_64 rng(0x8004);
    const Field field = Field::gf16();
    const KeyMaterial key = generate_key(16, rng);
    const CipherParams params = derive_params(key, field, CipherMode::self_synchronous);
    const GrayImage img = random_image(rng, 4, 4);
    const InitVector iv = random_iv(params.ell(), field, rng);
    const CipherContainer c = encrypt_image(params, key.prec, img, iv,
                                            random_whitening(params.iota(), field, rng));

    CHECK_THROWS_AS(decrypt_image(params, 32, c), KeyError);
    CipherContainer wrong_ell = c;
    wrong_ell.ell = 4;
    CHECK_THROWS_AS(decrypt_image(params, key.prec, wrong_ell), KeyError);
    CipherContainer short_body = c;
    short_body.cipher_symbols.resize(short_body.cipher_symbols.size() - 8);
    CHECK_THROWS_AS(decrypt_image(params, key.prec, short_body), FormatError);
    CHECK_THROWS_AS(encrypt_image(params, 8, img, iv,
                                  random_whitening(params.iota(), field, rng)),
                    std::invalid_argument);
}

TEST_CASE("a wrong key garbles the payload instead of failing") {
    std::mt19937_64 rng(0x8005);
    const Field field = Field::gf16();
    const KeyMaterial key1 = generate_key(16, rng);
    const KeyMaterial key2 = generate_key(16, rng);
    REQUIRE(!(key1 == key2));
    const CipherParams p1 = derive_params(key1, field, CipherMode::self_synchronous);
    const CipherParams p2 = derive_params(key2, field, CipherMode::self_synchronous);
    const GrayImage img = random_image(rng, 16, 16);
    const InitVector iv = random_iv(p1.ell(), field, rng);
    const CipherContainer c =
        encrypt_image(p1, key1.prec, img, iv, random_whitening(p1.iota(), field, rng));
    const GrayImage wrong = decrypt_image(p2, key2.prec, c);
    CHECK(wrong.width == img.width);
    CHECK(wrong.height == img.height);
    CHECK(npcr(img, wrong) > 90.0);
}

TEST_CASE("fresh whitening decorrelates repeated encryptions") {
    std::mt19937_64 rng(0x8006);
    const Field field = Field::gf16();
    const KeyMaterial key = generate_key(16, rng);
    const CipherParams params = derive_params(key, field, CipherMode::self_synchronous);
    const GrayImage img = random_image(rng, 16, 16);
    const InitVector iv = random_iv(params.ell(), field, rng);

    const CipherContainer a = encrypt_image(params, key.prec, img, iv,
                                            random_whitening(params.iota(), field, rng));
    const CipherContainer b = encrypt_image(params, key.prec, img, iv,
                                            random_whitening(params.iota(), field, rng));
    CHECK(npcr(container_payload_image(a), container_payload_image(b)) > 90.0);
    CHECK(decrypt_image(params, key.prec, a) == img);
    CHECK(decrypt_image(params, key.prec, b) == img);
}

TEST_CASE("the payload raster stacks ell rows per image row") {
    std::mt19937_64 rng(0x8007);
    const Field field = Field::gf16();
    const KeyMaterial key = generate_key(16, rng);
    const CipherParams params = derive_params(key, field, CipherMode::self_synchronous);
    const GrayImage img = random_image(rng, 5, 3);
    const CipherContainer c =
        encrypt_image(params, key.prec, img, random_iv(params.ell(), field, rng),
                      random_whitening(params.iota(), field, rng));
    const GrayImage view = container_payload_image(c);
    CHECK(view.width == 5);
    CHECK(view.height == 8 * 3);
    CHECK(view.pixels.size() == c.expected_symbols() / 2 - 8 * 32 / 2);

    CipherContainer bad = c;
    bad.cipher_symbols.pop_back();
    CHECK_THROWS_AS(container_payload_image(bad), FormatError);
}

TEST_CASE("value permutation maps both nibbles of every pixel") {
    std::vector<std::uint8_t> fwd(16);
    for (std::size_t i = 0; i < 16; ++i) fwd[i] = static_cast<std::uint8_t>((i + 1) % 16);
    const KeyPermutation pi(fwd);

    GrayImage img;
    img.width = 2;
    img.height = 1;
    img.pixels = {0x0F, 0xA5};
    const GrayImage out = permute_image_values(img, pi);
    CHECK(out.pixels == std::vector<std::uint8_t>{0x10, 0xB6});

    CHECK(permute_image_values(img, KeyPermutation::identity(16)) == img);
    CHECK_THROWS_AS(permute_image_values(img, KeyPermutation::identity(4)),
                    std::invalid_argument);
}
