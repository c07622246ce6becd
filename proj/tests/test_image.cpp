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
#include <sstream>

#include "plcie/image.hpp"
#include "test_util.hpp"

using namespace plcie;

TEST_CASE("binary images round-trip through the writer and reader") {
    std::mt19937_64 rng(0x6001);
    GrayImage img;
    img.width = 37;
    img.height = 23;
    img.pixels.resize(std::size_t(img.width) * img.height);
    for (auto& p : img.pixels) p = static_cast<std::uint8_t>(rng() & 0xFF);

    std::ostringstream out;
    write_pgm(img, out);
    std::istringstream in(out.str());
    CHECK(read_pgm(in) == img);
}

TEST_CASE("ASCII images parse with comments and loose whitespace") {
    std::istringstream in(
        "P2 # magic\n"
        "# a comment line\n"
        "3   2\n"
        "255\n"
        "0 17  255\n"
        "  4\n5 6\n");
    const GrayImage img = read_pgm(in);
    CHECK(img.width == 3);
    CHECK(img.height == 2);
    CHECK(img.pixels == std::vector<std::uint8_t>{0, 17, 255, 4, 5, 6});
    CHECK(img.at(1, 0) == 17);
    CHECK(img.at(0, 1) == 4);
}

TEST_CASE("binary headers tolerate comments before the pixel block") {
    std::string data = "P5\n# generated\n2 2\n255\n";
    data += std::string("\x01\x02\x03\x04", 4);
    std::istringstream in(data);
    const GrayImage img = read_pgm(in);
    CHECK(img.pixels == std::vector<std::uint8_t>{1, 2, 3, 4});
}

TEST_CASE("malformed images are rejected") {
    auto reject = [](const std::string& data) {
        std::istringstream in(data);
        CHECK_THROWS_AS(read_pgm(in), FormatError);
    };
    reject("P6\n2 2\n255\n....");                 // color magic
    reject("Q5\n2 2\n255\n....");                 // unknown magic
    reject("");                                    // empty stream
    reject("P5\n2 2\n254\n....");                 // unsupported depth
    reject("P5\n2 2\n65535\n....");               // 16-bit depth
    reject("P5\n0 2\n255\n");                     // zero width
    reject("P5\n2 0\n255\n");                     // zero height
    reject("P5\n65537 1\n255\n");                 // width out of range
    reject("P5\n1 65537\n255\n");                 // height out of range
    reject("P5\n2 2\n255\n\x01\x02\x03");          // short payload
    reject("P5\n2 2\n255");                        // no separator, no payload
    reject("P2\n2 2\n255\n1 2 3");                 // short ASCII payload
    reject("P2\n2 2\n255\n1 2 3 256");             // pixel above maxval
    reject("P2\n2 2\n255\n1 2 3 x");               // non-numeric pixel
    reject("P5\nx 2\n255\n....");                  // non-numeric width
}

TEST_CASE("file helpers surface missing paths") {
    CHECK_THROWS_AS(read_pgm_file("/nonexistent/no.pgm"), FormatError);
    GrayImage img;
    img.width = 1;
    img.height = 1;
    img.pixels = {7};
    CHECK_THROWS_AS(write_pgm_file(img, "/nonexistent/no.pgm"), FormatError);

    GrayImage bad;
    bad.width = 2;
    bad.height = 2;
    bad.pixels = {1, 2, 3};
    std::ostringstream out;
    CHECK_THROWS_AS(write_pgm(bad, out), std::invalid_argument);
}

TEST_CASE("the bundled test image is a 256x256 8-bit raster") {
    const GrayImage img = read_pgm_file(test::data_path("gradient.pgm"));
    CHECK(img.width == 256);
    CHECK(img.height == 256);
    CHECK(img.pixels.size() == 65536);
}

TEST_CASE("nibble packing puts the high half first") {
    const std::vector<std::uint8_t> bytes = {0xAB, 0x00, 0xF1};
    const std::vector<std::uint8_t> symbols = bytes_to_symbols(bytes);
    CHECK(symbols == std::vector<std::uint8_t>{0xA, 0xB, 0x0, 0x0, 0xF, 0x1});
    CHECK(symbols_to_bytes(symbols) == bytes);

    std::mt19937_64 rng(0x6002);
    std::vector<std::uint8_t> blob(513);
    for (auto& b : blob) b = static_cast<std::uint8_t>(rng() & 0xFF);
    CHECK(symbols_to_bytes(bytes_to_symbols(blob)) == blob);

    CHECK_THROWS_AS(symbols_to_bytes(std::vector<std::uint8_t>{1}), std::invalid_argument);
    CHECK_THROWS_AS(symbols_to_bytes(std::vector<std::uint8_t>{1, 16}), std::invalid_argument);
}
