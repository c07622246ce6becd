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

#pragma once

#include <cctype>
#include <cstdint>
#include <fstream>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

#include "plcie/errors.hpp"

namespace plcie {

/// 8-bit grayscale raster, row-major.
struct GrayImage {
    std::uint32_t width = 0;
    std::uint32_t height = 0;
    std::vector<std::uint8_t> pixels;

    std::uint8_t at(std::uint32_t x, std::uint32_t y) const {
        return pixels[std::size_t(y) * width + x];
    }

    friend bool operator==(const GrayImage& a, const GrayImage& b) {
        return a.width == b.width && a.height == b.height && a.pixels == b.pixels;
    }
};

namespace detail {

// Skips whitespace and '#' comments, then reads one unsigned decimal.
inline std::uint64_t pgm_token(std::istream& in, const char* what) {
    for (;;) {
        const int c = in.peek();
        if (c == EOF) throw FormatError(std::string("image header truncated before ") + what);
        if (c == '#') {
            std::string line;
            std::getline(in, line);
            continue;
        }
        if (std::isspace(c)) {
            in.get();
            continue;
        }
        break;
    }
    std::uint64_t v = 0;
    bool any = false;
    while (std::isdigit(in.peek())) {
        v = v * 10 + static_cast<std::uint64_t>(in.get() - '0');
        any = true;
        if (v > 0xFFFFFFFFull) throw FormatError(std::string(what) + " is out of range");
    }
    if (!any) throw FormatError(std::string("expected a number for ") + what);
    return v;
}

} // namespace detail

/// Parses a binary (P5) or ASCII (P2) PGM with maxval 255.
inline GrayImage read_pgm(std::istream& in) {
    char m0 = 0, m1 = 0;
    in.get(m0);
    in.get(m1);
    if (!in || m0 != 'P' || (m1 != '5' && m1 != '2')) {
        throw FormatError("not a P5 or P2 grayscale image");
    }
    const bool binary = (m1 == '5');
    const std::uint64_t width = detail::pgm_token(in, "width");
    const std::uint64_t height = detail::pgm_token(in, "height");
    const std::uint64_t maxval = detail::pgm_token(in, "maxval");
    if (width == 0 || height == 0) throw FormatError("image dimensions must be positive");
    if (width > 65536 || height > 65536) throw FormatError("image dimensions are out of range");
    if (maxval != 255) throw FormatError("only 8-bit images (maxval 255) are supported");

    GrayImage img;
    img.width = static_cast<std::uint32_t>(width);
    img.height = static_cast<std::uint32_t>(height);
    const std::size_t count = std::size_t(width) * height;
    img.pixels.resize(count);

    if (binary) {
        const int sep = in.get();
        if (sep == EOF || !std::isspace(sep)) {
            throw FormatError("missing separator before pixel data");
        }
        in.read(reinterpret_cast<char*>(img.pixels.data()),
                static_cast<std::streamsize>(count));
        if (static_cast<std::size_t>(in.gcount()) != count) {
            throw FormatError("pixel data truncated");
        }
    } else {
        for (std::size_t i = 0; i < count; ++i) {
            const std::uint64_t v = detail::pgm_token(in, "pixel");
            if (v > maxval) throw FormatError("pixel value exceeds maxval");
            img.pixels[i] = static_cast<std::uint8_t>(v);
        }
    }
    return img;
}

inline GrayImage read_pgm_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError("cannot open image file: " + path);
    return read_pgm(in);
}

/// Writes the binary (P5) form.
inline void write_pgm(const GrayImage& img, std::ostream& out) {
    if (img.pixels.size() != std::size_t(img.width) * img.height) {
        throw std::invalid_argument("pixel buffer does not match dimensions");
    }
    out << "P5\n" << img.width << " " << img.height << "\n255\n";
    out.write(reinterpret_cast<const char*>(img.pixels.data()),
              static_cast<std::streamsize>(img.pixels.size()));
}

inline void write_pgm_file(const GrayImage& img, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FormatError("cannot open output file: " + path);
    write_pgm(img, out);
    out.flush();
    if (!out) throw FormatError("failed writing image file: " + path);
}

/// Splits bytes into 4-bit symbols, high nibble first.
inline std::vector<std::uint8_t> bytes_to_symbols(std::span<const std::uint8_t> bytes) {
    std::vector<std::uint8_t> out;
    out.reserve(bytes.size() * 2);
    for (const std::uint8_t b : bytes) {
        out.push_back(b >> 4);
        out.push_back(b & 0xF);
    }
    return out;
}

/// Re-packs 4-bit symbols into bytes; the count must be even.
inline std::vector<std::uint8_t> symbols_to_bytes(std::span<const std::uint8_t> symbols) {
    if (symbols.size() % 2 != 0) {
        throw std::invalid_argument("symbol count must be even");
    }
    std::vector<std::uint8_t> out;
    out.reserve(symbols.size() / 2);
    for (std::size_t i = 0; i < symbols.size(); i += 2) {
        if (symbols[i] >= 16 || symbols[i + 1] >= 16) {
            throw std::invalid_argument("symbol out of nibble range");
        }
        out.push_back(static_cast<std::uint8_t>((symbols[i] << 4) | symbols[i + 1]));
    }
    return out;
}

} // namespace plcie
