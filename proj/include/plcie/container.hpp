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

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "plcie/errors.hpp"

namespace plcie {

/// Encrypted-image file image: header fields, the initialization
/// vector, and the flat ciphertext symbols (whitening prefix included),
/// nibbles packed two per byte.  Carries no integrity protection.
struct CipherContainer {
    std::uint8_t version = 1;
    std::uint8_t field_id = 1; // 1 = the 16-element binary field
    std::uint8_t ell = 8;
    std::uint8_t prec_flag = 0; // 0 = 16-bit source, 1 = 32-bit source
    std::uint32_t iota = 32;
    std::uint32_t width = 0;
    std::uint32_t height = 0;
    std::vector<std::uint8_t> iv_words;       // 2*ell symbols
    std::vector<std::uint8_t> cipher_symbols; // ell * (iota + 2*width*height)

    std::uint64_t expected_symbols() const {
        return std::uint64_t(ell) * (std::uint64_t(iota) +
                                     2 * std::uint64_t(width) * height);
    }

    friend bool operator==(const CipherContainer& a, const CipherContainer& b) {
        return a.version == b.version && a.field_id == b.field_id && a.ell == b.ell &&
               a.prec_flag == b.prec_flag && a.iota == b.iota && a.width == b.width &&
               a.height == b.height && a.iv_words == b.iv_words &&
               a.cipher_symbols == b.cipher_symbols;
    }
};

namespace detail {

inline void put_u32be(std::vector<std::uint8_t>& out, std::uint32_t v) {
    out.push_back(static_cast<std::uint8_t>(v >> 24));
    out.push_back(static_cast<std::uint8_t>(v >> 16));
    out.push_back(static_cast<std::uint8_t>(v >> 8));
    out.push_back(static_cast<std::uint8_t>(v));
}

inline std::uint32_t get_u32be(std::span<const std::uint8_t> in, std::size_t off) {
    return (std::uint32_t(in[off]) << 24) | (std::uint32_t(in[off + 1]) << 16) |
           (std::uint32_t(in[off + 2]) << 8) | std::uint32_t(in[off + 3]);
}

inline void pack_nibbles(std::span<const std::uint8_t> symbols,
                         std::vector<std::uint8_t>& out) {
    if (symbols.size() % 2 != 0) throw std::invalid_argument("symbol count must be even");
    for (std::size_t i = 0; i < symbols.size(); i += 2) {
        if (symbols[i] >= 16 || symbols[i + 1] >= 16) {
            throw std::invalid_argument("symbol out of nibble range");
        }
        out.push_back(static_cast<std::uint8_t>((symbols[i] << 4) | symbols[i + 1]));
    }
}

} // namespace detail

inline std::vector<std::uint8_t> encode_container(const CipherContainer& c) {
    if (c.version != 1) throw std::invalid_argument("unsupported container version");
    if (c.field_id != 1) throw std::invalid_argument("unsupported field identifier");
    if (c.ell < 2) throw std::invalid_argument("state length must be at least 2");
    if (c.prec_flag > 1) throw std::invalid_argument("unsupported precision flag");
    if (c.width == 0 || c.height == 0) throw std::invalid_argument("dimensions must be positive");
    if (c.iv_words.size() != 2 * std::size_t(c.ell)) {
        throw std::invalid_argument("initialization vector must hold 2*ell words");
    }
    if (c.cipher_symbols.size() != c.expected_symbols()) {
        throw std::invalid_argument("ciphertext symbol count does not match the header");
    }
    if (c.cipher_symbols.size() % 2 != 0) {
        throw std::invalid_argument("ciphertext symbol count must be even");
    }
    std::vector<std::uint8_t> out;
    out.reserve(20 + c.ell + c.cipher_symbols.size() / 2);
    out.insert(out.end(), {'P', 'L', 'C', '1'});
    out.push_back(c.version);
    out.push_back(c.field_id);
    out.push_back(c.ell);
    out.push_back(c.prec_flag);
    detail::put_u32be(out, c.iota);
    detail::put_u32be(out, c.width);
    detail::put_u32be(out, c.height);
    detail::pack_nibbles(c.iv_words, out);
    detail::pack_nibbles(c.cipher_symbols, out);
    return out;
}

inline CipherContainer decode_container(std::span<const std::uint8_t> data) {
    if (data.size() < 20 || data[0] != 'P' || data[1] != 'L' || data[2] != 'C' ||
        data[3] != '1') {
        throw FormatError("not an encrypted-image container");
    }
    CipherContainer c;
    c.version = data[4];
    if (c.version != 1) throw FormatError("unsupported container version");
    c.field_id = data[5];
    if (c.field_id != 1) throw FormatError("unsupported field identifier");
    c.ell = data[6];
    if (c.ell < 2) throw FormatError("state length out of range");
    c.prec_flag = data[7];
    if (c.prec_flag > 1) throw FormatError("unsupported precision flag");
    c.iota = detail::get_u32be(data, 8);
    c.width = detail::get_u32be(data, 12);
    c.height = detail::get_u32be(data, 16);
    if (c.width == 0 || c.height == 0) throw FormatError("dimensions must be positive");
    if (c.width > 65536 || c.height > 65536) throw FormatError("dimensions are out of range");
    if (c.iota > (1u << 20)) throw FormatError("whitening length is out of range");

    const std::size_t iv_bytes = c.ell; // 2*ell nibbles
    const std::uint64_t symbols = c.expected_symbols();
    if (symbols % 2 != 0) throw FormatError("ciphertext symbol count must be even");
    const std::uint64_t expect = 20 + iv_bytes + symbols / 2;
    if (data.size() != expect) throw FormatError("container length does not match its header");

    c.iv_words.reserve(2 * std::size_t(c.ell));
    for (std::size_t i = 0; i < iv_bytes; ++i) {
        const std::uint8_t b = data[20 + i];
        c.iv_words.push_back(b >> 4);
        c.iv_words.push_back(b & 0xF);
    }
    c.cipher_symbols.reserve(symbols);
    for (std::uint64_t i = 0; i < symbols / 2; ++i) {
        const std::uint8_t b = data[20 + iv_bytes + i];
        c.cipher_symbols.push_back(b >> 4);
        c.cipher_symbols.push_back(b & 0xF);
    }
    return c;
}

} // namespace plcie
