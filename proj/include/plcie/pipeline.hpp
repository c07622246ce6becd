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
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "plcie/container.hpp"
#include "plcie/image.hpp"
#include "plcie/kernel.hpp"
#include "plcie/keyschedule.hpp"
#include "plcie/random.hpp"

namespace plcie {

/// Draws the per-message whitening prefix: iota random symbols that are
/// encrypted ahead of the payload and discarded on decryption.  They
/// randomize the early keystream, so re-encrypting the same image under
/// the same key still yields an unrelated ciphertext.
inline std::vector<std::uint8_t> random_whitening(unsigned iota, const Field& field,
                                                  std::mt19937_64& rng) {
    std::vector<std::uint8_t> w;
    w.reserve(iota);
    for (unsigned i = 0; i < iota; ++i) {
        w.push_back(static_cast<std::uint8_t>(uniform_below(rng, field.order())));
    }
    return w;
}

/// Encrypts whitening then payload symbols from a fresh state.
inline std::vector<std::uint8_t> encrypt_stream(const CipherParams& params,
                                                const InitVector& iv,
                                                std::span<const std::uint8_t> payload,
                                                std::span<const std::uint8_t> whitening) {
    if (whitening.size() != params.iota()) {
        throw std::invalid_argument("whitening length must equal iota");
    }
    CipherState st = state_from_iv(iv, params);
    std::vector<std::uint8_t> out;
    out.reserve((whitening.size() + payload.size()) * params.ell());
    auto head = encrypt_symbols(params, st, whitening);
    out.insert(out.end(), head.begin(), head.end());
    auto body = encrypt_symbols(params, st, payload);
    out.insert(out.end(), body.begin(), body.end());
    return out;
}

/// Decrypts a flat symbol stream from a fresh state and drops the
/// whitening prefix.
inline std::vector<std::uint8_t> decrypt_stream(const CipherParams& params,
                                                const InitVector& iv,
                                                std::span<const std::uint8_t> flat) {
    const unsigned ell = params.ell();
    if (flat.size() % ell != 0) {
        throw std::invalid_argument("flat ciphertext length must be a multiple of ell");
    }
    if (flat.size() / ell < params.iota()) {
        throw std::invalid_argument("ciphertext shorter than the whitening prefix");
    }
    CipherState st = state_from_iv(iv, params);
    std::vector<std::uint8_t> all = decrypt_symbols(params, st, flat);
    return std::vector<std::uint8_t>(all.begin() + params.iota(), all.end());
}

/// Encrypts an image into a container.  Each pixel becomes two symbols
/// (high nibble first); each symbol becomes ell ciphertext symbols, so
/// the payload grows by a factor of ell over the symbol stream.
inline CipherContainer encrypt_image(const CipherParams& params, unsigned key_prec,
                                     const GrayImage& img, const InitVector& iv,
                                     std::span<const std::uint8_t> whitening) {
    if (key_prec != 16 && key_prec != 32) {
        throw std::invalid_argument("precision must be 16 or 32");
    }
    if (img.pixels.size() != std::size_t(img.width) * img.height || img.pixels.empty()) {
        throw std::invalid_argument("image buffer does not match its dimensions");
    }
    const std::vector<std::uint8_t> symbols = bytes_to_symbols(img.pixels);
    CipherContainer c;
    c.version = 1;
    c.field_id = 1;
    c.ell = static_cast<std::uint8_t>(params.ell());
    c.prec_flag = (key_prec == 32) ? 1 : 0;
    c.iota = params.iota();
    c.width = img.width;
    c.height = img.height;
    c.iv_words = iv.words;
    c.cipher_symbols = encrypt_stream(params, iv, symbols, whitening);
    return c;
}

/// Decrypts a container back into the image.  The parameters must match
/// the container header; the whitening prefix is discarded.
inline GrayImage decrypt_image(const CipherParams& params, unsigned key_prec,
                               const CipherContainer& c) {
    if (c.field_id != 1 || params.field().order() != 16) {
        throw KeyError("parameters do not match the container field");
    }
    if (c.ell != params.ell()) {
        throw KeyError("parameters do not match the container state length");
    }
    const std::uint8_t want_flag = (key_prec == 32) ? 1 : 0;
    if (c.prec_flag != want_flag) {
        throw KeyError("key precision does not match the container");
    }
    if (c.cipher_symbols.size() != c.expected_symbols()) {
        throw FormatError("ciphertext symbol count does not match the header");
    }
    CipherState st = state_from_iv(InitVector{c.iv_words}, params);
    std::vector<std::uint8_t> all = decrypt_symbols(params, st, c.cipher_symbols);
    std::vector<std::uint8_t> payload(all.begin() + c.iota, all.end());
    GrayImage img;
    img.width = c.width;
    img.height = c.height;
    img.pixels = symbols_to_bytes(payload);
    return img;
}

/// Views the payload ciphertext (whitening excluded) as a raster, for
/// the statistics battery: nibble pairs pack into bytes, and the ell
/// symbols per plaintext symbol stack as extra rows.
inline GrayImage container_payload_image(const CipherContainer& c) {
    if (c.cipher_symbols.size() != c.expected_symbols()) {
        throw FormatError("ciphertext symbol count does not match the header");
    }
    const std::size_t skip = std::size_t(c.ell) * c.iota;
    const std::vector<std::uint8_t> payload(c.cipher_symbols.begin() + skip,
                                            c.cipher_symbols.end());
    GrayImage img;
    img.width = c.width;
    img.height = static_cast<std::uint32_t>(std::size_t(c.ell) * c.height);
    img.pixels = symbols_to_bytes(payload);
    return img;
}

/// Applies the keyed permutation to every nibble of an image.  This is
/// the substitution layer alone, with no keystream: a diagnostic for
/// how much structure survives it.
inline GrayImage permute_image_values(const GrayImage& img, const KeyPermutation& pi) {
    if (pi.size() != 16) throw std::invalid_argument("permutation must act on nibbles");
    GrayImage out = img;
    for (auto& px : out.pixels) {
        px = static_cast<std::uint8_t>((pi.map(px >> 4) << 4) | pi.map(px & 0xF));
    }
    return out;
}

} // namespace plcie
