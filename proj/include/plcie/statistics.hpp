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

#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

#include "plcie/image.hpp"
#include "plcie/keyschedule.hpp"
#include "plcie/pipeline.hpp"
#include "plcie/random.hpp"

namespace plcie {

inline std::array<std::uint64_t, 256> histogram(const GrayImage& img) {
    std::array<std::uint64_t, 256> h{};
    for (const std::uint8_t px : img.pixels) ++h[px];
    return h;
}

/// Shannon entropy of the image split into unit_bits-wide samples
/// (MSB-first within each byte).  unit_bits must divide 8.  The result
/// is in bits, at most unit_bits.
inline double entropy_bits(const GrayImage& img, unsigned unit_bits) {
    if (unit_bits == 0 || unit_bits > 8 || 8 % unit_bits != 0) {
        throw std::invalid_argument("sample width must divide 8");
    }
    if (img.pixels.empty()) throw std::invalid_argument("image is empty");
    const unsigned per_byte = 8 / unit_bits;
    const unsigned mask = (1u << unit_bits) - 1u;
    std::vector<std::uint64_t> bins(std::size_t(1) << unit_bits, 0);
    for (const std::uint8_t px : img.pixels) {
        for (unsigned k = 0; k < per_byte; ++k) {
            bins[(px >> (8 - unit_bits * (k + 1))) & mask] += 1;
        }
    }
    const double total = double(img.pixels.size()) * per_byte;
    double h = 0.0;
    for (const std::uint64_t n : bins) {
        if (n == 0) continue;
        const double p = double(n) / total;
        h -= p * std::log2(p);
    }
    return h;
}

enum class Granularity : std::uint8_t { byte, nibble };

namespace detail {

inline void check_same_shape(const GrayImage& a, const GrayImage& b) {
    if (a.width != b.width || a.height != b.height) {
        throw std::invalid_argument("images differ in shape");
    }
    if (a.pixels.empty()) throw std::invalid_argument("image is empty");
}

} // namespace detail

/// Percentage of positions whose values differ.
inline double npcr(const GrayImage& a, const GrayImage& b,
                   Granularity g = Granularity::byte) {
    detail::check_same_shape(a, b);
    std::uint64_t diff = 0, total = 0;
    for (std::size_t i = 0; i < a.pixels.size(); ++i) {
        if (g == Granularity::byte) {
            diff += a.pixels[i] != b.pixels[i];
            total += 1;
        } else {
            diff += (a.pixels[i] >> 4) != (b.pixels[i] >> 4);
            diff += (a.pixels[i] & 0xF) != (b.pixels[i] & 0xF);
            total += 2;
        }
    }
    return 100.0 * double(diff) / double(total);
}

/// Mean absolute difference as a percentage of the value range.
inline double uaci(const GrayImage& a, const GrayImage& b,
                   Granularity g = Granularity::byte) {
    detail::check_same_shape(a, b);
    double acc = 0.0;
    std::uint64_t total = 0;
    for (std::size_t i = 0; i < a.pixels.size(); ++i) {
        if (g == Granularity::byte) {
            acc += std::abs(int(a.pixels[i]) - int(b.pixels[i])) / 255.0;
            total += 1;
        } else {
            acc += std::abs(int(a.pixels[i] >> 4) - int(b.pixels[i] >> 4)) / 15.0;
            acc += std::abs(int(a.pixels[i] & 0xF) - int(b.pixels[i] & 0xF)) / 15.0;
            total += 2;
        }
    }
    return 100.0 * acc / double(total);
}

enum class Direction : std::uint8_t { horizontal, vertical, diagonal };

/// Pearson correlation of n_pairs randomly sampled adjacent pixel
/// pairs.  Degenerate samples (either margin constant) report 0.
inline double adjacent_correlation(const GrayImage& img, Direction dir,
                                   std::size_t n_pairs, std::mt19937_64& rng) {
    if (img.width < 2 || img.height < 2) {
        throw std::invalid_argument("image too small for adjacency sampling");
    }
    if (n_pairs < 2) throw std::invalid_argument("need at least two pairs");
    const std::uint32_t max_x = (dir == Direction::vertical) ? img.width : img.width - 1;
    const std::uint32_t max_y = (dir == Direction::horizontal) ? img.height : img.height - 1;
    const std::uint32_t dx = (dir == Direction::vertical) ? 0 : 1;
    const std::uint32_t dy = (dir == Direction::horizontal) ? 0 : 1;

    double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    const double n = double(n_pairs);
    for (std::size_t i = 0; i < n_pairs; ++i) {
        const auto x = static_cast<std::uint32_t>(uniform_below(rng, max_x));
        const auto y = static_cast<std::uint32_t>(uniform_below(rng, max_y));
        const double u = img.at(x, y);
        const double v = img.at(x + dx, y + dy);
        sx += u;
        sy += v;
        sxx += u * u;
        syy += v * v;
        sxy += u * v;
    }
    const double var_x = sxx / n - (sx / n) * (sx / n);
    const double var_y = syy / n - (sy / n) * (sy / n);
    if (var_x <= 0.0 || var_y <= 0.0) return 0.0;
    const double cov = sxy / n - (sx / n) * (sy / n);
    return cov / std::sqrt(var_x * var_y);
}

struct SensitivityResult {
    double npcr_percent = 0.0;
    double uaci_percent = 0.0;
};

/// Re-encrypts the image after flipping the low bit of one random
/// pixel and compares the payload ciphertexts.  Both encryptions share
/// the initialization vector but draw fresh whitening prefixes, which
/// is what randomizes repeated encryptions of similar plaintexts.  The
/// comparison uses byte granularity on the payload raster.
inline SensitivityResult plaintext_sensitivity(const CipherParams& params, unsigned key_prec,
                                               const GrayImage& img, std::mt19937_64& rng) {
    if (img.pixels.empty()) throw std::invalid_argument("image is empty");
    const InitVector iv = random_iv(params.ell(), params.field(), rng);
    const auto w1 = random_whitening(params.iota(), params.field(), rng);
    const auto w2 = random_whitening(params.iota(), params.field(), rng);

    GrayImage flipped = img;
    const auto idx = static_cast<std::size_t>(uniform_below(rng, img.pixels.size()));
    flipped.pixels[idx] ^= 1u;

    const CipherContainer c1 = encrypt_image(params, key_prec, img, iv, w1);
    const CipherContainer c2 = encrypt_image(params, key_prec, flipped, iv, w2);
    const GrayImage r1 = container_payload_image(c1);
    const GrayImage r2 = container_payload_image(c2);
    return SensitivityResult{npcr(r1, r2), uaci(r1, r2)};
}

/// Encrypts the image under the key and under the key with one random
/// bit flipped, sharing the initialization vector and the whitening so
/// that only the key differs.  Flips that the schedule rejects (the
/// length grammar or a weak-key check) or absorbs (the forced low seed
/// bit) are skipped and redrawn.
inline SensitivityResult key_sensitivity(const KeyMaterial& key, const Field& field,
                                         const GrayImage& img, std::mt19937_64& rng) {
    if (img.pixels.empty()) throw std::invalid_argument("image is empty");
    const CipherParams params = derive_params(key, field, CipherMode::self_synchronous);
    const InitVector iv = random_iv(params.ell(), field, rng);
    const auto whitening = random_whitening(params.iota(), field, rng);

    const KeyBits bits = serialize_key(key);
    const CipherContainer c1 = encrypt_image(params, key.prec, img, iv, whitening);
    const GrayImage r1 = container_payload_image(c1);
    for (unsigned attempt = 0; attempt < 512; ++attempt) {
        const auto pos = static_cast<std::size_t>(uniform_below(rng, bits.bit_count));
        KeyBits flipped = bits;
        flipped.bytes[pos / 8] ^= static_cast<std::uint8_t>(1u << (7 - pos % 8));
        KeyMaterial key2;
        std::optional<CipherParams> params2;
        try {
            key2 = parse_key(flipped);
            params2.emplace(derive_params(key2, field, CipherMode::self_synchronous));
        } catch (const FormatError&) {
            continue;
        } catch (const KeyError&) {
            continue;
        }
        if (*params2 == params) continue;
        const CipherContainer c2 = encrypt_image(*params2, key2.prec, img, iv, whitening);
        const GrayImage r2 = container_payload_image(c2);
        return SensitivityResult{npcr(r1, r2), uaci(r1, r2)};
    }
    throw KeyError("no accepted single-bit key variation within the retry budget");
}

} // namespace plcie
