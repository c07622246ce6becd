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
#include <istream>
#include <optional>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "plcie/chaos.hpp"
#include "plcie/errors.hpp"
#include "plcie/gf.hpp"
#include "plcie/kernel.hpp"
#include "plcie/permutation.hpp"
#include "plcie/random.hpp"

namespace plcie {

/// One keyed entry of the plaintext-injection matrix.
struct KeyTriple {
    std::uint8_t row;   // 3 bits
    std::uint8_t col;   // 3 bits
    std::uint8_t value; // 4 bits

    friend bool operator==(const KeyTriple& a, const KeyTriple& b) {
        return a.row == b.row && a.col == b.col && a.value == b.value;
    }
};

/// Decoded secret key.  prec selects the fixed-point width of the
/// chaotic source (16 or 32 bits); r0 and l0 are its seed and transient
/// length; default_entry fills the plaintext-injection matrix before
/// the triples overwrite individual cells.
struct KeyMaterial {
    unsigned prec = 16;
    std::uint64_t r0 = 0;
    std::uint64_t l0 = 0;
    std::uint8_t default_entry = 0;
    std::vector<KeyTriple> triples;

    friend bool operator==(const KeyMaterial& a, const KeyMaterial& b) {
        return a.prec == b.prec && a.r0 == b.r0 && a.l0 == b.l0 &&
               a.default_entry == b.default_entry && a.triples == b.triples;
    }
};

/// Raw key bit string, MSB-first within each byte; pad bits after
/// bit_count are zero.
struct KeyBits {
    std::vector<std::uint8_t> bytes;
    std::size_t bit_count = 0;
};

namespace detail {

class BitWriter {
public:
    void append(std::uint64_t value, unsigned nbits) {
        for (unsigned i = nbits; i-- > 0;) {
            const unsigned bit = (value >> i) & 1u;
            if (count_ % 8 == 0) bytes_.push_back(0);
            bytes_.back() |= static_cast<std::uint8_t>(bit << (7 - count_ % 8));
            ++count_;
        }
    }
    KeyBits finish() && { return KeyBits{std::move(bytes_), count_}; }

private:
    std::vector<std::uint8_t> bytes_;
    std::size_t count_ = 0;
};

class BitReader {
public:
    explicit BitReader(const KeyBits& bits) : bits_(bits) {}

    std::uint64_t read(unsigned nbits) {
        std::uint64_t v = 0;
        for (unsigned i = 0; i < nbits; ++i) {
            if (pos_ >= bits_.bit_count) throw FormatError("key bit string truncated");
            const std::uint8_t byte = bits_.bytes[pos_ / 8];
            v = (v << 1) | ((byte >> (7 - pos_ % 8)) & 1u);
            ++pos_;
        }
        return v;
    }

    std::size_t position() const noexcept { return pos_; }

private:
    const KeyBits& bits_;
    std::size_t pos_ = 0;
};

// Emits the top four bits of each successive orbit value.
class NibbleStream {
public:
    explicit NibbleStream(ChaoticState s) : s_(s) {
        if (s_.prec < 4) throw std::invalid_argument("stream precision below one symbol");
    }

    std::uint8_t next() {
        const auto v = static_cast<std::uint8_t>(s_.x >> (s_.prec - 4));
        s_ = renyi_step_disc(s_);
        return v;
    }

private:
    ChaoticState s_;
};

inline FieldMatrix draw_matrix(NibbleStream& stream, const Field& field, unsigned ell) {
    FieldMatrix m(field, ell, ell);
    for (unsigned r = 0; r < ell; ++r) {
        for (unsigned c = 0; c < ell; ++c) {
            m.set(r, c, stream.next());
        }
    }
    return m;
}

} // namespace detail

inline constexpr unsigned kPermRetryBudget = 64;
inline constexpr unsigned kMaskRetryBudget = 256;

/// Result of deriving the keyed permutation: the permutation itself,
/// the orbit state positioned just past the consumed window (the rest
/// of the key schedule keeps drawing from there), and the index of the
/// seed variant that produced a usable window.
struct PermDerivation {
    KeyPermutation pi;
    ChaoticState next;
    unsigned attempt;
};

/// Walks the orbit of the odd-forced seed and builds the permutation
/// from the first q-value window past the transient.  A window with a
/// zero or repeated value retires the seed: attempt k re-seeds with
/// (r0 xor k) forced odd.  More than kPermRetryBudget dead seeds
/// rejects the key.
inline PermDerivation derive_permutation(std::uint64_t r0, std::uint64_t l0, unsigned prec,
                                         std::size_t q) {
    const std::uint64_t mask = (prec >= 64) ? ~std::uint64_t(0)
                                            : ((std::uint64_t(1) << prec) - 1);
    for (unsigned attempt = 0; attempt < kPermRetryBudget; ++attempt) {
        const std::uint64_t seed = ((r0 ^ attempt) | 1u) & mask;
        const ChaoticState start(seed, prec);
        const auto window = generate_window(start, l0, q);
        if (!window) continue;
        KeyPermutation pi = build_permutation(*window);
        ChaoticState next = renyi_forward(start, l0 + 1 + q);
        return PermDerivation{std::move(pi), next, attempt};
    }
    throw KeyError("no usable orbit window within the retry budget");
}

/// Packs a key into its bit string:
///   [1 bit precision flag][prec bits r0][prec bits l0][4 bits default]
///   [per triple: 3 bits row, 3 bits col, 4 bits value]
/// Bit counts: 37 + 10n at 16-bit precision, 69 + 10n at 32-bit.
inline KeyBits serialize_key(const KeyMaterial& key, unsigned ell = 8) {
    if (key.prec != 16 && key.prec != 32) {
        throw std::invalid_argument("precision must be 16 or 32");
    }
    const std::uint64_t mask = (std::uint64_t(1) << key.prec) - 1;
    if (key.r0 > mask || key.l0 > mask) {
        throw std::invalid_argument("seed fields exceed precision");
    }
    if (key.default_entry >= 16) throw std::invalid_argument("default entry out of range");
    if (key.triples.size() >= std::size_t(ell) * ell / 2) {
        throw KeyError("too many matrix triples for the state length");
    }
    detail::BitWriter w;
    w.append(key.prec == 32 ? 1 : 0, 1);
    w.append(key.r0, key.prec);
    w.append(key.l0, key.prec);
    w.append(key.default_entry, 4);
    for (const auto& t : key.triples) {
        if (t.row >= 8 || t.col >= 8 || t.value >= 16) {
            throw std::invalid_argument("triple field out of range");
        }
        w.append(t.row, 3);
        w.append(t.col, 3);
        w.append(t.value, 4);
    }
    return std::move(w).finish();
}

/// Parses a key bit string.  The length must match the grammar exactly;
/// keys with a zero seed or zero transient are rejected as weak.
inline KeyMaterial parse_key(const KeyBits& bits, unsigned ell = 8) {
    if (bits.bytes.size() != (bits.bit_count + 7) / 8) {
        throw FormatError("key byte buffer does not match its bit count");
    }
    if (bits.bit_count % 8 != 0) {
        const std::uint8_t last = bits.bytes.empty() ? 0 : bits.bytes.back();
        if ((last & ((1u << (8 - bits.bit_count % 8)) - 1u)) != 0) {
            throw FormatError("key pad bits must be zero");
        }
    }
    detail::BitReader r(bits);
    const unsigned prec = r.read(1) ? 32 : 16;
    const std::size_t fixed = 1 + 2 * std::size_t(prec) + 4;
    if (bits.bit_count < fixed || (bits.bit_count - fixed) % 10 != 0) {
        throw FormatError("key length inconsistent with its precision flag");
    }
    const std::size_t n = (bits.bit_count - fixed) / 10;
    if (n >= std::size_t(ell) * ell / 2) {
        throw KeyError("too many matrix triples for the state length");
    }
    KeyMaterial key;
    key.prec = prec;
    key.r0 = r.read(prec);
    key.l0 = r.read(prec);
    if (key.r0 == 0 || key.l0 == 0) throw KeyError("weak key: zero seed or zero transient");
    key.default_entry = static_cast<std::uint8_t>(r.read(4));
    key.triples.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        KeyTriple t;
        t.row = static_cast<std::uint8_t>(r.read(3));
        t.col = static_cast<std::uint8_t>(r.read(3));
        t.value = static_cast<std::uint8_t>(r.read(4));
        key.triples.push_back(t);
    }
    return key;
}

/// Draws a fresh key.  Triple positions are drawn distinct so every
/// triple stays visible in the derived matrix.  Default triple counts
/// (6 at 16-bit precision, 5 at 32-bit) give 97- and 119-bit keys.
inline KeyMaterial generate_key(unsigned prec, std::mt19937_64& rng,
                                std::optional<std::size_t> n_triples = std::nullopt,
                                unsigned ell = 8) {
    if (prec != 16 && prec != 32) throw std::invalid_argument("precision must be 16 or 32");
    const std::size_t n = n_triples.value_or(prec == 16 ? 6 : 5);
    if (n >= std::size_t(ell) * ell / 2) {
        throw KeyError("too many matrix triples for the state length");
    }
    KeyMaterial key;
    key.prec = prec;
    const std::uint64_t bound = std::uint64_t(1) << prec;
    do {
        key.r0 = uniform_below(rng, bound);
    } while (key.r0 == 0);
    do {
        key.l0 = uniform_below(rng, bound);
    } while (key.l0 == 0);
    key.default_entry = static_cast<std::uint8_t>(uniform_below(rng, 16));
    std::vector<bool> used(64, false);
    while (key.triples.size() < n) {
        const auto cell = static_cast<std::uint8_t>(uniform_below(rng, 64));
        if (used[cell]) continue;
        used[cell] = true;
        KeyTriple t;
        t.row = cell >> 3;
        t.col = cell & 7;
        t.value = static_cast<std::uint8_t>(uniform_below(rng, 16));
        key.triples.push_back(t);
    }
    return key;
}

/// Expands a key into cipher parameters.  The orbit past the
/// permutation window supplies, in order, the keystream matrix, the
/// output mask (redrawn until invertible), and the memory matrix; the
/// plaintext-injection matrix comes from the default entry plus the
/// triples; the linear state matrix is the one-step shift, nilpotent of
/// index ell; the permuted-state feedback is the product the observer
/// needs.  Synchronous mode zeroes the memory and injection matrices,
/// and with them the feedback.
inline CipherParams derive_params(const KeyMaterial& key, const Field& field, CipherMode mode,
                                  unsigned ell = 8, unsigned iota_override = 0) {
    if (field.order() != 16) {
        throw std::invalid_argument("key schedule drives 16-element fields only");
    }
    if (key.prec != 16 && key.prec != 32) {
        throw std::invalid_argument("precision must be 16 or 32");
    }
    if (key.r0 == 0 || key.l0 == 0) throw KeyError("weak key: zero seed or zero transient");
    if (key.r0 >> key.prec || key.l0 >> key.prec) {
        throw std::invalid_argument("seed fields exceed precision");
    }
    if (key.triples.size() >= std::size_t(ell) * ell / 2) {
        throw KeyError("too many matrix triples for the state length");
    }

    auto perm = derive_permutation(key.r0, key.l0, key.prec, field.order());
    detail::NibbleStream stream(perm.next);

    const FieldMatrix keystream = detail::draw_matrix(stream, field, ell);
    FieldMatrix output = detail::draw_matrix(stream, field, ell);
    {
        unsigned attempts = 1;
        while (!try_mat_inv(output)) {
            if (++attempts > kMaskRetryBudget) {
                throw KeyError("no invertible output mask within the retry budget");
            }
            output = detail::draw_matrix(stream, field, ell);
        }
    }
    FieldMatrix memory = detail::draw_matrix(stream, field, ell);

    FieldMatrix inject(field, ell, ell);
    for (unsigned r = 0; r < ell; ++r) {
        for (unsigned c = 0; c < ell; ++c) {
            inject.set(r, c, key.default_entry);
        }
    }
    for (const auto& t : key.triples) {
        if (t.row >= ell || t.col >= ell) throw KeyError("triple position outside the matrix");
        if (t.value >= field.order()) throw std::invalid_argument("triple value out of range");
        inject.set(t.row, t.col, t.value);
    }

    FieldMatrix shift(field, ell, ell);
    for (unsigned i = 0; i + 1 < ell; ++i) {
        shift.set(i, i + 1, 1);
    }

    FieldMatrix feedback = mat_mul(inject, mat_mul(mat_inv(output), keystream));

    if (mode == CipherMode::synchronous) {
        memory = FieldMatrix(field, ell, ell);
        inject = FieldMatrix(field, ell, ell);
        feedback = FieldMatrix(field, ell, ell);
    }

    const unsigned iota = iota_override == 0 ? 4 * ell : iota_override;
    return CipherParams::create(ell, field, std::move(perm.pi), std::move(shift),
                                std::move(feedback), keystream, std::move(inject),
                                std::move(output), std::move(memory), iota, mode);
}

/// Public per-message value: 2*ell field symbols seeding the state and
/// the memory FIFO.
struct InitVector {
    std::vector<std::uint8_t> words;

    friend bool operator==(const InitVector& a, const InitVector& b) {
        return a.words == b.words;
    }
};

inline InitVector random_iv(unsigned ell, const Field& field, std::mt19937_64& rng) {
    InitVector iv;
    iv.words.reserve(2 * std::size_t(ell));
    for (unsigned i = 0; i < 2 * ell; ++i) {
        iv.words.push_back(static_cast<std::uint8_t>(uniform_below(rng, field.order())));
    }
    return iv;
}

/// Seeds a stream state from an initialization vector: the first ell
/// words become the state, the last ell the memory FIFO, newest first.
inline CipherState state_from_iv(const InitVector& iv, const CipherParams& params) {
    const unsigned ell = params.ell();
    if (iv.words.size() != 2 * std::size_t(ell)) {
        throw std::invalid_argument("initialization vector must hold 2*ell words");
    }
    FieldVector s(params.field(), std::vector<std::uint8_t>(iv.words.begin(),
                                                            iv.words.begin() + ell));
    FieldVector mem(params.field(), std::vector<std::uint8_t>(iv.words.begin() + ell,
                                                              iv.words.end()));
    return CipherState(std::move(s), std::move(mem));
}

///// Writes the portable key file: a fixed header line, then the key bits
/// as lowercase hex, zero-padded to a digit boundary.
inline void write_key_file(const KeyMaterial& key, std::ostream& out) {
    const KeyBits bits = serialize_key(key);
    out << "plcie-key v1 ell=8 field=gf16\n";
    static const char* digits = "0123456789abcdef";
    const std::size_t n_digits = (bits.bit_count + 3) / 4;
    for (std::size_t d = 0; d < n_digits; ++d) {
        const std::uint8_t byte = bits.bytes[d / 2];
        out << digits[(d % 2 == 0) ? (byte >> 4) : (byte & 0xF)];
    }
    out << "\n";
}

/// Reads the key file format emitted by write_key_file.  The bit count
/// is recovered from the digit count: it is the unique length in the
/// final partial digit's range that matches the grammar for the
/// precision flagged by the leading bit.
inline KeyMaterial read_key_file(std::istream& in) {
    std::string header;
    if (!std::getline(in, header)) throw FormatError("empty key file");
    if (!header.empty() && header.back() == '\r') header.pop_back();
    if (header != "plcie-key v1 ell=8 field=gf16") {
        throw FormatError("unrecognized key file header");
    }
    std::string hex;
    if (!std::getline(in, hex)) throw FormatError("key file is missing its hex line");
    if (!hex.empty() && hex.back() == '\r') hex.pop_back();
    if (hex.empty()) throw FormatError("key file is missing its hex line");

    std::vector<std::uint8_t> nibbles;
    nibbles.reserve(hex.size());
    for (const char ch : hex) {
        if (ch >= '0' && ch <= '9') nibbles.push_back(static_cast<std::uint8_t>(ch - '0'));
        else if (ch >= 'a' && ch <= 'f') nibbles.push_back(static_cast<std::uint8_t>(ch - 'a' + 10));
        else throw FormatError("key hex must be lowercase hexadecimal");
    }
    const std::size_t total_bits = 4 * nibbles.size();
    const unsigned prec = (nibbles[0] & 0x8u) ? 32 : 16;
    const std::size_t fixed = 1 + 2 * std::size_t(prec) + 4;
    std::size_t bit_count = 0;
    bool found = false;
    for (std::size_t b = total_bits > 3 ? total_bits - 3 : 1; b <= total_bits; ++b) {
        if (b >= fixed && (b - fixed) % 10 == 0) {
            bit_count = b;
            found = true;
            break;
        }
    }
    if (!found) throw FormatError("key length inconsistent with its precision flag");

    KeyBits bits;
    bits.bit_count = bit_count;
    bits.bytes.assign((bit_count + 7) / 8, 0);
    for (std::size_t b = 0; b < total_bits; ++b) {
        const unsigned bit = (nibbles[b / 4] >> (3 - b % 4)) & 1u;
        if (b >= bit_count) {
            if (bit != 0) throw FormatError("key pad bits must be zero");
            continue;
        }
        bits.bytes[b / 8] |= static_cast<std::uint8_t>(bit << (7 - b % 8));
    }
    return parse_key(bits);
}

} // namespace plcie
