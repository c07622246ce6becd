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

#include <chrono>
#include <cstdint>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include "plcie/gf.hpp"
#include "plcie/kernel.hpp"
#include "plcie/keyschedule.hpp"
#include "plcie/pipeline.hpp"
#include "plcie/random.hpp"

namespace plcie {

/// Substitutes the symbols at the given flat positions with uniformly
/// drawn different values.  Substitution only: the channel never drops
/// or inserts symbols, so vector framing is preserved.
inline std::vector<std::uint8_t> corrupt_stream(std::span<const std::uint8_t> flat,
                                                std::span<const std::size_t> positions,
                                                const Field& field, std::mt19937_64& rng) {
    std::vector<std::uint8_t> out(flat.begin(), flat.end());
    const unsigned q = field.order();
    for (const std::size_t pos : positions) {
        if (pos >= out.size()) throw std::invalid_argument("corruption position out of range");
        const auto offset = static_cast<std::uint8_t>(1 + uniform_below(rng, q - 1));
        out[pos] = static_cast<std::uint8_t>((out[pos] + offset) % q);
    }
    return out;
}

/// Substitutes each symbol independently with probability rate.
inline std::vector<std::uint8_t> corrupt_stream_rate(std::span<const std::uint8_t> flat,
                                                     double rate, const Field& field,
                                                     std::mt19937_64& rng) {
    if (!(rate >= 0.0) || !(rate <= 1.0)) {
        throw std::invalid_argument("corruption rate must lie in [0, 1]");
    }
    std::vector<std::size_t> positions;
    constexpr std::uint64_t kScale = std::uint64_t(1) << 53;
    const auto threshold = static_cast<std::uint64_t>(rate * double(kScale));
    for (std::size_t i = 0; i < flat.size(); ++i) {
        if (uniform_below(rng, kScale) < threshold) positions.push_back(i);
    }
    return corrupt_stream(flat, positions, field, rng);
}

/// Outcome of one isolated-corruption experiment.  The corrupted
/// symbol's own output is unrecoverable by construction, so delay
/// counts the outputs after it up to and including the last wrong one;
/// 0 means everything past the damaged symbol was already correct.  The
/// structural bound is ell (memory residence) + nilpotency_index (state
/// decay), and it is tight.
struct ResyncReport {
    std::size_t corrupted_vector = 0;
    unsigned component = 0;
    std::size_t first_wrong = 0;  // index of the first wrong output, if any
    std::size_t resync_index = 0; // first index from which every output matches
    std::size_t delay = 0;
    std::size_t wrong_outputs = 0;
    std::size_t bound = 0;
};

/// Encrypts the symbols, substitutes one component of one ciphertext
/// vector, decrypts the damaged stream, and measures how long the
/// decoder output stays wrong.
inline ResyncReport measure_resync(const CipherParams& params, const InitVector& iv,
                                   std::span<const std::uint8_t> symbols,
                                   std::size_t vector_index, std::mt19937_64& rng) {
    if (symbols.empty()) throw std::invalid_argument("symbol stream is empty");
    if (vector_index >= symbols.size()) {
        throw std::invalid_argument("corrupted vector index out of range");
    }
    const unsigned ell = params.ell();
    CipherState enc = state_from_iv(iv, params);
    std::vector<std::uint8_t> flat = encrypt_symbols(params, enc, symbols);

    const auto component = static_cast<unsigned>(uniform_below(rng, ell));
    const std::size_t pos = vector_index * ell + component;
    const std::size_t positions[] = {pos};
    flat = corrupt_stream(flat, positions, params.field(), rng);

    CipherState dec = state_from_iv(iv, params);
    const std::vector<std::uint8_t> out = decrypt_symbols(params, dec, flat);

    ResyncReport report;
    report.corrupted_vector = vector_index;
    report.component = component;
    report.bound = ell + params.nilpotency_index();
    std::size_t first_wrong = 0, last_wrong = 0;
    bool any = false;
    for (std::size_t i = 0; i < out.size(); ++i) {
        if (out[i] != symbols[i]) {
            if (i < vector_index) {
                throw std::logic_error("output before the corruption point diverged");
            }
            if (!any) first_wrong = i;
            last_wrong = i;
            any = true;
            report.wrong_outputs += 1;
        }
    }
    report.first_wrong = any ? first_wrong : vector_index;
    report.resync_index = any ? last_wrong + 1 : vector_index;
    report.delay = any ? (last_wrong - vector_index) : 0;
    return report;
}

/// Throughput and cost measurement over a random symbol stream.
struct BenchReport {
    std::size_t payload_symbols = 0;
    std::size_t total_steps = 0; // whitening included
    std::uint64_t encrypt_field_ops = 0;
    std::uint64_t decrypt_field_ops = 0;
    double encrypt_ops_per_symbol = 0.0;
    double decrypt_ops_per_symbol = 0.0;
    double encrypt_ops_per_bit = 0.0;
    double encrypt_seconds = 0.0;
    double decrypt_seconds = 0.0;
    double encrypt_symbols_per_second = 0.0;
};

inline BenchReport bench_throughput(const CipherParams& params, std::size_t payload_symbols,
                                    std::mt19937_64& rng) {
    if (payload_symbols == 0) throw std::invalid_argument("need at least one symbol");
    const Field& field = params.field();
    std::vector<std::uint8_t> symbols;
    symbols.reserve(payload_symbols);
    for (std::size_t i = 0; i < payload_symbols; ++i) {
        symbols.push_back(static_cast<std::uint8_t>(uniform_below(rng, field.order())));
    }
    const InitVector iv = random_iv(params.ell(), field, rng);
    const auto whitening = random_whitening(params.iota(), field, rng);

    BenchReport r;
    r.payload_symbols = payload_symbols;
    r.total_steps = payload_symbols + params.iota();

    using clock = std::chrono::steady_clock;
    std::vector<std::uint8_t> flat;
    {
        opcount::Scope scope;
        const auto t0 = clock::now();
        flat = encrypt_stream(params, iv, symbols, whitening);
        const auto t1 = clock::now();
        r.encrypt_field_ops = scope.count();
        r.encrypt_seconds = std::chrono::duration<double>(t1 - t0).count();
    }
    {
        opcount::Scope scope;
        const auto t0 = clock::now();
        const auto plain = decrypt_stream(params, iv, flat);
        const auto t1 = clock::now();
        r.decrypt_field_ops = scope.count();
        r.decrypt_seconds = std::chrono::duration<double>(t1 - t0).count();
        if (plain != symbols) throw std::logic_error("round trip failed during benchmark");
    }
    const double steps = double(r.total_steps);
    r.encrypt_ops_per_symbol = double(r.encrypt_field_ops) / steps;
    r.decrypt_ops_per_symbol = double(r.decrypt_field_ops) / steps;
    r.encrypt_ops_per_bit = r.encrypt_ops_per_symbol / 4.0;
    r.encrypt_symbols_per_second =
        r.encrypt_seconds > 0.0 ? steps / r.encrypt_seconds : 0.0;
    return r;
}

} // namespace plcie
