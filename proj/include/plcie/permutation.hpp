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

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "plcie/chaos.hpp"
#include "plcie/gf.hpp"

namespace plcie {

/// Bijection on {0, ..., q-1} with its inverse precomputed.
class KeyPermutation {
public:
    explicit KeyPermutation(std::vector<std::uint8_t> forward) : forward_(std::move(forward)) {
        const std::size_t q = forward_.size();
        if (q == 0 || q > 256) throw std::invalid_argument("permutation size out of range");
        inverse_.assign(q, 0);
        std::vector<bool> seen(q, false);
        for (std::size_t i = 0; i < q; ++i) {
            const std::uint8_t v = forward_[i];
            if (v >= q || seen[v]) throw std::invalid_argument("mapping is not a bijection");
            seen[v] = true;
            inverse_[v] = static_cast<std::uint8_t>(i);
        }
    }

    static KeyPermutation identity(std::size_t q) {
        std::vector<std::uint8_t> f(q);
        std::iota(f.begin(), f.end(), std::uint8_t(0));
        return KeyPermutation(std::move(f));
    }

    std::size_t size() const noexcept { return forward_.size(); }
    std::uint8_t map(std::uint8_t v) const {
        if (v >= forward_.size()) throw std::invalid_argument("value out of range");
        return forward_[v];
    }
    std::uint8_t unmap(std::uint8_t v) const {
        if (v >= inverse_.size()) throw std::invalid_argument("value out of range");
        return inverse_[v];
    }

    const std::vector<std::uint8_t>& forward() const noexcept { return forward_; }
    const std::vector<std::uint8_t>& inverse() const noexcept { return inverse_; }

    bool is_identity() const noexcept {
        for (std::size_t i = 0; i < forward_.size(); ++i) {
            if (forward_[i] != i) return false;
        }
        return true;
    }

    friend bool operator==(const KeyPermutation& a, const KeyPermutation& b) {
        return a.forward_ == b.forward_;
    }
    friend bool operator!=(const KeyPermutation& a, const KeyPermutation& b) { return !(a == b); }

private:
    std::vector<std::uint8_t> forward_;
    std::vector<std::uint8_t> inverse_;
};

/// Derives the keyed permutation from an orbit window of q distinct
/// values.  Rank the window values; the permutation sends the rank of
/// each window entry to the rank of the next entry in orbit order, the
/// last entry wrapping around to the first.  A window that visits the
/// whole set {0..q-1} in sorted order therefore yields a single q-cycle
/// tracing the orbit.
inline KeyPermutation build_permutation(const OrbitWindow& w) {
    const std::size_t q = w.values.size();
    if (q == 0 || q > 256) throw std::invalid_argument("window size out of range");
    std::vector<std::size_t> by_value(q);
    std::iota(by_value.begin(), by_value.end(), std::size_t(0));
    std::sort(by_value.begin(), by_value.end(),
              [&](std::size_t a, std::size_t b) { return w.values[a] < w.values[b]; });
    for (std::size_t k = 1; k < q; ++k) {
        if (w.values[by_value[k - 1]] == w.values[by_value[k]]) {
            throw std::invalid_argument("window values must be distinct");
        }
    }
    std::vector<std::uint8_t> rank(q);
    for (std::size_t k = 0; k < q; ++k) {
        rank[by_value[k]] = static_cast<std::uint8_t>(k);
    }
    std::vector<std::uint8_t> forward(q);
    for (std::size_t i = 0; i < q; ++i) {
        forward[rank[i]] = rank[(i + 1) % q];
    }
    return KeyPermutation(std::move(forward));
}

/// Applies the permutation to every component of a vector.
inline FieldVector permute(const KeyPermutation& pi, const FieldVector& v) {
    if (pi.size() != v.field().order()) {
        throw std::invalid_argument("permutation size does not match field order");
    }
    FieldVector out(v.field(), v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        out.set(i, pi.map(v[i]));
    }
    return out;
}

inline FieldVector unpermute(const KeyPermutation& pi, const FieldVector& v) {
    if (pi.size() != v.field().order()) {
        throw std::invalid_argument("permutation size does not match field order");
    }
    FieldVector out(v.field(), v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        out.set(i, pi.unmap(v[i]));
    }
    return out;
}

} // namespace plcie
