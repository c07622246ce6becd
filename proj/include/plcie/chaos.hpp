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

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <vector>

namespace plcie {

/// Fixed-point state of the discretized tripling map.  The value x is an
/// integer in [0, 2^prec) standing for the fraction x / 2^prec.
struct ChaoticState {
    std::uint64_t x;
    unsigned prec;

    ChaoticState(std::uint64_t x_, unsigned prec_) : x(x_), prec(prec_) {
        if (prec < 2 || prec > 32) throw std::invalid_argument("precision out of range");
        if (x >> prec) throw std::invalid_argument("state exceeds precision");
    }

    std::uint64_t wrap_mask() const noexcept { return (std::uint64_t(1) << prec) - 1; }

    friend bool operator==(const ChaoticState& a, const ChaoticState& b) {
        return a.x == b.x && a.prec == b.prec;
    }
};

/// One step of the real-valued tripling map on (0, 1).
inline double renyi_step_exact(double x) {
    if (!(x > 0.0) || !(x < 1.0)) throw std::domain_error("map state must lie in (0, 1)");
    return std::fmod(3.0 * x, 1.0);
}

/// One step of the integer map: x' = 3 x mod 2^prec.
inline ChaoticState renyi_step_disc(ChaoticState s) {
    s.x = (3 * s.x) & s.wrap_mask();
    return s;
}

/// Jumps the integer map forward by `steps` iterations at once, via
/// 3^steps mod 2^prec.  Equivalent to calling renyi_step_disc in a loop.
inline ChaoticState renyi_forward(ChaoticState s, std::uint64_t steps) {
    const std::uint64_t mask = s.wrap_mask();
    std::uint64_t factor = 1;
    std::uint64_t base = 3;
    while (steps != 0) {
        if (steps & 1u) factor = (factor * base) & mask;
        base = (base * base) & mask;
        steps >>= 1;
    }
    s.x = (s.x * factor) & mask;
    return s;
}

/// A q-element slice of one orbit of the integer map, in orbit order.
/// values[i] is the (start_index + i)-th iterate of the seed.
struct OrbitWindow {
    std::vector<std::uint64_t> values;
    std::uint64_t start_index;
};

/// Collects the window values[i] = iterate (l0 + 1 + i) of the seed r0,
/// for i in [0, q).  Returns std::nullopt when any window value repeats
/// or is zero, which callers treat as a retry signal.
inline std::optional<OrbitWindow> generate_window(ChaoticState r0, std::uint64_t l0,
                                                  std::size_t q) {
    if (q == 0) throw std::invalid_argument("window length must be positive");
    ChaoticState s = renyi_forward(r0, l0 + 1);
    OrbitWindow w;
    w.start_index = l0 + 1;
    w.values.reserve(q);
    for (std::size_t i = 0; i < q; ++i) {
        if (s.x == 0) return std::nullopt;
        for (std::size_t j = 0; j < i; ++j) {
            if (w.values[j] == s.x) return std::nullopt;
        }
        w.values.push_back(s.x);
        s = renyi_step_disc(s);
    }
    return w;
}

} // namespace plcie
