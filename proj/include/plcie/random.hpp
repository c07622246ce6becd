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
#include <stdexcept>

namespace plcie {

/// Uniform draw from [0, bound) using rejection, so results depend only
/// on the mt19937_64 output sequence and are identical on every
/// platform (std::uniform_int_distribution is not portable).
inline std::uint64_t uniform_below(std::mt19937_64& rng, std::uint64_t bound) {
    if (bound == 0) throw std::invalid_argument("bound must be positive");
    if ((bound & (bound - 1)) == 0) {
        return rng() & (bound - 1);
    }
    const std::uint64_t limit = std::uint64_t(-1) - (std::uint64_t(-1) % bound + 1) % bound;
    for (;;) {
        const std::uint64_t v = rng();
        if (v <= limit) return v % bound;
    }
}

} // namespace plcie
