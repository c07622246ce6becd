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

#include <stdexcept>
#include <string>

namespace plcie {

/// Malformed external input: PGM image, key file, or ciphertext container.
class FormatError : public std::runtime_error {
public:
    explicit FormatError(const std::string& what) : std::runtime_error(what) {}
};

/// A key violates a scheme constraint (weak values, too many matrix
/// triples, or parameter derivation exhausted its retry budget).
class KeyError : public std::runtime_error {
public:
    explicit KeyError(const std::string& what) : std::runtime_error(what) {}
};

/// Inversion was attempted on a singular matrix.
class SingularMatrixError : public std::runtime_error {
public:
    explicit SingularMatrixError(const std::string& what) : std::runtime_error(what) {}
};

} // namespace plcie
