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

#include <cassert>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "plcie/errors.hpp"

namespace plcie {

/// Cost instrumentation for field operations.  Every add, sub, neg, mul
/// and inv on a Field bumps the thread-local counter while a Scope is
/// alive.  The counter is monotonic; a Scope measures a delta.
namespace opcount {

inline thread_local std::uint64_t counter = 0;
inline thread_local bool enabled = false;

inline void note() noexcept {
    if (enabled) ++counter;
}

/// Enables counting for the lifetime of the object.  Nested scopes each
/// see their own delta; the outer scope includes the inner one.
class Scope {
public:
    Scope() : prev_enabled_(enabled), start_(counter) { enabled = true; }
    Scope(const Scope&) = delete;
    Scope& operator=(const Scope&) = delete;
    ~Scope() { enabled = prev_enabled_; }

    std::uint64_t count() const noexcept { return counter - start_; }

private:
    bool prev_enabled_;
    std::uint64_t start_;
};

} // namespace opcount

enum class FieldKind : std::uint8_t {
    binary_ext, // GF(2^m), elements are polynomial bit masks
    prime,      // GF(p), elements are residues
};

namespace detail {

// Degree of a nonzero GF(2)[x] polynomial given as a bit mask.
inline int poly_degree(std::uint32_t mask) {
    int d = -1;
    while (mask != 0) {
        ++d;
        mask >>= 1;
    }
    return d;
}

// Product in GF(2)[x] (carry-less multiply), no reduction.
inline std::uint32_t clmul(std::uint32_t a, std::uint32_t b) {
    std::uint32_t acc = 0;
    while (b != 0) {
        if (b & 1u) acc ^= a;
        a <<= 1;
        b >>= 1;
    }
    return acc;
}

// Remainder of a modulo m in GF(2)[x].
inline std::uint32_t poly_mod(std::uint32_t a, std::uint32_t m) {
    const int dm = poly_degree(m);
    for (int d = poly_degree(a); d >= dm; d = poly_degree(a)) {
        a ^= m << (d - dm);
    }
    return a;
}

// A degree-4 polynomial over GF(2) is irreducible iff it has no root
// and is not the square of the one irreducible quadratic (x^2+x+1).
inline bool irreducible_deg4(std::uint32_t mask) {
    for (std::uint32_t x = 0; x < 2; ++x) {
        std::uint32_t v = 0;
        for (int d = 4; d >= 0; --d) {
            v = clmul(v, x) ^ ((mask >> d) & 1u);
        }
        if (v == 0) return false;
    }
    return mask != clmul(0b111u, 0b111u);
}

inline bool is_prime(unsigned n) {
    if (n < 2) return false;
    for (unsigned d = 2; d * d <= n; ++d) {
        if (n % d == 0) return false;
    }
    return true;
}

struct FieldImpl {
    FieldKind kind;
    std::uint16_t q;        // field order
    std::uint8_t reduction; // binary_ext: reduction polynomial mask
    std::uint8_t modulus;   // prime: the prime itself
    std::vector<std::uint8_t> mul_table; // q*q, row-major
    std::vector<std::uint8_t> inv_table; // q, entry 0 unused
};

inline std::shared_ptr<const FieldImpl> make_binary4(std::uint8_t reduction) {
    if ((reduction & 0x10u) == 0 || reduction >= 0x20u) {
        throw std::invalid_argument("reduction polynomial must have degree 4");
    }
    if (!irreducible_deg4(reduction)) {
        throw std::invalid_argument("reduction polynomial is reducible");
    }
    auto impl = std::make_shared<FieldImpl>();
    impl->kind = FieldKind::binary_ext;
    impl->q = 16;
    impl->reduction = reduction;
    impl->modulus = 0;
    impl->mul_table.assign(16 * 16, 0);
    impl->inv_table.assign(16, 0);
    for (std::uint32_t a = 0; a < 16; ++a) {
        for (std::uint32_t b = 0; b < 16; ++b) {
            const auto p = static_cast<std::uint8_t>(poly_mod(clmul(a, b), reduction));
            impl->mul_table[a * 16 + b] = p;
            if (p == 1) impl->inv_table[a] = static_cast<std::uint8_t>(b);
        }
    }
    return impl;
}

inline std::shared_ptr<const FieldImpl> make_prime(std::uint8_t modulus) {
    if (!is_prime(modulus)) {
        throw std::invalid_argument("field modulus must be prime");
    }
    auto impl = std::make_shared<FieldImpl>();
    impl->kind = FieldKind::prime;
    impl->q = modulus;
    impl->reduction = 0;
    impl->modulus = modulus;
    const unsigned q = modulus;
    impl->mul_table.assign(q * q, 0);
    impl->inv_table.assign(q, 0);
    for (unsigned a = 0; a < q; ++a) {
        for (unsigned b = 0; b < q; ++b) {
            const auto p = static_cast<std::uint8_t>((a * b) % q);
            impl->mul_table[a * q + b] = p;
            if (p == 1) impl->inv_table[a] = static_cast<std::uint8_t>(b);
        }
    }
    return impl;
}

} // namespace detail

/// Cheap-to-copy handle to a finite field of order at most 256.
/// Two handles compare equal when they describe the same field, even if
/// they were constructed independently.
class Field {
public:
    /// GF(16) with the reduction polynomial x^4 + x + 1.
    static Field gf16() { return binary4(0b10011); }

    /// GF(16) with an arbitrary irreducible degree-4 reduction mask.
    static Field binary4(std::uint8_t reduction_mask) {
        return Field(detail::make_binary4(reduction_mask));
    }

    /// GF(p) for a prime p < 256.
    static Field prime(std::uint8_t modulus) {
        return Field(detail::make_prime(modulus));
    }

    FieldKind kind() const noexcept { return impl_->kind; }
    unsigned order() const noexcept { return impl_->q; }
    std::uint8_t reduction_poly() const noexcept { return impl_->reduction; }
    std::uint8_t modulus() const noexcept { return impl_->modulus; }

    std::uint8_t add(std::uint8_t a, std::uint8_t b) const noexcept {
        assert(a < impl_->q && b < impl_->q);
        opcount::note();
        if (impl_->kind == FieldKind::binary_ext) return a ^ b;
        const unsigned s = unsigned(a) + unsigned(b);
        return static_cast<std::uint8_t>(s >= impl_->q ? s - impl_->q : s);
    }

    std::uint8_t neg(std::uint8_t a) const noexcept {
        assert(a < impl_->q);
        opcount::note();
        if (impl_->kind == FieldKind::binary_ext) return a;
        return static_cast<std::uint8_t>(a == 0 ? 0 : impl_->q - a);
    }

    std::uint8_t sub(std::uint8_t a, std::uint8_t b) const noexcept {
        assert(a < impl_->q && b < impl_->q);
        opcount::note();
        if (impl_->kind == FieldKind::binary_ext) return a ^ b;
        const int d = int(a) - int(b);
        return static_cast<std::uint8_t>(d < 0 ? d + impl_->q : d);
    }

    std::uint8_t mul(std::uint8_t a, std::uint8_t b) const noexcept {
        assert(a < impl_->q && b < impl_->q);
        opcount::note();
        return impl_->mul_table[std::size_t(a) * impl_->q + b];
    }

    /// Multiplicative inverse; a must be nonzero.
    std::uint8_t inv(std::uint8_t a) const {
        assert(a < impl_->q);
        if (a == 0) throw std::domain_error("inverse of zero");
        opcount::note();
        return impl_->inv_table[a];
    }

    bool operator==(const Field& o) const noexcept {
        return impl_->kind == o.impl_->kind && impl_->q == o.impl_->q &&
               impl_->reduction == o.impl_->reduction;
    }
    bool operator!=(const Field& o) const noexcept { return !(*this == o); }

private:
    explicit Field(std::shared_ptr<const detail::FieldImpl> impl) : impl_(std::move(impl)) {}
    std::shared_ptr<const detail::FieldImpl> impl_;
};

/// A single field element carrying its field, for call sites where the
/// typed interface reads better than raw values.  Mixed-field arithmetic
/// throws std::invalid_argument.
class FieldElement {
public:
    FieldElement(Field field, std::uint8_t value) : field_(std::move(field)), value_(value) {
        if (value_ >= field_.order()) throw std::invalid_argument("element out of field range");
    }

    std::uint8_t value() const noexcept { return value_; }
    const Field& field() const noexcept { return field_; }

    FieldElement inverse() const { return FieldElement(field_, field_.inv(value_)); }

    friend FieldElement operator+(const FieldElement& a, const FieldElement& b) {
        check_same(a, b);
        return FieldElement(a.field_, a.field_.add(a.value_, b.value_));
    }
    friend FieldElement operator-(const FieldElement& a, const FieldElement& b) {
        check_same(a, b);
        return FieldElement(a.field_, a.field_.sub(a.value_, b.value_));
    }
    friend FieldElement operator*(const FieldElement& a, const FieldElement& b) {
        check_same(a, b);
        return FieldElement(a.field_, a.field_.mul(a.value_, b.value_));
    }
    friend bool operator==(const FieldElement& a, const FieldElement& b) {
        return a.field_ == b.field_ && a.value_ == b.value_;
    }
    friend bool operator!=(const FieldElement& a, const FieldElement& b) { return !(a == b); }

private:
    static void check_same(const FieldElement& a, const FieldElement& b) {
        if (a.field_ != b.field_) throw std::invalid_argument("field mismatch");
    }
    Field field_;
    std::uint8_t value_;
};

/// Dense column vector over a field.
class FieldVector {
public:
    FieldVector(Field field, std::size_t len)
        : field_(std::move(field)), values_(len, 0) {}

    FieldVector(Field field, std::vector<std::uint8_t> values)
        : field_(std::move(field)), values_(std::move(values)) {
        for (auto v : values_) {
            if (v >= field_.order()) throw std::invalid_argument("element out of field range");
        }
    }

    std::size_t size() const noexcept { return values_.size(); }
    const Field& field() const noexcept { return field_; }
    const std::vector<std::uint8_t>& values() const noexcept { return values_; }

    std::uint8_t operator[](std::size_t i) const {
        assert(i < values_.size());
        return values_[i];
    }

    void set(std::size_t i, std::uint8_t v) {
        assert(i < values_.size());
        if (v >= field_.order()) throw std::invalid_argument("element out of field range");
        values_[i] = v;
    }

    bool is_zero() const noexcept {
        for (auto v : values_) {
            if (v != 0) return false;
        }
        return true;
    }

    friend bool operator==(const FieldVector& a, const FieldVector& b) {
        return a.field_ == b.field_ && a.values_ == b.values_;
    }
    friend bool operator!=(const FieldVector& a, const FieldVector& b) { return !(a == b); }

private:
    Field field_;
    std::vector<std::uint8_t> values_;
};

/// Dense row-major matrix over a field.
class FieldMatrix {
public:
    FieldMatrix(Field field, std::size_t rows, std::size_t cols)
        : field_(std::move(field)), rows_(rows), cols_(cols), values_(rows * cols, 0) {}

    FieldMatrix(Field field, std::size_t rows, std::size_t cols, std::vector<std::uint8_t> values)
        : field_(std::move(field)), rows_(rows), cols_(cols), values_(std::move(values)) {
        if (values_.size() != rows_ * cols_) throw std::invalid_argument("matrix shape mismatch");
        for (auto v : values_) {
            if (v >= field_.order()) throw std::invalid_argument("element out of field range");
        }
    }

    static FieldMatrix identity(Field field, std::size_t n) {
        FieldMatrix m(std::move(field), n, n);
        for (std::size_t i = 0; i < n; ++i) m.values_[i * n + i] = 1;
        return m;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    const Field& field() const noexcept { return field_; }

    std::uint8_t at(std::size_t r, std::size_t c) const {
        assert(r < rows_ && c < cols_);
        return values_[r * cols_ + c];
    }

    void set(std::size_t r, std::size_t c, std::uint8_t v) {
        assert(r < rows_ && c < cols_);
        if (v >= field_.order()) throw std::invalid_argument("element out of field range");
        values_[r * cols_ + c] = v;
    }

    bool is_zero() const noexcept {
        for (auto v : values_) {
            if (v != 0) return false;
        }
        return true;
    }

    friend bool operator==(const FieldMatrix& a, const FieldMatrix& b) {
        return a.field_ == b.field_ && a.rows_ == b.rows_ && a.cols_ == b.cols_ &&
               a.values_ == b.values_;
    }
    friend bool operator!=(const FieldMatrix& a, const FieldMatrix& b) { return !(a == b); }

private:
    Field field_;
    std::size_t rows_, cols_;
    std::vector<std::uint8_t> values_;
};

namespace detail {

inline void check_field(const Field& a, const Field& b) {
    if (a != b) throw std::invalid_argument("field mismatch");
}

} // namespace detail

inline FieldVector vec_add(const FieldVector& a, const FieldVector& b) {
    detail::check_field(a.field(), b.field());
    if (a.size() != b.size()) throw std::invalid_argument("vector length mismatch");
    FieldVector out(a.field(), a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        out.set(i, a.field().add(a[i], b[i]));
    }
    return out;
}

inline FieldVector vec_sub(const FieldVector& a, const FieldVector& b) {
    detail::check_field(a.field(), b.field());
    if (a.size() != b.size()) throw std::invalid_argument("vector length mismatch");
    FieldVector out(a.field(), a.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        out.set(i, a.field().sub(a[i], b[i]));
    }
    return out;
}

inline FieldVector mat_vec_mul(const FieldMatrix& m, const FieldVector& v) {
    detail::check_field(m.field(), v.field());
    if (m.cols() != v.size()) throw std::invalid_argument("matrix/vector shape mismatch");
    const Field& f = m.field();
    FieldVector out(f, m.rows());
    for (std::size_t r = 0; r < m.rows(); ++r) {
        std::uint8_t acc = 0;
        for (std::size_t c = 0; c < m.cols(); ++c) {
            acc = f.add(acc, f.mul(m.at(r, c), v[c]));
        }
        out.set(r, acc);
    }
    return out;
}

inline FieldMatrix mat_add(const FieldMatrix& a, const FieldMatrix& b) {
    detail::check_field(a.field(), b.field());
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw std::invalid_argument("matrix shape mismatch");
    }
    FieldMatrix out(a.field(), a.rows(), a.cols());
    for (std::size_t r = 0; r < a.rows(); ++r) {
        for (std::size_t c = 0; c < a.cols(); ++c) {
            out.set(r, c, a.field().add(a.at(r, c), b.at(r, c)));
        }
    }
    return out;
}

inline FieldMatrix mat_sub(const FieldMatrix& a, const FieldMatrix& b) {
    detail::check_field(a.field(), b.field());
    if (a.rows() != b.rows() || a.cols() != b.cols()) {
        throw std::invalid_argument("matrix shape mismatch");
    }
    FieldMatrix out(a.field(), a.rows(), a.cols());
    for (std::size_t r = 0; r < a.rows(); ++r) {
        for (std::size_t c = 0; c < a.cols(); ++c) {
            out.set(r, c, a.field().sub(a.at(r, c), b.at(r, c)));
        }
    }
    return out;
}

inline FieldMatrix mat_mul(const FieldMatrix& a, const FieldMatrix& b) {
    detail::check_field(a.field(), b.field());
    if (a.cols() != b.rows()) throw std::invalid_argument("matrix shape mismatch");
    const Field& f = a.field();
    FieldMatrix out(f, a.rows(), b.cols());
    for (std::size_t r = 0; r < a.rows(); ++r) {
        for (std::size_t c = 0; c < b.cols(); ++c) {
            std::uint8_t acc = 0;
            for (std::size_t k = 0; k < a.cols(); ++k) {
                acc = f.add(acc, f.mul(a.at(r, k), b.at(k, c)));
            }
            out.set(r, c, acc);
        }
    }
    return out;
}

/// Gauss-Jordan inverse; std::nullopt when the matrix is singular.
inline std::optional<FieldMatrix> try_mat_inv(const FieldMatrix& m) {
    if (m.rows() != m.cols()) throw std::invalid_argument("matrix not square");
    const Field& f = m.field();
    const std::size_t n = m.rows();
    FieldMatrix a = m;
    FieldMatrix inv = FieldMatrix::identity(f, n);
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        while (pivot < n && a.at(pivot, col) == 0) ++pivot;
        if (pivot == n) return std::nullopt;
        if (pivot != col) {
            for (std::size_t c = 0; c < n; ++c) {
                const auto t1 = a.at(col, c);
                a.set(col, c, a.at(pivot, c));
                a.set(pivot, c, t1);
                const auto t2 = inv.at(col, c);
                inv.set(col, c, inv.at(pivot, c));
                inv.set(pivot, c, t2);
            }
        }
        const std::uint8_t scale = f.inv(a.at(col, col));
        for (std::size_t c = 0; c < n; ++c) {
            a.set(col, c, f.mul(a.at(col, c), scale));
            inv.set(col, c, f.mul(inv.at(col, c), scale));
        }
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col || a.at(r, col) == 0) continue;
            const std::uint8_t factor = a.at(r, col);
            for (std::size_t c = 0; c < n; ++c) {
                a.set(r, c, f.sub(a.at(r, c), f.mul(factor, a.at(col, c))));
                inv.set(r, c, f.sub(inv.at(r, c), f.mul(factor, inv.at(col, c))));
            }
        }
    }
    return inv;
}

inline FieldMatrix mat_inv(const FieldMatrix& m) {
    auto inv = try_mat_inv(m);
    if (!inv) throw SingularMatrixError("matrix is singular");
    return *inv;
}

inline FieldMatrix mat_pow(const FieldMatrix& m, unsigned e) {
    if (m.rows() != m.cols()) throw std::invalid_argument("matrix not square");
    FieldMatrix acc = FieldMatrix::identity(m.field(), m.rows());
    for (unsigned i = 0; i < e; ++i) acc = mat_mul(acc, m);
    return acc;
}

} // namespace plcie
