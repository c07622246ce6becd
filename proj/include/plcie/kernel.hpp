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
#include <stdexcept>
#include <utility>
#include <vector>

#include "plcie/gf.hpp"
#include "plcie/permutation.hpp"

namespace plcie {

enum class CipherMode : std::uint8_t {
    synchronous,      // keystream depends on the seed state only
    self_synchronous, // keystream feeds back the transmitted stream
};

/// Immutable per-key cipher configuration.  Build through create(),
/// which enforces the structural conditions decryption relies on:
/// the output mask must be invertible, and in self-synchronizing mode
/// the linear state matrix must be nilpotent and the permuted-state
/// feedback must equal plain_mat * output_mat_inv * keystream_mat, so
/// that the receiver's state error obeys e' = state_mat * e and dies
/// out after at most nilpotency_index steps.
class CipherParams {
public:
    static CipherParams create(unsigned ell, Field field, KeyPermutation pi,
                               FieldMatrix state_mat, FieldMatrix state_perm_mat,
                               FieldMatrix keystream_mat, FieldMatrix plain_mat,
                               FieldMatrix output_mat, FieldMatrix memory_mat,
                               unsigned iota, CipherMode mode) {
        if (ell < 2) throw std::invalid_argument("state length must be at least 2");
        if (pi.size() != field.order()) {
            throw std::invalid_argument("permutation size does not match field order");
        }
        for (const FieldMatrix* m : {&state_mat, &state_perm_mat, &keystream_mat, &plain_mat,
                                     &output_mat, &memory_mat}) {
            if (m->field() != field) throw std::invalid_argument("matrix field mismatch");
            if (m->rows() != ell || m->cols() != ell) {
                throw std::invalid_argument("matrix shape mismatch");
            }
        }
        auto output_inv = try_mat_inv(output_mat);
        if (!output_inv) throw std::invalid_argument("output mask must be invertible");

        unsigned n0 = 0;
        {
            FieldMatrix p = FieldMatrix::identity(field, ell);
            for (unsigned k = 1; k <= ell; ++k) {
                p = mat_mul(p, state_mat);
                if (p.is_zero()) {
                    n0 = k;
                    break;
                }
            }
        }
        if (mode == CipherMode::self_synchronous) {
            if (n0 == 0) {
                throw std::invalid_argument("state matrix must be nilpotent");
            }
            const FieldMatrix expected =
                mat_mul(plain_mat, mat_mul(*output_inv, keystream_mat));
            if (state_perm_mat != expected) {
                throw std::invalid_argument(
                    "permuted-state feedback must match plain/output/keystream product");
            }
        }

        return CipherParams(ell, std::move(field), std::move(pi), std::move(state_mat),
                            std::move(state_perm_mat), std::move(keystream_mat),
                            std::move(plain_mat), std::move(output_mat),
                            std::move(*output_inv), std::move(memory_mat), iota, mode, n0);
    }

    unsigned ell() const noexcept { return ell_; }
    const Field& field() const noexcept { return field_; }
    const KeyPermutation& pi() const noexcept { return pi_; }
    const FieldMatrix& state_mat() const noexcept { return state_mat_; }
    const FieldMatrix& state_perm_mat() const noexcept { return state_perm_mat_; }
    const FieldMatrix& keystream_mat() const noexcept { return keystream_mat_; }
    const FieldMatrix& plain_mat() const noexcept { return plain_mat_; }
    const FieldMatrix& output_mat() const noexcept { return output_mat_; }
    const FieldMatrix& output_mat_inv() const noexcept { return output_mat_inv_; }
    const FieldMatrix& memory_mat() const noexcept { return memory_mat_; }
    unsigned iota() const noexcept { return iota_; }
    CipherMode mode() const noexcept { return mode_; }

    /// Smallest k with state_mat^k = 0, or 0 when state_mat is not
    /// nilpotent (possible in synchronous mode only).
    unsigned nilpotency_index() const noexcept { return nilpotency_index_; }

    std::uint8_t perm_zero() const noexcept { return perm_zero_; }

    /// Column 0 and the row sums of the remaining columns, for the two
    /// matrices that only ever multiply a permuted single-symbol vector
    /// (p, 0, ..., 0): the product collapses to
    /// pi(p) * col0 + pi(0) * tail.
    const std::vector<std::uint8_t>& output_col0() const noexcept { return output_col0_; }
    const std::vector<std::uint8_t>& output_tail() const noexcept { return output_tail_; }
    const std::vector<std::uint8_t>& plain_col0() const noexcept { return plain_col0_; }
    const std::vector<std::uint8_t>& plain_tail() const noexcept { return plain_tail_; }

    friend bool operator==(const CipherParams& a, const CipherParams& b) {
        return a.ell_ == b.ell_ && a.field_ == b.field_ && a.pi_ == b.pi_ &&
               a.state_mat_ == b.state_mat_ && a.state_perm_mat_ == b.state_perm_mat_ &&
               a.keystream_mat_ == b.keystream_mat_ && a.plain_mat_ == b.plain_mat_ &&
               a.output_mat_ == b.output_mat_ && a.memory_mat_ == b.memory_mat_ &&
               a.iota_ == b.iota_ && a.mode_ == b.mode_;
    }

private:
    CipherParams(unsigned ell, Field field, KeyPermutation pi, FieldMatrix state_mat,
                 FieldMatrix state_perm_mat, FieldMatrix keystream_mat, FieldMatrix plain_mat,
                 FieldMatrix output_mat, FieldMatrix output_mat_inv, FieldMatrix memory_mat,
                 unsigned iota, CipherMode mode, unsigned n0)
        : ell_(ell),
          field_(std::move(field)),
          pi_(std::move(pi)),
          state_mat_(std::move(state_mat)),
          state_perm_mat_(std::move(state_perm_mat)),
          keystream_mat_(std::move(keystream_mat)),
          plain_mat_(std::move(plain_mat)),
          output_mat_(std::move(output_mat)),
          output_mat_inv_(std::move(output_mat_inv)),
          memory_mat_(std::move(memory_mat)),
          iota_(iota),
          mode_(mode),
          nilpotency_index_(n0),
          perm_zero_(pi_.map(0)) {
        output_col0_.resize(ell_);
        output_tail_.resize(ell_);
        plain_col0_.resize(ell_);
        plain_tail_.resize(ell_);
        for (unsigned r = 0; r < ell_; ++r) {
            output_col0_[r] = output_mat_.at(r, 0);
            plain_col0_[r] = plain_mat_.at(r, 0);
            std::uint8_t ot = 0, pt = 0;
            for (unsigned c = 1; c < ell_; ++c) {
                ot = field_.add(ot, output_mat_.at(r, c));
                pt = field_.add(pt, plain_mat_.at(r, c));
            }
            output_tail_[r] = ot;
            plain_tail_[r] = pt;
        }
    }

    unsigned ell_;
    Field field_;
    KeyPermutation pi_;
    FieldMatrix state_mat_;
    FieldMatrix state_perm_mat_;
    FieldMatrix keystream_mat_;
    FieldMatrix plain_mat_;
    FieldMatrix output_mat_;
    FieldMatrix output_mat_inv_;
    FieldMatrix memory_mat_;
    unsigned iota_;
    CipherMode mode_;
    unsigned nilpotency_index_;
    std::uint8_t perm_zero_;
    std::vector<std::uint8_t> output_col0_, output_tail_, plain_col0_, plain_tail_;
};

/// Mutable per-stream state: the internal state vector, the FIFO of the
/// lead components of the last ell transmitted vectors (newest first),
/// and the step counter.
struct CipherState {
    FieldVector s;
    FieldVector memory;
    std::uint64_t t = 0;

    CipherState(FieldVector s_, FieldVector memory_)
        : s(std::move(s_)), memory(std::move(memory_)) {
        if (s.field() != memory.field() || s.size() != memory.size()) {
            throw std::invalid_argument("state/memory shape mismatch");
        }
    }

    friend bool operator==(const CipherState& a, const CipherState& b) {
        return a.s == b.s && a.memory == b.memory && a.t == b.t;
    }
};

/// Shifts the FIFO: drops the oldest entry, inserts `newest` in front.
inline void push_memory(CipherState& st, std::uint8_t newest) {
    for (std::size_t i = st.memory.size(); i-- > 1;) {
        st.memory.set(i, st.memory[i - 1]);
    }
    st.memory.set(0, newest);
}

namespace detail {

// out = mat * perm(s) + mat2 * s style helpers, written as plain loops so
// every field operation is counted once.

inline void mat_vec_into(const FieldMatrix& m, const FieldVector& v,
                         std::vector<std::uint8_t>& out) {
    const Field& f = m.field();
    const std::size_t rows = m.rows(), cols = m.cols();
    out.assign(rows, 0);
    for (std::size_t r = 0; r < rows; ++r) {
        std::uint8_t acc = 0;
        for (std::size_t c = 0; c < cols; ++c) {
            acc = f.add(acc, f.mul(m.at(r, c), v[c]));
        }
        out[r] = acc;
    }
}

inline void acc_mat_vec(const FieldMatrix& m, const FieldVector& v,
                        std::vector<std::uint8_t>& acc) {
    const Field& f = m.field();
    const std::size_t rows = m.rows(), cols = m.cols();
    for (std::size_t r = 0; r < rows; ++r) {
        std::uint8_t a = acc[r];
        for (std::size_t c = 0; c < cols; ++c) {
            a = f.add(a, f.mul(m.at(r, c), v[c]));
        }
        acc[r] = a;
    }
}

} // namespace detail

/// Advances a synchronous-mode state one step and returns the keystream
/// vector z = keystream_mat * perm(s).
inline FieldVector sync_step(const CipherParams& params, CipherState& st) {
    if (params.mode() != CipherMode::synchronous) {
        throw std::invalid_argument("params are not in synchronous mode");
    }
    const Field& f = params.field();
    const FieldVector ps = permute(params.pi(), st.s);
    std::vector<std::uint8_t> z, next;
    detail::mat_vec_into(params.keystream_mat(), ps, z);
    detail::mat_vec_into(params.state_mat(), st.s, next);
    detail::acc_mat_vec(params.state_perm_mat(), ps, next);
    st.s = FieldVector(f, std::move(next));
    st.t += 1;
    return FieldVector(f, std::move(z));
}

/// Encrypts one plaintext symbol into an ell-component vector and
/// advances the state.  The symbol is injected as the lead component of
/// an otherwise zero vector before permutation, so the two secret
/// matrices touch only their first column plus a constant tail.
inline FieldVector encrypt_symbol(const CipherParams& params, CipherState& st,
                                  std::uint8_t p) {
    const Field& f = params.field();
    if (p >= f.order()) throw std::invalid_argument("plaintext symbol out of field range");
    const unsigned ell = params.ell();
    const std::uint8_t pp = params.pi().map(p);
    const std::uint8_t p0 = params.perm_zero();
    const FieldVector ps = permute(params.pi(), st.s);

    std::vector<std::uint8_t> z, wm;
    if (params.mode() == CipherMode::self_synchronous) {
        detail::mat_vec_into(params.memory_mat(), st.memory, wm); // reused for the update
        z = wm;
        detail::acc_mat_vec(params.keystream_mat(), ps, z);
    } else {
        detail::mat_vec_into(params.keystream_mat(), ps, z);
    }

    std::vector<std::uint8_t> c(ell);
    for (unsigned r = 0; r < ell; ++r) {
        const std::uint8_t mask = f.add(f.mul(pp, params.output_col0()[r]),
                                        f.mul(p0, params.output_tail()[r]));
        c[r] = f.add(z[r], mask);
    }

    std::vector<std::uint8_t> next;
    if (params.mode() == CipherMode::self_synchronous) {
        next = std::move(wm);
        detail::acc_mat_vec(params.state_mat(), st.s, next);
        detail::acc_mat_vec(params.state_perm_mat(), ps, next);
        for (unsigned r = 0; r < ell; ++r) {
            const std::uint8_t inj = f.add(f.mul(pp, params.plain_col0()[r]),
                                           f.mul(p0, params.plain_tail()[r]));
            next[r] = f.add(next[r], inj);
        }
    } else {
        detail::mat_vec_into(params.state_mat(), st.s, next);
        detail::acc_mat_vec(params.state_perm_mat(), ps, next);
    }

    FieldVector cv(f, std::move(c));
    st.s = FieldVector(f, std::move(next));
    if (params.mode() == CipherMode::self_synchronous) {
        push_memory(st, cv[0]);
    }
    st.t += 1;
    return cv;
}

/// Decrypts one received vector and advances the receiver state.  In
/// self-synchronizing mode this is the unknown-input observer: the
/// residual output_mat_inv * (c - z_hat) both recovers the plaintext
/// estimate and drives the state correction, and the transmitted lead
/// component (not the local estimate) enters the memory FIFO.
inline std::uint8_t decrypt_symbol(const CipherParams& params, CipherState& st,
                                   const FieldVector& c) {
    const Field& f = params.field();
    if (c.field() != f || c.size() != params.ell()) {
        throw std::invalid_argument("ciphertext vector shape mismatch");
    }
    const unsigned ell = params.ell();
    const FieldVector ps = permute(params.pi(), st.s);

    std::vector<std::uint8_t> z, wm;
    if (params.mode() == CipherMode::self_synchronous) {
        detail::mat_vec_into(params.memory_mat(), st.memory, wm); // reused for the update
        z = wm;
        detail::acc_mat_vec(params.keystream_mat(), ps, z);
    } else {
        detail::mat_vec_into(params.keystream_mat(), ps, z);
    }

    FieldVector residual(f, ell);
    for (unsigned r = 0; r < ell; ++r) {
        residual.set(r, f.sub(c[r], z[r]));
    }
    std::vector<std::uint8_t> w;
    detail::mat_vec_into(params.output_mat_inv(), residual, w);
    const std::uint8_t p_hat = params.pi().unmap(w[0]);

    std::vector<std::uint8_t> next;
    if (params.mode() == CipherMode::self_synchronous) {
        next = std::move(wm);
        detail::acc_mat_vec(params.state_mat(), st.s, next);
        detail::acc_mat_vec(params.state_perm_mat(), ps, next);
        detail::acc_mat_vec(params.plain_mat(), FieldVector(f, std::move(w)), next);
    } else {
        detail::mat_vec_into(params.state_mat(), st.s, next);
        detail::acc_mat_vec(params.state_perm_mat(), ps, next);
    }

    st.s = FieldVector(f, std::move(next));
    if (params.mode() == CipherMode::self_synchronous) {
        push_memory(st, c[0]);
    }
    st.t += 1;
    return p_hat;
}

/// Difference between a transmitter state and a receiver state.
inline FieldVector observer_error(const FieldVector& s, const FieldVector& s_hat) {
    return vec_sub(s, s_hat);
}

/// Encrypts a run of symbols; output is flat, ell components per symbol.
inline std::vector<std::uint8_t> encrypt_symbols(const CipherParams& params, CipherState& st,
                                                 std::span<const std::uint8_t> symbols) {
    std::vector<std::uint8_t> out;
    out.reserve(symbols.size() * params.ell());
    for (const std::uint8_t p : symbols) {
        const FieldVector c = encrypt_symbol(params, st, p);
        out.insert(out.end(), c.values().begin(), c.values().end());
    }
    return out;
}

/// Decrypts a flat run of ell-component vectors, one symbol per vector.
inline std::vector<std::uint8_t> decrypt_symbols(const CipherParams& params, CipherState& st,
                                                 std::span<const std::uint8_t> flat) {
    const unsigned ell = params.ell();
    if (flat.size() % ell != 0) {
        throw std::invalid_argument("flat ciphertext length must be a multiple of ell");
    }
    const Field& f = params.field();
    std::vector<std::uint8_t> out;
    out.reserve(flat.size() / ell);
    for (std::size_t off = 0; off < flat.size(); off += ell) {
        FieldVector c(f, std::vector<std::uint8_t>(flat.begin() + off,
                                                   flat.begin() + off + ell));
        out.push_back(decrypt_symbol(params, st, c));
    }
    return out;
}

} // namespace plcie
