// Copyright 2026 The hlt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "hlt/error.hpp"

namespace hlt {

using u64 = std::uint64_t;
using i64 = std::int64_t;
using u128 = unsigned __int128;

/// An odd word-sized modulus with a precomputed Barrett constant.
///
/// When constructed with a ring dimension the modulus must be prime and
/// congruent to 1 mod 2N; the primitive 2N-th root of unity and N^-1 are then
/// available for the negacyclic NTT. Plain moduli (ring_dim == 0) support the
/// arithmetic but not the transform.
class Modulus {
public:
    Modulus() = default;
    explicit Modulus(u64 q);
    Modulus(u64 q, std::size_t ring_dim);

    u64 value() const noexcept { return q_; }
    int bits() const noexcept { return bits_; }
    std::size_t ring_dim() const noexcept { return ring_dim_; }
    bool ntt_friendly() const noexcept { return ring_dim_ != 0; }
    u64 two_n_root() const;
    u64 n_inv() const;

    /// Barrett reduction; `x` must be below 2^(2*bits()).
    u64 reduce(u128 x) const noexcept {
        const u128 hi = x >> (bits_ - 1);
        const u128 est = (hi * mu_) >> (bits_ + 1);
        u64 r = static_cast<u64>(x - est * q_);
        while (r >= q_) r -= q_;
        return r;
    }

    friend bool operator==(const Modulus &a, const Modulus &b) noexcept { return a.q_ == b.q_; }

private:
    u64 q_ = 0;
    int bits_ = 0;
    u128 mu_ = 0;
    std::size_t ring_dim_ = 0;
    u64 root_ = 0;
    u64 n_inv_ = 0;
};

inline u64 mod_add(u64 a, u64 b, const Modulus &m) noexcept {
    const u64 s = a + b;
    return s >= m.value() ? s - m.value() : s;
}

inline u64 mod_sub(u64 a, u64 b, const Modulus &m) noexcept {
    return a >= b ? a - b : a + m.value() - b;
}

inline u64 mod_neg(u64 a, const Modulus &m) noexcept { return a == 0 ? 0 : m.value() - a; }

inline u64 mod_mul(u64 a, u64 b, const Modulus &m) noexcept {
    return m.reduce(static_cast<u128>(a) * b);
}

u64 mod_pow(u64 base, u64 exp, const Modulus &m) noexcept;

/// Throws NoInverse when gcd(a, q) != 1 (in particular for a == 0).
u64 mod_inv(u64 a, const Modulus &m);

/// Reduces a signed integer into [0, q).
u64 mod_from_signed(i64 v, const Modulus &m) noexcept;

/// Deterministic Miller-Rabin for the full 64-bit range.
bool is_prime(u64 n) noexcept;

/// `count` distinct primes of exactly `bit_width` bits with p = 1 mod
/// 2*ring_dim, largest first.
std::vector<Modulus> find_ntt_primes(int bit_width, std::size_t ring_dim, std::size_t count);

} // namespace hlt
