// Copyright 2026 The hlt Authors
// SPDX-License-Identifier: Apache-2.0

#include "hlt/modarith.hpp"

#include <bit>
#include <string>

namespace hlt {

namespace {

u64 mulmod_wide(u64 a, u64 b, u64 m) noexcept {
    return static_cast<u64>(static_cast<u128>(a) * b % m);
}

u64 powmod_wide(u64 b, u64 e, u64 m) noexcept {
    u64 r = 1 % m;
    b %= m;
    while (e) {
        if (e & 1) r = mulmod_wide(r, b, m);
        b = mulmod_wide(b, b, m);
        e >>= 1;
    }
    return r;
}

} // namespace

Modulus::Modulus(u64 q) : q_(q) {
    if (q < 3 || (q & 1) == 0 || q >= (u64{1} << 62))
        throw Error(ErrorCode::InvalidArgument, "modulus must be odd, >= 3 and < 2^62");
    bits_ = std::bit_width(q);
    mu_ = (static_cast<u128>(1) << (2 * bits_)) / q;
}

Modulus::Modulus(u64 q, std::size_t ring_dim) : Modulus(q) {
    if (ring_dim < 2 || !std::has_single_bit(ring_dim))
        throw Error(ErrorCode::InvalidArgument, "ring dimension must be a power of two");
    const u64 two_n = 2 * static_cast<u64>(ring_dim);
    if (q % two_n != 1 || !is_prime(q))
        throw Error(ErrorCode::InvalidArgument,
                    "modulus " + std::to_string(q) + " is not a prime = 1 mod 2N");
    ring_dim_ = ring_dim;
    // x^((q-1)/2N) has order dividing 2N; it is primitive iff its N-th power is -1.
    for (u64 x = 2; x < q; ++x) {
        const u64 cand = mod_pow(x, (q - 1) / two_n, *this);
        if (mod_pow(cand, ring_dim, *this) == q - 1) {
            root_ = cand;
            break;
        }
    }
    n_inv_ = mod_inv(static_cast<u64>(ring_dim % q), *this);
}

u64 Modulus::two_n_root() const {
    if (!ntt_friendly()) throw Error(ErrorCode::InvalidArgument, "modulus has no ring dimension");
    return root_;
}

u64 Modulus::n_inv() const {
    if (!ntt_friendly()) throw Error(ErrorCode::InvalidArgument, "modulus has no ring dimension");
    return n_inv_;
}

u64 mod_pow(u64 base, u64 exp, const Modulus &m) noexcept {
    u64 r = 1;
    base = base % m.value();
    while (exp) {
        if (exp & 1) r = mod_mul(r, base, m);
        base = mod_mul(base, base, m);
        exp >>= 1;
    }
    return r;
}

u64 mod_inv(u64 a, const Modulus &m) {
    // Extended Euclid over signed 128-bit to stay exact for 62-bit moduli.
    __int128 t = 0, new_t = 1;
    __int128 r = m.value(), new_r = a % m.value();
    while (new_r != 0) {
        const __int128 quot = r / new_r;
        const __int128 tt = t - quot * new_t;
        t = new_t;
        new_t = tt;
        const __int128 rr = r - quot * new_r;
        r = new_r;
        new_r = rr;
    }
    if (r != 1)
        throw Error(ErrorCode::NoInverse,
                    std::to_string(a) + " is not invertible mod " + std::to_string(m.value()));
    if (t < 0) t += m.value();
    return static_cast<u64>(t);
}

u64 mod_from_signed(i64 v, const Modulus &m) noexcept {
    const u64 q = m.value();
    if (v >= 0) return static_cast<u64>(v) % q;
    const u64 mag = static_cast<u64>(-(v + 1)) + 1;
    const u64 r = mag % q;
    return r == 0 ? 0 : q - r;
}

bool is_prime(u64 n) noexcept {
    if (n < 2) return false;
    for (u64 p : {2ULL, 3ULL, 5ULL, 7ULL, 11ULL, 13ULL, 17ULL, 19ULL, 23ULL, 29ULL, 31ULL, 37ULL}) {
        if (n % p == 0) return n == p;
    }
    u64 d = n - 1;
    int s = 0;
    while ((d & 1) == 0) {
        d >>= 1;
        ++s;
    }
    for (u64 a : {2ULL, 325ULL, 9375ULL, 28178ULL, 450775ULL, 9780504ULL, 1795265022ULL}) {
        a %= n;
        if (a == 0) continue;
        u64 x = powmod_wide(a, d, n);
        if (x == 1 || x == n - 1) continue;
        bool composite = true;
        for (int i = 1; i < s; ++i) {
            x = mulmod_wide(x, x, n);
            if (x == n - 1) {
                composite = false;
                break;
            }
        }
        if (composite) return false;
    }
    return true;
}

std::vector<Modulus> find_ntt_primes(int bit_width, std::size_t ring_dim, std::size_t count) {
    if (bit_width < 2 || bit_width > 61)
        throw Error(ErrorCode::InvalidArgument, "bit width must be in [2, 61]");
    if (ring_dim < 2 || !std::has_single_bit(ring_dim))
        throw Error(ErrorCode::InvalidArgument, "ring dimension must be a power of two");
    const u64 step = 2 * static_cast<u64>(ring_dim);
    const u64 lo = u64{1} << (bit_width - 1);
    const u64 hi = (u64{1} << bit_width) - 1;

    std::vector<Modulus> out;
    out.reserve(count);
    if (count == 0) return out;
    if (hi < step + 1) throw Error(ErrorCode::NotEnoughPrimes, "no candidate = 1 mod 2N fits the bit width");
    u64 cand = ((hi - 1) / step) * step + 1;
    while (cand >= lo && out.size() < count) {
        if (cand > 1 && is_prime(cand)) out.emplace_back(cand, ring_dim);
        if (cand < step) break;
        cand -= step;
    }
    if (out.size() < count)
        throw Error(ErrorCode::NotEnoughPrimes,
                    "found " + std::to_string(out.size()) + " of " + std::to_string(count) + " primes of " +
                        std::to_string(bit_width) + " bits");
    return out;
}

} // namespace hlt
