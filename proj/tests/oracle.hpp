// Copyright 2026 The hlt Authors
// SPDX-License-Identifier: Apache-2.0

// Independent reference helpers shared by the unit tests.

#pragma once

#include <boost/multiprecision/cpp_int.hpp>
#include <random>
#include <vector>

#include "hlt/rns.hpp"

namespace oracle {

using boost::multiprecision::cpp_int;

inline cpp_int product(const hlt::RnsBasis &basis, const std::vector<std::size_t> &ids) {
    cpp_int q = 1;
    for (auto id : ids) q *= basis.modulus(id).value();
    return q;
}

inline cpp_int inv_mod(cpp_int a, const cpp_int &mod) {
    cpp_int m = mod, x0 = 0, x1 = 1;
    a %= mod;
    while (a > 1) {
        const cpp_int t = a / m;
        cpp_int r = a % m;
        a = m;
        m = r;
        const cpp_int tx = x1 - t * x0;
        x1 = x0;
        x0 = tx;
    }
    if (x1 < 0) x1 += mod;
    return x1;
}

// Textbook CRT reconstruction of coefficient `i` into [0, prod).
inline cpp_int crt(const hlt::RnsBasis &basis, const hlt::RnsPoly &p, std::size_t i) {
    const cpp_int big = product(basis, p.ids);
    cpp_int acc = 0;
    for (std::size_t k = 0; k < p.size(); ++k) {
        const cpp_int qk = basis.modulus(p.ids[k]).value();
        const cpp_int hat = big / qk;
        acc += cpp_int(p.limbs[k].coeffs[i]) * inv_mod(hat % qk, qk) % qk * hat;
    }
    return acc % big;
}

inline cpp_int centered(cpp_int v, const cpp_int &mod) {
    v %= mod;
    if (v < 0) v += mod;
    if (v > mod / 2) v -= mod;
    return v;
}

inline std::vector<std::uint64_t> negacyclic_schoolbook(const std::vector<std::uint64_t> &a,
                                                        const std::vector<std::uint64_t> &b, std::uint64_t q) {
    const std::size_t n = a.size();
    std::vector<unsigned __int128> pos(n, 0), neg(n, 0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const unsigned __int128 t = static_cast<unsigned __int128>(a[i]) * b[j] % q;
            if (i + j < n)
                pos[i + j] = (pos[i + j] + t) % q;
            else
                neg[i + j - n] = (neg[i + j - n] + t) % q;
        }
    std::vector<std::uint64_t> out(n);
    for (std::size_t k = 0; k < n; ++k) out[k] = static_cast<std::uint64_t>((pos[k] + q - neg[k]) % q);
    return out;
}

inline bool trial_division_prime(std::uint64_t n) {
    if (n < 2) return false;
    for (std::uint64_t d = 2; d * d <= n; ++d)
        if (n % d == 0) return false;
    return true;
}

} // namespace oracle
