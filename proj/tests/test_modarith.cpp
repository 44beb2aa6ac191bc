// Copyright 2026 The hlt Authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <boost/multiprecision/miller_rabin.hpp>
#include <random>

#include "hlt/modarith.hpp"
#include "oracle.hpp"

using namespace hlt;

TEST_CASE("find_ntt_primes agrees with a brute-force scan") {
    // Largest 14-bit prime congruent to 1 mod 32, found by trial division.
    u64 expect = 0;
    for (u64 c = (1u << 14) - 1; c >= (1u << 13); --c)
        if (c % 32 == 1 && oracle::trial_division_prime(c)) {
            expect = c;
            break;
        }
    CHECK(expect == 16193);
    const auto got = find_ntt_primes(14, 16, 1);
    REQUIRE(got.size() == 1);
    CHECK(got[0].value() == expect);

    // Full scan for a small width: every qualifying prime, descending.
    std::vector<u64> all;
    for (u64 c = (1u << 12) - 1; c >= (1u << 11); --c)
        if (c % 64 == 1 && oracle::trial_division_prime(c)) all.push_back(c);
    const auto scanned = find_ntt_primes(12, 32, all.size());
    REQUIRE(scanned.size() == all.size());
    for (std::size_t i = 0; i < all.size(); ++i) CHECK(scanned[i].value() == all[i]);
    CHECK_THROWS_AS(find_ntt_primes(12, 32, all.size() + 1), Error);
}

TEST_CASE("find_ntt_primes reports an empty search space") {
    try {
        find_ntt_primes(5, 16, 1);
        FAIL("expected NotEnoughPrimes");
    } catch (const Error &e) {
        CHECK(e.code() == ErrorCode::NotEnoughPrimes);
    }
}

TEST_CASE("find_ntt_primes at 54 bits for N = 2^13") {
    const std::size_t n = 1 << 13;
    const auto ps = find_ntt_primes(54, n, 5);
    REQUIRE(ps.size() == 5);
    std::mt19937_64 rng(1);
    for (std::size_t i = 0; i < ps.size(); ++i) {
        const u64 q = ps[i].value();
        CHECK((q >> 53) == 1);
        CHECK((q % (2 * n)) == 1);
        CHECK(boost::multiprecision::miller_rabin_test(boost::multiprecision::cpp_int(q), 25, rng));
        if (i > 0) CHECK(ps[i - 1].value() > q);
    }
}

TEST_CASE("mod_mul matches 128-bit schoolbook on 10^6 random pairs") {
    std::mt19937_64 rng(42);
    const std::vector<Modulus> mods = {find_ntt_primes(54, 1 << 10, 1)[0], find_ntt_primes(60, 1 << 4, 1)[0],
                                       find_ntt_primes(30, 1 << 6, 1)[0], Modulus(3)};
    std::size_t bad = 0;
    for (std::size_t t = 0; t < 1000000; ++t) {
        const Modulus &m = mods[t % mods.size()];
        const u64 a = rng() % m.value(), b = rng() % m.value();
        const u64 want = static_cast<u64>(static_cast<u128>(a) * b % m.value());
        if (mod_mul(a, b, m) != want) ++bad;
    }
    CHECK(bad == 0);
}

TEST_CASE("add, sub, pow, inverse") {
    const Modulus m = find_ntt_primes(50, 1 << 8, 1)[0];
    std::mt19937_64 rng(7);
    CHECK(mod_mul(0, 12345, m) == 0);
    CHECK(mod_inv(1, m) == 1);
    for (int t = 0; t < 10000; ++t) {
        const u64 a = rng() % m.value(), b = rng() % m.value();
        CHECK(mod_add(a, b, m) == static_cast<u64>((static_cast<u128>(a) + b) % m.value()));
        CHECK(mod_sub(a, b, m) == static_cast<u64>((static_cast<u128>(a) + m.value() - b) % m.value()));
        if (a != 0) CHECK(mod_mul(a, mod_inv(a, m), m) == 1);
    }
    CHECK(mod_pow(3, m.value() - 1, m) == 1);
    CHECK(mod_from_signed(-1, m) == m.value() - 1);
    try {
        mod_inv(0, m);
        FAIL("expected NoInverse");
    } catch (const Error &e) {
        CHECK(e.code() == ErrorCode::NoInverse);
    }
}

TEST_CASE("two_n_root is primitive, checked exhaustively for N <= 2^8") {
    for (std::size_t n = 2; n <= 256; n *= 2) {
        for (const auto &m : find_ntt_primes(40, n, 3)) {
            const u64 psi = m.two_n_root();
            u64 acc = 1;
            bool early = false;
            for (std::size_t k = 1; k < 2 * n; ++k) {
                acc = static_cast<u64>(static_cast<u128>(acc) * psi % m.value());
                if (acc == 1) early = true;
                if (k == n) CHECK(acc == m.value() - 1);
            }
            acc = static_cast<u64>(static_cast<u128>(acc) * psi % m.value());
            CHECK(acc == 1);
            CHECK_FALSE(early);
            CHECK(static_cast<u64>(static_cast<u128>(m.n_inv()) * n % m.value()) == 1);
        }
    }
}

TEST_CASE("is_prime agrees with trial division below 2^20") {
    std::size_t bad = 0;
    for (u64 v = 0; v < (1u << 20); ++v)
        if (is_prime(v) != oracle::trial_division_prime(v)) ++bad;
    CHECK(bad == 0);
}
