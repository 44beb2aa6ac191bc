// Copyright 2026 The hlt Authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "hlt/rns.hpp"
#include "oracle.hpp"

using namespace hlt;
using oracle::cpp_int;

namespace {

RnsBasis toy_basis() { return RnsBasis(8, {Modulus(17), Modulus(97)}, {Modulus(193)}); }

// q_0..q_4 and p_0, p_1 as 20-bit NTT primes for N = 64.
RnsBasis small_basis(std::size_t q_count = 5, std::size_t alpha = 2) {
    auto ps = find_ntt_primes(20, 64, q_count + alpha);
    std::vector<Modulus> q(ps.begin(), ps.begin() + static_cast<long>(q_count));
    std::vector<Modulus> p(ps.begin() + static_cast<long>(q_count), ps.end());
    return RnsBasis(64, q, p);
}

RnsPoly random_rns(const RnsBasis &b, const std::vector<std::size_t> &ids, std::mt19937_64 &rng) {
    RnsPoly p = RnsPoly::zero(b, ids, Domain::Coefficient);
    for (auto &l : p.limbs)
        for (auto &c : l.coeffs) c = rng() % l.q();
    return p;
}

} // namespace

TEST_CASE("basis layout and precomputation") {
    const RnsBasis b = small_basis();
    CHECK(b.alpha() == 2);
    CHECK(b.q_count() == 5);
    CHECK(b.beta() == 3);
    CHECK(b.total() == 7);
    CHECK(b.group_ids(2, 4) == std::vector<std::size_t>{6});
    CHECK(b.group_ids(0, 4) == std::vector<std::size_t>{2, 3});
    CHECK(b.beta_at(1) == 1);
    const cpp_int q = oracle::product(b, b.q_ids(4));
    const cpp_int p = oracle::product(b, b.p_ids());
    for (std::size_t j = 0; j < 5; ++j) {
        const u64 qj = b.modulus(b.q_id(j)).value();
        const cpp_int hat = q / qj;
        CHECK(static_cast<u64>(hat % qj) * static_cast<cpp_int>(b.q_hat_inv(j)) % qj == 1);
        for (std::size_t id = 0; id < b.total(); ++id)
            CHECK(cpp_int(b.q_hat_mod(j, id)) == hat % b.modulus(id).value());
        CHECK(cpp_int(b.p_mod_q(j)) == p % qj);
        CHECK(cpp_int(b.p_mod_q(j)) * b.p_inv_mod_q(j) % qj == 1);
    }
    CHECK_THROWS_AS(RnsBasis(8, {Modulus(17), Modulus(17)}, {Modulus(193)}), Error);
}

TEST_CASE("bconv on the toy basis") {
    const RnsBasis b = toy_basis();
    const auto q = b.q_ids(1);
    const std::vector<std::size_t> p = {0};

    CHECK(bconv(b, RnsPoly::zero(b, q, Domain::Coefficient), q, p) == RnsPoly::zero(b, p, Domain::Coefficient));

    std::vector<i64> v(8, 0);
    v[0] = 1000;
    const RnsPoly a = RnsPoly::from_signed(b, q, v);
    const u64 got = bconv(b, a, q, p).limbs[0].coeffs[0];
    const bool u0 = got == 1000 % 193;
    const bool u1 = got == (1000 + 1649) % 193;
    CHECK((u0 || u1));

    // Single-source conversion is exact.
    const RnsPoly one = bconv(b, a, {b.q_id(0)}, p);
    CHECK(one.limbs[0].coeffs[0] == (1000 % 17) % 193);

    try {
        bconv(b, a, q, {b.q_id(1), 0});
        FAIL("expected BasisOverlap");
    } catch (const Error &e) {
        CHECK(e.code() == ErrorCode::BasisOverlap);
    }
}

TEST_CASE("bconv overshoot u stays within [0, |B1| - 1]") {
    std::mt19937_64 rng(11);
    const RnsBasis b = small_basis();
    const std::vector<std::vector<std::size_t>> sources = {{2}, {2, 3}, {2, 3, 4, 5}, {2, 3, 4, 5, 6}};
    std::size_t cases = 0;
    for (const auto &src : sources) {
        const std::vector<std::size_t> dst = {0, 1};
        const cpp_int q1 = oracle::product(b, src);
        for (int t = 0; t < 10; ++t) {
            const RnsPoly a = random_rns(b, src, rng);
            const RnsPoly out = bconv(b, a, src, dst);
            for (std::size_t i = 0; i < b.n(); ++i) {
                const cpp_int x = oracle::crt(b, a, i);
                bool found = false;
                for (std::size_t u = 0; u < src.size() && !found; ++u) {
                    const cpp_int want = x + cpp_int(u) * q1;
                    bool all = true;
                    for (std::size_t d = 0; d < dst.size(); ++d)
                        all = all && cpp_int(out.limbs[d].coeffs[i]) == want % b.modulus(dst[d]).value();
                    found = all;
                }
                CHECK(found);
                ++cases;
            }
        }
    }
    CHECK(cases >= 1000);
}

TEST_CASE("decompose keeps group limbs and extends the rest") {
    std::mt19937_64 rng(12);
    const RnsBasis b = small_basis();
    const auto q = b.q_ids(4);
    const RnsPoly c = random_rns(b, q, rng);
    const auto digits = decompose(b, c);
    REQUIRE(digits.size() == 3);
    const cpp_int big_q = oracle::product(b, q);
    for (std::size_t d = 0; d < digits.size(); ++d) {
        const auto group = b.group_ids(d, 4);
        CHECK(digits[d].size() == b.total());
        CHECK(digits[d].ids == b.pq_ids(4));
        for (auto id : group) CHECK(digits[d].limbs[digits[d].index_of(id)] == c.limbs[c.index_of(id)]);
        const cpp_int qb = oracle::product(b, group);
        for (std::size_t i = 0; i < b.n(); ++i) {
            // Digit value must be [c]_{Q_b} + u Q_b with u < |group|.
            const cpp_int cb = oracle::crt(b, c.restricted(group), i);
            const cpp_int dv = oracle::crt(b, digits[d], i);
            const cpp_int diff = dv - cb;
            CHECK(diff % qb == 0);
            CHECK(diff / qb >= 0);
            CHECK(diff / qb < cpp_int(group.size()));
        }
    }
    // Gadget reconstruction: sum_b digit_b (Q/Q_b)[(Q/Q_b)^{-1}]_{Q_b} = c modulo Q.
    for (std::size_t i = 0; i < b.n(); ++i) {
        cpp_int sum = 0;
        for (std::size_t d = 0; d < digits.size(); ++d) {
            const cpp_int qb = oracle::product(b, b.group_ids(d, 4));
            const cpp_int hat = big_q / qb;
            sum += oracle::crt(b, digits[d], i) * hat * oracle::inv_mod(hat % qb, qb);
        }
        CHECK((sum - oracle::crt(b, c, i)) % big_q == 0);
    }
}

TEST_CASE("decompose for beta = 2, alpha = 1, L + 1 = 2") {
    std::mt19937_64 rng(13);
    const RnsBasis b = small_basis(2, 1);
    const RnsPoly c = random_rns(b, b.q_ids(1), rng);
    const auto digits = decompose(b, c);
    REQUIRE(digits.size() == 2);
    for (std::size_t d = 0; d < 2; ++d) {
        const std::size_t own = b.q_id(d);
        for (std::size_t i = 0; i < b.n(); ++i) {
            const u64 v = c.limbs[d].coeffs[i];
            // Single-modulus source: extension limbs are exact residues.
            for (std::size_t k = 0; k < digits[d].size(); ++k) {
                const u64 m = b.modulus(digits[d].ids[k]).value();
                CHECK(digits[d].limbs[k].coeffs[i] == (digits[d].ids[k] == own ? v : v % m));
            }
        }
    }
}

TEST_CASE("moddown error bounded by alpha") {
    std::mt19937_64 rng(14);
    const RnsBasis b = small_basis();
    const auto pq = b.pq_ids(4);
    const cpp_int big_p = oracle::product(b, b.p_ids());
    const cpp_int big_q = oracle::product(b, b.q_ids(4));
    std::size_t cases = 0;
    for (int t = 0; t < 20; ++t) {
        const RnsPoly c = random_rns(b, pq, rng);
        const RnsPoly out = moddown(b, c);
        CHECK(out.ids == b.q_ids(4));
        for (std::size_t i = 0; i < b.n(); ++i) {
            const cpp_int cv = oracle::crt(b, c, i);
            const cpp_int e = oracle::centered(oracle::crt(b, out, i) - cv / big_p, big_q);
            CHECK(abs(e) <= cpp_int(b.alpha()));
            ++cases;
        }
    }
    CHECK(cases >= 1000);
    CHECK(moddown(b, RnsPoly::zero(b, pq, Domain::Coefficient)) == RnsPoly::zero(b, b.q_ids(4), Domain::Coefficient));
    CHECK_THROWS_AS(moddown(b, RnsPoly::zero(b, b.q_ids(4), Domain::Coefficient)), Error);
}

TEST_CASE("moddown after mul_by_p is the identity") {
    std::mt19937_64 rng(15);
    for (std::size_t alpha : {1u, 2u}) {
        const RnsBasis b = small_basis(5, alpha);
        std::vector<i64> m(b.n());
        for (auto &v : m) v = static_cast<i64>(rng() % 2000001) - 1000000;
        const RnsPoly c = RnsPoly::from_signed(b, b.q_ids(4), m);
        CHECK(moddown(b, mul_by_p(b, c)) == c);
    }
}

TEST_CASE("rescale divides by the top modulus") {
    std::mt19937_64 rng(16);
    const RnsBasis b = small_basis();
    const cpp_int big_q = oracle::product(b, b.q_ids(4));
    const u64 q_top = b.modulus(b.q_id(4)).value();
    for (int t = 0; t < 20; ++t) {
        const RnsPoly c = random_rns(b, b.q_ids(4), rng);
        const RnsPoly out = rescale(b, c);
        CHECK(out.size() == 4);
        for (std::size_t i = 0; i < b.n(); ++i) {
            const cpp_int cv = oracle::crt(b, c, i);
            const cpp_int ov = oracle::crt(b, out, i);
            // Exact floor for the unsigned representative, hence within 1 of c / q_L.
            CHECK(ov == cv / q_top);
        }
    }
    std::vector<i64> v(b.n());
    for (auto &x : v) x = static_cast<i64>(rng() % 1000) - 500;
    std::vector<i64> scaled(v);
    for (auto &x : scaled) x *= static_cast<i64>(q_top);
    CHECK(rescale(b, RnsPoly::from_signed(b, b.q_ids(4), scaled)) == RnsPoly::from_signed(b, b.q_ids(3), v));
    CHECK(rescale(b, RnsPoly::zero(b, b.q_ids(4), Domain::Coefficient)) ==
          RnsPoly::zero(b, b.q_ids(3), Domain::Coefficient));
    try {
        rescale(b, RnsPoly::zero(b, b.q_ids(0), Domain::Coefficient));
        FAIL("expected SingleLimb");
    } catch (const Error &e) {
        CHECK(e.code() == ErrorCode::SingleLimb);
    }
    (void)big_q;
}

TEST_CASE("NTT-domain variants match coefficient-domain results") {
    std::mt19937_64 rng(17);
    const RnsBasis b = small_basis();
    for (std::size_t level : {4u, 2u, 1u}) {
        RnsPoly c = random_rns(b, b.q_ids(level), rng);
        RnsPoly cn = c;
        to_ntt(cn);
        auto d1 = decompose(b, c);
        auto d2 = decompose_ntt(b, cn);
        REQUIRE(d1.size() == d2.size());
        for (std::size_t k = 0; k < d1.size(); ++k) {
            to_ntt(d1[k]);
            CHECK(d1[k] == d2[k]);
        }
        RnsPoly r1 = rescale(b, c);
        to_ntt(r1);
        CHECK(rescale_ntt(b, cn) == r1);

        RnsPoly w = random_rns(b, b.pq_ids(level), rng);
        RnsPoly wn = w;
        to_ntt(wn);
        RnsPoly m1 = moddown(b, w);
        to_ntt(m1);
        CHECK(moddown_ntt(b, wn) == m1);
    }
}
