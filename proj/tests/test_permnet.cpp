// Copyright 2026 The hlt Authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <set>
#include <sstream>

#include "hlt/permnet.hpp"
#include "hlt/ring.hpp"

using namespace hlt;
using namespace hlt::perm;

namespace {

std::vector<Geometry> geometries(std::size_t max_n) {
    std::vector<Geometry> g;
    for (std::size_t n = 16; n <= max_n; n *= 2)
        for (std::size_t dp : {2u, 4u, 8u, 16u})
            if (dp * dp <= n) g.emplace_back(n, dp);
    return g;
}

} // namespace

TEST_CASE("geometry validation") {
    CHECK_THROWS_AS(Geometry(64, 16), Error);
    CHECK_THROWS_AS(Geometry(64, 3), Error);
    CHECK_THROWS_AS(Geometry(100, 2), Error);
    CHECK_NOTHROW(Geometry(64, 8));
}

TEST_CASE("source_index") {
    const Geometry g(16, 4);
    CHECK(source_index(0, 0, g).idx == 0);
    CHECK(source_index(1, 0, g).idx == 2);
    CHECK_THROWS_AS(source_index(4, 0, g), Error);
    CHECK_THROWS_AS(source_index(0, 4, g), Error);
    for (const auto &geo : geometries(1024))
        for (std::size_t f = 0; f < geo.dp; ++f)
            for (std::size_t a = 0; a < geo.bank_size(); ++a) {
                const auto s = source_index(f, a, geo);
                CHECK(s.k == bit_reverse(f, geo.log_dp()));
                CHECK(s.i * geo.bank_size() + s.j * geo.dp + s.k == s.idx);
            }
}

TEST_CASE("target formula equals the direct index map, exhaustive to N = 2^12") {
    std::size_t bad = 0, checked = 0;
    for (const auto &geo : geometries(4096)) {
        for (std::size_t r = 0; r < geo.n / 2; ++r) {
            const u64 g_r = RotationIndex::make(static_cast<long long>(r), geo.n).g_r;
            for (std::size_t f = 0; f < geo.dp; ++f)
                for (std::size_t a = 0; a < geo.bank_size(); ++a) {
                    const auto t = target(f, a, r, geo);
                    const std::size_t want = naive_target_index(t.src.idx, g_r, geo.n);
                    const std::size_t pos = bit_reverse(want, geo.log_n());
                    if (t.idx2 != want || t.k2 != t.v || t.bank != pos / geo.bank_size() ||
                        t.addr != pos % geo.bank_size() ||
                        t.bank != bit_reverse(t.k2, geo.log_dp()) ||
                        g_r * t.src.k + (g_r - 1) / 2 != t.t * geo.bank_size() + t.u * geo.dp + t.v)
                        ++bad;
                    ++checked;
                }
        }
    }
    CHECK(bad == 0);
    CHECK(checked > 1000000);
}

TEST_CASE("target examples") {
    const Geometry g(16, 4);
    for (std::size_t f = 0; f < 4; ++f)
        for (std::size_t a = 0; a < 4; ++a) {
            const auto t = target(f, a, 0, g);
            CHECK(t.bank == f);
            CHECK(t.addr == a);
        }
    // r = 1 (g_r = 5) against the eval-domain automorphism of ring.
    const auto ctx = PolyContext::make(find_ntt_primes(30, 16, 1)[0], 16);
    const auto table = automorphism_eval_table(*ctx, RotationIndex::make(1, 16));
    for (std::size_t f = 0; f < 4; ++f)
        for (std::size_t a = 0; a < 4; ++a) {
            const auto t = target(f, a, 1, g);
            // ring pulls out[p] = in[table[p]]; target pushes idx to idx', so
            // the pull table of the inverse rotation maps back.
            const auto inv = automorphism_eval_table(*ctx, RotationIndex::make(-1, 16));
            CHECK(inv[t.bank * 4 + t.addr] == f * 4 + a);
        }
    (void)table;
}

TEST_CASE("bank map is a permutation depending only on the bank") {
    for (const auto &geo : geometries(4096)) {
        for (std::size_t r = 0; r < geo.n / 2; ++r) {
            const auto m = bank_map(r, geo);
            CHECK(std::set<std::size_t>(m.begin(), m.end()).size() == geo.dp);
            if (geo.n <= 256)
                for (std::size_t f = 0; f < geo.dp; ++f)
                    for (std::size_t a = 0; a < geo.bank_size(); ++a) CHECK(target(f, a, r, geo).bank == m[f]);
        }
    }
}

TEST_CASE("schedule reproduces automorphism_eval") {
    std::mt19937_64 rng(1);
    const std::size_t n = 256;
    const auto ctx = PolyContext::make(find_ntt_primes(40, n, 1)[0], n);
    Poly p(ctx, Domain::Ntt);
    for (auto &c : p.coeffs) c = rng() % ctx->modulus().value();
    const Geometry geo(n, 8);
    const Schedule s = schedule(3, geo);
    CHECK(s.steps.size() == n / 8);
    BankLayout banks = BankLayout::from_flat(p.coeffs, 8);
    apply(s, banks);
    CHECK(banks.to_flat() == automorphism_eval(p, RotationIndex::make(3, n)).coeffs);

    // Coverage: every address read once and written once; one read and one write per bank per step.
    std::vector<int> reads(n, 0), writes(n, 0);
    for (const auto &moves : s.steps) {
        REQUIRE(moves.size() == 8);
        std::set<std::size_t> src_banks, dst_banks;
        for (const auto &m : moves) {
            ++reads[m.src_bank * 32 + m.src_addr];
            ++writes[m.dst_bank * 32 + m.dst_addr];
            src_banks.insert(m.src_bank);
            dst_banks.insert(m.dst_bank);
        }
        CHECK(src_banks.size() == 8);
        CHECK(dst_banks.size() == 8);
    }
    for (std::size_t i = 0; i < n; ++i) {
        CHECK(reads[i] == 1);
        CHECK(writes[i] == 1);
    }

    const Schedule id = schedule(0, geo);
    for (const auto &moves : id.steps)
        for (const auto &m : moves) {
            CHECK(m.src_bank == m.dst_bank);
            CHECK(m.src_addr == m.dst_addr);
        }
}

TEST_CASE("schedule equals automorphism_eval for every r on small rings") {
    std::mt19937_64 rng(2);
    std::size_t bad = 0;
    for (const auto &geo : geometries(1024)) {
        const auto ctx = PolyContext::make(find_ntt_primes(30, geo.n, 1)[0], geo.n);
        Poly p(ctx, Domain::Ntt);
        for (auto &c : p.coeffs) c = rng() % ctx->modulus().value();
        for (std::size_t r = 0; r < geo.n / 2; ++r) {
            BankLayout banks = BankLayout::from_flat(p.coeffs, geo.dp);
            apply(schedule(r, geo), banks);
            if (banks.to_flat() != automorphism_eval(p, RotationIndex::make(static_cast<long long>(r), geo.n)).coeffs)
                ++bad;
        }
    }
    CHECK(bad == 0);
}

TEST_CASE("mux controls") {
    const Geometry geo(256, 8);
    const auto id = mux_controls(0, geo);
    for (const auto &sel : id)
        for (std::size_t b = 0; b < 8; ++b) CHECK(sel[b] == b);
    for (std::size_t r : {1u, 3u, 77u}) {
        const auto table = mux_controls(r, geo);
        const auto s = schedule(r, geo);
        REQUIRE(table.size() == s.steps.size());
        for (std::size_t step = 0; step < table.size(); ++step) {
            CHECK(std::set<std::size_t>(table[step].begin(), table[step].end()).size() == 8);
            for (const auto &m : s.steps[step]) CHECK(table[step][m.dst_bank] == m.src_bank);
        }
    }
}

TEST_CASE("schedule dump") {
    const Geometry geo(16, 2);
    std::ostringstream os;
    dump(schedule(1, geo), os);
    std::istringstream is(os.str());
    std::string line;
    std::getline(is, line);
    CHECK(line == "step, src_bank, src_addr, dst_bank, dst_addr");
    std::size_t count = 0;
    while (std::getline(is, line)) ++count;
    CHECK(count == 16);
}
