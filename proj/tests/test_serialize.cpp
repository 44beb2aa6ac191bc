// Copyright 2026 The hlt Authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "hlt/serialize.hpp"

using namespace hlt;

namespace {

const CkksContext &ctx() {
    static const CkksContext c(CkksParams{64, 3, 2, 40, 1 << 20, 3.2});
    return c;
}

u64 le64(const std::string &s, std::size_t off) {
    u64 v = 0;
    for (int i = 7; i >= 0; --i) v = (v << 8) | static_cast<unsigned char>(s[off + static_cast<std::size_t>(i)]);
    return v;
}

} // namespace

TEST_CASE("ciphertext roundtrip and layout") {
    Rng rng(1);
    const auto sk = ctx().secret_keygen(rng);
    const auto ct = ctx().encrypt(ctx().encode(std::vector<Complex>(32, Complex(0.5, 0)), 1, 1 << 20), sk, rng);
    std::stringstream ss;
    save(ss, ct, ctx().basis());
    const std::string bytes = ss.str();
    CHECK(bytes.substr(0, 4) == "HLT1");
    CHECK(bytes[4] == 1);
    const std::size_t header = 34 + 8 * 2;
    CHECK(static_cast<unsigned char>(bytes[8]) == header);
    CHECK(le64(bytes, 12) == 64);
    CHECK(bytes.size() == 12 + header + 2 * 2 * 64 * 8);
    CHECK(le64(bytes, 12 + 34) == ctx().basis().modulus(ctx().basis().q_id(0)).value());

    const Ciphertext back = load_ciphertext(ss, ctx().basis());
    CHECK(back.c0 == ct.c0);
    CHECK(back.c1 == ct.c1);
    CHECK(back.level == 1);
    CHECK(back.scale == ct.scale);
}

TEST_CASE("switching key and secret key roundtrip") {
    Rng rng(2);
    const auto sk = ctx().secret_keygen(rng);
    const auto swk = ctx().rotation_keygen(sk, 3, true, rng);
    std::stringstream ss;
    save(ss, swk, ctx().basis());
    const auto back = load_switching_key(ss, ctx().basis());
    CHECK(back.rotation == 3);
    CHECK(back.hoisted);
    REQUIRE(back.digits.size() == swk.digits.size());
    for (std::size_t d = 0; d < swk.digits.size(); ++d) {
        CHECK(back.digits[d].first == swk.digits[d].first);
        CHECK(back.digits[d].second == swk.digits[d].second);
    }
    std::stringstream s2;
    save(s2, sk, ctx().basis());
    const auto sk2 = load_secret_key(s2, ctx().basis());
    CHECK(sk2.s == sk.s);
    CHECK(sk2.coeffs == sk.coeffs);
}

TEST_CASE("malformed input") {
    Rng rng(3);
    const auto sk = ctx().secret_keygen(rng);
    std::stringstream ss;
    save(ss, sk, ctx().basis());
    const std::string good = ss.str();

    auto expect_format = [&](const std::string &bytes, int which) {
        std::stringstream in(bytes);
        try {
            if (which == 0) load_secret_key(in, ctx().basis());
            else load_ciphertext(in, ctx().basis());
            FAIL("expected Format");
        } catch (const Error &e) {
            CHECK(e.code() == ErrorCode::Format);
        }
    };
    std::string bad = good;
    bad[0] = 'X';
    expect_format(bad, 0);
    expect_format(good.substr(0, good.size() - 3), 0);
    expect_format(good, 1); // wrong kind

    const CkksContext other(CkksParams{64, 3, 2, 30, 1 << 20, 3.2});
    std::stringstream in(good);
    CHECK_THROWS_AS(load_secret_key(in, other.basis()), Error);
}
