// Copyright 2026 The hlt Authors
// SPDX-License-Identifier: Apache-2.0

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "hlt/helt.hpp"

using namespace hlt;

namespace {

using Matrix = std::vector<std::vector<double>>;

const CkksContext &toy() {
    static const CkksContext ctx(CkksParams::toy());
    return ctx;
}

Matrix identity(std::size_t n) {
    Matrix f(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) f[i][i] = 1.0;
    return f;
}

Matrix shift_matrix(std::size_t n) {
    Matrix f(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i) f[i][(i + 1) % n] = 1.0;
    return f;
}

Matrix random_matrix(std::size_t n, Rng &rng) {
    std::uniform_real_distribution<double> d(-1, 1);
    Matrix f(n, std::vector<double>(n));
    for (auto &row : f)
        for (auto &x : row) x = d(rng);
    return f;
}

std::vector<double> random_vector(std::size_t n, Rng &rng) {
    std::uniform_real_distribution<double> d(-1, 1);
    std::vector<double> v(n);
    for (auto &x : v) x = d(rng);
    return v;
}

struct Fixture {
    const CkksContext &ctx = toy();
    Rng rng{2024};
    SecretKey sk = ctx.secret_keygen(rng);

    Ciphertext encrypt(const std::vector<double> &v, std::size_t n) {
        std::vector<Complex> t(ctx.slots());
        for (std::size_t i = 0; i < t.size(); ++i) t[i] = v[i % n];
        return ctx.encrypt(ctx.encode(t), sk, rng);
    }

    double run(const Matrix &f, const std::vector<double> &v, const LtPlan &plan, OpTrace *trace = nullptr) {
        const KeySet keys = lt_keys(ctx, sk, plan, rng);
        const Ciphertext ct = encrypt(v, plan.n);
        const DiagMatrix dm = diagonalize(ctx, f, plan, ct.level, default_diag_scale(ctx, ct.level));
        const Ciphertext out = lt_evaluate(ctx, ct, dm, keys, trace);
        CHECK(out.level == ct.level - 1);
        CHECK(out.scale == doctest::Approx(ct.scale));
        const auto got = ctx.decode(ctx.decrypt(out, sk));
        const auto want = plain_lt(f, v, plan.n, ctx.slots());
        double e = 0;
        for (std::size_t t = 0; t < got.size(); ++t) e = std::max(e, std::abs(got[t] - want[t]));
        return e;
    }
};

} // namespace

TEST_CASE("plan validation and key offsets") {
    CHECK_NOTHROW(LtPlan::th_bsgs(4, 4, 4).validate(512));
    CHECK_THROWS_AS(LtPlan::th_bsgs(4, 4, 4).validate(32), Error);
    LtPlan bad = LtPlan::dh_bsgs(4, 4);
    bad.n = 32;
    try {
        bad.validate(512);
        FAIL("expected BadFactors");
    } catch (const Error &e) {
        CHECK(e.code() == ErrorCode::BadFactors);
    }
    try {
        LtPlan::diagonal(1024).validate(512);
        FAIL("expected DimensionTooLarge");
    } catch (const Error &e) {
        CHECK(e.code() == ErrorCode::DimensionTooLarge);
    }
    CHECK(LtPlan::dh_bsgs(8, 8).key_offsets().size() == 14);
    CHECK(LtPlan::th_bsgs(4, 4, 4).key_offsets().size() == 9);
    CHECK(LtPlan::th_bsgs(4, 4, 4).key_offsets() ==
          std::vector<std::size_t>{1, 2, 3, 4, 8, 12, 16, 32, 48});
    CHECK(LtPlan::diagonal(16).key_offsets().size() == 15);
    CHECK(parse_method("th-bsgs") == LtMethod::ThBsgs);
    CHECK_THROWS_AS(parse_method("nope"), Error);
}

TEST_CASE("diagonal packing") {
    const auto id = diagonal_vectors(identity(8), 8, 8);
    for (std::size_t t = 0; t < 8; ++t) CHECK(id[0][t] == Complex(1.0));
    for (std::size_t i = 1; i < 8; ++i)
        for (std::size_t t = 0; t < 8; ++t) CHECK(id[i][t] == Complex(0.0));

    const auto sh = diagonal_vectors(shift_matrix(8), 8, 8);
    for (std::size_t i = 0; i < 8; ++i)
        for (std::size_t t = 0; t < 8; ++t) CHECK(sh[i][t] == Complex(i == 1 ? 1.0 : 0.0));

    Rng rng(1);
    const Matrix f = random_matrix(8, rng);
    const auto dg = diagonal_vectors(f, 8, 32);
    for (std::size_t r = 0; r < 8; ++r)
        for (std::size_t c = 0; c < 8; ++c) CHECK(dg[(c + 8 - r) % 8][r].real() == f[r][c]);
    // Tiling repeats every n slots.
    for (std::size_t t = 0; t < 32; ++t) CHECK(dg[3][t] == dg[3][t % 8]);

    // A smaller matrix is zero-padded.
    const auto pad = diagonal_vectors(identity(5), 8, 8);
    CHECK(pad[0][6] == Complex(0.0));
    CHECK(pad[0][4] == Complex(1.0));

    const Matrix huge(600, std::vector<double>(1, 0.0));
    try {
        diagonalize(toy(), huge, LtPlan::diagonal(512), 4, 1 << 20);
        FAIL("expected DimensionTooLarge");
    } catch (const Error &e) {
        CHECK(e.code() == ErrorCode::DimensionTooLarge);
    }
}

TEST_CASE("pre-rotation is undone by the outer automorphism") {
    const auto &ctx = toy();
    Rng rng(2);
    const Matrix f = random_matrix(64, rng);
    const LtPlan plan = LtPlan::th_bsgs(4, 4, 4);
    const DiagMatrix dm = diagonalize(ctx, f, plan, 4, 1 << 30);
    const DiagMatrix plainm = diagonalize(ctx, f, LtPlan::diagonal(64), 4, 1 << 30);
    for (std::size_t m = 0; m < 64; ++m) {
        const std::size_t outer = m / 16 * 16;
        CHECK(automorphism_eval(dm.fhat[m], RotationIndex::make(static_cast<long long>(outer), ctx.n())) == plainm.fhat[m]);
    }
}

TEST_CASE("every method computes F v") {
    Fixture fx;
    Rng rng(3);
    const std::size_t n = 16;
    const Matrix rf = random_matrix(n, rng);
    const auto v = random_vector(n, rng);
    for (const LtPlan &plan : {LtPlan::diagonal(n), LtPlan::bsgs(4, 4), LtPlan::dh_bsgs(4, 4), LtPlan::th_bsgs(2, 4, 2),
                               LtPlan::th_bsgs(1, 4, 4), LtPlan::th_bsgs(4, 4, 1), LtPlan::bsgs(16, 1),
                               LtPlan::dh_bsgs(1, 16)}) {
        CAPTURE(to_string(plan.method));
        CHECK(fx.run(identity(n), v, plan) < 1e-3);
        CHECK(fx.run(shift_matrix(n), v, plan) < 1e-3);
        CHECK(fx.run(rf, v, plan) < 1e-3);
    }
}

TEST_CASE("operation traces") {
    Fixture fx;
    Rng rng(4);
    const auto v = random_vector(64, rng);
    const Matrix f = random_matrix(64, rng);
    const std::size_t pq = 10, q = 5;

    OpTrace dh;
    fx.run(random_matrix(16, rng), v, LtPlan::dh_bsgs(4, 4), &dh);
    CHECK(dh.decompose == 4);
    CHECK(dh.moddown == 5);
    CHECK(dh.key_offsets.size() == 6);

    OpTrace dh8;
    fx.run(f, v, LtPlan::dh_bsgs(8, 8), &dh8);
    CHECK(dh8.decompose == 8);
    CHECK(dh8.moddown == 9);
    CHECK(dh8.key_offsets.size() == 14);
    CHECK(dh8.cwise_mult_limbs == 2 * 1 * 14 * pq + 2 * 64 * pq);

    OpTrace th;
    fx.run(f, v, LtPlan::th_bsgs(4, 4, 4), &th);
    CHECK(th.decompose == 7);
    CHECK(th.moddown == 8);
    CHECK(th.key_offsets.size() == 9);
    // The middle layer runs n1'(n2' - 1) key switches.
    CHECK(th.key_switches == 3 + 4 * 3 + 3);
    CHECK(th.cwise_mult_limbs == 2 * 18 * pq + 2 * 64 * pq);

    OpTrace bs;
    fx.run(f, v, LtPlan::bsgs(8, 8), &bs);
    CHECK(bs.decompose == 14);
    CHECK(bs.moddown == 28);
    CHECK(bs.cwise_mult_limbs == 2 * 14 * pq + 2 * 64 * q);

    OpTrace dg;
    fx.run(f, v, LtPlan::diagonal(64), &dg);
    CHECK(dg.decompose == 1);
    CHECK(dg.moddown == 2);
    CHECK(dg.cwise_mult_limbs == 2 * 63 * pq + 2 * 64 * pq);
}

TEST_CASE("TH-BSGS with n3' = 1 matches DH-BSGS") {
    const auto &ctx = toy();
    Rng rng(5);
    const Matrix f = random_matrix(64, rng);
    const auto v = random_vector(64, rng);
    const auto rep = lt_equivalence_check(ctx, f, v, {LtPlan::dh_bsgs(8, 8), LtPlan::th_bsgs(8, 8, 1)}, 9);
    CHECK(rep.pairwise[0][1] < 1e-4);
}

TEST_CASE("errors") {
    Fixture fx;
    const LtPlan plan = LtPlan::th_bsgs(2, 2, 2);
    const Ciphertext ct = fx.encrypt(std::vector<double>(8, 0.5), 8);
    const DiagMatrix dm = diagonalize(fx.ctx, identity(8), plan, ct.level, 1 << 30);
    const KeySet keys = lt_keys(fx.ctx, fx.sk, plan, fx.rng);
    try {
        lt_dh_bsgs(fx.ctx, ct, dm, keys);
        FAIL("expected PlanMismatch");
    } catch (const Error &e) {
        CHECK(e.code() == ErrorCode::PlanMismatch);
    }
    KeySet partial = keys;
    partial.hoisted.erase(4);
    try {
        lt_th_bsgs(fx.ctx, ct, dm, partial);
        FAIL("expected MissingKey");
    } catch (const Error &e) {
        CHECK(e.code() == ErrorCode::MissingKey);
    }
}

TEST_CASE("equivalence check on identity and zero matrices") {
    const auto &ctx = toy();
    Rng rng(6);
    const auto v = random_vector(16, rng);
    const std::vector<LtPlan> plans = {LtPlan::diagonal(16), LtPlan::bsgs(4, 4), LtPlan::dh_bsgs(4, 4),
                                       LtPlan::th_bsgs(2, 4, 2)};
    const auto id = lt_equivalence_check(ctx, identity(16), v, plans, 1);
    for (const auto &r : id.results) CHECK(r.max_error < 1e-3);
    CHECK(id.max_pairwise() < 1e-4);
    const auto zero = lt_equivalence_check(ctx, Matrix(16, std::vector<double>(16, 0.0)), v, plans, 2);
    for (const auto &r : zero.results) {
        double m = 0;
        for (auto z : r.output) m = std::max(m, std::abs(z));
        CHECK(m < 1e-3);
    }
}
