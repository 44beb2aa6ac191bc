// Copyright 2026 The hlt Authors
// SPDX-License-Identifier: Apache-2.0

#include "hlt/helt.hpp"

#include <algorithm>
#include <chrono>

namespace hlt {

const char *to_string(LtMethod m) {
    switch (m) {
    case LtMethod::Diagonal: return "diagonal";
    case LtMethod::Bsgs: return "bsgs";
    case LtMethod::DhBsgs: return "dh-bsgs";
    case LtMethod::ThBsgs: return "th-bsgs";
    }
    return "?";
}

LtMethod parse_method(const std::string &name) {
    for (auto m : {LtMethod::Diagonal, LtMethod::Bsgs, LtMethod::DhBsgs, LtMethod::ThBsgs})
        if (name == to_string(m)) return m;
    throw Error(ErrorCode::InvalidArgument, "unknown method '" + name + "'");
}

LtPlan LtPlan::diagonal(std::size_t n) { return LtPlan{LtMethod::Diagonal, n, {}}; }
LtPlan LtPlan::bsgs(std::size_t n1, std::size_t n2) { return LtPlan{LtMethod::Bsgs, n1 * n2, {n1, n2}}; }
LtPlan LtPlan::dh_bsgs(std::size_t n1, std::size_t n2) { return LtPlan{LtMethod::DhBsgs, n1 * n2, {n1, n2}}; }
LtPlan LtPlan::th_bsgs(std::size_t n1, std::size_t n2, std::size_t n3) {
    return LtPlan{LtMethod::ThBsgs, n1 * n2 * n3, {n1, n2, n3}};
}

void LtPlan::validate(std::size_t slots) const {
    if (n == 0 || (n & (n - 1)) != 0) throw Error(ErrorCode::BadFactors, "n must be a power of two");
    if (n > slots) throw Error(ErrorCode::DimensionTooLarge, "n exceeds N/2");
    const std::size_t want = method == LtMethod::Diagonal ? 0 : (method == LtMethod::ThBsgs ? 3 : 2);
    if (factors.size() != want) throw Error(ErrorCode::BadFactors, "wrong number of factors for the method");
    std::size_t prod = 1;
    for (auto f : factors) {
        if (f == 0) throw Error(ErrorCode::BadFactors, "factors must be positive");
        prod *= f;
    }
    if (want != 0 && prod != n) throw Error(ErrorCode::BadFactors, "factor product must equal n");
}

std::size_t LtPlan::giant_stride() const {
    switch (method) {
    case LtMethod::Diagonal: return n;
    case LtMethod::Bsgs:
    case LtMethod::DhBsgs: return factors[0];
    case LtMethod::ThBsgs: return factors[0] * factors[1];
    }
    return n;
}

std::vector<std::size_t> LtPlan::key_offsets() const {
    std::set<std::size_t> s;
    if (method == LtMethod::Diagonal) {
        for (std::size_t i = 1; i < n; ++i) s.insert(i);
    } else if (method == LtMethod::ThBsgs) {
        const std::size_t a = factors[0], b = factors[1], c = factors[2];
        for (std::size_t i = 1; i < a; ++i) s.insert(i);
        for (std::size_t j = 1; j < b; ++j) s.insert(a * j);
        for (std::size_t k = 1; k < c; ++k) s.insert(a * b * k);
    } else {
        const std::size_t a = factors[0], b = factors[1];
        for (std::size_t i = 1; i < a; ++i) s.insert(i);
        for (std::size_t j = 1; j < b; ++j) s.insert(a * j);
    }
    return {s.begin(), s.end()};
}

std::vector<std::vector<Complex>> diagonal_vectors(const std::vector<std::vector<double>> &f, std::size_t n,
                                                   std::size_t slots) {
    if (f.size() > slots) throw Error(ErrorCode::DimensionTooLarge, "matrix dimension exceeds N/2");
    if (f.size() > n) throw Error(ErrorCode::DimensionTooLarge, "matrix larger than the plan dimension");
    if (n == 0 || slots % n != 0) throw Error(ErrorCode::BadFactors, "n must divide N/2");
    auto at = [&](std::size_t r, std::size_t c) -> double {
        if (r >= f.size() || c >= f[r].size()) return 0.0;
        return f[r][c];
    };
    std::vector<std::vector<Complex>> diags(n, std::vector<Complex>(slots));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t t = 0; t < slots; ++t) diags[i][t] = at(t % n, (t + i) % n);
    return diags;
}

DiagMatrix diagonalize(const CkksContext &ctx, const std::vector<std::vector<double>> &f, const LtPlan &plan,
                       std::size_t level, double scale) {
    if (f.size() > ctx.slots()) throw Error(ErrorCode::DimensionTooLarge, "matrix dimension exceeds N/2");
    plan.validate(ctx.slots());
    for (const auto &row : f)
        if (row.size() > plan.n) throw Error(ErrorCode::DimensionTooLarge, "matrix larger than the plan dimension");
    DiagMatrix dm;
    dm.plan = plan;
    dm.level = level;
    dm.scale = scale;
    dm.values = diagonal_vectors(f, plan.n, ctx.slots());
    const auto &basis = ctx.basis();
    const bool over_q = plan.method == LtMethod::Bsgs;
    const auto ids = over_q ? basis.q_ids(level) : basis.pq_ids(level);
    const std::size_t stride = plan.giant_stride();
    for (std::size_t m = 0; m < plan.n; ++m) {
        RnsPoly p = ctx.encode_poly(dm.values[m], scale, ids);
        to_ntt(p);
        const std::size_t outer = m / stride * stride;
        if (outer != 0) p = automorphism_eval(p, RotationIndex::make(-static_cast<long long>(outer), ctx.n()));
        dm.fhat.push_back(std::move(p));
    }
    return dm;
}

KeySet lt_keys(const CkksContext &ctx, const SecretKey &sk, const LtPlan &plan, Rng &rng) {
    const bool hoisted = plan.uses_hoisted_keys();
    return ctx.rotation_keys(sk, plan.key_offsets(), !hoisted, hoisted, rng);
}

namespace {

void require_plan(const DiagMatrix &dm, LtMethod m, const Ciphertext &ct) {
    if (dm.plan.method != m) throw Error(ErrorCode::PlanMismatch, "diagonal matrix was prepared for another method");
    if (dm.level != ct.level) throw Error(ErrorCode::LevelMismatch, "diagonals and ciphertext at different levels");
}

// Shared bookkeeping and the primitive steps of the hoisted evaluators.
class Evaluator {
public:
    Evaluator(const CkksContext &ctx, const KeySet &keys, OpTrace *trace, std::size_t level)
        : ctx_(ctx), basis_(ctx.basis()), keys_(keys), trace_(trace), level_(level),
          pq_limbs_(basis_.alpha() + level + 1) {}

    std::vector<RnsPoly> decompose(const RnsPoly &c1) {
        if (trace_) ++trace_->decompose;
        return decompose_ntt(basis_, c1);
    }

    RnsPoly moddown(const RnsPoly &c) {
        if (trace_) ++trace_->moddown;
        return moddown_ntt(basis_, c);
    }

    // phi_r(base + <d, swk~_r,0>), phi_r(<d, swk~_r,1>) with the hoisted key.
    std::pair<RnsPoly, RnsPoly> hoisted_rotate(const std::vector<RnsPoly> &d, const RnsPoly *base, std::size_t r) {
        const SwitchingKey &swk = keys_.get(r, true);
        auto [u0, u1] = ctx_.key_switch(d, swk);
        if (base) add_inplace(u0, *base);
        const auto rot = RotationIndex::make(static_cast<long long>(r), ctx_.n());
        if (trace_) {
            ++trace_->key_switches;
            trace_->automorphisms += 2;
            trace_->cwise_mult_limbs += 2 * d.size() * pq_limbs_;
            trace_->key_offsets.insert(r);
        }
        return {automorphism_eval(u0, rot), automorphism_eval(u1, rot)};
    }

    // acc += x * f, counted as limb products.
    void mul_acc(RnsPoly &acc, const RnsPoly &x, const RnsPoly &f) {
        if (trace_) trace_->cwise_mult_limbs += x.size();
        mul_acc_inplace(acc, x, f);
    }

    RnsPoly zero_pq() const { return RnsPoly::zero(basis_, basis_.pq_ids(level_), Domain::Ntt); }

    Ciphertext finish(const RnsPoly &c0, const RnsPoly &c1, double scale) {
        Ciphertext out{moddown(c0), moddown(c1), level_, scale};
        return ctx_.rescale(out);
    }

    const RnsBasis &basis() const { return basis_; }

private:
    const CkksContext &ctx_;
    const RnsBasis &basis_;
    const KeySet &keys_;
    OpTrace *trace_;
    std::size_t level_;
    std::size_t pq_limbs_;
};

} // namespace

Ciphertext lt_diagonal(const CkksContext &ctx, const Ciphertext &ct, const DiagMatrix &dm, const KeySet &keys,
                       OpTrace *trace) {
    require_plan(dm, LtMethod::Diagonal, ct);
    Evaluator ev(ctx, keys, trace, ct.level);
    const std::size_t n = dm.plan.n;
    const auto d = ev.decompose(ct.c1);
    const RnsPoly a0 = mul_by_p(ev.basis(), ct.c0), b0 = mul_by_p(ev.basis(), ct.c1);
    RnsPoly c0 = ev.zero_pq(), c1 = ev.zero_pq();
    ev.mul_acc(c0, a0, dm.fhat[0]);
    ev.mul_acc(c1, b0, dm.fhat[0]);
    for (std::size_t i = 1; i < n; ++i) {
        const auto [ai, bi] = ev.hoisted_rotate(d, &a0, i);
        ev.mul_acc(c0, ai, dm.fhat[i]);
        ev.mul_acc(c1, bi, dm.fhat[i]);
    }
    return ev.finish(c0, c1, ct.scale * dm.scale);
}

Ciphertext lt_bsgs(const CkksContext &ctx, const Ciphertext &ct, const DiagMatrix &dm, const KeySet &keys,
                   OpTrace *trace) {
    require_plan(dm, LtMethod::Bsgs, ct);
    const std::size_t n1 = dm.plan.factors[0], n2 = dm.plan.factors[1];
    const auto &basis = ctx.basis();
    const std::size_t q_limbs = ct.level + 1;

    // Full key-switched rotation: Decompose, inner product, ModDown on both halves.
    auto rotate = [&](const Ciphertext &in, std::size_t r) {
        const auto rot = RotationIndex::make(static_cast<long long>(r), ctx.n());
        const RnsPoly c1 = automorphism_eval(in.c1, rot);
        const auto d = decompose_ntt(basis, c1);
        auto [u0, u1] = ctx.key_switch(d, keys.get(r, false));
        Ciphertext out = in;
        out.c0 = add(automorphism_eval(in.c0, rot), moddown_ntt(basis, u0));
        out.c1 = moddown_ntt(basis, u1);
        if (trace) {
            ++trace->decompose;
            trace->moddown += 2;
            ++trace->key_switches;
            trace->automorphisms += 2;
            trace->cwise_mult_limbs += 2 * d.size() * (basis.alpha() + q_limbs);
            trace->key_offsets.insert(r);
        }
        return out;
    };

    std::vector<Ciphertext> baby{ct};
    for (std::size_t i = 1; i < n1; ++i) baby.push_back(rotate(ct, i));
    const auto ids = basis.q_ids(ct.level);
    Ciphertext acc{RnsPoly::zero(basis, ids, Domain::Ntt), RnsPoly::zero(basis, ids, Domain::Ntt), ct.level,
                   ct.scale * dm.scale};
    for (std::size_t j = 0; j < n2; ++j) {
        Ciphertext inner{RnsPoly::zero(basis, ids, Domain::Ntt), RnsPoly::zero(basis, ids, Domain::Ntt), ct.level,
                         ct.scale * dm.scale};
        for (std::size_t i = 0; i < n1; ++i) {
            mul_acc_inplace(inner.c0, baby[i].c0, dm.fhat[n1 * j + i]);
            mul_acc_inplace(inner.c1, baby[i].c1, dm.fhat[n1 * j + i]);
            if (trace) trace->cwise_mult_limbs += 2 * q_limbs;
        }
        acc = ctx.add(acc, j == 0 ? inner : rotate(inner, n1 * j));
    }
    return ctx.rescale(acc);
}

Ciphertext lt_dh_bsgs(const CkksContext &ctx, const Ciphertext &ct, const DiagMatrix &dm, const KeySet &keys,
                      OpTrace *trace) {
    require_plan(dm, LtMethod::DhBsgs, ct);
    Evaluator ev(ctx, keys, trace, ct.level);
    const std::size_t n1 = dm.plan.factors[0], n2 = dm.plan.factors[1];

    const auto d = ev.decompose(ct.c1);
    std::vector<RnsPoly> a{mul_by_p(ev.basis(), ct.c0)}, b{mul_by_p(ev.basis(), ct.c1)};
    for (std::size_t i = 1; i < n1; ++i) {
        auto [ai, bi] = ev.hoisted_rotate(d, &a[0], i);
        a.push_back(std::move(ai));
        b.push_back(std::move(bi));
    }

    RnsPoly c0 = ev.zero_pq(), c1 = ev.zero_pq();
    for (std::size_t j = 0; j < n2; ++j) {
        RnsPoly u0 = ev.zero_pq(), u1 = ev.zero_pq();
        for (std::size_t i = 0; i < n1; ++i) {
            ev.mul_acc(u0, a[i], dm.fhat[n1 * j + i]);
            ev.mul_acc(u1, b[i], dm.fhat[n1 * j + i]);
        }
        if (j == 0) {
            add_inplace(c0, u0);
            add_inplace(c1, u1);
            continue;
        }
        const auto dj = ev.decompose(ev.moddown(u1));
        auto [w0, w1] = ev.hoisted_rotate(dj, &u0, n1 * j);
        add_inplace(c0, w0);
        add_inplace(c1, w1);
    }
    return ev.finish(c0, c1, ct.scale * dm.scale);
}

Ciphertext lt_th_bsgs(const CkksContext &ctx, const Ciphertext &ct, const DiagMatrix &dm, const KeySet &keys,
                      OpTrace *trace) {
    require_plan(dm, LtMethod::ThBsgs, ct);
    Evaluator ev(ctx, keys, trace, ct.level);
    const std::size_t n1 = dm.plan.factors[0], n2 = dm.plan.factors[1], n3 = dm.plan.factors[2];
    const std::size_t inner = n1 * n2;

    // Lines 1-7: inner layer, ModDown and Decompose of every b_i.
    std::vector<std::vector<RnsPoly>> d;
    d.push_back(ev.decompose(ct.c1));
    std::vector<RnsPoly> a(inner), b(inner);
    a[0] = mul_by_p(ev.basis(), ct.c0);
    b[0] = mul_by_p(ev.basis(), ct.c1);
    for (std::size_t i = 1; i < n1; ++i) {
        std::tie(a[i], b[i]) = ev.hoisted_rotate(d[0], &a[0], i);
        d.push_back(ev.decompose(ev.moddown(b[i])));
    }
    // Lines 8-11: middle layer.
    for (std::size_t i = 0; i < n1; ++i)
        for (std::size_t j = 1; j < n2; ++j) std::tie(a[n1 * j + i], b[n1 * j + i]) = ev.hoisted_rotate(d[i], &a[i], n1 * j);

    // Line 12, then the outer layer with delayed ModDown.
    auto sum_products = [&](std::size_t k) {
        RnsPoly u0 = ev.zero_pq(), u1 = ev.zero_pq();
        for (std::size_t i = 0; i < inner; ++i) {
            ev.mul_acc(u0, a[i], dm.fhat[inner * k + i]);
            ev.mul_acc(u1, b[i], dm.fhat[inner * k + i]);
        }
        return std::make_pair(std::move(u0), std::move(u1));
    };
    auto [c0, c1] = sum_products(0);
    for (std::size_t k = 1; k < n3; ++k) {
        auto [u0, u1] = sum_products(k);
        const auto dk = ev.decompose(ev.moddown(u1));
        auto [w0, w1] = ev.hoisted_rotate(dk, &u0, inner * k);
        add_inplace(c0, w0);
        add_inplace(c1, w1);
    }
    return ev.finish(c0, c1, ct.scale * dm.scale);
}

Ciphertext lt_evaluate(const CkksContext &ctx, const Ciphertext &ct, const DiagMatrix &dm, const KeySet &keys,
                       OpTrace *trace) {
    switch (dm.plan.method) {
    case LtMethod::Diagonal: return lt_diagonal(ctx, ct, dm, keys, trace);
    case LtMethod::Bsgs: return lt_bsgs(ctx, ct, dm, keys, trace);
    case LtMethod::DhBsgs: return lt_dh_bsgs(ctx, ct, dm, keys, trace);
    case LtMethod::ThBsgs: return lt_th_bsgs(ctx, ct, dm, keys, trace);
    }
    throw Error(ErrorCode::PlanMismatch, "unknown method");
}

double default_diag_scale(const CkksContext &ctx, std::size_t level) {
    return static_cast<double>(ctx.basis().modulus(ctx.basis().q_id(level)).value());
}

std::vector<Complex> plain_lt(const std::vector<std::vector<double>> &f, const std::vector<double> &v, std::size_t n,
                              std::size_t slots) {
    std::vector<Complex> out(slots);
    for (std::size_t t = 0; t < slots; ++t) {
        const std::size_t r = t % n;
        double acc = 0;
        if (r < f.size())
            for (std::size_t c = 0; c < f[r].size() && c < v.size(); ++c) acc += f[r][c] * v[c];
        out[t] = acc;
    }
    return out;
}

double EquivalenceReport::max_pairwise() const {
    double m = 0;
    for (const auto &row : pairwise)
        for (double x : row) m = std::max(m, x);
    return m;
}

EquivalenceReport lt_equivalence_check(const CkksContext &ctx, const std::vector<std::vector<double>> &f,
                                       const std::vector<double> &v, const std::vector<LtPlan> &plans, u64 seed) {
    Rng rng(seed);
    const SecretKey sk = ctx.secret_keygen(rng);
    if (plans.empty()) return {};
    const std::size_t n = plans.front().n;
    std::vector<Complex> tiled(ctx.slots());
    for (std::size_t t = 0; t < ctx.slots(); ++t) tiled[t] = (t % n) < v.size() ? v[t % n] : 0.0;
    const Ciphertext ct = ctx.encrypt(ctx.encode(tiled), sk, rng);
    const auto want = plain_lt(f, v, n, ctx.slots());

    EquivalenceReport rep;
    for (const auto &plan : plans) {
        if (plan.n != n) throw Error(ErrorCode::PlanMismatch, "all plans must share n");
        MethodResult res;
        res.plan = plan;
        const KeySet keys = lt_keys(ctx, sk, plan, rng);
        const DiagMatrix dm = diagonalize(ctx, f, plan, ct.level, default_diag_scale(ctx, ct.level));
        const auto start = std::chrono::steady_clock::now();
        const Ciphertext out = lt_evaluate(ctx, ct, dm, keys, &res.trace);
        res.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        res.output = ctx.decode(ctx.decrypt(out, sk));
        for (std::size_t t = 0; t < want.size(); ++t) res.max_error = std::max(res.max_error, std::abs(res.output[t] - want[t]));
        rep.results.push_back(std::move(res));
    }
    const std::size_t m = rep.results.size();
    rep.pairwise.assign(m, std::vector<double>(m, 0.0));
    for (std::size_t x = 0; x < m; ++x)
        for (std::size_t y = 0; y < m; ++y)
            for (std::size_t t = 0; t < ctx.slots(); ++t)
                rep.pairwise[x][y] =
                    std::max(rep.pairwise[x][y], std::abs(rep.results[x].output[t] - rep.results[y].output[t]));
    return rep;
}

} // namespace hlt
