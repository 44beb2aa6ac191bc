// Copyright 2026 The hlt Authors
// SPDX-License-Identifier: Apache-2.0

#include "hlt/rns.hpp"

#include <algorithm>
#include <set>
#include <string>

namespace hlt {

namespace {

// Product of the listed moduli, reduced modulo `m`.
u64 product_mod(const RnsBasis &basis, const std::vector<std::size_t> &ids, std::size_t skip, const Modulus &m) {
    u64 acc = 1 % m.value();
    for (std::size_t id : ids) {
        if (id == skip) continue;
        acc = mod_mul(acc, basis.modulus(id).value() % m.value(), m);
    }
    return acc;
}

struct BconvTable {
    std::vector<u64> hat_inv;              // per source
    std::vector<std::vector<u64>> hat_mod; // [source][target]
};

BconvTable make_bconv_table(const RnsBasis &basis, const std::vector<std::size_t> &source,
                            const std::vector<std::size_t> &target) {
    BconvTable t;
    t.hat_inv.resize(source.size());
    t.hat_mod.assign(source.size(), std::vector<u64>(target.size()));
    for (std::size_t s = 0; s < source.size(); ++s) {
        const Modulus &qs = basis.modulus(source[s]);
        t.hat_inv[s] = mod_inv(product_mod(basis, source, source[s], qs), qs);
        for (std::size_t d = 0; d < target.size(); ++d)
            t.hat_mod[s][d] = product_mod(basis, source, source[s], basis.modulus(target[d]));
    }
    return t;
}

void require_same_ids(const RnsPoly &a, const RnsPoly &b) {
    if (a.ids != b.ids) throw Error(ErrorCode::BasisMismatch, "operands hold different moduli");
}

void require_domain(const RnsPoly &p, Domain d, const char *op) {
    if (p.domain() != d)
        throw Error(ErrorCode::DomainMismatch, std::string(op) + " expects " + to_string(d) + " input");
}

// Level of a polynomial whose q limbs are exactly q_0..q_level, with or without the P limbs.
std::size_t q_level_of(const RnsBasis &basis, const RnsPoly &c, bool with_p) {
    std::size_t p_limbs = 0;
    for (std::size_t id : c.ids)
        if (basis.is_p(id)) ++p_limbs;
    if (with_p ? p_limbs != basis.alpha() : p_limbs != 0)
        throw Error(ErrorCode::BasisMismatch, with_p ? "expected all P limbs" : "unexpected P limbs");
    const std::size_t q_limbs = c.size() - p_limbs;
    if (q_limbs == 0) throw Error(ErrorCode::BasisMismatch, "no Q limbs");
    const std::size_t level = q_limbs - 1;
    if (c.ids != (with_p ? basis.pq_ids(level) : basis.q_ids(level)))
        throw Error(ErrorCode::BasisMismatch, "limbs are not a contiguous q_0..q_level tower");
    return level;
}

} // namespace

RnsBasis::RnsBasis(std::size_t n, std::vector<Modulus> q_moduli, std::vector<Modulus> p_moduli)
    : n_(n), q_count_(q_moduli.size()), alpha_(p_moduli.size()) {
    if (q_count_ == 0 || alpha_ == 0) throw Error(ErrorCode::InvalidArgument, "need at least one q and one p modulus");
    moduli_ = std::move(p_moduli);
    moduli_.insert(moduli_.end(), q_moduli.begin(), q_moduli.end());
    std::set<u64> seen;
    for (const auto &m : moduli_) {
        if (!seen.insert(m.value()).second)
            throw Error(ErrorCode::InvalidArgument, "moduli must be pairwise distinct");
    }
    for (const auto &m : moduli_) contexts_.push_back(PolyContext::make(m, n));

    const auto all_q = q_ids(max_level());
    const auto all_p = p_ids();
    q_hat_inv_.resize(q_count_);
    q_hat_mod_.assign(q_count_, std::vector<u64>(total()));
    for (std::size_t j = 0; j < q_count_; ++j) {
        const Modulus &qj = moduli_[q_id(j)];
        q_hat_inv_[j] = mod_inv(product_mod(*this, all_q, q_id(j), qj), qj);
        for (std::size_t id = 0; id < total(); ++id)
            q_hat_mod_[j][id] = product_mod(*this, all_q, q_id(j), moduli_[id]);
    }
    p_hat_inv_.resize(alpha_);
    for (std::size_t i = 0; i < alpha_; ++i)
        p_hat_inv_[i] = mod_inv(product_mod(*this, all_p, i, moduli_[i]), moduli_[i]);
    p_mod_q_.resize(q_count_);
    p_inv_mod_q_.resize(q_count_);
    for (std::size_t j = 0; j < q_count_; ++j) {
        const Modulus &qj = moduli_[q_id(j)];
        p_mod_q_[j] = product_mod(*this, all_p, total(), qj);
        p_inv_mod_q_[j] = mod_inv(p_mod_q_[j], qj);
    }
}

std::vector<std::size_t> RnsBasis::p_ids() const {
    std::vector<std::size_t> ids(alpha_);
    for (std::size_t i = 0; i < alpha_; ++i) ids[i] = i;
    return ids;
}

std::vector<std::size_t> RnsBasis::q_ids(std::size_t level) const {
    std::vector<std::size_t> ids(level + 1);
    for (std::size_t j = 0; j <= level; ++j) ids[j] = q_id(j);
    return ids;
}

std::vector<std::size_t> RnsBasis::pq_ids(std::size_t level) const {
    auto ids = p_ids();
    const auto q = q_ids(level);
    ids.insert(ids.end(), q.begin(), q.end());
    return ids;
}

std::vector<std::size_t> RnsBasis::group_ids(std::size_t b, std::size_t level) const {
    std::vector<std::size_t> ids;
    for (std::size_t j = b * alpha_; j < std::min((b + 1) * alpha_, level + 1); ++j) ids.push_back(q_id(j));
    return ids;
}

RnsPoly RnsPoly::zero(const RnsBasis &basis, std::vector<std::size_t> ids, Domain domain) {
    RnsPoly p;
    p.limbs.reserve(ids.size());
    for (std::size_t id : ids) p.limbs.emplace_back(basis.context(id), domain);
    p.ids = std::move(ids);
    return p;
}

RnsPoly RnsPoly::from_signed(const RnsBasis &basis, std::vector<std::size_t> ids, const std::vector<i64> &coeffs) {
    if (coeffs.size() != basis.n()) throw Error(ErrorCode::InvalidArgument, "coefficient count must equal N");
    RnsPoly p = zero(basis, std::move(ids), Domain::Coefficient);
    for (auto &limb : p.limbs) {
        for (std::size_t i = 0; i < coeffs.size(); ++i) limb.coeffs[i] = mod_from_signed(coeffs[i], limb.modulus());
    }
    return p;
}

Domain RnsPoly::domain() const {
    if (limbs.empty()) return Domain::Coefficient;
    const Domain d = limbs.front().domain;
    for (const auto &l : limbs)
        if (l.domain != d) throw Error(ErrorCode::DomainMismatch, "limbs disagree on domain");
    return d;
}

std::size_t RnsPoly::index_of(std::size_t id) const {
    const auto it = std::find(ids.begin(), ids.end(), id);
    if (it == ids.end()) throw Error(ErrorCode::BasisMismatch, "modulus id " + std::to_string(id) + " not present");
    return static_cast<std::size_t>(it - ids.begin());
}

RnsPoly RnsPoly::restricted(const std::vector<std::size_t> &keep) const {
    RnsPoly out;
    out.ids = keep;
    out.limbs.reserve(keep.size());
    for (std::size_t id : keep) out.limbs.push_back(limbs[index_of(id)]);
    return out;
}

void to_ntt(RnsPoly &p) {
    for (auto &l : p.limbs)
        if (l.domain == Domain::Coefficient) ntt_inplace(l);
}

void to_coef(RnsPoly &p) {
    for (auto &l : p.limbs)
        if (l.domain == Domain::Ntt) intt_inplace(l);
}

void add_inplace(RnsPoly &acc, const RnsPoly &b) {
    require_same_ids(acc, b);
    for (std::size_t k = 0; k < acc.size(); ++k) add_inplace(acc.limbs[k], b.limbs[k]);
}

void sub_inplace(RnsPoly &acc, const RnsPoly &b) {
    require_same_ids(acc, b);
    for (std::size_t k = 0; k < acc.size(); ++k) sub_inplace(acc.limbs[k], b.limbs[k]);
}

void mul_acc_inplace(RnsPoly &acc, const RnsPoly &a, const RnsPoly &b) {
    require_same_ids(acc, a);
    require_same_ids(a, b);
    for (std::size_t k = 0; k < acc.size(); ++k) mul_acc_inplace(acc.limbs[k], a.limbs[k], b.limbs[k]);
}

RnsPoly add(const RnsPoly &a, const RnsPoly &b) {
    RnsPoly out = a;
    add_inplace(out, b);
    return out;
}

RnsPoly mul(const RnsPoly &a, const RnsPoly &b) {
    require_same_ids(a, b);
    RnsPoly out;
    out.ids = a.ids;
    for (std::size_t k = 0; k < a.size(); ++k) out.limbs.push_back(pointwise_mul(a.limbs[k], b.limbs[k]));
    return out;
}

RnsPoly automorphism_eval(const RnsPoly &p, const RotationIndex &rot) {
    RnsPoly out;
    out.ids = p.ids;
    out.limbs.reserve(p.size());
    if (p.limbs.empty()) return out;
    // Every limb shares N, so one index table serves all of them.
    const auto table = automorphism_eval_table(*p.limbs.front().ctx, rot);
    for (const auto &l : p.limbs) {
        if (l.domain != Domain::Ntt) throw Error(ErrorCode::DomainMismatch, "automorphism_eval expects Ntt input");
        Poly o(l.ctx, Domain::Ntt);
        for (std::size_t i = 0; i < l.n(); ++i) o.coeffs[i] = l.coeffs[table[i]];
        out.limbs.push_back(std::move(o));
    }
    return out;
}

RnsPoly automorphism_coef(const RnsPoly &p, const RotationIndex &rot) {
    RnsPoly out;
    out.ids = p.ids;
    for (const auto &l : p.limbs) out.limbs.push_back(automorphism_coef(l, rot));
    return out;
}

RnsPoly bconv(const RnsBasis &basis, const RnsPoly &p, const std::vector<std::size_t> &source,
              const std::vector<std::size_t> &target) {
    for (std::size_t s : source)
        if (std::find(target.begin(), target.end(), s) != target.end())
            throw Error(ErrorCode::BasisOverlap, "source and target share modulus id " + std::to_string(s));
    require_domain(p, Domain::Coefficient, "bconv");

    const auto table = make_bconv_table(basis, source, target);
    const std::size_t n = basis.n();
    std::vector<const Poly *> src_limbs;
    for (std::size_t s : source) src_limbs.push_back(&p.limbs[p.index_of(s)]);

    RnsPoly out = RnsPoly::zero(basis, target, Domain::Coefficient);
    std::vector<u64> scaled(source.size());
    for (std::size_t c = 0; c < n; ++c) {
        for (std::size_t s = 0; s < source.size(); ++s)
            scaled[s] = mod_mul(src_limbs[s]->coeffs[c], table.hat_inv[s], basis.modulus(source[s]));
        for (std::size_t d = 0; d < target.size(); ++d) {
            const Modulus &m = basis.modulus(target[d]);
            u64 acc = 0;
            for (std::size_t s = 0; s < source.size(); ++s)
                acc = mod_add(acc, mod_mul(scaled[s] % m.value(), table.hat_mod[s][d], m), m);
            out.limbs[d].coeffs[c] = acc;
        }
    }
    return out;
}

std::vector<RnsPoly> decompose(const RnsBasis &basis, const RnsPoly &c) {
    require_domain(c, Domain::Coefficient, "decompose");
    const std::size_t level = q_level_of(basis, c, false);
    const auto full = basis.pq_ids(level);
    std::vector<RnsPoly> digits;
    for (std::size_t b = 0; b < basis.beta_at(level); ++b) {
        const auto group = basis.group_ids(b, level);
        std::vector<std::size_t> others;
        for (std::size_t id : full)
            if (std::find(group.begin(), group.end(), id) == group.end()) others.push_back(id);
        const RnsPoly ext = bconv(basis, c, group, others);
        RnsPoly digit;
        digit.ids = full;
        for (std::size_t id : full) {
            const bool kept = std::find(group.begin(), group.end(), id) != group.end();
            digit.limbs.push_back(kept ? c.limbs[c.index_of(id)] : ext.limbs[ext.index_of(id)]);
        }
        digits.push_back(std::move(digit));
    }
    return digits;
}

std::vector<RnsPoly> decompose_ntt(const RnsBasis &basis, const RnsPoly &c) {
    require_domain(c, Domain::Ntt, "decompose_ntt");
    RnsPoly coef = c;
    to_coef(coef);
    auto digits = decompose(basis, coef);
    const std::size_t level = c.size() - 1;
    for (std::size_t b = 0; b < digits.size(); ++b) {
        const auto group = basis.group_ids(b, level);
        for (std::size_t k = 0; k < digits[b].size(); ++k) {
            const std::size_t id = digits[b].ids[k];
            if (std::find(group.begin(), group.end(), id) != group.end())
                digits[b].limbs[k] = c.limbs[c.index_of(id)];
            else
                ntt_inplace(digits[b].limbs[k]);
        }
    }
    return digits;
}

RnsPoly moddown(const RnsBasis &basis, const RnsPoly &c) {
    require_domain(c, Domain::Coefficient, "moddown");
    const std::size_t level = q_level_of(basis, c, true);
    const auto q = basis.q_ids(level);
    const RnsPoly conv = bconv(basis, c, basis.p_ids(), q);
    RnsPoly out = RnsPoly::zero(basis, q, Domain::Coefficient);
    for (std::size_t j = 0; j <= level; ++j) {
        const Modulus &m = basis.modulus(q[j]);
        const Poly &src = c.limbs[c.index_of(q[j])];
        const u64 p_inv = basis.p_inv_mod_q(j);
        for (std::size_t i = 0; i < basis.n(); ++i)
            out.limbs[j].coeffs[i] = mod_mul(mod_sub(src.coeffs[i], conv.limbs[j].coeffs[i], m), p_inv, m);
    }
    return out;
}

RnsPoly moddown_ntt(const RnsBasis &basis, const RnsPoly &c) {
    require_domain(c, Domain::Ntt, "moddown_ntt");
    const std::size_t level = q_level_of(basis, c, true);
    RnsPoly p_part = c.restricted(basis.p_ids());
    to_coef(p_part);
    const auto q = basis.q_ids(level);
    RnsPoly conv = bconv(basis, p_part, basis.p_ids(), q);
    to_ntt(conv);
    RnsPoly out = c.restricted(q);
    for (std::size_t j = 0; j <= level; ++j) {
        const Modulus &m = basis.modulus(q[j]);
        const u64 p_inv = basis.p_inv_mod_q(j);
        auto &dst = out.limbs[j].coeffs;
        for (std::size_t i = 0; i < basis.n(); ++i)
            dst[i] = mod_mul(mod_sub(dst[i], conv.limbs[j].coeffs[i], m), p_inv, m);
    }
    return out;
}

RnsPoly rescale(const RnsBasis &basis, const RnsPoly &c) {
    require_domain(c, Domain::Coefficient, "rescale");
    const std::size_t level = q_level_of(basis, c, false);
    if (level == 0) throw Error(ErrorCode::SingleLimb, "cannot rescale a single-limb polynomial");
    const Poly &top = c.limbs[level];
    const Modulus &q_top = basis.modulus(basis.q_id(level));
    RnsPoly out = c.restricted(basis.q_ids(level - 1));
    for (std::size_t j = 0; j < level; ++j) {
        const Modulus &m = basis.modulus(basis.q_id(j));
        const u64 inv = mod_inv(q_top.value() % m.value(), m);
        auto &dst = out.limbs[j].coeffs;
        for (std::size_t i = 0; i < basis.n(); ++i)
            dst[i] = mod_mul(mod_sub(dst[i], top.coeffs[i] % m.value(), m), inv, m);
    }
    return out;
}

RnsPoly rescale_ntt(const RnsBasis &basis, const RnsPoly &c) {
    require_domain(c, Domain::Ntt, "rescale_ntt");
    const std::size_t level = q_level_of(basis, c, false);
    if (level == 0) throw Error(ErrorCode::SingleLimb, "cannot rescale a single-limb polynomial");
    const Poly top = intt(c.limbs[level]);
    const Modulus &q_top = basis.modulus(basis.q_id(level));
    RnsPoly out = c.restricted(basis.q_ids(level - 1));
    for (std::size_t j = 0; j < level; ++j) {
        const Modulus &m = basis.modulus(basis.q_id(j));
        const u64 inv = mod_inv(q_top.value() % m.value(), m);
        Poly t(out.limbs[j].ctx, Domain::Coefficient);
        for (std::size_t i = 0; i < basis.n(); ++i) t.coeffs[i] = top.coeffs[i] % m.value();
        ntt_inplace(t);
        auto &dst = out.limbs[j].coeffs;
        for (std::size_t i = 0; i < basis.n(); ++i) dst[i] = mod_mul(mod_sub(dst[i], t.coeffs[i], m), inv, m);
    }
    return out;
}

RnsPoly mul_by_p(const RnsBasis &basis, const RnsPoly &c) {
    const std::size_t level = q_level_of(basis, c, false);
    const Domain d = c.domain();
    RnsPoly out = RnsPoly::zero(basis, basis.pq_ids(level), d);
    for (std::size_t j = 0; j <= level; ++j)
        out.limbs[basis.alpha() + j] = scalar_mul(c.limbs[j], basis.p_mod_q(j));
    return out;
}

} // namespace hlt
