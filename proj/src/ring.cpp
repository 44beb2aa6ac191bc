// Copyright 2026 The hlt Authors
// SPDX-License-Identifier: Apache-2.0

#include "hlt/ring.hpp"

#include <bit>
#include <string>

namespace hlt {

const char *to_string(Domain d) { return d == Domain::Ntt ? "Ntt" : "Coefficient"; }

std::size_t bit_reverse(std::size_t x, int bits) noexcept {
    std::size_t r = 0;
    for (int i = 0; i < bits; ++i) {
        r = (r << 1) | (x & 1);
        x >>= 1;
    }
    return r;
}

PolyContext::PolyContext(const Modulus &mod, std::size_t n)
    : mod_(mod), n_(n), log_n_(std::countr_zero(n)), bitrev_(n) {
    for (std::size_t i = 0; i < n; ++i) bitrev_[i] = bit_reverse(i, log_n_);
    if (!mod.ntt_friendly() || mod.ring_dim() != n) return;

    const u64 psi = mod.two_n_root();
    const u64 psi_inv = mod_inv(psi, mod);
    psi_rev_.resize(n);
    psi_inv_rev_.resize(n);
    u64 pw = 1, pw_inv = 1;
    for (std::size_t i = 0; i < n; ++i) {
        psi_rev_[bitrev_[i]] = pw;
        psi_inv_rev_[bitrev_[i]] = pw_inv;
        pw = mod_mul(pw, psi, mod);
        pw_inv = mod_mul(pw_inv, psi_inv, mod);
    }
}

std::shared_ptr<const PolyContext> PolyContext::make(const Modulus &mod, std::size_t n) {
    if (n < 2 || !std::has_single_bit(n))
        throw Error(ErrorCode::InvalidArgument, "ring dimension must be a power of two");
    return std::shared_ptr<const PolyContext>(new PolyContext(mod, n));
}

// Cooley-Tukey, natural order in, bit-reversed order out.
void PolyContext::forward(std::span<u64> a) const {
    if (!has_ntt()) throw Error(ErrorCode::InvalidArgument, "modulus does not support the NTT for this N");
    const Modulus &m = mod_;
    std::size_t t = n_;
    for (std::size_t blocks = 1; blocks < n_; blocks <<= 1) {
        t >>= 1;
        for (std::size_t i = 0; i < blocks; ++i) {
            const std::size_t j1 = 2 * i * t;
            const u64 w = psi_rev_[blocks + i];
            for (std::size_t j = j1; j < j1 + t; ++j) {
                const u64 u = a[j];
                const u64 v = mod_mul(a[j + t], w, m);
                a[j] = mod_add(u, v, m);
                a[j + t] = mod_sub(u, v, m);
            }
        }
    }
}

// Gentleman-Sande, bit-reversed order in, natural order out; N^-1 applied last.
void PolyContext::inverse(std::span<u64> a) const {
    if (!has_ntt()) throw Error(ErrorCode::InvalidArgument, "modulus does not support the NTT for this N");
    const Modulus &m = mod_;
    std::size_t t = 1;
    for (std::size_t len = n_; len > 1; len >>= 1) {
        const std::size_t h = len >> 1;
        std::size_t j1 = 0;
        for (std::size_t i = 0; i < h; ++i) {
            const u64 w = psi_inv_rev_[h + i];
            for (std::size_t j = j1; j < j1 + t; ++j) {
                const u64 u = a[j];
                const u64 v = a[j + t];
                a[j] = mod_add(u, v, m);
                a[j + t] = mod_mul(mod_sub(u, v, m), w, m);
            }
            j1 += 2 * t;
        }
        t <<= 1;
    }
    const u64 n_inv = m.n_inv();
    for (auto &x : a) x = mod_mul(x, n_inv, m);
}

RotationIndex RotationIndex::make(long long r, std::size_t n) {
    const long long slots = static_cast<long long>(n / 2);
    long long rr = r % slots;
    if (rr < 0) rr += slots;
    const u64 two_n = 2 * static_cast<u64>(n);
    u64 g = 1, base = kGenerator;
    for (auto e = static_cast<u64>(rr); e != 0; e >>= 1) {
        if (e & 1) g = g * base % two_n;
        base = base * base % two_n;
    }
    return RotationIndex{static_cast<std::size_t>(rr), g};
}

namespace {

void require_domain(const Poly &p, Domain d, const char *op) {
    if (p.domain != d)
        throw Error(ErrorCode::DomainMismatch,
                    std::string(op) + " expects " + to_string(d) + " input, got " + to_string(p.domain));
}

void require_compatible(const Poly &a, const Poly &b) {
    if (a.domain != b.domain) throw Error(ErrorCode::DomainMismatch, "operands are in different domains");
    if (a.q() != b.q() || a.n() != b.n())
        throw Error(ErrorCode::ModulusMismatch, "operands live in different rings");
}

} // namespace

void ntt_inplace(Poly &p) {
    require_domain(p, Domain::Coefficient, "ntt");
    p.ctx->forward(p.coeffs);
    p.domain = Domain::Ntt;
}

void intt_inplace(Poly &p) {
    require_domain(p, Domain::Ntt, "intt");
    p.ctx->inverse(p.coeffs);
    p.domain = Domain::Coefficient;
}

Poly ntt(Poly p) {
    ntt_inplace(p);
    return p;
}

Poly intt(Poly p) {
    intt_inplace(p);
    return p;
}

Poly automorphism_coef(const Poly &p, const RotationIndex &rot) {
    require_domain(p, Domain::Coefficient, "automorphism_coef");
    const std::size_t n = p.n();
    const u64 two_n = 2 * static_cast<u64>(n);
    Poly out(p.ctx, Domain::Coefficient);
    for (std::size_t i = 0; i < n; ++i) {
        const u64 dst = static_cast<u64>(i) * rot.g_r % two_n;
        if (dst < n)
            out.coeffs[dst] = p.coeffs[i];
        else
            out.coeffs[dst - n] = mod_neg(p.coeffs[i], p.modulus());
    }
    return out;
}

std::vector<std::size_t> automorphism_eval_table(const PolyContext &ctx, const RotationIndex &rot) {
    const std::size_t n = ctx.n();
    const u64 two_n = 2 * static_cast<u64>(n);
    if ((rot.g_r & 1) == 0) throw Error(ErrorCode::InvalidArgument, "Galois element must be odd");
    std::vector<std::size_t> table(n);
    for (std::size_t pos = 0; pos < n; ++pos) {
        const u64 i = ctx.bitrev(pos);
        const u64 j = ((rot.g_r * (2 * i + 1)) % two_n - 1) / 2;
        table[pos] = ctx.bitrev(static_cast<std::size_t>(j));
    }
    return table;
}

Poly automorphism_eval(const Poly &p, const RotationIndex &rot) {
    require_domain(p, Domain::Ntt, "automorphism_eval");
    const auto table = automorphism_eval_table(*p.ctx, rot);
    Poly out(p.ctx, Domain::Ntt);
    for (std::size_t i = 0; i < p.n(); ++i) out.coeffs[i] = p.coeffs[table[i]];
    return out;
}

Poly pointwise_add(const Poly &a, const Poly &b) {
    Poly out = a;
    add_inplace(out, b);
    return out;
}

Poly pointwise_sub(const Poly &a, const Poly &b) {
    Poly out = a;
    sub_inplace(out, b);
    return out;
}

Poly pointwise_mul(const Poly &a, const Poly &b) {
    require_compatible(a, b);
    Poly out(a.ctx, a.domain);
    const Modulus &m = a.modulus();
    for (std::size_t i = 0; i < a.n(); ++i) out.coeffs[i] = mod_mul(a.coeffs[i], b.coeffs[i], m);
    return out;
}

Poly scalar_mul(const Poly &a, u64 c) {
    Poly out(a.ctx, a.domain);
    const Modulus &m = a.modulus();
    c %= m.value();
    for (std::size_t i = 0; i < a.n(); ++i) out.coeffs[i] = mod_mul(a.coeffs[i], c, m);
    return out;
}

Poly negate(const Poly &a) {
    Poly out(a.ctx, a.domain);
    for (std::size_t i = 0; i < a.n(); ++i) out.coeffs[i] = mod_neg(a.coeffs[i], a.modulus());
    return out;
}

void add_inplace(Poly &acc, const Poly &b) {
    require_compatible(acc, b);
    const Modulus &m = acc.modulus();
    for (std::size_t i = 0; i < acc.n(); ++i) acc.coeffs[i] = mod_add(acc.coeffs[i], b.coeffs[i], m);
}

void sub_inplace(Poly &acc, const Poly &b) {
    require_compatible(acc, b);
    const Modulus &m = acc.modulus();
    for (std::size_t i = 0; i < acc.n(); ++i) acc.coeffs[i] = mod_sub(acc.coeffs[i], b.coeffs[i], m);
}

void mul_acc_inplace(Poly &acc, const Poly &a, const Poly &b) {
    require_compatible(a, b);
    require_compatible(acc, a);
    const Modulus &m = acc.modulus();
    for (std::size_t i = 0; i < acc.n(); ++i)
        acc.coeffs[i] = mod_add(acc.coeffs[i], mod_mul(a.coeffs[i], b.coeffs[i], m), m);
}

} // namespace hlt
