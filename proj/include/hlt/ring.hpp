// Copyright 2026 The hlt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "hlt/modarith.hpp"

namespace hlt {

enum class Domain { Coefficient, Ntt };

const char *to_string(Domain d);

/// Per-(modulus, N) constants for Z_q[x]/(x^N + 1): twiddle tables in
/// bit-reversed order and the bit-reversal table itself. Shared by every
/// polynomial over the same modulus.
class PolyContext {
public:
    static std::shared_ptr<const PolyContext> make(const Modulus &mod, std::size_t n);

    const Modulus &modulus() const noexcept { return mod_; }
    std::size_t n() const noexcept { return n_; }
    int log_n() const noexcept { return log_n_; }
    bool has_ntt() const noexcept { return !psi_rev_.empty(); }
    std::size_t bitrev(std::size_t i) const noexcept { return bitrev_[i]; }

    void forward(std::span<u64> a) const;
    void inverse(std::span<u64> a) const;

private:
    PolyContext(const Modulus &mod, std::size_t n);

    Modulus mod_;
    std::size_t n_;
    int log_n_;
    std::vector<std::size_t> bitrev_;
    std::vector<u64> psi_rev_;
    std::vector<u64> psi_inv_rev_;
};

using PolyContextPtr = std::shared_ptr<const PolyContext>;

std::size_t bit_reverse(std::size_t x, int bits) noexcept;

/// Slot rotation by r positions: the automorphism x -> x^(g^r mod 2N).
struct RotationIndex {
    std::size_t r = 0;
    u64 g_r = 1;

    static constexpr u64 kGenerator = 5;

    /// Rotation by r (taken mod N/2, negative values allowed) in ring dimension n.
    static RotationIndex make(long long r, std::size_t n);
};

/// A single residue polynomial. Value type: copies own their coefficients.
struct Poly {
    PolyContextPtr ctx;
    std::vector<u64> coeffs;
    Domain domain = Domain::Coefficient;

    Poly() = default;
    Poly(PolyContextPtr c, Domain d) : ctx(std::move(c)), coeffs(ctx->n(), 0), domain(d) {}

    std::size_t n() const noexcept { return coeffs.size(); }
    const Modulus &modulus() const noexcept { return ctx->modulus(); }
    u64 q() const noexcept { return ctx->modulus().value(); }

    friend bool operator==(const Poly &a, const Poly &b) {
        return a.domain == b.domain && a.q() == b.q() && a.coeffs == b.coeffs;
    }
};

void ntt_inplace(Poly &p);
void intt_inplace(Poly &p);
Poly ntt(Poly p);
Poly intt(Poly p);

Poly automorphism_coef(const Poly &p, const RotationIndex &rot);
Poly automorphism_eval(const Poly &p, const RotationIndex &rot);

/// Source position table for automorphism_eval: out[i] = in[table[i]].
std::vector<std::size_t> automorphism_eval_table(const PolyContext &ctx, const RotationIndex &rot);

Poly pointwise_add(const Poly &a, const Poly &b);
Poly pointwise_sub(const Poly &a, const Poly &b);
Poly pointwise_mul(const Poly &a, const Poly &b);
Poly scalar_mul(const Poly &a, u64 c);
Poly negate(const Poly &a);

void add_inplace(Poly &acc, const Poly &b);
void sub_inplace(Poly &acc, const Poly &b);
/// acc += a * b, entrywise.
void mul_acc_inplace(Poly &acc, const Poly &a, const Poly &b);

} // namespace hlt
