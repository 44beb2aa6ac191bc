// Copyright 2026 The hlt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <vector>

#include "hlt/ring.hpp"

namespace hlt {

/// The modulus tower P*Q. Moduli are addressed by a global id with the P
/// primes stored first: ids [0, alpha) are p_0..p_{alpha-1}, ids
/// [alpha, alpha + L + 1) are q_0..q_L.
class RnsBasis {
public:
    RnsBasis(std::size_t n, std::vector<Modulus> q_moduli, std::vector<Modulus> p_moduli);

    std::size_t n() const noexcept { return n_; }
    std::size_t q_count() const noexcept { return q_count_; }
    std::size_t alpha() const noexcept { return alpha_; }
    std::size_t beta() const noexcept { return beta_at(q_count_ - 1); }
    /// Digit count for a ciphertext holding q_0..q_level.
    std::size_t beta_at(std::size_t level) const noexcept { return (level + 1 + alpha_ - 1) / alpha_; }
    std::size_t max_level() const noexcept { return q_count_ - 1; }
    std::size_t total() const noexcept { return moduli_.size(); }

    const Modulus &modulus(std::size_t id) const { return moduli_.at(id); }
    const PolyContextPtr &context(std::size_t id) const { return contexts_.at(id); }

    std::size_t p_id(std::size_t i) const noexcept { return i; }
    std::size_t q_id(std::size_t j) const noexcept { return alpha_ + j; }
    bool is_p(std::size_t id) const noexcept { return id < alpha_; }

    std::vector<std::size_t> p_ids() const;
    std::vector<std::size_t> q_ids(std::size_t level) const;
    std::vector<std::size_t> pq_ids(std::size_t level) const;
    /// q ids of digit group b restricted to q_0..q_level.
    std::vector<std::size_t> group_ids(std::size_t b, std::size_t level) const;

    /// [Q/q_j]_{q_j}^{-1} over the full Q.
    u64 q_hat_inv(std::size_t j) const { return q_hat_inv_.at(j); }
    /// [Q/q_j] reduced modulo the modulus with global id `id`.
    u64 q_hat_mod(std::size_t j, std::size_t id) const { return q_hat_mod_.at(j).at(id); }
    u64 p_hat_inv(std::size_t i) const { return p_hat_inv_.at(i); }
    /// [P] and [P^{-1}] modulo q_j.
    u64 p_mod_q(std::size_t j) const { return p_mod_q_.at(j); }
    u64 p_inv_mod_q(std::size_t j) const { return p_inv_mod_q_.at(j); }

private:
    std::size_t n_;
    std::size_t q_count_;
    std::size_t alpha_;
    std::vector<Modulus> moduli_;
    std::vector<PolyContextPtr> contexts_;
    std::vector<u64> q_hat_inv_;
    std::vector<std::vector<u64>> q_hat_mod_;
    std::vector<u64> p_hat_inv_;
    std::vector<u64> p_mod_q_;
    std::vector<u64> p_inv_mod_q_;
};

/// A polynomial held as residues over a subset of the tower.
struct RnsPoly {
    std::vector<std::size_t> ids;
    std::vector<Poly> limbs;

    static RnsPoly zero(const RnsBasis &basis, std::vector<std::size_t> ids, Domain domain);
    /// Reduces signed integer coefficients into every listed modulus.
    static RnsPoly from_signed(const RnsBasis &basis, std::vector<std::size_t> ids, const std::vector<i64> &coeffs);

    std::size_t size() const noexcept { return limbs.size(); }
    Domain domain() const;
    /// Position of a global id in this polynomial; throws BasisMismatch if absent.
    std::size_t index_of(std::size_t id) const;
    RnsPoly restricted(const std::vector<std::size_t> &keep) const;

    friend bool operator==(const RnsPoly &a, const RnsPoly &b) { return a.ids == b.ids && a.limbs == b.limbs; }
};

void to_ntt(RnsPoly &p);
void to_coef(RnsPoly &p);

void add_inplace(RnsPoly &acc, const RnsPoly &b);
void sub_inplace(RnsPoly &acc, const RnsPoly &b);
void mul_acc_inplace(RnsPoly &acc, const RnsPoly &a, const RnsPoly &b);
RnsPoly add(const RnsPoly &a, const RnsPoly &b);
RnsPoly mul(const RnsPoly &a, const RnsPoly &b);
RnsPoly automorphism_eval(const RnsPoly &p, const RotationIndex &rot);
RnsPoly automorphism_coef(const RnsPoly &p, const RotationIndex &rot);

/// Fast basis conversion from the limbs listed in `source` (a subset of
/// p's ids) to the moduli in `target`. The result equals the exact value plus
/// u times the source modulus product, 0 <= u < |source|.
RnsPoly bconv(const RnsBasis &basis, const RnsPoly &p, const std::vector<std::size_t> &source,
              const std::vector<std::size_t> &target);

/// ModUp per digit group. Input holds q_0..q_level in coefficient form.
std::vector<RnsPoly> decompose(const RnsBasis &basis, const RnsPoly &c);
/// Same result as decompose but for NTT-domain input, producing NTT-domain digits.
std::vector<RnsPoly> decompose_ntt(const RnsBasis &basis, const RnsPoly &c);

/// Divides by P and drops the P limbs: input over P*Q_level, coefficient form.
RnsPoly moddown(const RnsBasis &basis, const RnsPoly &c);
RnsPoly moddown_ntt(const RnsBasis &basis, const RnsPoly &c);

/// Divides by the top modulus q_level and drops that limb.
RnsPoly rescale(const RnsBasis &basis, const RnsPoly &c);
RnsPoly rescale_ntt(const RnsBasis &basis, const RnsPoly &c);

/// c * P lifted to P*Q_level (the P limbs become zero).
RnsPoly mul_by_p(const RnsBasis &basis, const RnsPoly &c);

} // namespace hlt
