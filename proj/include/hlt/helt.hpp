// Copyright 2026 The hlt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <set>
#include <string>
#include <vector>

#include "hlt/ckks.hpp"

namespace hlt {

enum class LtMethod { Diagonal, Bsgs, DhBsgs, ThBsgs };

const char *to_string(LtMethod m);
/// Accepts "diagonal", "bsgs", "dh-bsgs", "th-bsgs".
LtMethod parse_method(const std::string &name);

/// Method and factorization of the dimension n. factors is empty for the
/// diagonal method, (n1, n2) for Bsgs/DhBsgs and (n1', n2', n3') for ThBsgs.
struct LtPlan {
    LtMethod method = LtMethod::Diagonal;
    std::size_t n = 0;
    std::vector<std::size_t> factors;

    static LtPlan diagonal(std::size_t n);
    static LtPlan bsgs(std::size_t n1, std::size_t n2);
    static LtPlan dh_bsgs(std::size_t n1, std::size_t n2);
    static LtPlan th_bsgs(std::size_t n1, std::size_t n2, std::size_t n3);

    /// Throws BadFactors or DimensionTooLarge.
    void validate(std::size_t slots) const;
    /// Stride of the outermost rotation layer: diagonals f_{g*k + m} are
    /// pre-rotated by -g*k. Equals n for the diagonal method (no pre-rotation).
    std::size_t giant_stride() const;
    /// Distinct nonzero rotation offsets whose keys the method consumes.
    std::vector<std::size_t> key_offsets() const;
    /// Bsgs uses plain keys, every other method hoisted keys.
    bool uses_hoisted_keys() const { return method != LtMethod::Bsgs; }

    friend bool operator==(const LtPlan &a, const LtPlan &b) {
        return a.method == b.method && a.n == b.n && a.factors == b.factors;
    }
};

/// Operation counts recorded while evaluating a plan.
struct OpTrace {
    std::size_t decompose = 0;
    std::size_t moddown = 0; // per polynomial
    std::size_t key_switches = 0;
    std::size_t automorphisms = 0;
    std::size_t cwise_mult_limbs = 0; // limb-level coefficient-wise products
    std::set<std::size_t> key_offsets;
};

/// Diagonals of F, tiled to N/2 slots, encoded over P*Q_level in the Ntt
/// domain. fhat[m] is f_m pre-rotated for the plan's outer layer.
struct DiagMatrix {
    LtPlan plan;
    std::size_t level = 0;
    double scale = 1.0;
    std::vector<std::vector<Complex>> values; // raw, before pre-rotation
    std::vector<RnsPoly> fhat;
};

/// Diagonal i at slot t holds F[t mod n][(t + i) mod n], for N/2 slots.
/// Rows/columns missing from F are zero.
std::vector<std::vector<Complex>> diagonal_vectors(const std::vector<std::vector<double>> &f, std::size_t n,
                                                   std::size_t slots);

DiagMatrix diagonalize(const CkksContext &ctx, const std::vector<std::vector<double>> &f, const LtPlan &plan,
                       std::size_t level, double scale);

/// Generates exactly the keys a plan consumes.
KeySet lt_keys(const CkksContext &ctx, const SecretKey &sk, const LtPlan &plan, Rng &rng);

Ciphertext lt_diagonal(const CkksContext &ctx, const Ciphertext &ct, const DiagMatrix &dm, const KeySet &keys,
                       OpTrace *trace = nullptr);
Ciphertext lt_bsgs(const CkksContext &ctx, const Ciphertext &ct, const DiagMatrix &dm, const KeySet &keys,
                   OpTrace *trace = nullptr);
Ciphertext lt_dh_bsgs(const CkksContext &ctx, const Ciphertext &ct, const DiagMatrix &dm, const KeySet &keys,
                      OpTrace *trace = nullptr);
Ciphertext lt_th_bsgs(const CkksContext &ctx, const Ciphertext &ct, const DiagMatrix &dm, const KeySet &keys,
                      OpTrace *trace = nullptr);
/// Dispatches on dm.plan.method.
Ciphertext lt_evaluate(const CkksContext &ctx, const Ciphertext &ct, const DiagMatrix &dm, const KeySet &keys,
                       OpTrace *trace = nullptr);

/// Diagonal scale equal to q_level, so the rescaled output keeps the input scale.
double default_diag_scale(const CkksContext &ctx, std::size_t level);

/// F * v over the first n entries, tiled to N/2 slots.
std::vector<Complex> plain_lt(const std::vector<std::vector<double>> &f, const std::vector<double> &v, std::size_t n,
                              std::size_t slots);

struct MethodResult {
    LtPlan plan;
    OpTrace trace;
    double max_error = 0;  // against the plaintext product
    double seconds = 0;
    std::vector<Complex> output;
};

struct EquivalenceReport {
    std::vector<MethodResult> results;
    std::vector<std::vector<double>> pairwise; // max slot difference
    double max_pairwise() const;
};

/// Runs every plan on one encryption of v under one key set.
EquivalenceReport lt_equivalence_check(const CkksContext &ctx, const std::vector<std::vector<double>> &f,
                                       const std::vector<double> &v, const std::vector<LtPlan> &plans, u64 seed);

} // namespace hlt
