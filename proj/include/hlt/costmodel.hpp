// Copyright 2026 The hlt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "hlt/helt.hpp"

namespace hlt::cost {

using u64 = std::uint64_t;

/// Shape of an HE instance: ring dimension N, L+1 ciphertext limbs, alpha
/// special limbs, beta = ceil((L+1)/alpha) digits, w-bit words and LT
/// dimension n.
struct HeParams {
    std::size_t N = 0;
    std::size_t L = 0;
    std::size_t alpha = 0;
    std::size_t beta = 0;
    std::size_t w = 0;
    std::size_t n = 0;

    static HeParams make(std::size_t N, std::size_t limbs, std::size_t alpha, std::size_t w, std::size_t n);
    static HeParams set_a(); // N=2^13, L+1=5,  alpha=5,  n=2^12
    static HeParams set_b(); // N=2^15, L+1=16, alpha=8,  n=2^14
    static HeParams set_c(); // N=2^16, L+1=32, alpha=12, n=2^15
    /// "set-a", "set-b", "set-c"; throws InvalidArgument otherwise.
    static HeParams named(const std::string &name);

    std::size_t limbs() const noexcept { return L + 1; }
    std::size_t pq() const noexcept { return L + 1 + alpha; }
    /// Bytes of one limb with w-bit words packed back to back.
    double limb_bytes() const noexcept { return static_cast<double>(N) * static_cast<double>(w) / 8.0; }
    /// Throws InvalidArgument on inconsistent fields.
    void validate() const;
};

/// Table of parallelism knobs of the six-phase datapath.
struct ParallelismConfig {
    std::size_t m1 = 1, m2 = 1, m3 = 1, m4 = 1, m5 = 1, m6 = 1;
    std::size_t l1 = 1, l2 = 1, l3 = 1, l4 = 1, l5 = 1;
    std::size_t dp = 1;

    static ParallelismConfig ones(std::size_t dp = 1) { ParallelismConfig c; c.dp = dp; return c; }
    /// Reference configurations for set-a/b/c.
    static ParallelismConfig preset(const std::string &set_name);
    /// Parses "m1,l1,m2,l2,m4,m3,l3,m5,l4,m6,l5" (the reference column order).
    static ParallelismConfig parse(const std::string &text, std::size_t dp = 1);
    std::string to_string() const;

    /// Throws ConfigOutOfRange when a knob leaves its loop extent.
    void validate(const HeParams &p, const std::vector<std::size_t> &factors) const;

    friend bool operator==(const ParallelismConfig &, const ParallelismConfig &) = default;
};

/// Reference TH-BSGS factorization of set-a/b/c.
LtPlan reference_plan(const std::string &set_name);

/// TH-BSGS Decompose/ModDown counts: the executed algorithm gives
/// n1'+n3'-1 and n1'+n3'; the reference table lists one more of each.
enum class Convention { Algorithm, Table };

enum Category : std::size_t { kNtt = 0, kLtMatrix, kSwitchingKey, kPolyRead, kPolyWrite, kCategories };
const char *category_name(std::size_t c);

/// Off-chip limbs moved per category in one phase.
struct PhaseAccess {
    std::array<u64, kCategories> limbs{};
    u64 total() const;
    friend bool operator==(const PhaseAccess &, const PhaseAccess &) = default;
};
using Access = std::array<PhaseAccess, 6>;
using Peak = std::array<u64, 6>;

struct CostReport {
    LtPlan plan;
    u64 decompose_count = 0;
    u64 moddown_count = 0;
    u64 key_count = 0;            // distinct rotation keys
    u64 switching_key_limbs = 0;  // beta * keys * (L+1+alpha), one polynomial per key
    u64 cwise_mult_limbs = 0;     // tabulated formula
    u64 key_switches = 0;         // key switches the algorithm executes
    u64 cwise_mult_limbs_executed = 0;
    double modmul = 0;            // coefficient modular multiplications
    double key_bytes = 0;         // both polynomials of every key
    // Filled by memory_report only.
    Access offchip{};
    Peak peak{};
    u64 offchip_total = 0;
    u64 peak_max = 0;

    double key_gib() const { return key_bytes / (1024.0 * 1024.0 * 1024.0); }
};

/// Modular multiplications of one limb NTT, one Decompose of a full-level
/// polynomial and one ModDown of a PQ polynomial.
double ntt_modmul(const HeParams &p);
double decompose_modmul(const HeParams &p);
double moddown_modmul(const HeParams &p);

/// Counts for a plan; plan.n must equal p.n. Throws BadFactors.
CostReport complexity(const LtPlan &plan, const HeParams &p, Convention conv = Convention::Algorithm);

/// Per-phase off-chip access of the TH-BSGS datapath, in limbs.
Access offchip_access(const HeParams &p, const std::vector<std::size_t> &factors, const ParallelismConfig &c);
/// Per-phase peak on-chip residency, in limbs.
Peak peak_onchip(const HeParams &p, const std::vector<std::size_t> &factors, const ParallelismConfig &c);
/// Processing rounds per phase: limb chunks times operand groups. Phases 1
/// and 3 still sweep their limbs when they have no keys; phase 2 is empty
/// when n1' = 1.
std::array<u64, 6> rounds(const HeParams &p, const std::vector<std::size_t> &factors, const ParallelismConfig &c);

/// complexity plus the memory tables (TH-BSGS plans only).
CostReport memory_report(const HeParams &p, const LtPlan &plan, const ParallelismConfig &c);

enum class Objective { MinKeys, MinCompute, Pareto };

/// Power-of-two factorizations of p.n. MinKeys and MinCompute return the one
/// optimum (ties: fewer keys or modmuls, then smallest leading factor).
/// Pareto returns the sweep: for TH-BSGS one point per n2' with n1' ~ n3',
/// for DH-BSGS one point per n2, for BSGS the single optimum.
std::vector<CostReport> search_factors(LtMethod method, const HeParams &p, Objective obj);

/// Every power-of-two factorization of the method.
std::vector<LtPlan> factorizations(LtMethod method, std::size_t n);

/// Minimizes total off-chip limbs subject to every phase peak fitting in
/// budget_bytes. Ties: fewer rounds, then the lexicographically largest
/// (m1,l1,m2,l2,m4,m3,l3,m5,l4,m6,l5). Throws Infeasible.
ParallelismConfig search_parallelism(const HeParams &p, const std::vector<std::size_t> &factors, double budget_bytes,
                                     std::size_t dp = 1);

struct TradeoffPoint {
    CostReport report;
    std::string tag; // "", "min-memory", "best-tradeoff" or both joined by '+'
};

/// Sweep points of each method, tagged.
std::vector<TradeoffPoint> tradeoff_curve(const std::vector<LtMethod> &methods, const HeParams &p);

/// Key-byte ratio between the DH-BSGS and TH-BSGS best-tradeoff points.
double best_tradeoff_key_ratio(const HeParams &p);

/// CSV with header; column order documented in README.
void write_tradeoff_csv(const std::vector<TradeoffPoint> &points, std::ostream &os);

/// The analysis point N=2^16, L+1=32, alpha=12, w=54, n=2^15.
HeParams analysis_params();

} // namespace hlt::cost
