// Copyright 2026 The hlt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <iosfwd>
#include <vector>

#include "hlt/modarith.hpp"

namespace hlt::perm {

/// Ring dimension N split over dp memory banks of N/dp words each.
struct Geometry {
    std::size_t n = 0;
    std::size_t dp = 0;

    /// Throws InvalidArgument unless N and dp are powers of two with dp^2 <= N.
    Geometry(std::size_t n, std::size_t dp);

    std::size_t bank_size() const noexcept { return n / dp; }
    int log_n() const noexcept;
    int log_dp() const noexcept;
};

/// NTT-domain polynomial stored in banks: bank f, address a holds flat
/// position f*N/dp + a, i.e. the evaluation A_{bitrev(f*N/dp + a)}.
struct BankLayout {
    Geometry geo;
    std::vector<std::vector<u64>> banks;

    static BankLayout from_flat(const std::vector<u64> &ntt_coeffs, std::size_t dp);
    std::vector<u64> to_flat() const;
};

/// idx = bitrev(f*N/dp + n_f) split as i_f*N/dp + j_f*dp + k_f.
struct SourceIndex {
    std::size_t idx = 0, i = 0, j = 0, k = 0;
};

SourceIndex source_index(std::size_t f, std::size_t n_f, const Geometry &geo);

/// Where the rotation-r automorphism sends the evaluation at (f, n_f).
struct PermTarget {
    SourceIndex src;
    u64 g_r = 1;
    std::size_t t = 0, u = 0, v = 0;       // g_r k_f + (g_r - 1)/2 = t N/dp + u dp + v
    std::size_t i2 = 0, j2 = 0, k2 = 0;    // idx' = i2 N/dp + j2 dp + k2
    std::size_t idx2 = 0;
    std::size_t bank = 0, addr = 0;        // bitrev(idx') = bank N/dp + addr
};

PermTarget target(std::size_t f, std::size_t n_f, std::size_t r, const Geometry &geo);

/// Direct form: ((g_r (2 idx + 1) mod 2N) - 1) / 2.
std::size_t naive_target_index(std::size_t idx, u64 g_r, std::size_t n);

/// Bank permutation f -> f' of rotation r; depends only on f.
std::vector<std::size_t> bank_map(std::size_t r, const Geometry &geo);

struct Move {
    std::size_t step, src_bank, src_addr, dst_bank, dst_addr;
};

/// N/dp steps of dp moves. Each step reads one word from and writes one word
/// to every bank; the word displaced by a write is carried into the next step.
struct Schedule {
    Geometry geo;
    std::size_t r = 0;
    std::vector<std::vector<Move>> steps;
};

/// In-place schedule whose result equals automorphism_eval with rotation r.
Schedule schedule(std::size_t r, const Geometry &geo);

/// Replays a schedule on the banks using only dp in-flight registers.
void apply(const Schedule &s, BankLayout &layout);

/// Per step, entry b is the input lane (source bank) routed to bank b.
std::vector<std::vector<std::size_t>> mux_controls(std::size_t r, const Geometry &geo);

/// One line per move: "step, src_bank, src_addr, dst_bank, dst_addr".
void dump(const Schedule &s, std::ostream &os);

} // namespace hlt::perm
