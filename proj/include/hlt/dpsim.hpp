// Copyright 2026 The hlt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hlt/costmodel.hpp"
#include "hlt/helt.hpp"

namespace hlt::sim {

using cost::u64;

/// Off-chip traffic and on-chip residency of one run, per phase.
struct MemoryMeter {
    cost::Access offchip{};
    std::array<u64, 6> onchip_current{};
    std::array<u64, 6> onchip_peak{};
    std::array<u64, 6> rounds{};
    std::array<u64, 6> transform_batches{};

    u64 offchip_total() const;
};

/// Per-object bookkeeping used for the conservation check: an object is
/// written once as a whole and every read pass covers all of its limbs.
struct ObjectLedger {
    std::map<std::string, u64> size;          // limbs of each written object
    std::map<std::string, u64> read_limbs;    // summed over all passes
    std::map<std::string, u64> write_count;
    std::vector<std::string> unwritten_reads; // read but never produced by the run
    std::vector<std::string> rewritten;       // written more than once
};

enum class Mode { CountOnly, Compute };

/// Real operands for compute mode. dm must carry a TH-BSGS plan and keys
/// must hold the hoisted keys of its offsets.
struct ComputeInputs {
    const CkksContext *ctx = nullptr;
    const Ciphertext *ct = nullptr;
    const DiagMatrix *dm = nullptr;
    const KeySet *keys = nullptr;
};

struct SimResult {
    cost::HeParams params;
    LtPlan plan;
    cost::ParallelismConfig config;
    Mode mode = Mode::CountOnly;
    MemoryMeter meter;
    ObjectLedger objects;
    OpTrace trace;
    std::optional<Ciphertext> output;
};

/// Shape of a toy run: N, L+1 = level+1, alpha and beta from the basis.
cost::HeParams params_of(const CkksContext &ctx, std::size_t level, std::size_t n);

/// Runs the six-phase datapath. Count-only mode needs no operands. On-chip
/// buffers per phase default to the closed-form peak. Throws
/// ConfigOutOfRange, PlanMismatch, or OnchipOverflow when a phase outgrows
/// its buffers.
SimResult simulate(const cost::HeParams &p, const LtPlan &plan, const cost::ParallelismConfig &c, Mode mode,
                   const ComputeInputs *inputs = nullptr, const cost::Peak *capacity = nullptr);

struct CellDelta {
    std::size_t phase = 0; // 1..6
    std::string cell;      // category name, "peak_onchip" or "rounds"
    long long model = 0;
    long long simulated = 0;
    bool whitelisted = false;
    std::string note;
};

struct ValidationReport {
    std::vector<CellDelta> deltas; // nonzero cells only
    u64 cells_checked = 0;
    bool pass() const;
};

/// Compares a count-only run with the closed forms. Off-chip cells and
/// rounds must match exactly; the on-chip peak may sit below its envelope.
/// The Phase 2 transform cell is whitelisted: the table divides by m1 while
/// the phase groups its transforms by m2.
ValidationReport validate_against_model(const cost::HeParams &p, const LtPlan &plan, const cost::ParallelismConfig &c);
/// Same comparison for an existing run against the model of `model_config`.
ValidationReport compare(const SimResult &sim, const cost::ParallelismConfig &model_config);

nlohmann::json to_json(const SimResult &r);
nlohmann::json to_json(const ValidationReport &r);

} // namespace hlt::sim
