// Copyright 2026 The hlt Authors
// SPDX-License-Identifier: Apache-2.0

#include "hlt/dpsim.hpp"

#include <algorithm>
#include <tuple>
#include <unordered_map>

#include "hlt/error.hpp"
#include "hlt/rns.hpp"

namespace hlt::sim {

using cost::kLtMatrix;
using cost::kNtt;
using cost::kPolyRead;
using cost::kPolyWrite;
using cost::kSwitchingKey;

u64 MemoryMeter::offchip_total() const {
    u64 s = 0;
    for (const auto &ph : offchip) s += ph.total();
    return s;
}

cost::HeParams params_of(const CkksContext &ctx, std::size_t level, std::size_t n) {
    cost::HeParams p = cost::HeParams::make(ctx.n(), level + 1, ctx.basis().alpha(), ctx.params().prime_bits, n);
    if (p.beta != ctx.basis().beta_at(level)) throw Error(ErrorCode::PlanMismatch, "digit count differs from the basis");
    return p;
}

namespace {

// Off-chip object kinds. Keys and diagonals are inputs of the run.
enum Kind : u64 { kCt0, kCt1, kSwk, kFhat, kA, kB, kD, kU0, kU1, kC0, kC1, kOut0, kOut1, kKinds };
const char *kind_name(u64 k) {
    static const char *names[] = {"CT.c0", "CT.c1", "SWK", "FHAT", "A", "B", "D", "U0", "U1", "C0", "C1", "OUT.c0", "OUT.c1"};
    return names[k];
}
bool is_input(u64 k) { return k == kCt0 || k == kCt1 || k == kSwk || k == kFhat; }
bool indexed(u64 k) { return k == kSwk || k == kFhat || k == kA || k == kB || k == kD || k == kU0 || k == kU1; }

u64 object_id(u64 kind, u64 index = 0) { return kind << 40 | index; }
std::string object_name(u64 id) {
    const u64 kind = id >> 40, index = id & ((u64{1} << 40) - 1);
    return indexed(kind) ? std::string(kind_name(kind)) + "[" + std::to_string(index) + "]" : kind_name(kind);
}

u64 ceil_div(u64 a, u64 b) { return (a + b - 1) / b; }

class Datapath {
public:
    Datapath(const cost::HeParams &p, const LtPlan &plan, const cost::ParallelismConfig &c, Mode mode,
             const ComputeInputs *in, const cost::Peak *capacity)
        : p_(p), c_(c), mode_(mode), in_(in) {
        if (plan.method != LtMethod::ThBsgs) throw Error(ErrorCode::PlanMismatch, "the datapath runs TH-BSGS");
        if (plan.n != p.n) throw Error(ErrorCode::BadFactors, "plan dimension differs from n");
        plan.validate(p.N / 2);
        c.validate(p, plan.factors);
        n1_ = plan.factors[0];
        n2_ = plan.factors[1];
        n3_ = plan.factors[2];
        inner_ = n1_ * n2_;
        q_ = p.limbs();
        pq_ = p.pq();
        beta_ = p.beta;
        capacity_ = capacity ? *capacity : cost::peak_onchip(p, plan.factors, c);
        res_.params = p;
        res_.plan = plan;
        res_.config = c;
        res_.mode = mode;
        if (mode == Mode::Compute) init_compute(plan);
    }

    SimResult run() {
        phase1();
        phase2();
        phase3();
        phase4();
        phase5();
        phase6();
        finish_ledger();
        return std::move(res_);
    }

private:
    // ---- metering ----
    void transfer(u64 cat, u64 id, u64 limbs, bool write) {
        res_.meter.offchip[ph_].limbs[cat] += limbs;
        if (write) {
            written_[id] += limbs;
        } else {
            read_[id] += limbs;
        }
    }
    void rd(u64 cat, u64 id, u64 limbs) { transfer(cat, id, limbs, false); }
    void wr(u64 id, u64 limbs) { transfer(kPolyWrite, id, limbs, true); }
    void transforms(u64 table_sets) {
        ++res_.meter.transform_batches[ph_];
        res_.meter.offchip[ph_].limbs[kNtt] += table_sets * pq_;
    }
    void alloc(u64 limbs) {
        auto &cur = res_.meter.onchip_current[ph_];
        cur += limbs;
        res_.meter.onchip_peak[ph_] = std::max(res_.meter.onchip_peak[ph_], cur);
        if (cur > capacity_[ph_])
            throw Error(ErrorCode::OnchipOverflow, "phase " + std::to_string(ph_ + 1) + " holds " +
                                                       std::to_string(cur) + " limbs, capacity " +
                                                       std::to_string(capacity_[ph_]));
    }
    void release(u64 limbs) { res_.meter.onchip_current[ph_] -= limbs; }
    void round() { ++res_.meter.rounds[ph_]; }

    // ---- operation trace, identical in both modes ----
    void count_key_switch(std::size_t r) {
        ++res_.trace.key_switches;
        res_.trace.automorphisms += 2;
        res_.trace.cwise_mult_limbs += 2 * beta_ * pq_;
        res_.trace.key_offsets.insert(r);
    }

    // ---- compute helpers ----
    bool computing() const { return mode_ == Mode::Compute; }
    const RnsBasis &basis() const { return in_->ctx->basis(); }

    void init_compute(const LtPlan &plan) {
        if (!in_ || !in_->ctx || !in_->ct || !in_->dm || !in_->keys)
            throw Error(ErrorCode::InvalidArgument, "compute mode needs ctx, ct, dm and keys");
        if (!(in_->dm->plan == plan)) throw Error(ErrorCode::PlanMismatch, "diagonals were built for another plan");
        if (in_->dm->level != in_->ct->level) throw Error(ErrorCode::LevelMismatch, "diagonal level differs");
        const auto shape = params_of(*in_->ctx, in_->ct->level, plan.n);
        if (shape.N != p_.N || shape.L != p_.L || shape.alpha != p_.alpha || shape.beta != p_.beta)
            throw Error(ErrorCode::PlanMismatch, "parameters do not describe the supplied ciphertext");
        a_.resize(inner_);
        b_.resize(inner_);
    }

    std::pair<RnsPoly, RnsPoly> rotate(const std::vector<RnsPoly> &d, const RnsPoly *base, std::size_t r) {
        auto [u0, u1] = in_->ctx->key_switch(d, in_->keys->get(r, true));
        if (base) add_inplace(u0, *base);
        const auto rot = RotationIndex::make(static_cast<long long>(r), in_->ctx->n());
        return {automorphism_eval(u0, rot), automorphism_eval(u1, rot)};
    }

    RnsPoly zero_pq() const { return RnsPoly::zero(basis(), basis().pq_ids(in_->ct->level), Domain::Ntt); }

    // ---- phases ----

    // Lines 1-5: Decompose c1', inner rotations; writes a_i, b_i for all i.
    void phase1() {
        ph_ = 0;
        alloc(2 * q_);
        rd(kPolyRead, object_id(kCt0), q_);
        rd(kPolyRead, object_id(kCt1), q_);
        transforms(2); // INTT of the Q limbs, NTT of the extended digits
        ++res_.trace.decompose;
        for (std::size_t i = 1; i < n1_; ++i) count_key_switch(i);
        if (computing()) {
            d_.push_back(decompose_ntt(basis(), in_->ct->c1));
            a_[0] = mul_by_p(basis(), in_->ct->c0);
            b_[0] = mul_by_p(basis(), in_->ct->c1);
            for (std::size_t i = 1; i < n1_; ++i) std::tie(a_[i], b_[i]) = rotate(d_[0], &a_[0], i);
        }
        for (u64 lo = 0; lo < pq_; lo += c_.l1) {
            const u64 w = std::min<u64>(c_.l1, pq_ - lo);
            alloc((beta_ + 4) * w); // d0 slice, a0/b0 slice, twiddles
            wr(object_id(kA, 0), w);
            wr(object_id(kB, 0), w);
            if (n1_ == 1) round();
            for (u64 g = 1; g < n1_; g += c_.m1) {
                const u64 s = std::min<u64>(c_.m1, n1_ - g);
                alloc((4 * beta_ + 6) * s * w); // double-buffered keys, outputs
                for (u64 i = g; i < g + s; ++i) {
                    rd(kSwitchingKey, object_id(kSwk, i), 2 * beta_ * w);
                    wr(object_id(kA, i), w);
                    wr(object_id(kB, i), w);
                }
                release((4 * beta_ + 6) * s * w);
                round();
            }
            release((beta_ + 4) * w);
        }
        release(2 * q_);
    }

    // Lines 6-7: ModDown and Decompose of b_i, m2 at a time.
    void phase2() {
        ph_ = 1;
        for (u64 g = 1; g < n1_; g += c_.m2) {
            const u64 s = std::min<u64>(c_.m2, n1_ - g);
            transforms(1);
            alloc(s * (2 * q_ + p_.alpha));
            for (u64 i = g; i < g + s; ++i) {
                rd(kPolyRead, object_id(kB, i), pq_);
                ++res_.trace.moddown;
                ++res_.trace.decompose;
                if (computing()) d_.push_back(decompose_ntt(basis(), moddown_ntt(basis(), b_[i])));
            }
            for (u64 lo = 0; lo < pq_; lo += c_.l2) {
                const u64 w = std::min<u64>(c_.l2, pq_ - lo);
                alloc(2 * beta_ * s * w + 2 * w);
                for (u64 i = g; i < g + s; ++i) wr(object_id(kD, i), beta_ * w);
                release(2 * beta_ * s * w + 2 * w);
                round();
            }
            release(s * (2 * q_ + p_.alpha));
        }
    }

    // Lines 8-11: middle layer. Keys stay resident per group; the j = 0
    // pairs are re-emitted so phase 4 streams one contiguous block.
    void phase3() {
        ph_ = 2;
        for (std::size_t i = 0; i < n1_; ++i)
            for (std::size_t j = 1; j < n2_; ++j) {
                count_key_switch(n1_ * j);
                if (computing()) std::tie(a_[n1_ * j + i], b_[n1_ * j + i]) = rotate(d_[i], &a_[i], n1_ * j);
            }
        const u64 groups = std::max<u64>(1, ceil_div(n2_ - 1, c_.m3));
        for (u64 g = 0; g < groups; ++g) {
            const u64 j0 = 1 + g * c_.m3;
            const u64 keys = j0 < n2_ ? std::min<u64>(c_.m3, n2_ - j0) : 0;
            for (u64 lo = 0; lo < pq_; lo += c_.l3) {
                const u64 w = std::min<u64>(c_.l3, pq_ - lo);
                alloc(4 * beta_ * keys * w);
                for (u64 j = j0; j < j0 + keys; ++j) rd(kSwitchingKey, object_id(kSwk, n1_ * j), 2 * beta_ * w);
                for (u64 i0 = 0; i0 < n1_; i0 += c_.m4) {
                    const u64 s = std::min<u64>(c_.m4, n1_ - i0);
                    alloc(2 * (beta_ + 1) * s * w + 4 * keys * s * w);
                    for (u64 i = i0; i < i0 + s; ++i) {
                        if (keys > 0) {
                            rd(kPolyRead, object_id(kA, i), w);
                            rd(kPolyRead, object_id(kD, i), beta_ * w);
                        }
                        for (u64 j = j0; j < j0 + keys; ++j) {
                            wr(object_id(kA, n1_ * j + i), w);
                            wr(object_id(kB, n1_ * j + i), w);
                        }
                        if (g == 0) {
                            wr(object_id(kA, i), w);
                            wr(object_id(kB, i), w);
                        }
                    }
                    release(2 * (beta_ + 1) * s * w + 4 * keys * s * w);
                    round();
                }
                release(4 * beta_ * keys * w);
            }
        }
    }

    // Lines 12-14: all n3' accumulators, m5 operand pairs per pass; partial
    // sums round-trip off-chip between passes.
    void phase4() {
        ph_ = 3;
        transforms(1);
        res_.trace.cwise_mult_limbs += 2 * inner_ * n3_ * pq_;
        if (computing()) {
            for (std::size_t k = 0; k < n3_; ++k) {
                RnsPoly u0 = zero_pq(), u1 = zero_pq();
                for (std::size_t i = 0; i < inner_; ++i) {
                    mul_acc_inplace(u0, a_[i], in_->dm->fhat[inner_ * k + i]);
                    mul_acc_inplace(u1, b_[i], in_->dm->fhat[inner_ * k + i]);
                }
                u0_.push_back(std::move(u0));
                u1_.push_back(std::move(u1));
            }
        }
        for (u64 i0 = 0; i0 < inner_; i0 += c_.m5) {
            const u64 s = std::min<u64>(c_.m5, inner_ - i0);
            for (u64 lo = 0; lo < pq_; lo += c_.l4) {
                const u64 w = std::min<u64>(c_.l4, pq_ - lo);
                alloc(6 * s * w + 5 * w);
                for (u64 i = i0; i < i0 + s; ++i) {
                    rd(kPolyRead, object_id(kA, i), w);
                    rd(kPolyRead, object_id(kB, i), w);
                }
                for (u64 k = 0; k < n3_; ++k) {
                    for (u64 i = i0; i < i0 + s; ++i) rd(kLtMatrix, object_id(kFhat, inner_ * k + i), w);
                    if (i0 > 0) {
                        rd(kPolyRead, object_id(kU0, k), w);
                        rd(kPolyRead, object_id(kU1, k), w);
                    }
                    wr(object_id(kU0, k), w);
                    wr(object_id(kU1, k), w);
                }
                release(6 * s * w + 5 * w);
                round();
            }
        }
    }

    // Lines 15-18: outer layer, m6 accumulators per group.
    void phase5() {
        ph_ = 4;
        for (u64 k0 = 0; k0 < n3_; k0 += c_.m6) {
            const u64 s = std::min<u64>(c_.m6, n3_ - k0);
            transforms(1);
            alloc(s * pq_); // u1 whole for ModDown
            for (u64 k = k0; k < k0 + s; ++k) {
                rd(kPolyRead, object_id(kU1, k), pq_);
                if (k == 0) {
                    if (computing()) {
                        c0_ = u0_[0];
                        c1_ = u1_[0];
                    }
                    continue;
                }
                ++res_.trace.moddown;
                ++res_.trace.decompose;
                count_key_switch(inner_ * k);
                if (computing()) {
                    const auto dk = decompose_ntt(basis(), moddown_ntt(basis(), u1_[k]));
                    auto [w0, w1] = rotate(dk, &u0_[k], inner_ * k);
                    add_inplace(c0_, w0);
                    add_inplace(c1_, w1);
                }
            }
            for (u64 lo = 0; lo < pq_; lo += c_.l5) {
                const u64 w = std::min<u64>(c_.l5, pq_ - lo);
                alloc((5 * beta_ * s + 2 * s + 8) * w);
                for (u64 k = k0; k < k0 + s; ++k) {
                    rd(kPolyRead, object_id(kU0, k), w);
                    if (k > 0) rd(kSwitchingKey, object_id(kSwk, inner_ * k), 2 * beta_ * w);
                }
                if (k0 > 0) {
                    rd(kPolyRead, object_id(kC0), w);
                    rd(kPolyRead, object_id(kC1), w);
                }
                wr(object_id(kC0), w);
                wr(object_id(kC1), w);
                release((5 * beta_ * s + 2 * s + 8) * w);
                round();
            }
            release(s * pq_);
        }
    }

    // Line 19: ModDown of both halves, rescale.
    void phase6() {
        ph_ = 5;
        alloc(2 * pq_);
        rd(kPolyRead, object_id(kC0), pq_);
        rd(kPolyRead, object_id(kC1), pq_);
        transforms(1);
        res_.trace.moddown += 2;
        if (computing()) {
            Ciphertext out{moddown_ntt(basis(), c0_), moddown_ntt(basis(), c1_), in_->ct->level,
                           in_->ct->scale * in_->dm->scale};
            res_.output = in_->ctx->rescale(out);
        }
        wr(object_id(kOut0), q_);
        wr(object_id(kOut1), q_);
        round();
        release(2 * pq_);
    }

    void finish_ledger() {
        auto &led = res_.objects;
        const auto size_of = [&](u64 id) -> u64 {
            switch (id >> 40) {
            case kCt0: case kCt1: case kOut0: case kOut1: return q_;
            case kSwk: return 2 * beta_ * pq_;
            case kD: return beta_ * pq_;
            default: return pq_;
            }
        };
        for (const auto &[id, limbs] : written_) {
            const std::string name = object_name(id);
            led.size[name] = size_of(id);
            led.write_count[name] = limbs / size_of(id);
            if (limbs > size_of(id)) led.rewritten.push_back(name);
        }
        for (const auto &[id, limbs] : read_) {
            const std::string name = object_name(id);
            led.read_limbs[name] = limbs;
            if (!written_.count(id) && !is_input(id >> 40)) led.unwritten_reads.push_back(name);
        }
    }

    const cost::HeParams &p_;
    const cost::ParallelismConfig &c_;
    Mode mode_;
    const ComputeInputs *in_;
    std::size_t n1_ = 0, n2_ = 0, n3_ = 0, inner_ = 0;
    u64 q_ = 0, pq_ = 0, beta_ = 0;
    cost::Peak capacity_{};
    std::size_t ph_ = 0;
    SimResult res_;
    std::unordered_map<u64, u64> written_, read_;

    std::vector<std::vector<RnsPoly>> d_;
    std::vector<RnsPoly> a_, b_, u0_, u1_;
    RnsPoly c0_, c1_;
};

} // namespace

SimResult simulate(const cost::HeParams &p, const LtPlan &plan, const cost::ParallelismConfig &c, Mode mode,
                   const ComputeInputs *inputs, const cost::Peak *capacity) {
    return Datapath(p, plan, c, mode, inputs, capacity).run();
}

bool ValidationReport::pass() const {
    return std::all_of(deltas.begin(), deltas.end(), [](const CellDelta &d) { return d.whitelisted; });
}

ValidationReport validate_against_model(const cost::HeParams &p, const LtPlan &plan,
                                        const cost::ParallelismConfig &c) {
    return compare(simulate(p, plan, c, Mode::CountOnly), c);
}

ValidationReport compare(const SimResult &sim, const cost::ParallelismConfig &c) {
    const auto &p = sim.params;
    const auto &plan = sim.plan;
    const auto model = cost::offchip_access(p, plan.factors, c);
    const auto peak = cost::peak_onchip(p, plan.factors, c);
    const auto rounds = cost::rounds(p, plan.factors, c);
    ValidationReport rep;
    const auto add = [&](std::size_t ph, std::string cell, u64 m, u64 s, bool white, std::string note) {
        ++rep.cells_checked;
        if (m == s) return;
        rep.deltas.push_back({ph + 1, std::move(cell), static_cast<long long>(m), static_cast<long long>(s), white,
                              std::move(note)});
    };
    for (std::size_t ph = 0; ph < 6; ++ph) {
        for (std::size_t cat = 0; cat < cost::kCategories; ++cat) {
            const bool white = ph == 1 && cat == kNtt;
            add(ph, cost::category_name(cat), model[ph].limbs[cat], sim.meter.offchip[ph].limbs[cat], white,
                white ? "table divides by m1; the phase loads tables once per group of m2 transforms" : "");
        }
        add(ph, "rounds", rounds[ph], sim.meter.rounds[ph], false, "");
        // The closed form is an envelope: only an excess counts.
        ++rep.cells_checked;
        if (sim.meter.onchip_peak[ph] > peak[ph])
            rep.deltas.push_back({ph + 1, "peak_onchip", static_cast<long long>(peak[ph]),
                                  static_cast<long long>(sim.meter.onchip_peak[ph]), false, "exceeds envelope"});
    }
    return rep;
}

nlohmann::json to_json(const SimResult &r) {
    using nlohmann::json;
    json phases = json::array();
    for (std::size_t ph = 0; ph < 6; ++ph) {
        json off;
        for (std::size_t cat = 0; cat < cost::kCategories; ++cat)
            off[cost::category_name(cat)] = r.meter.offchip[ph].limbs[cat];
        off["total"] = r.meter.offchip[ph].total();
        phases.push_back({{"phase", ph + 1},
                          {"offchip_limbs", off},
                          {"onchip_peak_limbs", r.meter.onchip_peak[ph]},
                          {"rounds", r.meter.rounds[ph]},
                          {"transform_batches", r.meter.transform_batches[ph]}});
    }
    std::map<std::string, u64> rewritten_by_kind;
    for (const auto &name : r.objects.rewritten) ++rewritten_by_kind[name.substr(0, name.find('['))];
    const auto peak_max = *std::max_element(r.meter.onchip_peak.begin(), r.meter.onchip_peak.end());
    return {{"mode", r.mode == Mode::Compute ? "compute" : "count_only"},
            {"params",
             {{"N", r.params.N},
              {"limbs", r.params.limbs()},
              {"alpha", r.params.alpha},
              {"beta", r.params.beta},
              {"w", r.params.w},
              {"n", r.params.n}}},
            {"factors", r.plan.factors},
            {"parallelism", r.config.to_string()},
            {"dp", r.config.dp},
            {"limb_bytes", r.params.limb_bytes()},
            {"phases", phases},
            {"totals",
             {{"offchip_limbs", r.meter.offchip_total()},
              {"offchip_bytes", static_cast<double>(r.meter.offchip_total()) * r.params.limb_bytes()},
              {"onchip_peak_limbs", peak_max},
              {"onchip_peak_bytes", static_cast<double>(peak_max) * r.params.limb_bytes()}}},
            {"trace",
             {{"decompose", r.trace.decompose},
              {"moddown", r.trace.moddown},
              {"key_switches", r.trace.key_switches},
              {"automorphisms", r.trace.automorphisms},
              {"cwise_mult_limbs", r.trace.cwise_mult_limbs},
              {"key_offsets", r.trace.key_offsets.size()}}},
            {"conservation", {{"unwritten_reads", r.objects.unwritten_reads}, {"rewritten", rewritten_by_kind}}}};
}

nlohmann::json to_json(const ValidationReport &r) {
    nlohmann::json deltas = nlohmann::json::array();
    for (const auto &d : r.deltas)
        deltas.push_back({{"phase", d.phase},
                          {"cell", d.cell},
                          {"model", d.model},
                          {"simulated", d.simulated},
                          {"delta", d.simulated - d.model},
                          {"whitelisted", d.whitelisted},
                          {"note", d.note}});
    return {{"pass", r.pass()}, {"cells_checked", r.cells_checked}, {"deltas", deltas}};
}

} // namespace hlt::sim
