// Copyright 2026 The hlt Authors
// SPDX-License-Identifier: Apache-2.0

#include "hlt/costmodel.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <ostream>
#include <sstream>
#include <tuple>

#include "hlt/error.hpp"

namespace hlt::cost {

namespace {

bool is_pow2(std::size_t x) { return x != 0 && (x & (x - 1)) == 0; }

int log2_exact(std::size_t x) {
    int k = 0;
    while ((std::size_t{1} << k) < x) ++k;
    return k;
}

u64 ceil_div(u64 a, u64 b) { return (a + b - 1) / b; }

struct Th {
    u64 n1, n2, n3;
};

Th th_factors(const std::vector<std::size_t> &f) {
    if (f.size() != 3) throw Error(ErrorCode::BadFactors, "TH-BSGS needs three factors");
    for (auto x : f)
        if (x == 0) throw Error(ErrorCode::BadFactors, "factor must be positive");
    return {f[0], f[1], f[2]};
}

void check_range(std::size_t v, std::size_t hi, const char *name) {
    if (v < 1 || v > hi)
        throw Error(ErrorCode::ConfigOutOfRange,
                    std::string(name) + "=" + std::to_string(v) + " outside [1, " + std::to_string(hi) + "]");
}

} // namespace

HeParams HeParams::make(std::size_t N, std::size_t limbs, std::size_t alpha, std::size_t w, std::size_t n) {
    if (limbs == 0 || alpha == 0) throw Error(ErrorCode::InvalidArgument, "limb counts must be positive");
    HeParams p{N, limbs - 1, alpha, (limbs + alpha - 1) / alpha, w, n};
    p.validate();
    return p;
}

HeParams HeParams::set_a() { return make(1u << 13, 5, 5, 54, 1u << 12); }
HeParams HeParams::set_b() { return make(1u << 15, 16, 8, 54, 1u << 14); }
HeParams HeParams::set_c() { return make(1u << 16, 32, 12, 54, 1u << 15); }
HeParams analysis_params() { return HeParams::set_c(); }

HeParams HeParams::named(const std::string &name) {
    if (name == "set-a") return set_a();
    if (name == "set-b") return set_b();
    if (name == "set-c") return set_c();
    throw Error(ErrorCode::InvalidArgument, "unknown parameter set '" + name + "'");
}

void HeParams::validate() const {
    if (!is_pow2(N) || N < 4) throw Error(ErrorCode::InvalidArgument, "N must be a power of two >= 4");
    if (alpha == 0 || w == 0) throw Error(ErrorCode::InvalidArgument, "alpha and w must be positive");
    if (beta != (limbs() + alpha - 1) / alpha) throw Error(ErrorCode::InvalidArgument, "beta must be ceil((L+1)/alpha)");
    if (!is_pow2(n) || n > N / 2) throw Error(ErrorCode::InvalidArgument, "n must be a power of two <= N/2");
}

ParallelismConfig ParallelismConfig::preset(const std::string &set_name) {
    if (set_name == "set-a") return parse("7,5,7,10,1,63,1,103,1,8,5", 2);
    if (set_name == "set-b") return parse("4,2,1,12,1,11,1,25,1,4,1", 8);
    if (set_name == "set-c") return parse("1,1,1,1,1,4,1,12,1,1,1", 16);
    throw Error(ErrorCode::InvalidArgument, "no preset for '" + set_name + "'");
}

LtPlan reference_plan(const std::string &set_name) {
    if (set_name == "set-a") return LtPlan::th_bsgs(8, 64, 8);
    if (set_name == "set-b") return LtPlan::th_bsgs(16, 128, 8);
    if (set_name == "set-c") return LtPlan::th_bsgs(16, 128, 16);
    throw Error(ErrorCode::InvalidArgument, "no preset for '" + set_name + "'");
}

ParallelismConfig ParallelismConfig::parse(const std::string &text, std::size_t dp) {
    std::vector<std::size_t> v;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            const long long x = std::stoll(item, &used);
            if (used != item.size() || x < 1) throw std::invalid_argument(item);
            v.push_back(static_cast<std::size_t>(x));
        } catch (const std::exception &) {
            throw Error(ErrorCode::InvalidArgument, "bad parallelism entry '" + item + "'");
        }
    }
    if (v.size() != 11) throw Error(ErrorCode::InvalidArgument, "parallelism needs 11 values m1,l1,m2,l2,m4,m3,l3,m5,l4,m6,l5");
    ParallelismConfig c;
    c.m1 = v[0]; c.l1 = v[1];
    c.m2 = v[2]; c.l2 = v[3];
    c.m4 = v[4]; c.m3 = v[5]; c.l3 = v[6];
    c.m5 = v[7]; c.l4 = v[8];
    c.m6 = v[9]; c.l5 = v[10];
    c.dp = dp;
    return c;
}

std::string ParallelismConfig::to_string() const {
    std::ostringstream os;
    os << m1 << ',' << l1 << ',' << m2 << ',' << l2 << ',' << m4 << ',' << m3 << ',' << l3 << ',' << m5 << ','
       << l4 << ',' << m6 << ',' << l5;
    return os.str();
}

void ParallelismConfig::validate(const HeParams &p, const std::vector<std::size_t> &factors) const {
    const Th t = th_factors(factors);
    const std::size_t pq = p.pq();
    check_range(m1, std::max<u64>(1, t.n1 - 1), "m1");
    check_range(m2, std::max<u64>(1, t.n1 - 1), "m2");
    check_range(m3, std::max<u64>(1, t.n2 - 1), "m3");
    check_range(m4, t.n1, "m4");
    check_range(m5, t.n1 * t.n2, "m5");
    check_range(m6, t.n3, "m6");
    check_range(l1, pq, "l1");
    check_range(l2, pq, "l2");
    check_range(l3, pq, "l3");
    check_range(l4, pq, "l4");
    check_range(l5, pq, "l5");
    if (!is_pow2(dp) || dp * dp > p.N) throw Error(ErrorCode::ConfigOutOfRange, "dp must be a power of two with dp^2 <= N");
}

const char *category_name(std::size_t c) {
    static const char *names[] = {"ntt", "lt_matrix", "switching_key", "poly_read", "poly_write"};
    return c < kCategories ? names[c] : "?";
}

u64 PhaseAccess::total() const {
    u64 s = 0;
    for (auto x : limbs) s += x;
    return s;
}

double ntt_modmul(const HeParams &p) {
    return static_cast<double>(p.N) / 2.0 * log2_exact(p.N);
}

double decompose_modmul(const HeParams &p) {
    const double n = static_cast<double>(p.N), ntt = ntt_modmul(p);
    double total = static_cast<double>(p.limbs()) * ntt;
    for (std::size_t b = 0; b < p.beta; ++b) {
        const double g = static_cast<double>(std::min(p.alpha, p.limbs() - b * p.alpha));
        const double ext = static_cast<double>(p.pq()) - g;
        total += g * n + g * ext * n + ext * ntt;
    }
    return total;
}

double moddown_modmul(const HeParams &p) {
    const double n = static_cast<double>(p.N), ntt = ntt_modmul(p);
    const double a = static_cast<double>(p.alpha), l = static_cast<double>(p.limbs());
    return a * ntt + a * n + a * l * n + l * ntt + l * n;
}

CostReport complexity(const LtPlan &plan, const HeParams &p, Convention conv) {
    plan.validate(p.N / 2);
    if (plan.n != p.n) throw Error(ErrorCode::BadFactors, "factors multiply to " + std::to_string(plan.n) + ", not n");
    const u64 n = plan.n, pq = p.pq(), q = p.limbs(), beta = p.beta;
    CostReport r;
    r.plan = plan;
    u64 diag_limbs = pq;
    switch (plan.method) {
    case LtMethod::Diagonal:
        r.decompose_count = 1;
        r.moddown_count = 2;
        r.key_count = n - 1;
        r.key_switches = n - 1;
        break;
    case LtMethod::Bsgs: {
        const u64 n1 = plan.factors[0], n2 = plan.factors[1];
        r.decompose_count = n1 + n2 - 2;
        r.moddown_count = 2 * (n1 + n2 - 2);
        r.key_count = n1 + n2 - 2;
        r.key_switches = n1 + n2 - 2;
        diag_limbs = q;
        break;
    }
    case LtMethod::DhBsgs: {
        const u64 n1 = plan.factors[0], n2 = plan.factors[1];
        r.decompose_count = n2;
        r.moddown_count = n2 + 1;
        r.key_count = n1 + n2 - 2;
        r.key_switches = n1 + n2 - 2;
        break;
    }
    case LtMethod::ThBsgs: {
        const u64 n1 = plan.factors[0], n2 = plan.factors[1], n3 = plan.factors[2];
        const u64 extra = conv == Convention::Table ? 1 : 0;
        r.decompose_count = n1 + n3 - 1 + extra;
        r.moddown_count = n1 + n3 + extra;
        r.key_count = n1 + n2 + n3 - 3;
        // The middle layer switches every one of the n1' inner outputs.
        r.key_switches = (n1 - 1) + n1 * (n2 - 1) + (n3 - 1);
        break;
    }
    }
    r.switching_key_limbs = beta * r.key_count * pq;
    r.cwise_mult_limbs = 2 * beta * r.key_count * pq + 2 * n * diag_limbs;
    r.cwise_mult_limbs_executed = 2 * beta * r.key_switches * pq + 2 * n * diag_limbs;
    r.modmul = static_cast<double>(r.decompose_count) * decompose_modmul(p) +
               static_cast<double>(r.moddown_count) * moddown_modmul(p) +
               static_cast<double>(r.cwise_mult_limbs) * static_cast<double>(p.N);
    r.key_bytes = 2.0 * static_cast<double>(r.switching_key_limbs) * p.limb_bytes();
    return r;
}

Access offchip_access(const HeParams &p, const std::vector<std::size_t> &factors, const ParallelismConfig &c) {
    c.validate(p, factors);
    const Th t = th_factors(factors);
    const u64 pq = p.pq(), q = p.limbs(), beta = p.beta, n = t.n1 * t.n2 * t.n3;
    const u64 g5 = ceil_div(t.n1 * t.n2, c.m5), g6 = ceil_div(t.n3, c.m6);
    Access a{};
    a[0].limbs = {2 * pq, 0, 2 * (t.n1 - 1) * beta * pq, 2 * q, 2 * t.n1 * pq};
    a[1].limbs = {ceil_div(t.n1 - 1, c.m1) * pq, 0, 0, (t.n1 - 1) * pq, (t.n1 - 1) * beta * pq};
    a[2].limbs = {0, 0, 2 * (t.n2 - 1) * beta * pq, ceil_div(t.n2 - 1, c.m3) * t.n1 * (beta + 1) * pq,
                  2 * t.n1 * t.n2 * pq};
    a[3].limbs = {pq, n * pq, 0, 2 * (t.n1 * t.n2 + (g5 - 1) * t.n3) * pq, 2 * g5 * t.n3 * pq};
    a[4].limbs = {g6 * pq, 0, 2 * (t.n3 - 1) * beta * pq, 2 * (t.n3 + g6 - 1) * pq, 2 * g6 * pq};
    a[5].limbs = {pq, 0, 0, 2 * pq, 2 * q};
    return a;
}

Peak peak_onchip(const HeParams &p, const std::vector<std::size_t> &factors, const ParallelismConfig &c) {
    c.validate(p, factors);
    const u64 pq = p.pq(), q = p.limbs(), beta = p.beta, alpha = p.alpha;
    Peak k{};
    k[0] = 2 * q + (beta + 4) * c.l1 + (4 * beta + 6) * c.m1 * c.l1;
    k[1] = c.m2 * (2 * q + alpha + 2 * beta * c.l2) + 2 * c.l2;
    k[2] = 2 * c.l3 * ((beta + 1) * c.m4 + 2 * beta * c.m3 + 2 * c.m3 * c.m4);
    k[3] = 6 * c.m5 * c.l4 + 5 * c.l4;
    k[4] = c.m6 * pq + (5 * beta * c.m6 + 2 * c.m6 + 6) * c.l5 + 2 * c.l5;
    k[5] = 2 * pq;
    return k;
}

std::array<u64, 6> rounds(const HeParams &p, const std::vector<std::size_t> &factors, const ParallelismConfig &c) {
    const Th t = th_factors(factors);
    const u64 pq = p.pq();
    auto at_least_one = [](u64 x) { return std::max<u64>(1, x); };
    return {ceil_div(pq, c.l1) * at_least_one(ceil_div(t.n1 - 1, c.m1)),
            ceil_div(t.n1 - 1, c.m2) * ceil_div(pq, c.l2),
            ceil_div(t.n1, c.m4) * at_least_one(ceil_div(t.n2 - 1, c.m3)) * ceil_div(pq, c.l3),
            ceil_div(t.n1 * t.n2, c.m5) * ceil_div(pq, c.l4),
            ceil_div(t.n3, c.m6) * ceil_div(pq, c.l5),
            1};
}

CostReport memory_report(const HeParams &p, const LtPlan &plan, const ParallelismConfig &c) {
    if (plan.method != LtMethod::ThBsgs) throw Error(ErrorCode::PlanMismatch, "memory model covers TH-BSGS only");
    CostReport r = complexity(plan, p);
    r.offchip = offchip_access(p, plan.factors, c);
    r.peak = peak_onchip(p, plan.factors, c);
    for (const auto &ph : r.offchip) r.offchip_total += ph.total();
    r.peak_max = *std::max_element(r.peak.begin(), r.peak.end());
    return r;
}

std::vector<LtPlan> factorizations(LtMethod method, std::size_t n) {
    if (!is_pow2(n)) throw Error(ErrorCode::BadFactors, "n must be a power of two");
    const int k = log2_exact(n);
    std::vector<LtPlan> out;
    switch (method) {
    case LtMethod::Diagonal: out.push_back(LtPlan::diagonal(n)); break;
    case LtMethod::Bsgs:
    case LtMethod::DhBsgs:
        for (int a = 0; a <= k; ++a) {
            const std::size_t n1 = std::size_t{1} << a, n2 = n >> a;
            out.push_back(method == LtMethod::Bsgs ? LtPlan::bsgs(n1, n2) : LtPlan::dh_bsgs(n1, n2));
        }
        break;
    case LtMethod::ThBsgs:
        for (int a = 0; a <= k; ++a)
            for (int b = 0; a + b <= k; ++b)
                out.push_back(LtPlan::th_bsgs(std::size_t{1} << a, std::size_t{1} << b, std::size_t{1} << (k - a - b)));
        break;
    }
    return out;
}

namespace {

bool fewer_keys(const CostReport &a, const CostReport &b) {
    return std::tie(a.key_count, a.modmul, a.plan.factors) < std::tie(b.key_count, b.modmul, b.plan.factors);
}

bool less_compute(const CostReport &a, const CostReport &b) {
    return std::tie(a.modmul, a.key_count, a.plan.factors) < std::tie(b.modmul, b.key_count, b.plan.factors);
}

} // namespace

std::vector<CostReport> search_factors(LtMethod method, const HeParams &p, Objective obj) {
    p.validate();
    std::vector<CostReport> all;
    for (const auto &plan : factorizations(method, p.n)) all.push_back(complexity(plan, p));
    if (obj == Objective::MinKeys) return {*std::min_element(all.begin(), all.end(), fewer_keys)};
    if (obj == Objective::MinCompute) return {*std::min_element(all.begin(), all.end(), less_compute)};

    switch (method) {
    case LtMethod::Diagonal: return all;
    case LtMethod::Bsgs: return {*std::min_element(all.begin(), all.end(), less_compute)};
    case LtMethod::DhBsgs:
        std::sort(all.begin(), all.end(),
                  [](const CostReport &a, const CostReport &b) { return a.plan.factors[1] < b.plan.factors[1]; });
        return all;
    case LtMethod::ThBsgs: {
        const int k = log2_exact(p.n);
        std::vector<CostReport> sweep;
        for (int b = 0; b <= k; ++b) {
            const int rest = k - b, a = rest / 2;
            sweep.push_back(complexity(
                LtPlan::th_bsgs(std::size_t{1} << a, std::size_t{1} << b, std::size_t{1} << (rest - a)), p));
        }
        return sweep;
    }
    }
    return all;
}

std::vector<TradeoffPoint> tradeoff_curve(const std::vector<LtMethod> &methods, const HeParams &p) {
    std::vector<TradeoffPoint> out;
    for (LtMethod m : methods) {
        const auto sweep = search_factors(m, p, Objective::Pareto);
        const auto mem = std::min_element(sweep.begin(), sweep.end(), fewer_keys) - sweep.begin();
        const auto best = std::min_element(sweep.begin(), sweep.end(), less_compute) - sweep.begin();
        for (std::size_t i = 0; i < sweep.size(); ++i) {
            std::string tag;
            if (static_cast<long>(i) == mem) tag = "min-memory";
            if (static_cast<long>(i) == best) tag += tag.empty() ? "best-tradeoff" : "+best-tradeoff";
            out.push_back({sweep[i], tag});
        }
    }
    return out;
}

double best_tradeoff_key_ratio(const HeParams &p) {
    const auto best = [&](LtMethod m) {
        const auto sweep = search_factors(m, p, Objective::Pareto);
        return *std::min_element(sweep.begin(), sweep.end(), less_compute);
    };
    return best(LtMethod::DhBsgs).key_bytes / best(LtMethod::ThBsgs).key_bytes;
}

void write_tradeoff_csv(const std::vector<TradeoffPoint> &points, std::ostream &os) {
    os << "method,n1,n2,n3,keys,key_limbs,key_bytes,key_gib,decompose,moddown,cwise_mult_limbs,modmul,tag\n";
    for (const auto &pt : points) {
        const auto &r = pt.report;
        const auto &f = r.plan.factors;
        const auto factor = [&](std::size_t i) { return i < f.size() ? std::to_string(f[i]) : std::string(); };
        os << to_string(r.plan.method) << ',' << (f.empty() ? std::to_string(r.plan.n) : factor(0)) << ','
           << factor(1) << ',' << factor(2) << ',' << r.key_count << ',' << r.switching_key_limbs << ','
           << static_cast<u64>(r.key_bytes) << ',';
        os.precision(6);
        os << std::fixed << r.key_gib() << ',' << r.decompose_count << ',' << r.moddown_count << ','
           << r.cwise_mult_limbs << ',';
        os.precision(0);
        os << r.modmul << ',' << pt.tag << '\n';
        os.unsetf(std::ios::fixed);
    }
}

ParallelismConfig search_parallelism(const HeParams &p, const std::vector<std::size_t> &factors, double budget_bytes,
                                     std::size_t dp) {
    const Th t = th_factors(factors);
    const double cap = std::floor(budget_bytes / p.limb_bytes());
    const u64 budget = cap >= static_cast<double>(std::numeric_limits<u64>::max() / 2)
                           ? std::numeric_limits<u64>::max() / 2
                           : static_cast<u64>(std::max(0.0, cap));
    ParallelismConfig best = ParallelismConfig::ones(dp);
    best.validate(p, factors);
    if (peak_onchip(p, factors, best)[5] > budget)
        throw Error(ErrorCode::Infeasible, "budget below the final ModDown working set");

    // Phases share no knob, and each knob group only moves its own cost terms,
    // so the joint optimum is the per-group optimum.
    using Knobs = std::vector<std::size_t ParallelismConfig::*>;
    const auto optimize = [&](int phase, const Knobs &knobs, const std::vector<std::size_t> &hi) {
        ParallelismConfig c = best;
        std::vector<std::size_t> cur(knobs.size(), 1), arg;
        std::tuple<u64, u64> key{std::numeric_limits<u64>::max(), 0};
        bool found = false;
        while (true) {
            for (std::size_t i = 0; i < knobs.size(); ++i) c.*knobs[i] = cur[i];
            if (peak_onchip(p, factors, c)[phase] <= budget) {
                u64 off = 0, rnd = 0;
                for (const auto &ph : offchip_access(p, factors, c)) off += ph.total();
                for (auto r : rounds(p, factors, c)) rnd += r;
                const std::tuple<u64, u64> k{off, rnd};
                // Later candidates are lexicographically larger, so ties go to them.
                if (!found || k <= key) {
                    key = k;
                    arg = cur;
                    found = true;
                }
            }
            std::size_t i = knobs.size();
            while (i > 0 && cur[i - 1] == hi[i - 1]) cur[--i] = 1;
            if (i == 0) break;
            ++cur[i - 1];
        }
        if (!found) throw Error(ErrorCode::Infeasible, "phase " + std::to_string(phase + 1) + " does not fit the budget");
        for (std::size_t i = 0; i < knobs.size(); ++i) best.*knobs[i] = arg[i];
    };
    const std::size_t pq = p.pq();
    const std::size_t e1 = std::max<u64>(1, t.n1 - 1), e2 = std::max<u64>(1, t.n2 - 1);
    optimize(0, {&ParallelismConfig::m1, &ParallelismConfig::l1}, {e1, pq});
    optimize(1, {&ParallelismConfig::m2, &ParallelismConfig::l2}, {e1, pq});
    optimize(2, {&ParallelismConfig::m4, &ParallelismConfig::m3, &ParallelismConfig::l3},
             {static_cast<std::size_t>(t.n1), e2, pq});
    optimize(3, {&ParallelismConfig::m5, &ParallelismConfig::l4}, {static_cast<std::size_t>(t.n1 * t.n2), pq});
    optimize(4, {&ParallelismConfig::m6, &ParallelismConfig::l5}, {static_cast<std::size_t>(t.n3), pq});
    return best;
}

} // namespace hlt::cost
