// Copyright 2026 The hlt Authors
// SPDX-License-Identifier: Apache-2.0

#include "hlt/permnet.hpp"

#include <bit>
#include <ostream>

#include "hlt/ring.hpp"

namespace hlt::perm {

namespace {

bool pow2(std::size_t x) { return x != 0 && (x & (x - 1)) == 0; }

void check_source(std::size_t f, std::size_t n_f, const Geometry &geo) {
    if (f >= geo.dp || n_f >= geo.bank_size()) throw Error(ErrorCode::InvalidArgument, "bank or address out of range");
}

} // namespace

Geometry::Geometry(std::size_t n_, std::size_t dp_) : n(n_), dp(dp_) {
    if (!pow2(n) || !pow2(dp) || dp * dp > n)
        throw Error(ErrorCode::InvalidArgument, "need N and dp powers of two with dp^2 <= N");
}

int Geometry::log_n() const noexcept { return std::countr_zero(n); }
int Geometry::log_dp() const noexcept { return std::countr_zero(dp); }

BankLayout BankLayout::from_flat(const std::vector<u64> &ntt_coeffs, std::size_t dp) {
    BankLayout b{Geometry(ntt_coeffs.size(), dp), {}};
    const std::size_t size = b.geo.bank_size();
    for (std::size_t f = 0; f < dp; ++f)
        b.banks.emplace_back(ntt_coeffs.begin() + static_cast<long>(f * size),
                             ntt_coeffs.begin() + static_cast<long>((f + 1) * size));
    return b;
}

std::vector<u64> BankLayout::to_flat() const {
    std::vector<u64> out;
    out.reserve(geo.n);
    for (const auto &bank : banks) out.insert(out.end(), bank.begin(), bank.end());
    return out;
}

SourceIndex source_index(std::size_t f, std::size_t n_f, const Geometry &geo) {
    check_source(f, n_f, geo);
    SourceIndex s;
    s.idx = bit_reverse(f * geo.bank_size() + n_f, geo.log_n());
    s.i = s.idx / geo.bank_size();
    s.j = (s.idx % geo.bank_size()) / geo.dp;
    s.k = s.idx % geo.dp;
    return s;
}

PermTarget target(std::size_t f, std::size_t n_f, std::size_t r, const Geometry &geo) {
    PermTarget t;
    t.src = source_index(f, n_f, geo);
    if (r >= geo.n / 2) throw Error(ErrorCode::InvalidArgument, "rotation out of range");
    t.g_r = RotationIndex::make(static_cast<long long>(r), geo.n).g_r;
    const std::size_t size = geo.bank_size();
    const std::size_t mid = size / geo.dp; // N / dp^2
    const u64 w = t.g_r * t.src.k + (t.g_r - 1) / 2;
    t.v = static_cast<std::size_t>(w % geo.dp);
    t.u = static_cast<std::size_t>((w / geo.dp) % mid);
    t.t = static_cast<std::size_t>(w / size);
    // The middle field is reduced mod N/dp, so it may carry into the top
    // field; the sum is then reduced mod N.
    const u64 top = (t.g_r * t.src.i + t.t) % geo.dp * size;
    const u64 middle = (t.g_r * t.src.j + t.u) % size * geo.dp;
    t.idx2 = static_cast<std::size_t>((top + middle + t.v) % geo.n);
    t.i2 = t.idx2 / size;
    t.j2 = (t.idx2 % size) / geo.dp;
    t.k2 = t.idx2 % geo.dp;
    const std::size_t pos = bit_reverse(t.idx2, geo.log_n());
    t.bank = pos / size;
    t.addr = pos % size;
    return t;
}

std::size_t naive_target_index(std::size_t idx, u64 g_r, std::size_t n) {
    const u64 two_n = 2 * static_cast<u64>(n);
    return static_cast<std::size_t>(((g_r * (2 * static_cast<u64>(idx) + 1)) % two_n - 1) / 2);
}

std::vector<std::size_t> bank_map(std::size_t r, const Geometry &geo) {
    std::vector<std::size_t> m(geo.dp);
    for (std::size_t f = 0; f < geo.dp; ++f) m[f] = target(f, 0, r, geo).bank;
    return m;
}

Schedule schedule(std::size_t r, const Geometry &geo) {
    const std::size_t slots = geo.n / 2;
    if (r >= slots) throw Error(ErrorCode::InvalidArgument, "rotation out of range");
    // Output position p pulls from the position sent by rotation -r, so the
    // push destination of each word is its target under rotation -r.
    const std::size_t push_r = (slots - r) % slots;
    const std::size_t size = geo.bank_size();
    std::vector<std::size_t> dest(geo.n);
    for (std::size_t f = 0; f < geo.dp; ++f)
        for (std::size_t a = 0; a < size; ++a) {
            const auto t = target(f, a, push_r, geo);
            dest[f * size + a] = t.bank * size + t.addr;
        }

    Schedule s{geo, r, {}};
    std::vector<char> taken(geo.n, 0);
    std::vector<std::size_t> next_free(geo.dp, 0); // lowest untaken address per bank
    auto fresh = [&](std::size_t bank) {
        std::size_t &a = next_free[bank];
        while (taken[bank * size + a]) ++a;
        taken[bank * size + a] = 1;
        return bank * size + a;
    };
    std::vector<std::size_t> lane(geo.dp);
    for (std::size_t f = 0; f < geo.dp; ++f) lane[f] = fresh(f);
    for (std::size_t step = 0; step < size; ++step) {
        std::vector<Move> moves;
        for (std::size_t l = 0; l < geo.dp; ++l) {
            const std::size_t src = lane[l], dst = dest[src];
            moves.push_back({step, src / size, src % size, dst / size, dst % size});
        }
        if (step + 1 < size) {
            for (std::size_t l = 0; l < geo.dp; ++l) {
                const std::size_t dst = dest[lane[l]];
                // The displaced word continues the cycle; a hole starts a new one in the same bank.
                if (!taken[dst]) {
                    taken[dst] = 1;
                    lane[l] = dst;
                } else {
                    lane[l] = fresh(dst / size);
                }
            }
        }
        s.steps.push_back(std::move(moves));
    }
    return s;
}

void apply(const Schedule &s, BankLayout &layout) {
    if (layout.geo.n != s.geo.n || layout.geo.dp != s.geo.dp)
        throw Error(ErrorCode::InvalidArgument, "schedule and layout geometry differ");
    const std::size_t size = s.geo.bank_size();
    std::vector<char> taken(s.geo.n, 0);
    // In-flight registers, one per bank the word came from.
    std::vector<u64> reg(s.geo.dp);
    std::vector<std::size_t> reg_pos(s.geo.dp, s.geo.n);
    for (const auto &moves : s.steps) {
        std::vector<u64> vals;
        for (const auto &m : moves) {
            const std::size_t src = m.src_bank * size + m.src_addr;
            if (reg_pos[m.src_bank] == src) {
                vals.push_back(reg[m.src_bank]);
            } else {
                taken[src] = 1;
                vals.push_back(layout.banks[m.src_bank][m.src_addr]);
            }
        }
        for (std::size_t l = 0; l < moves.size(); ++l) {
            const auto &m = moves[l];
            const std::size_t dst = m.dst_bank * size + m.dst_addr;
            if (!taken[dst]) {
                taken[dst] = 1;
                reg[m.dst_bank] = layout.banks[m.dst_bank][m.dst_addr];
                reg_pos[m.dst_bank] = dst;
            }
            layout.banks[m.dst_bank][m.dst_addr] = vals[l];
        }
    }
}

std::vector<std::vector<std::size_t>> mux_controls(std::size_t r, const Geometry &geo) {
    const Schedule s = schedule(r, geo);
    std::vector<std::vector<std::size_t>> table;
    for (const auto &moves : s.steps) {
        std::vector<std::size_t> sel(geo.dp, geo.dp);
        for (const auto &m : moves) sel[m.dst_bank] = m.src_bank;
        table.push_back(std::move(sel));
    }
    return table;
}

void dump(const Schedule &s, std::ostream &os) {
    os << "step, src_bank, src_addr, dst_bank, dst_addr\n";
    for (const auto &moves : s.steps)
        for (const auto &m : moves)
            os << m.step << ", " << m.src_bank << ", " << m.src_addr << ", " << m.dst_bank << ", " << m.dst_addr << '\n';
}

} // namespace hlt::perm
