// Copyright 2026 The hlt Authors
// SPDX-License-Identifier: Apache-2.0

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "hlt/costmodel.hpp"
#include "hlt/dpsim.hpp"
#include "hlt/error.hpp"
#include "hlt/helt.hpp"
#include "hlt/serialize.hpp"

namespace {

using nlohmann::json;
using namespace hlt;

constexpr const char *kBanner = "NOT FOR PRODUCTION CRYPTOGRAPHY: toy parameters, non-hardened arithmetic";
constexpr int kOk = 0, kConfig = 1, kFail = 2;

struct Options {
    std::string params;
    std::string method = "all";
    std::size_t n = 0;
    std::string factors;
    std::string parallelism;
    std::size_t dp = 0;
    u64 seed = 1;
    double tolerance = 1e-3;
    double compare_tolerance = 1e-4;
    double budget_bytes = 0;
    std::string format;
    std::string out;
    bool identity = false;
    bool compare = false;
    bool allow_large = false;
    std::string save_dir;
};

std::string fmt(double x, const char *spec = "%.6e") {
    char buf[64];
    std::snprintf(buf, sizeof buf, spec, x);
    return buf;
}

std::string join(const std::vector<std::size_t> &v, char sep) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) s += (i ? std::string(1, sep) : "") + std::to_string(v[i]);
    return s;
}

std::vector<std::size_t> parse_list(const std::string &text) {
    std::vector<std::size_t> v;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        long long x = 0;
        try {
            x = std::stoll(item, &used);
        } catch (const std::exception &) {
            used = 0;
        }
        if (used != item.size() || x < 1) throw Error(ErrorCode::InvalidArgument, "bad list entry '" + item + "'");
        v.push_back(static_cast<std::size_t>(x));
    }
    return v;
}

LtPlan make_plan(LtMethod m, std::size_t n, const std::vector<std::size_t> &f) {
    const auto need = [&](std::size_t k) {
        if (f.size() != k) throw Error(ErrorCode::BadFactors, std::string(to_string(m)) + " takes " + std::to_string(k) + " factors");
    };
    switch (m) {
    case LtMethod::Diagonal: need(0); return LtPlan::diagonal(n);
    case LtMethod::Bsgs: need(2); return LtPlan::bsgs(f[0], f[1]);
    case LtMethod::DhBsgs: need(2); return LtPlan::dh_bsgs(f[0], f[1]);
    case LtMethod::ThBsgs: need(3); return LtPlan::th_bsgs(f[0], f[1], f[2]);
    }
    throw Error(ErrorCode::InvalidArgument, "unknown method");
}

std::vector<LtMethod> methods_of(const std::string &name) {
    if (name == "all") return {LtMethod::Diagonal, LtMethod::Bsgs, LtMethod::DhBsgs, LtMethod::ThBsgs};
    return {parse_method(name)};
}

bool is_set(const std::string &name) { return name == "set-a" || name == "set-b" || name == "set-c"; }

// Cost-model shape of a parameter name; toy maps onto the demo context.
cost::HeParams he_params(const std::string &name, std::size_t n) {
    if (name == "toy") {
        const auto t = CkksParams::toy();
        return cost::HeParams::make(t.n, t.q_count, t.alpha, static_cast<std::size_t>(t.prime_bits), n ? n : 64);
    }
    auto p = cost::HeParams::named(name);
    if (n) p = cost::HeParams::make(p.N, p.limbs(), p.alpha, p.w, n);
    return p;
}

CkksParams ckks_params(const std::string &name) {
    if (name == "toy") return CkksParams::toy();
    const auto h = cost::HeParams::named(name);
    CkksParams c;
    c.n = h.N;
    c.q_count = h.limbs();
    c.alpha = h.alpha;
    c.prime_bits = static_cast<int>(h.w);
    return c;
}

void check_format(const std::string &f) {
    if (f != "csv" && f != "json") throw Error(ErrorCode::InvalidArgument, "format must be csv or json");
}

void emit(const Options &o, const std::string &text) {
    if (o.out.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream os(o.out, std::ios::binary);
    if (!os) throw Error(ErrorCode::InvalidArgument, "cannot open '" + o.out + "'");
    os << text;
}

json trace_json(const OpTrace &t) {
    return {{"decompose", t.decompose},
            {"moddown", t.moddown},
            {"key_switches", t.key_switches},
            {"automorphisms", t.automorphisms},
            {"cwise_mult_limbs", t.cwise_mult_limbs},
            {"key_offsets", std::vector<std::size_t>(t.key_offsets.begin(), t.key_offsets.end())}};
}

void save_file(const std::filesystem::path &path, const auto &obj, const RnsBasis &basis) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw Error(ErrorCode::InvalidArgument, "cannot write '" + path.string() + "'");
    save(os, obj, basis);
}

// ---- demo -------------------------------------------------------------

struct DemoRun {
    LtPlan plan;
    OpTrace trace;
    double error = 0;
    double seconds = 0;
    std::vector<Complex> output;
};

int cmd_demo(Options o) {
    if (o.params.empty()) o.params = "toy";
    if (o.format.empty()) o.format = "csv";
    check_format(o.format);
    std::cerr << "*** " << kBanner << " ***\n";

    const CkksParams cp = ckks_params(o.params);
    if (cp.n > (std::size_t{1} << 13) && !o.allow_large)
        throw Error(ErrorCode::InvalidArgument, "N > 2^13 needs --allow-large");
    const std::size_t n = o.n ? o.n : 64;
    const auto methods = methods_of(o.method);
    const auto given = o.factors.empty() ? std::vector<std::size_t>{} : parse_list(o.factors);
    if (!given.empty() && methods.size() != 1) throw Error(ErrorCode::InvalidArgument, "--factors needs a single method");

    const CkksContext ctx(cp);
    const std::size_t level = ctx.max_level();
    const auto shape = sim::params_of(ctx, level, n);
    std::vector<LtPlan> plans;
    for (auto m : methods) {
        LtPlan plan = given.empty() && m != LtMethod::Diagonal
                          ? cost::search_factors(m, shape, cost::Objective::MinCompute).front().plan
                          : make_plan(m, n, given);
        plan.validate(ctx.slots());
        plans.push_back(plan);
    }

    Rng rng(o.seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<std::vector<double>> f(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) f[i][j] = o.identity ? (i == j ? 1.0 : 0.0) : dist(rng);
    std::vector<double> v(n);
    for (auto &x : v) x = dist(rng);

    const SecretKey sk = ctx.secret_keygen(rng);
    std::vector<Complex> tiled(ctx.slots());
    for (std::size_t t = 0; t < ctx.slots(); ++t) tiled[t] = v[t % n];
    const Ciphertext ct = ctx.encrypt(ctx.encode(tiled), sk, rng);
    const auto want = plain_lt(f, v, n, ctx.slots());

    std::optional<std::filesystem::path> dir;
    if (!o.save_dir.empty()) {
        dir = o.save_dir;
        std::filesystem::create_directories(*dir);
        save_file(*dir / "secret.hlt", sk, ctx.basis());
        save_file(*dir / "input.hlt", ct, ctx.basis());
    }

    std::vector<DemoRun> runs;
    for (const auto &plan : plans) {
        DemoRun r;
        r.plan = plan;
        const KeySet keys = lt_keys(ctx, sk, plan, rng);
        const DiagMatrix dm = diagonalize(ctx, f, plan, level, default_diag_scale(ctx, level));
        const auto start = std::chrono::steady_clock::now();
        const Ciphertext res = lt_evaluate(ctx, ct, dm, keys, &r.trace);
        r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        r.output = ctx.decode(ctx.decrypt(res, sk));
        for (std::size_t t = 0; t < want.size(); ++t) r.error = std::max(r.error, std::abs(r.output[t] - want[t]));
        if (dir) save_file(*dir / (std::string("output-") + to_string(plan.method) + ".hlt"), res, ctx.basis());
        std::cerr << to_string(plan.method) << " [" << join(plan.factors, 'x') << "] error " << fmt(r.error)
                  << " in " << fmt(r.seconds, "%.3f") << " s\n";
        runs.push_back(std::move(r));
    }

    // Largest slot difference of each run against every other run.
    std::vector<double> diff(runs.size(), 0.0);
    for (std::size_t a = 0; a < runs.size(); ++a)
        for (std::size_t b = 0; b < runs.size(); ++b)
            for (std::size_t t = 0; t < ctx.slots(); ++t)
                diff[a] = std::max(diff[a], std::abs(runs[a].output[t] - runs[b].output[t]));
    const double max_diff = runs.empty() ? 0.0 : *std::max_element(diff.begin(), diff.end());

    bool pass = true;
    for (const auto &r : runs) pass = pass && r.error < o.tolerance;
    if (o.compare) pass = pass && max_diff < o.compare_tolerance;

    std::ostringstream os;
    if (o.format == "csv") {
        os << "# " << kBanner << '\n';
        os << "# N=" << ctx.n() << " limbs=" << level + 1 << " alpha=" << cp.alpha << " n=" << n << " seed=" << o.seed
           << " identity=" << o.identity << '\n';
        os << "method,factors,max_error,tolerance,status,decompose,moddown,key_switches,automorphisms,"
              "cwise_mult_limbs,key_offsets"
           << (o.compare ? ",max_pairwise_diff" : "") << '\n';
        for (std::size_t i = 0; i < runs.size(); ++i) {
            const auto &r = runs[i];
            os << to_string(r.plan.method) << ',' << join(r.plan.factors, 'x') << ',' << fmt(r.error) << ','
               << fmt(o.tolerance) << ',' << (r.error < o.tolerance ? "PASS" : "FAIL") << ',' << r.trace.decompose
               << ',' << r.trace.moddown << ',' << r.trace.key_switches << ',' << r.trace.automorphisms << ','
               << r.trace.cwise_mult_limbs << ',' << r.trace.key_offsets.size();
            if (o.compare) os << ',' << fmt(diff[i]);
            os << '\n';
        }
        os << "# " << (pass ? "PASS" : "FAIL") << '\n';
    } else {
        json j;
        j["banner"] = kBanner;
        j["params"] = {{"name", o.params}, {"N", ctx.n()}, {"limbs", level + 1}, {"alpha", cp.alpha},
                       {"prime_bits", cp.prime_bits}, {"log2_scale", std::log2(cp.scale)}};
        j["n"] = n;
        j["seed"] = o.seed;
        j["identity"] = o.identity;
        j["tolerance"] = o.tolerance;
        j["methods"] = json::array();
        for (std::size_t i = 0; i < runs.size(); ++i) {
            const auto &r = runs[i];
            json m = {{"method", to_string(r.plan.method)},
                      {"factors", r.plan.factors},
                      {"max_error", r.error},
                      {"pass", r.error < o.tolerance},
                      {"trace", trace_json(r.trace)}};
            if (o.compare) m["max_pairwise_diff"] = diff[i];
            j["methods"].push_back(m);
        }
        if (o.compare) j["compare"] = {{"max_pairwise_diff", max_diff}, {"tolerance", o.compare_tolerance}};
        j["pass"] = pass;
        os << j.dump(2) << '\n';
    }
    emit(o, os.str());
    return pass ? kOk : kFail;
}

// ---- analyze ----------------------------------------------------------

json report_json(const cost::CostReport &r) {
    return {{"method", to_string(r.plan.method)},
            {"factors", r.plan.factors},
            {"keys", r.key_count},
            {"key_limbs", r.switching_key_limbs},
            {"key_bytes", r.key_bytes},
            {"key_gib", r.key_gib()},
            {"decompose", r.decompose_count},
            {"moddown", r.moddown_count},
            {"cwise_mult_limbs", r.cwise_mult_limbs},
            {"key_switches", r.key_switches},
            {"modmul", r.modmul}};
}

int cmd_analyze(Options o) {
    if (o.params.empty()) o.params = "set-c";
    if (o.format.empty()) o.format = "csv";
    check_format(o.format);
    const auto p = he_params(o.params, o.n);
    p.validate();
    const auto methods = methods_of(o.method);

    std::vector<cost::TradeoffPoint> points;
    if (!o.factors.empty()) {
        if (methods.size() != 1) throw Error(ErrorCode::InvalidArgument, "--factors needs a single method");
        points.push_back({cost::complexity(make_plan(methods[0], p.n, parse_list(o.factors)), p), ""});
    } else {
        points = cost::tradeoff_curve(methods, p);
    }
    const bool both = std::count(methods.begin(), methods.end(), LtMethod::DhBsgs) &&
                      std::count(methods.begin(), methods.end(), LtMethod::ThBsgs) && o.factors.empty();
    const std::optional<double> ratio = both ? std::optional(cost::best_tradeoff_key_ratio(p)) : std::nullopt;

    std::ostringstream os;
    if (o.format == "csv") {
        cost::write_tradeoff_csv(points, os);
        if (ratio) os << "# dh_th_best_tradeoff_key_ratio=" << fmt(*ratio, "%.6f") << '\n';
    } else {
        json j;
        j["params"] = {{"name", o.params}, {"N", p.N}, {"limbs", p.limbs()}, {"alpha", p.alpha},
                       {"beta", p.beta}, {"w", p.w}, {"n", p.n}};
        j["points"] = json::array();
        for (const auto &pt : points) {
            auto r = report_json(pt.report);
            r["tag"] = pt.tag;
            j["points"].push_back(r);
        }
        if (ratio) j["dh_th_best_tradeoff_key_ratio"] = *ratio;
        os << j.dump(2) << '\n';
    }
    emit(o, os.str());
    return kOk;
}

// ---- simulate / validate ----------------------------------------------

struct SimSetup {
    cost::HeParams p;
    LtPlan plan;
    cost::ParallelismConfig config;
};

SimSetup sim_setup(Options &o) {
    if (o.params.empty()) o.params = "set-a";
    if (o.format.empty()) o.format = "json";
    check_format(o.format);
    if (o.method != "all" && o.method != "th-bsgs")
        throw Error(ErrorCode::PlanMismatch, "the datapath runs th-bsgs only");
    SimSetup s;
    s.p = he_params(o.params, o.n);
    s.p.validate();
    if (!o.factors.empty()) {
        s.plan = make_plan(LtMethod::ThBsgs, s.p.n, parse_list(o.factors));
    } else if (is_set(o.params) && !o.n) {
        s.plan = cost::reference_plan(o.params);
    } else {
        s.plan = cost::search_factors(LtMethod::ThBsgs, s.p, cost::Objective::MinCompute).front().plan;
    }
    if (s.plan.n != s.p.n) throw Error(ErrorCode::BadFactors, "factors do not multiply to n");

    const bool preset = is_set(o.params) && o.factors.empty() && !o.n;
    const std::size_t dp = o.dp ? o.dp : (preset ? cost::ParallelismConfig::preset(o.params).dp : 1);
    if (!o.parallelism.empty()) {
        s.config = cost::ParallelismConfig::parse(o.parallelism, dp);
    } else if (o.budget_bytes > 0) {
        s.config = cost::search_parallelism(s.p, s.plan.factors, o.budget_bytes, dp);
    } else if (preset) {
        s.config = cost::ParallelismConfig::preset(o.params);
        s.config.dp = dp;
    } else {
        s.config = cost::ParallelismConfig::ones(dp);
    }
    s.config.validate(s.p, s.plan.factors);
    return s;
}

int cmd_simulate(Options o) {
    const auto s = sim_setup(o);
    const auto r = sim::simulate(s.p, s.plan, s.config, sim::Mode::CountOnly);
    std::ostringstream os;
    if (o.format == "json") {
        os << sim::to_json(r).dump(2) << '\n';
    } else {
        os << "# factors=" << join(s.plan.factors, 'x') << " parallelism=" << s.config.to_string()
           << " dp=" << s.config.dp << '\n';
        os << "phase";
        for (std::size_t c = 0; c < cost::kCategories; ++c) os << ',' << cost::category_name(c);
        os << ",total,onchip_peak_limbs,rounds,transform_batches\n";
        for (std::size_t ph = 0; ph < 6; ++ph) {
            os << ph + 1;
            for (auto x : r.meter.offchip[ph].limbs) os << ',' << x;
            os << ',' << r.meter.offchip[ph].total() << ',' << r.meter.onchip_peak[ph] << ',' << r.meter.rounds[ph]
               << ',' << r.meter.transform_batches[ph] << '\n';
        }
    }
    emit(o, os.str());
    return kOk;
}

int cmd_validate(Options o) {
    const auto s = sim_setup(o);
    const auto rep = sim::validate_against_model(s.p, s.plan, s.config);
    std::ostringstream os;
    if (o.format == "json") {
        os << sim::to_json(rep).dump(2) << '\n';
    } else {
        os << "phase,cell,model,simulated,delta,whitelisted,note\n";
        for (const auto &d : rep.deltas)
            os << d.phase << ',' << d.cell << ',' << d.model << ',' << d.simulated << ',' << d.simulated - d.model
               << ',' << (d.whitelisted ? 1 : 0) << ",\"" << d.note << "\"\n";
        os << "# cells_checked=" << rep.cells_checked << ' ' << (rep.pass() ? "PASS" : "FAIL") << '\n';
    }
    emit(o, os.str());
    return rep.pass() ? kOk : kFail;
}

void add_common(CLI::App *cmd, Options &o) {
    cmd->add_option("--params", o.params, "toy, set-a, set-b or set-c");
    cmd->add_option("--method", o.method, "diagonal, bsgs, dh-bsgs, th-bsgs or all")
        ->check(CLI::IsMember({"diagonal", "bsgs", "dh-bsgs", "th-bsgs", "all"}));
    cmd->add_option("--n", o.n, "LT dimension");
    cmd->add_option("--factors", o.factors, "comma-separated factorization of n");
    cmd->add_option("--parallelism", o.parallelism, "m1,l1,m2,l2,m4,m3,l3,m5,l4,m6,l5");
    cmd->add_option("--dp", o.dp, "datapath lanes");
    cmd->add_option("--seed", o.seed, "RNG seed")->capture_default_str();
    cmd->add_option("--tolerance", o.tolerance, "max slot error")->capture_default_str();
    cmd->add_option("--budget-bytes", o.budget_bytes, "on-chip budget for the parallelism search");
    cmd->add_option("--format", o.format, "csv or json");
    cmd->add_option("--out", o.out, "report path (default stdout)");
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"hlt: homomorphic linear transform toolkit"};
    app.require_subcommand(1);
    app.set_config("--config", "", "INI/TOML file; sections name subcommands, flags override");

    Options o;
    auto *demo = app.add_subcommand("demo", "encrypted LT end to end (toy parameters)");
    add_common(demo, o);
    demo->add_flag("--identity", o.identity, "use the identity matrix");
    demo->add_flag("--compare", o.compare, "check pairwise agreement of the methods");
    demo->add_option("--compare-tolerance", o.compare_tolerance, "max pairwise difference")->capture_default_str();
    demo->add_flag("--allow-large", o.allow_large, "lift the N <= 2^13 guard");
    demo->add_option("--save-dir", o.save_dir, "write the key and ciphertexts as HLT1 files");
    auto *analyze = app.add_subcommand("analyze", "operation counts and key sizes per factorization");
    add_common(analyze, o);
    auto *simulate = app.add_subcommand("simulate", "count-only datapath run");
    add_common(simulate, o);
    auto *validate = app.add_subcommand("validate", "datapath run against the closed forms");
    add_common(validate, o);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError &e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kConfig;
    }

    try {
        if (*demo) return cmd_demo(o);
        if (*analyze) return cmd_analyze(o);
        if (*simulate) return cmd_simulate(o);
        if (*validate) return cmd_validate(o);
    } catch (const Error &e) {
        std::cerr << "error: " << e.what() << '\n';
        return kConfig;
    } catch (const std::exception &e) {
        std::cerr << "error: " << e.what() << '\n';
        return kConfig;
    }
    return kConfig;
}
