// Copyright 2026 The hlt Authors
// SPDX-License-Identifier: Apache-2.0

#include "hlt/ckks.hpp"

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <numbers>

namespace hlt {

using boost::multiprecision::cpp_int;

CkksParams CkksParams::toy() { return CkksParams{}; }

Encoder::Encoder(std::size_t n) : n_(n) {
    if (n < 4 || (n & (n - 1)) != 0) throw Error(ErrorCode::InvalidArgument, "ring dimension must be a power of two >= 4");
    const std::size_t m = 2 * n;
    rot_group_.resize(n / 2);
    std::size_t g = 1;
    for (auto &r : rot_group_) {
        r = g;
        g = g * RotationIndex::kGenerator % m;
    }
    ksi_pows_.resize(m + 1);
    for (std::size_t k = 0; k <= m; ++k) {
        const double angle = 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(m);
        ksi_pows_[k] = Complex(std::cos(angle), std::sin(angle));
    }
}

namespace {

void bit_reverse_array(std::vector<Complex> &v) {
    const std::size_t n = v.size();
    for (std::size_t i = 1, j = 0; i < n; ++i) {
        std::size_t bit = n >> 1;
        for (; j >= bit; bit >>= 1) j -= bit;
        j += bit;
        if (i < j) std::swap(v[i], v[j]);
    }
}

} // namespace

void Encoder::fft_special(std::vector<Complex> &vals) const {
    const std::size_t size = vals.size();
    const std::size_t m = 2 * n_;
    bit_reverse_array(vals);
    for (std::size_t len = 2; len <= size; len <<= 1) {
        const std::size_t lenh = len >> 1, lenq = len << 2;
        for (std::size_t i = 0; i < size; i += len) {
            for (std::size_t j = 0; j < lenh; ++j) {
                const std::size_t idx = (rot_group_[j] % lenq) * m / lenq;
                const Complex u = vals[i + j];
                const Complex v = vals[i + j + lenh] * ksi_pows_[idx];
                vals[i + j] = u + v;
                vals[i + j + lenh] = u - v;
            }
        }
    }
}

void Encoder::fft_special_inv(std::vector<Complex> &vals) const {
    const std::size_t size = vals.size();
    const std::size_t m = 2 * n_;
    for (std::size_t len = size; len >= 2; len >>= 1) {
        const std::size_t lenh = len >> 1, lenq = len << 2;
        for (std::size_t i = 0; i < size; i += len) {
            for (std::size_t j = 0; j < lenh; ++j) {
                const std::size_t idx = (lenq - (rot_group_[j] % lenq)) * m / lenq;
                const Complex u = vals[i + j] + vals[i + j + lenh];
                const Complex v = (vals[i + j] - vals[i + j + lenh]) * ksi_pows_[idx];
                vals[i + j] = u;
                vals[i + j + lenh] = v;
            }
        }
    }
    bit_reverse_array(vals);
    for (auto &v : vals) v /= static_cast<double>(size);
}

std::vector<double> Encoder::embed_inverse(const std::vector<Complex> &values) const {
    if (values.size() != slots()) throw Error(ErrorCode::InvalidArgument, "encode expects N/2 slot values");
    std::vector<Complex> u = values;
    fft_special_inv(u);
    std::vector<double> coeffs(n_);
    for (std::size_t i = 0; i < slots(); ++i) {
        coeffs[i] = u[i].real();
        coeffs[i + slots()] = u[i].imag();
    }
    return coeffs;
}

std::vector<Complex> Encoder::embed(const std::vector<double> &coeffs) const {
    if (coeffs.size() != n_) throw Error(ErrorCode::InvalidArgument, "decode expects N coefficients");
    std::vector<Complex> u(slots());
    for (std::size_t i = 0; i < slots(); ++i) u[i] = Complex(coeffs[i], coeffs[i + slots()]);
    fft_special(u);
    return u;
}

const SwitchingKey &KeySet::get(std::size_t r, bool hoisted_key) const {
    const auto &map = hoisted_key ? hoisted : plain;
    const auto it = map.find(r);
    if (it == map.end())
        throw Error(ErrorCode::MissingKey,
                    std::string(hoisted_key ? "hoisted" : "plain") + " rotation key for r = " + std::to_string(r));
    return it->second;
}

namespace {

RnsBasis make_basis(const CkksParams &p) {
    if (p.q_count == 0 || p.alpha == 0) throw Error(ErrorCode::InvalidArgument, "need L + 1 >= 1 and alpha >= 1");
    auto primes = find_ntt_primes(p.prime_bits, p.n, p.q_count + p.alpha);
    std::vector<Modulus> q(primes.begin(), primes.begin() + static_cast<long>(p.q_count));
    std::vector<Modulus> pm(primes.begin() + static_cast<long>(p.q_count), primes.end());
    return RnsBasis(p.n, std::move(q), std::move(pm));
}

void require_level(const Ciphertext &a, std::size_t level, const char *op) {
    if (a.level != level || a.c0.size() != level + 1 || a.c1.size() != level + 1)
        throw Error(ErrorCode::LevelMismatch, std::string(op) + ": operands at different levels");
}

} // namespace

CkksContext::CkksContext(const CkksParams &params) : params_(params), basis_(make_basis(params)), encoder_(params.n) {
    if (!(params.scale > 1.0)) throw Error(ErrorCode::InvalidArgument, "scale must exceed 1");
}

RnsPoly CkksContext::encode_poly(const std::vector<Complex> &values, double scale,
                                 const std::vector<std::size_t> &ids) const {
    const auto coeffs = encoder_.embed_inverse(values);
    double log_q = 0;
    for (auto id : ids) log_q += std::log2(static_cast<double>(basis_.modulus(id).value()));
    RnsPoly out = RnsPoly::zero(basis_, ids, Domain::Coefficient);
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
        const double x = std::nearbyint(coeffs[i] * scale);
        if (!std::isfinite(x) || (x != 0.0 && std::log2(std::fabs(x)) >= log_q - 1.0))
            throw Error(ErrorCode::Overflow, "scaled coefficient does not fit the modulus");
        if (std::fabs(x) < 9.2e18) {
            const i64 v = static_cast<i64>(x);
            for (auto &l : out.limbs) l.coeffs[i] = mod_from_signed(v, l.modulus());
        } else {
            const cpp_int big(x);
            for (auto &l : out.limbs) {
                cpp_int r = big % l.q();
                if (r < 0) r += l.q();
                l.coeffs[i] = static_cast<u64>(r);
            }
        }
    }
    return out;
}

Plaintext CkksContext::encode(const std::vector<Complex> &values, std::size_t level, double scale) const {
    if (level > max_level()) throw Error(ErrorCode::LevelMismatch, "level above the top of the modulus chain");
    Plaintext pt{encode_poly(values, scale, basis_.q_ids(level)), level, scale};
    to_ntt(pt.m);
    return pt;
}

Plaintext CkksContext::encode(const std::vector<double> &values, std::size_t level, double scale) const {
    return encode(std::vector<Complex>(values.begin(), values.end()), level, scale);
}

std::vector<Complex> CkksContext::decode(const Plaintext &pt) const {
    RnsPoly m = pt.m;
    to_coef(m);
    cpp_int big_q = 1;
    for (auto id : m.ids) big_q *= basis_.modulus(id).value();
    std::vector<cpp_int> basis_terms;
    for (auto id : m.ids) {
        const u64 q = basis_.modulus(id).value();
        const cpp_int hat = big_q / q;
        const u64 hat_inv = mod_inv(static_cast<u64>(hat % q), basis_.modulus(id));
        basis_terms.push_back(hat * hat_inv);
    }
    const cpp_int half = big_q / 2;
    std::vector<double> coeffs(n());
    for (std::size_t i = 0; i < n(); ++i) {
        cpp_int acc = 0;
        for (std::size_t k = 0; k < m.size(); ++k) acc += basis_terms[k] * m.limbs[k].coeffs[i];
        acc %= big_q;
        if (acc > half) acc -= big_q;
        coeffs[i] = acc.convert_to<double>() / pt.scale;
    }
    return encoder_.embed(coeffs);
}

std::vector<i64> CkksContext::sample_ternary(Rng &rng) const {
    std::uniform_int_distribution<int> dist(-1, 1);
    std::vector<i64> s(n());
    for (auto &v : s) v = dist(rng);
    return s;
}

RnsPoly CkksContext::sample_gaussian(const std::vector<std::size_t> &ids, Rng &rng) const {
    std::normal_distribution<double> dist(0.0, params_.sigma);
    const double bound = 6.0 * params_.sigma;
    std::vector<i64> e(n());
    for (auto &v : e) {
        double x;
        do x = dist(rng);
        while (std::fabs(x) > bound);
        v = static_cast<i64>(std::llround(x));
    }
    RnsPoly p = RnsPoly::from_signed(basis_, ids, e);
    to_ntt(p);
    return p;
}

RnsPoly CkksContext::sample_uniform(const std::vector<std::size_t> &ids, Rng &rng) const {
    RnsPoly p = RnsPoly::zero(basis_, ids, Domain::Ntt);
    for (auto &l : p.limbs) {
        std::uniform_int_distribution<u64> dist(0, l.q() - 1);
        for (auto &c : l.coeffs) c = dist(rng);
    }
    return p;
}

SecretKey CkksContext::secret_keygen(Rng &rng) const {
    SecretKey sk;
    sk.coeffs = sample_ternary(rng);
    sk.s = RnsPoly::from_signed(basis_, basis_.pq_ids(max_level()), sk.coeffs);
    to_ntt(sk.s);
    return sk;
}

PublicKey CkksContext::public_keygen(const SecretKey &sk, Rng &rng) const {
    const auto ids = basis_.q_ids(max_level());
    PublicKey pk;
    pk.a = sample_uniform(ids, rng);
    pk.b = sample_gaussian(ids, rng);
    RnsPoly as = mul(pk.a, sk.s.restricted(ids));
    sub_inplace(pk.b, as);
    return pk;
}

Ciphertext CkksContext::encrypt(const Plaintext &pt, const SecretKey &sk, Rng &rng) const {
    const auto ids = basis_.q_ids(pt.level);
    Ciphertext ct;
    ct.level = pt.level;
    ct.scale = pt.scale;
    ct.c1 = sample_uniform(ids, rng);
    ct.c0 = sample_gaussian(ids, rng);
    add_inplace(ct.c0, pt.m);
    sub_inplace(ct.c0, mul(ct.c1, sk.s.restricted(ids)));
    return ct;
}

Ciphertext CkksContext::encrypt(const Plaintext &pt, const PublicKey &pk, Rng &rng) const {
    const auto ids = basis_.q_ids(pt.level);
    RnsPoly v = RnsPoly::from_signed(basis_, ids, sample_ternary(rng));
    to_ntt(v);
    Ciphertext ct;
    ct.level = pt.level;
    ct.scale = pt.scale;
    ct.c0 = sample_gaussian(ids, rng);
    mul_acc_inplace(ct.c0, v, pk.b.restricted(ids));
    add_inplace(ct.c0, pt.m);
    ct.c1 = sample_gaussian(ids, rng);
    mul_acc_inplace(ct.c1, v, pk.a.restricted(ids));
    return ct;
}

Plaintext CkksContext::decrypt(const Ciphertext &ct, const SecretKey &sk) const {
    require_level(ct, ct.level, "decrypt");
    if (ct.c0.ids != ct.c1.ids) throw Error(ErrorCode::LevelMismatch, "decrypt: c0 and c1 at different levels");
    Plaintext pt{ct.c0, ct.level, ct.scale};
    mul_acc_inplace(pt.m, ct.c1, sk.s.restricted(ct.c1.ids));
    return pt;
}

SwitchingKey CkksContext::swk_gen(const RnsPoly &from, const SecretKey &to, Rng &rng) const {
    const std::size_t top = max_level();
    const auto ids = basis_.pq_ids(top);
    if (from.ids != ids || from.domain() != Domain::Ntt)
        throw Error(ErrorCode::BasisMismatch, "source key must cover P*Q in the Ntt domain");
    SwitchingKey swk;
    for (std::size_t b = 0; b < basis_.beta(); ++b) {
        RnsPoly a = sample_uniform(ids, rng);
        RnsPoly k0 = sample_gaussian(ids, rng);
        sub_inplace(k0, mul(a, to.s));
        // Gadget P (Q/Q_b) [(Q/Q_b)^-1]_{Q_b}: P on the limbs of group b, 0 elsewhere.
        for (std::size_t id : basis_.group_ids(b, top)) {
            const std::size_t k = k0.index_of(id);
            const std::size_t j = id - basis_.alpha();
            add_inplace(k0.limbs[k], scalar_mul(from.limbs[k], basis_.p_mod_q(j)));
        }
        swk.digits.emplace_back(std::move(k0), std::move(a));
    }
    return swk;
}

SwitchingKey CkksContext::rotation_keygen(const SecretKey &sk, std::size_t r, bool hoisted, Rng &rng) const {
    const auto rot = RotationIndex::make(static_cast<long long>(r), n());
    SwitchingKey swk = swk_gen(automorphism_eval(sk.s, rot), sk, rng);
    swk.rotation = rot.r;
    if (hoisted) {
        const auto inv = RotationIndex::make(-static_cast<long long>(rot.r), n());
        for (auto &[k0, k1] : swk.digits) {
            k0 = automorphism_eval(k0, inv);
            k1 = automorphism_eval(k1, inv);
        }
        swk.hoisted = true;
    }
    return swk;
}

KeySet CkksContext::rotation_keys(const SecretKey &sk, const std::vector<std::size_t> &rotations, bool plain,
                                  bool hoisted, Rng &rng) const {
    KeySet keys;
    for (std::size_t r : rotations) {
        const std::size_t rr = r % slots();
        if (plain && !keys.plain.count(rr)) keys.plain.emplace(rr, rotation_keygen(sk, rr, false, rng));
        if (hoisted && !keys.hoisted.count(rr)) keys.hoisted.emplace(rr, rotation_keygen(sk, rr, true, rng));
    }
    return keys;
}

std::pair<RnsPoly, RnsPoly> CkksContext::key_switch(const std::vector<RnsPoly> &digits, const SwitchingKey &swk) const {
    if (digits.empty() || digits.size() > swk.digits.size())
        throw Error(ErrorCode::DigitCountMismatch, "digit count does not match the switching key");
    const auto &ids = digits.front().ids;
    if (ids.size() <= basis_.alpha())
        throw Error(ErrorCode::BasisMismatch, "digits must cover P*Q_level");
    const std::size_t level = ids.size() - basis_.alpha() - 1;
    if (digits.size() != basis_.beta_at(level))
        throw Error(ErrorCode::DigitCountMismatch, "digit count does not match the level");
    RnsPoly u0 = RnsPoly::zero(basis_, ids, Domain::Ntt);
    RnsPoly u1 = RnsPoly::zero(basis_, ids, Domain::Ntt);
    for (std::size_t b = 0; b < digits.size(); ++b) {
        const RnsPoly &d = digits[b];
        if (d.ids != ids) throw Error(ErrorCode::BasisMismatch, "digits over different moduli");
        if (d.domain() != Domain::Ntt) throw Error(ErrorCode::DomainMismatch, "key_switch expects Ntt digits");
        const auto &[k0, k1] = swk.digits[b];
        // Key limbs are stored for the full tower; ids index into them directly.
        for (std::size_t k = 0; k < ids.size(); ++k) {
            mul_acc_inplace(u0.limbs[k], d.limbs[k], k0.limbs[ids[k]]);
            mul_acc_inplace(u1.limbs[k], d.limbs[k], k1.limbs[ids[k]]);
        }
    }
    return {std::move(u0), std::move(u1)};
}

Ciphertext CkksContext::rotate(const Ciphertext &ct, std::size_t r, const KeySet &keys) const {
    const auto rot = RotationIndex::make(static_cast<long long>(r), n());
    if (rot.r == 0) return ct;
    const SwitchingKey &swk = keys.get(rot.r, false);
    Ciphertext out = ct;
    out.c0 = automorphism_eval(ct.c0, rot);
    const RnsPoly c1 = automorphism_eval(ct.c1, rot);
    auto [u0, u1] = key_switch(decompose_ntt(basis_, c1), swk);
    add_inplace(out.c0, moddown_ntt(basis_, u0));
    out.c1 = moddown_ntt(basis_, u1);
    return out;
}

Ciphertext CkksContext::pt_ct_mult(const Plaintext &pt, const Ciphertext &ct) const {
    if (pt.level != ct.level || pt.m.ids != ct.c0.ids)
        throw Error(ErrorCode::LevelMismatch, "pt_ct_mult: plaintext and ciphertext at different levels");
    return Ciphertext{mul(pt.m, ct.c0), mul(pt.m, ct.c1), ct.level, pt.scale * ct.scale};
}

Ciphertext CkksContext::add(const Ciphertext &a, const Ciphertext &b) const {
    require_level(b, a.level, "add");
    if (std::fabs(a.scale - b.scale) > 1e-9 * a.scale)
        throw Error(ErrorCode::InvalidArgument, "add: operands carry different scales");
    return Ciphertext{hlt::add(a.c0, b.c0), hlt::add(a.c1, b.c1), a.level, a.scale};
}

Ciphertext CkksContext::rescale(const Ciphertext &ct) const {
    if (ct.level == 0) throw Error(ErrorCode::SingleLimb, "cannot rescale at level 0");
    const double q_top = static_cast<double>(basis_.modulus(basis_.q_id(ct.level)).value());
    return Ciphertext{rescale_ntt(basis_, ct.c0), rescale_ntt(basis_, ct.c1), ct.level - 1, ct.scale / q_top};
}

} // namespace hlt
