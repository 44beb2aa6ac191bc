// Copyright 2026 The hlt Authors
// SPDX-License-Identifier: Apache-2.0

#include "hlt/serialize.hpp"

#include <bit>
#include <cstring>
#include <istream>
#include <ostream>

namespace hlt {

namespace {

constexpr char kMagic[4] = {'H', 'L', 'T', '1'};

struct Header {
    u64 n = 0;
    std::uint32_t level = 0;
    double scale = 0;
    std::uint32_t rotation = 0;
    std::uint8_t hoisted = 0;
    std::uint8_t domain = 0;
    std::uint32_t poly_count = 0;
    std::vector<u64> moduli;
};

class Writer {
public:
    void u8(std::uint8_t v) { buf_.push_back(v); }
    void u32(std::uint32_t v) {
        for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void u64v(u64 v) {
        for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
    }
    void f64(double v) { u64v(std::bit_cast<u64>(v)); }
    const std::vector<std::uint8_t> &bytes() const { return buf_; }

private:
    std::vector<std::uint8_t> buf_;
};

class Reader {
public:
    explicit Reader(std::istream &is) : is_(is) {}
    void raw(void *dst, std::size_t n) {
        if (!is_.read(static_cast<char *>(dst), static_cast<std::streamsize>(n)))
            throw Error(ErrorCode::Format, "truncated HLT1 stream");
    }
    std::uint8_t u8() {
        std::uint8_t b;
        raw(&b, 1);
        return b;
    }
    std::uint32_t u32() {
        std::uint8_t b[4];
        raw(b, 4);
        std::uint32_t v = 0;
        for (int i = 3; i >= 0; --i) v = (v << 8) | b[i];
        return v;
    }
    u64 u64v() {
        std::uint8_t b[8];
        raw(b, 8);
        u64 v = 0;
        for (int i = 7; i >= 0; --i) v = (v << 8) | b[i];
        return v;
    }
    double f64() { return std::bit_cast<double>(u64v()); }

private:
    std::istream &is_;
};

void write_object(std::ostream &os, ObjectKind kind, const Header &h, const std::vector<const RnsPoly *> &polys) {
    Writer head;
    head.u64v(h.n);
    head.u32(h.level);
    head.f64(h.scale);
    head.u32(h.rotation);
    head.u8(h.hoisted);
    head.u8(h.domain);
    head.u32(h.poly_count);
    head.u32(static_cast<std::uint32_t>(h.moduli.size()));
    for (u64 q : h.moduli) head.u64v(q);

    Writer pre;
    pre.u32(static_cast<std::uint32_t>(kind));
    pre.u32(static_cast<std::uint32_t>(head.bytes().size()));
    os.write(kMagic, 4);
    os.write(reinterpret_cast<const char *>(pre.bytes().data()), static_cast<std::streamsize>(pre.bytes().size()));
    os.write(reinterpret_cast<const char *>(head.bytes().data()), static_cast<std::streamsize>(head.bytes().size()));
    for (const RnsPoly *p : polys) {
        for (const auto &limb : p->limbs) {
            Writer w;
            for (u64 c : limb.coeffs) w.u64v(c);
            os.write(reinterpret_cast<const char *>(w.bytes().data()), static_cast<std::streamsize>(w.bytes().size()));
        }
    }
    if (!os) throw Error(ErrorCode::Format, "write failed");
}

Header header_for(const RnsBasis &basis, const RnsPoly &first, std::size_t poly_count) {
    Header h;
    h.n = basis.n();
    h.domain = first.domain() == Domain::Ntt ? 1 : 0;
    h.poly_count = static_cast<std::uint32_t>(poly_count);
    for (auto id : first.ids) h.moduli.push_back(basis.modulus(id).value());
    return h;
}

// Reads header and limb data, mapping each modulus back to its basis id.
std::pair<Header, std::vector<RnsPoly>> read_object(std::istream &is, ObjectKind kind, const RnsBasis &basis) {
    Reader r(is);
    char magic[4];
    r.raw(magic, 4);
    if (std::memcmp(magic, kMagic, 4) != 0) throw Error(ErrorCode::Format, "bad magic, expected HLT1");
    if (r.u32() != static_cast<std::uint32_t>(kind)) throw Error(ErrorCode::Format, "unexpected object kind");
    const std::uint32_t header_bytes = r.u32();
    Header h;
    h.n = r.u64v();
    h.level = r.u32();
    h.scale = r.f64();
    h.rotation = r.u32();
    h.hoisted = r.u8();
    h.domain = r.u8();
    h.poly_count = r.u32();
    const std::uint32_t limb_count = r.u32();
    if (header_bytes != 34u + 8u * limb_count) throw Error(ErrorCode::Format, "header length mismatch");
    if (h.n != basis.n()) throw Error(ErrorCode::Format, "ring dimension differs from the context");
    if (h.domain > 1) throw Error(ErrorCode::Format, "bad domain tag");
    std::vector<std::size_t> ids;
    for (std::uint32_t k = 0; k < limb_count; ++k) {
        const u64 q = r.u64v();
        h.moduli.push_back(q);
        std::size_t id = 0;
        while (id < basis.total() && basis.modulus(id).value() != q) ++id;
        if (id == basis.total()) throw Error(ErrorCode::Format, "modulus not in the context basis");
        ids.push_back(id);
    }
    const Domain d = h.domain ? Domain::Ntt : Domain::Coefficient;
    std::vector<RnsPoly> polys;
    for (std::uint32_t p = 0; p < h.poly_count; ++p) {
        RnsPoly poly = RnsPoly::zero(basis, ids, d);
        for (auto &limb : poly.limbs)
            for (auto &c : limb.coeffs) {
                c = r.u64v();
                if (c >= limb.q()) throw Error(ErrorCode::Format, "residue out of range");
            }
        polys.push_back(std::move(poly));
    }
    return {std::move(h), std::move(polys)};
}

} // namespace

void save(std::ostream &os, const Ciphertext &ct, const RnsBasis &basis) {
    Header h = header_for(basis, ct.c0, 2);
    h.level = static_cast<std::uint32_t>(ct.level);
    h.scale = ct.scale;
    write_object(os, ObjectKind::Ciphertext, h, {&ct.c0, &ct.c1});
}

void save(std::ostream &os, const SwitchingKey &swk, const RnsBasis &basis) {
    if (swk.digits.empty()) throw Error(ErrorCode::Format, "empty switching key");
    Header h = header_for(basis, swk.digits.front().first, 2 * swk.digits.size());
    h.rotation = static_cast<std::uint32_t>(swk.rotation);
    h.hoisted = swk.hoisted ? 1 : 0;
    std::vector<const RnsPoly *> polys;
    for (const auto &[k0, k1] : swk.digits) {
        polys.push_back(&k0);
        polys.push_back(&k1);
    }
    write_object(os, ObjectKind::SwitchingKey, h, polys);
}

void save(std::ostream &os, const SecretKey &sk, const RnsBasis &basis) {
    write_object(os, ObjectKind::SecretKey, header_for(basis, sk.s, 1), {&sk.s});
}

Ciphertext load_ciphertext(std::istream &is, const RnsBasis &basis) {
    auto [h, polys] = read_object(is, ObjectKind::Ciphertext, basis);
    if (polys.size() != 2) throw Error(ErrorCode::Format, "ciphertext must hold two polynomials");
    if (polys[0].ids != basis.q_ids(h.level)) throw Error(ErrorCode::Format, "ciphertext limbs do not match its level");
    return Ciphertext{std::move(polys[0]), std::move(polys[1]), h.level, h.scale};
}

SwitchingKey load_switching_key(std::istream &is, const RnsBasis &basis) {
    auto [h, polys] = read_object(is, ObjectKind::SwitchingKey, basis);
    if (polys.empty() || polys.size() % 2 != 0) throw Error(ErrorCode::Format, "switching key needs digit pairs");
    SwitchingKey swk;
    swk.rotation = h.rotation;
    swk.hoisted = h.hoisted != 0;
    for (std::size_t i = 0; i < polys.size(); i += 2) swk.digits.emplace_back(std::move(polys[i]), std::move(polys[i + 1]));
    return swk;
}

SecretKey load_secret_key(std::istream &is, const RnsBasis &basis) {
    auto [h, polys] = read_object(is, ObjectKind::SecretKey, basis);
    if (polys.size() != 1) throw Error(ErrorCode::Format, "secret key must hold one polynomial");
    SecretKey sk;
    sk.s = std::move(polys[0]);
    RnsPoly c = sk.s;
    to_coef(c);
    // Recover the ternary coefficients from the first limb.
    const u64 q = c.limbs.front().q();
    for (u64 v : c.limbs.front().coeffs) sk.coeffs.push_back(v == 0 ? 0 : (v == 1 ? 1 : (v == q - 1 ? -1 : 2)));
    for (i64 v : sk.coeffs)
        if (v == 2) throw Error(ErrorCode::Format, "secret key is not ternary");
    return sk;
}

} // namespace hlt
