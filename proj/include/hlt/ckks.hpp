// Copyright 2026 The hlt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <complex>
#include <cstddef>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "hlt/rns.hpp"

namespace hlt {

using Complex = std::complex<double>;
using Rng = std::mt19937_64;

/// Scheme parameters. Primes are generated deterministically from the shape.
struct CkksParams {
    std::size_t n = 1 << 10;
    std::size_t q_count = 5; // L + 1
    std::size_t alpha = 5;
    int prime_bits = 54;
    double scale = 1099511627776.0; // 2^40
    double sigma = 3.2;

    /// N = 2^10, L + 1 = 5, alpha = 5, 54-bit primes, scale 2^40.
    static CkksParams toy();
};

/// Canonical-embedding encoder. Slot j is the evaluation at zeta^(5^j), so
/// the automorphism with g_r = 5^r shifts slots left by r.
class Encoder {
public:
    explicit Encoder(std::size_t n);

    std::size_t slots() const noexcept { return n_ / 2; }

    /// Real coefficient vector whose embedding equals `values` (N/2 entries).
    std::vector<double> embed_inverse(const std::vector<Complex> &values) const;
    std::vector<Complex> embed(const std::vector<double> &coeffs) const;

private:
    void fft_special(std::vector<Complex> &vals) const;
    void fft_special_inv(std::vector<Complex> &vals) const;

    std::size_t n_;
    std::vector<std::size_t> rot_group_;
    std::vector<Complex> ksi_pows_;
};

struct Plaintext {
    RnsPoly m; // q_0..q_level, Ntt domain
    std::size_t level = 0;
    double scale = 1.0;
};

struct Ciphertext {
    RnsPoly c0, c1; // q_0..q_level, Ntt domain
    std::size_t level = 0;
    double scale = 1.0;
};

struct SecretKey {
    std::vector<i64> coeffs; // ternary
    RnsPoly s;               // over the full P*Q tower, Ntt domain
};

struct PublicKey {
    RnsPoly b, a; // over Q, Ntt domain; b = -a s + e
};

/// beta pairs over P*Q in the Ntt domain. A hoisted key for rotation r holds
/// phi_{-r} applied to both components of the plain key.
struct SwitchingKey {
    std::vector<std::pair<RnsPoly, RnsPoly>> digits;
    std::size_t rotation = 0;
    bool hoisted = false;
};

/// Rotation keys by slot offset.
struct KeySet {
    std::map<std::size_t, SwitchingKey> plain;
    std::map<std::size_t, SwitchingKey> hoisted;

    const SwitchingKey &get(std::size_t r, bool hoisted_key) const;
};

class CkksContext {
public:
    explicit CkksContext(const CkksParams &params);

    const CkksParams &params() const noexcept { return params_; }
    const RnsBasis &basis() const noexcept { return basis_; }
    const Encoder &encoder() const noexcept { return encoder_; }
    std::size_t n() const noexcept { return params_.n; }
    std::size_t slots() const noexcept { return params_.n / 2; }
    std::size_t max_level() const noexcept { return basis_.max_level(); }

    /// Scaled, rounded coefficients of `values` reduced into the moduli `ids`
    /// (coefficient domain). Throws Overflow when a coefficient does not fit
    /// below half the product of those moduli.
    RnsPoly encode_poly(const std::vector<Complex> &values, double scale, const std::vector<std::size_t> &ids) const;

    Plaintext encode(const std::vector<Complex> &values, std::size_t level, double scale) const;
    Plaintext encode(const std::vector<double> &values, std::size_t level, double scale) const;
    Plaintext encode(const std::vector<Complex> &values) const { return encode(values, max_level(), params_.scale); }
    std::vector<Complex> decode(const Plaintext &pt) const;

    SecretKey secret_keygen(Rng &rng) const;
    PublicKey public_keygen(const SecretKey &sk, Rng &rng) const;

    Ciphertext encrypt(const Plaintext &pt, const SecretKey &sk, Rng &rng) const;
    Ciphertext encrypt(const Plaintext &pt, const PublicKey &pk, Rng &rng) const;
    Plaintext decrypt(const Ciphertext &ct, const SecretKey &sk) const;

    /// Key taking ciphertexts under `from` (given over P*Q, Ntt) to `to`.
    SwitchingKey swk_gen(const RnsPoly &from, const SecretKey &to, Rng &rng) const;
    SwitchingKey rotation_keygen(const SecretKey &sk, std::size_t r, bool hoisted, Rng &rng) const;
    KeySet rotation_keys(const SecretKey &sk, const std::vector<std::size_t> &rotations, bool plain, bool hoisted,
                         Rng &rng) const;

    /// Inner product of Ntt-domain digits over P*Q_level with the key,
    /// without ModDown.
    std::pair<RnsPoly, RnsPoly> key_switch(const std::vector<RnsPoly> &digits, const SwitchingKey &swk) const;

    Ciphertext rotate(const Ciphertext &ct, std::size_t r, const KeySet &keys) const;
    Ciphertext pt_ct_mult(const Plaintext &pt, const Ciphertext &ct) const;
    Ciphertext add(const Ciphertext &a, const Ciphertext &b) const;
    Ciphertext rescale(const Ciphertext &ct) const;

    RnsPoly sample_uniform(const std::vector<std::size_t> &ids, Rng &rng) const;
    RnsPoly sample_gaussian(const std::vector<std::size_t> &ids, Rng &rng) const;
    std::vector<i64> sample_ternary(Rng &rng) const;

private:
    CkksParams params_;
    RnsBasis basis_;
    Encoder encoder_;
};

} // namespace hlt
