// Copyright 2026 The hlt Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>

#include "hlt/ckks.hpp"

namespace hlt {

/// Binary container, all integers little-endian:
///   "HLT1" | u32 kind | u32 header_bytes | header | limb data
/// header: u64 N, u32 level, f64 scale, u32 rotation, u8 hoisted, u8 domain,
///         u32 poly_count, u32 limb_count, limb_count x u64 moduli
/// data:   poly_count x limb_count x N u64 words.
enum class ObjectKind : std::uint32_t { Ciphertext = 1, SwitchingKey = 2, SecretKey = 3 };

void save(std::ostream &os, const Ciphertext &ct, const RnsBasis &basis);
void save(std::ostream &os, const SwitchingKey &swk, const RnsBasis &basis);
void save(std::ostream &os, const SecretKey &sk, const RnsBasis &basis);

/// Loaders check the moduli against `basis` and throw Format on any mismatch.
Ciphertext load_ciphertext(std::istream &is, const RnsBasis &basis);
SwitchingKey load_switching_key(std::istream &is, const RnsBasis &basis);
SecretKey load_secret_key(std::istream &is, const RnsBasis &basis);

} // namespace hlt
