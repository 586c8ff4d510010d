#pragma once
// Hashing and signing primitives behind the protocol's algorithm-id
// indirection. The default (and currently only) algorithms are SHA-256 and
// Ed25519, provided by libsodium; key generation is deterministic from a
// 32-byte seed so miners and tests are reproducible.

#include <array>
#include <cstdint>

#include "multistrand/types.hpp"

namespace multistrand {

inline constexpr std::size_t kPublicKeySize = 32;
inline constexpr std::size_t kSecretKeySize = 64;  // Ed25519 expanded form
inline constexpr std::size_t kSignatureSize = 64;
inline constexpr std::size_t kKeySeedSize = 32;

using PublicKey = std::array<std::uint8_t, kPublicKeySize>;
using SecretKey = std::array<std::uint8_t, kSecretKeySize>;
using Signature = std::array<std::uint8_t, kSignatureSize>;
using KeySeed = std::array<std::uint8_t, kKeySeedSize>;

struct Keypair {
  PublicKey public_key{};
  SecretKey secret_key{};
};

/// Digest `data` with the hash algorithm named by `params.hash_algo_id`.
/// Throws std::invalid_argument for an unsupported id.
[[nodiscard]] Hash256 hash_bytes(ByteView data, const Params& params);

/// SHA-256 directly, for callers that have already validated params.
[[nodiscard]] Hash256 sha256(ByteView data);

/// Deterministic keypair from a 32-byte seed: the same seed always yields the
/// same keypair.
[[nodiscard]] Keypair keygen(const KeySeed& seed, const Params& params);

/// Detached signature over a 32-byte message (block ids are signed, never
/// whole blocks).
[[nodiscard]] Signature sign(const Hash256& message, const SecretKey& secret,
                             const Params& params);

/// True iff `signature` is a valid signature of `message` under `pub`.
[[nodiscard]] bool verify(const Hash256& message, const Signature& signature,
                          const PublicKey& pub, const Params& params);

}  // namespace multistrand
