// Hashing and signing primitives, cross-checked against an independent
// from-scratch SHA-256 and frozen standard vectors.

#include "multistrand/crypto.hpp"

#include <gtest/gtest.h>

#include <cstdint>
#include <string_view>

#include "multistrand/rng.hpp"
#include "multistrand/types.hpp"
#include "reference_oracles.hpp"

namespace ms = multistrand;

namespace {

ms::Bytes bytes_of(std::string_view text) {
  return ms::Bytes(text.begin(), text.end());
}

ms::Hash256 to_hash(const oracle::Digest& d) {
  ms::Hash256 h{};
  h.bytes = d;
  return h;
}

const ms::Params kParams = ms::Params::make(0, 0);

}  // namespace

// FIPS 180-4 example digests.
TEST(Sha256, MatchesStandardVectors) {
  EXPECT_EQ(ms::to_hex(ms::sha256(ms::ByteView{})),
            "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(ms::to_hex(ms::sha256(ms::ByteView{bytes_of("abc")})),
            "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_EQ(ms::to_hex(ms::sha256(ms::ByteView{
                bytes_of("abcdbcdecdefdefgefghfghighijhijkijkljklmklmnlmnomnopnopq")})),
            "248d6a61d20638b8e5c026930c3e6039a33ce45964ff2167f6ecedd419db06c1");
}

TEST(Sha256, MatchesStandardVectorOneMillionA) {
  const ms::Bytes million(1000000, static_cast<std::uint8_t>('a'));
  EXPECT_EQ(ms::to_hex(ms::sha256(ms::ByteView{million})),
            "cdc76e5c9914fb9281a1c7e284d73e67f1809a48a497200e046d39ccc7112cd0");
}

// Library digest must agree with the independent implementation on inputs of
// every length class around the 64-byte block boundary.
TEST(Sha256, AgreesWithIndependentImplementation) {
  ms::Rng rng(20240817);
  for (std::size_t len : {0u,  1u,  31u, 32u,  33u,  55u,  56u,  57u,
                          63u, 64u, 65u, 127u, 128u, 129u, 1000u}) {
    ms::Bytes data(len);
    rng.fill(data);
    const ms::Hash256 ours = ms::sha256(ms::ByteView{data});
    const oracle::Digest theirs = oracle::sha256(data.data(), data.size());
    EXPECT_EQ(ours, to_hash(theirs)) << "length " << len;
  }
}

TEST(HashBytes, DispatchesOnAlgorithmId) {
  const ms::Bytes data = bytes_of("abc");
  EXPECT_EQ(ms::hash_bytes(ms::ByteView{data}, kParams),
            ms::sha256(ms::ByteView{data}));
  ms::Params bad = kParams;
  bad.hash_algo_id = "sha3";
  EXPECT_THROW((void)ms::hash_bytes(ms::ByteView{data}, bad), std::invalid_argument);
}

TEST(Keygen, DeterministicFromSeed) {
  ms::KeySeed seed{};
  seed[0] = 42;
  const ms::Keypair a = ms::keygen(seed, kParams);
  const ms::Keypair b = ms::keygen(seed, kParams);
  EXPECT_EQ(a.public_key, b.public_key);
  EXPECT_EQ(a.secret_key, b.secret_key);

  seed[0] = 43;
  const ms::Keypair c = ms::keygen(seed, kParams);
  EXPECT_NE(a.public_key, c.public_key);
}

TEST(Signing, RoundTrip) {
  ms::KeySeed seed{};
  seed[31] = 7;
  const ms::Keypair key = ms::keygen(seed, kParams);
  const ms::Hash256 message = ms::sha256(ms::ByteView{bytes_of("block id")});
  const ms::Signature sig = ms::sign(message, key.secret_key, kParams);
  EXPECT_TRUE(ms::verify(message, sig, key.public_key, kParams));
}

TEST(Signing, RejectsTamperedMessage) {
  ms::KeySeed seed{};
  const ms::Keypair key = ms::keygen(seed, kParams);
  ms::Hash256 message{};
  const ms::Signature sig = ms::sign(message, key.secret_key, kParams);
  message[5] ^= 0x01;
  EXPECT_FALSE(ms::verify(message, sig, key.public_key, kParams));
}

TEST(Signing, RejectsTamperedSignature) {
  ms::KeySeed seed{};
  const ms::Keypair key = ms::keygen(seed, kParams);
  const ms::Hash256 message{};
  ms::Signature sig = ms::sign(message, key.secret_key, kParams);
  sig[10] ^= 0x80;
  EXPECT_FALSE(ms::verify(message, sig, key.public_key, kParams));
}

TEST(Signing, RejectsWrongPublicKey) {
  ms::KeySeed seed_a{};
  ms::KeySeed seed_b{};
  seed_b[0] = 1;
  const ms::Keypair a = ms::keygen(seed_a, kParams);
  const ms::Keypair b = ms::keygen(seed_b, kParams);
  const ms::Hash256 message{};
  const ms::Signature sig = ms::sign(message, a.secret_key, kParams);
  EXPECT_FALSE(ms::verify(message, sig, b.public_key, kParams));
}

TEST(Signing, SignatureIsDeterministicPerKeyAndMessage) {
  // Ed25519 signatures are deterministic; block bytes must not vary between
  // identically seeded runs.
  ms::KeySeed seed{};
  seed[3] = 9;
  const ms::Keypair key = ms::keygen(seed, kParams);
  const ms::Hash256 message = ms::sha256(ms::ByteView{bytes_of("x")});
  EXPECT_EQ(ms::sign(message, key.secret_key, kParams),
            ms::sign(message, key.secret_key, kParams));
}

TEST(Signing, UnknownSignatureAlgorithmThrows) {
  ms::Params bad = kParams;
  bad.sig_algo_id = "secp256k1";
  ms::KeySeed seed{};
  EXPECT_THROW((void)ms::keygen(seed, bad), std::invalid_argument);
}
