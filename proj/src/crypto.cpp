#include "multistrand/crypto.hpp"

#include <sodium.h>

#include <mutex>
#include <stdexcept>

namespace multistrand {

namespace {

void ensure_sodium() {
  static std::once_flag flag;
  std::call_once(flag, [] {
    if (sodium_init() < 0) {
      throw std::runtime_error("libsodium initialization failed");
    }
  });
}

}  // namespace

Hash256 sha256(ByteView data) {
  ensure_sodium();
  Hash256 out;
  crypto_hash_sha256(out.data(), data.data(), data.size());
  return out;
}

Hash256 hash_bytes(ByteView data, const Params& params) {
  if (params.hash_algo_id != "sha256") {
    throw std::invalid_argument("unsupported hash_algo_id: " + params.hash_algo_id);
  }
  return sha256(data);
}

Keypair keygen(const KeySeed& seed, const Params& params) {
  if (params.sig_algo_id != "ed25519") {
    throw std::invalid_argument("unsupported sig_algo_id: " + params.sig_algo_id);
  }
  ensure_sodium();
  static_assert(kPublicKeySize == crypto_sign_PUBLICKEYBYTES);
  static_assert(kSecretKeySize == crypto_sign_SECRETKEYBYTES);
  static_assert(kKeySeedSize == crypto_sign_SEEDBYTES);
  Keypair kp;
  crypto_sign_seed_keypair(kp.public_key.data(), kp.secret_key.data(), seed.data());
  return kp;
}

Signature sign(const Hash256& message, const SecretKey& secret, const Params& params) {
  if (params.sig_algo_id != "ed25519") {
    throw std::invalid_argument("unsupported sig_algo_id: " + params.sig_algo_id);
  }
  ensure_sodium();
  static_assert(kSignatureSize == crypto_sign_BYTES);
  Signature sig;
  crypto_sign_detached(sig.data(), nullptr, message.data(), message.size(),
                       secret.data());
  return sig;
}

bool verify(const Hash256& message, const Signature& signature, const PublicKey& pub,
            const Params& params) {
  if (params.sig_algo_id != "ed25519") {
    throw std::invalid_argument("unsupported sig_algo_id: " + params.sig_algo_id);
  }
  ensure_sodium();
  return crypto_sign_verify_detached(signature.data(), message.data(), message.size(),
                                     pub.data()) == 0;
}

}  // namespace multistrand
