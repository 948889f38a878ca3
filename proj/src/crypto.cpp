#include "bridgesim/crypto.hpp"

#include <sodium.h>

#include <stdexcept>

namespace bridgesim {

namespace {
void ensureSodium() {
  static const int rc = sodium_init();
  if (rc < 0) throw std::runtime_error("sodium_init failed");
}
}  // namespace

Hash32 sha256(std::span<const std::uint8_t> data) {
  ensureSodium();
  Hash32 out{};
  crypto_hash_sha256(out.data(), data.data(), data.size());
  return out;
}

SigningKey SigningKey::fromSeed(const Seed32& seed) {
  ensureSodium();
  SigningKey key;
  crypto_sign_seed_keypair(key.publicKey.data(), key.secret.data(), seed.data());
  return key;
}

Signature64 signDetached(const SigningKey& key, std::span<const std::uint8_t> msg) {
  ensureSodium();
  Signature64 sig{};
  crypto_sign_detached(sig.data(), nullptr, msg.data(), msg.size(), key.secret.data());
  return sig;
}

bool verifyDetached(const PublicKey32& publicKey, std::span<const std::uint8_t> msg,
                    const Signature64& sig) {
  ensureSodium();
  return crypto_sign_verify_detached(sig.data(), msg.data(), msg.size(), publicKey.data()) == 0;
}

}  // namespace bridgesim
