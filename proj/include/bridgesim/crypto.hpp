#pragma once

#include "bridgesim/common.hpp"

namespace bridgesim {

using Signature64 = std::array<std::uint8_t, 64>;
using PublicKey32 = std::array<std::uint8_t, 32>;
using Seed32 = std::array<std::uint8_t, 32>;

Hash32 sha256(std::span<const std::uint8_t> data);
inline Hash32 sha256(const Bytes& data) {
  return sha256(std::span<const std::uint8_t>(data.data(), data.size()));
}

struct SigningKey {
  std::array<std::uint8_t, 64> secret{};
  PublicKey32 publicKey{};

  static SigningKey fromSeed(const Seed32& seed);
};

Signature64 signDetached(const SigningKey& key, std::span<const std::uint8_t> msg);
bool verifyDetached(const PublicKey32& publicKey, std::span<const std::uint8_t> msg,
                    const Signature64& sig);

}  // namespace bridgesim
