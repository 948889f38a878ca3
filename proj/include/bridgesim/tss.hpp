#pragma once

#include <map>
#include <set>

#include "bridgesim/crypto.hpp"
#include "bridgesim/model.hpp"

namespace bridgesim {

struct GroupKey {
  std::string groupId;
  PublicKey32 publicKey{};
};

// Threshold-signature oracle. It emulates a (threshold)-of-n signing group
// with a single keypair: a signature over a message is released if and only
// if every signer listed in a registered session approved that exact message
// before the session deadline. A session listing fewer than `threshold`
// signers is rejected outright, mirroring the fact that fewer share holders
// cannot assemble a signature at all.
//
// Timing: a session completed at tick c becomes Ready at c+1; a session that
// misses its deadline d becomes Failed at d+1. Any signer misbehaviour
// (approving a different message) aborts the whole session.
class TssEngine {
 public:
  enum class SignState { pending, ready, failed };

  struct SignResult {
    SignState state = SignState::pending;
    Bytes signature;
  };

  struct Emission {
    std::string sessionId;
    std::vector<int> signers;
    SignState state = SignState::pending;
    Bytes signature;
  };

  struct Session {
    std::vector<int> signers;
    SignHashes message;
    Tick deadline = 0;
    std::set<int> approved;
    bool poisoned = false;
    std::optional<Tick> completedAt;
    bool emitted = false;
  };

  TssEngine(std::string groupId, const Seed32& seed, int threshold);

  const GroupKey& groupKey() const { return groupKey_; }
  int threshold() const { return threshold_; }

  Status startSigning(const std::string& sessionId, std::vector<int> signers, SignHashes message,
                      Tick deadline, Tick now);
  Status approve(const std::string& sessionId, int validator, const SignHashes& message, Tick now);
  Result<SignResult> sessionResult(const std::string& sessionId, Tick now) const;

  // Advances the oracle to `now` and returns the SignatureReady / Error
  // notifications that become visible at this tick.
  std::vector<Emission> step(Tick now);

  // Stateless verification against a group public key. The signature blob is
  // a count followed by one 64-byte part per message hash.
  static bool verify(const PublicKey32& groupKey, const SignHashes& message,
                     const Bytes& signature);
  static bool verify(const GroupKey& key, const SignHashes& message, const Bytes& signature) {
    return verify(key.publicKey, message, signature);
  }

  const std::map<std::string, Session>& sessions() const { return sessions_; }

 private:
  Bytes sign(const SignHashes& message) const;

  GroupKey groupKey_;
  SigningKey key_;
  int threshold_;
  std::map<std::string, Session> sessions_;
};

// Canonical session identifier: commits to the session number, the request,
// the signer set and the message, so two distinct signing attempts can never
// collide on an id.
std::string tssSessionId(std::uint64_t sid, const DepositIdentifier& depositId,
                         const std::vector<int>& signers, const SignHashes& message);

}  // namespace bridgesim
