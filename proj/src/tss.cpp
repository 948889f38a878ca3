#include "bridgesim/tss.hpp"

#include <algorithm>

namespace bridgesim {

TssEngine::TssEngine(std::string groupId, const Seed32& seed, int threshold)
    : threshold_(threshold) {
  key_ = SigningKey::fromSeed(seed);
  groupKey_.groupId = std::move(groupId);
  groupKey_.publicKey = key_.publicKey;
}

Status TssEngine::startSigning(const std::string& sessionId, std::vector<int> signers,
                               SignHashes message, Tick deadline, Tick now) {
  (void)now;
  if (sessions_.count(sessionId)) return Err::DuplicateSession;
  if (static_cast<int>(signers.size()) < threshold_) return Err::TooFewSigners;
  if (message.empty()) return Err::MalformedTx;
  std::sort(signers.begin(), signers.end());
  signers.erase(std::unique(signers.begin(), signers.end()), signers.end());
  if (static_cast<int>(signers.size()) < threshold_) return Err::TooFewSigners;
  Session s;
  s.signers = std::move(signers);
  s.message = std::move(message);
  s.deadline = deadline;
  sessions_.emplace(sessionId, std::move(s));
  return okStatus();
}

Status TssEngine::approve(const std::string& sessionId, int validator, const SignHashes& message,
                          Tick now) {
  auto it = sessions_.find(sessionId);
  if (it == sessions_.end()) return Err::UnknownSession;
  Session& s = it->second;
  if (!std::binary_search(s.signers.begin(), s.signers.end(), validator)) return Err::NotASigner;
  if (now > s.deadline) return Err::SessionClosed;
  if (s.completedAt) return okStatus();
  if (message != s.message) {
    s.poisoned = true;
    return Err::MessageMismatch;
  }
  if (s.poisoned) return Err::SessionClosed;
  s.approved.insert(validator);
  if (static_cast<int>(s.approved.size()) == static_cast<int>(s.signers.size()))
    s.completedAt = now;
  return okStatus();
}

Bytes TssEngine::sign(const SignHashes& message) const {
  BinWriter w;
  w.u32(static_cast<std::uint32_t>(message.size()));
  for (const auto& h : message) {
    auto part = signDetached(key_, std::span<const std::uint8_t>(h.data(), h.size()));
    w.raw(std::span<const std::uint8_t>(part.data(), part.size()));
  }
  return w.take();
}

Result<TssEngine::SignResult> TssEngine::sessionResult(const std::string& sessionId,
                                                       Tick now) const {
  auto it = sessions_.find(sessionId);
  if (it == sessions_.end()) return Err::UnknownSession;
  const Session& s = it->second;
  if (s.completedAt && now >= *s.completedAt + 1)
    return SignResult{SignState::ready, sign(s.message)};
  if (!s.completedAt && now >= s.deadline + 1) return SignResult{SignState::failed, {}};
  return SignResult{SignState::pending, {}};
}

std::vector<TssEngine::Emission> TssEngine::step(Tick now) {
  std::vector<Emission> out;
  for (auto& [id, s] : sessions_) {
    if (s.emitted) continue;
    if (s.completedAt && now >= *s.completedAt + 1) {
      s.emitted = true;
      out.push_back({id, s.signers, SignState::ready, sign(s.message)});
    } else if (!s.completedAt && now >= s.deadline + 1) {
      s.emitted = true;
      out.push_back({id, s.signers, SignState::failed, {}});
    }
  }
  return out;
}

bool TssEngine::verify(const PublicKey32& groupKey, const SignHashes& message,
                       const Bytes& signature) {
  BinReader r(signature);
  std::uint32_t count = r.u32();
  if (!r.ok() || count != message.size() || count == 0) return false;
  if (r.remaining() != static_cast<std::size_t>(count) * 64) return false;
  for (std::uint32_t i = 0; i < count; ++i) {
    Signature64 part{};
    for (auto& b : part) b = r.u8();
    if (!verifyDetached(groupKey, std::span<const std::uint8_t>(message[i].data(), 32), part))
      return false;
  }
  return true;
}

std::string tssSessionId(std::uint64_t sid, const DepositIdentifier& depositId,
                         const std::vector<int>& signers, const SignHashes& message) {
  BinWriter w;
  w.u32(static_cast<std::uint32_t>(signers.size()));
  for (int s : signers) w.u32(static_cast<std::uint32_t>(s));
  w.u32(static_cast<std::uint32_t>(message.size()));
  for (const auto& h : message) w.hash(h);
  auto digest = sha256(w.buffer());
  return "sign/sid=" + std::to_string(sid) + "/" + depositId.canonical() + "/" +
         toHex(digest).substr(0, 16);
}

}  // namespace bridgesim
