#pragma once

#include <tuple>

#include "bridgesim/common.hpp"
#include "bridgesim/model.hpp"

namespace bridgesim {

// First byte of every payload on the simulated network.
enum class MsgKind : std::uint8_t {
  rbSend = 1,
  rbEcho = 2,
  rbReady = 3,
  submitWithdrawal = 4,
  acceptance = 5,
  signature = 6,
  checkWithdrawalReq = 7,
  checkWithdrawalResp = 8,
};

// Reliable-broadcast instances are named per purpose and session so that
// concurrent broadcasts never mix. Protocol instances render as
// "proposal/sid=<k>" and "signStart/sid=<k>"; tests may run ad-hoc instances
// under a free-form name.
struct RBInstanceId {
  enum class Kind : std::uint8_t { proposal = 0, signStart = 1, custom = 2 };

  Kind kind = Kind::custom;
  std::uint64_t sid = 0;
  std::string custom;

  static RBInstanceId proposal(std::uint64_t sid) { return {Kind::proposal, sid, {}}; }
  static RBInstanceId signStart(std::uint64_t sid) { return {Kind::signStart, sid, {}}; }
  static RBInstanceId named(std::string name) { return {Kind::custom, 0, std::move(name)}; }

  std::string str() const;

  friend bool operator==(const RBInstanceId&, const RBInstanceId&) = default;
  friend bool operator<(const RBInstanceId& a, const RBInstanceId& b) {
    return std::tie(a.kind, a.sid, a.custom) < std::tie(b.kind, b.sid, b.custom);
  }
};

void writeInstanceId(BinWriter& w, const RBInstanceId& id);
RBInstanceId readInstanceId(BinReader& r);

void writeDepositId(BinWriter& w, const DepositIdentifier& id);
DepositIdentifier readDepositId(BinReader& r);

}  // namespace bridgesim
