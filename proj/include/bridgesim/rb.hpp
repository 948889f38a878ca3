#pragma once

#include <functional>
#include <map>

#include "bridgesim/wire.hpp"

namespace bridgesim {

// Bracha-style reliable broadcast endpoint, one per validator.
//
// Guarantees with n > 3t and a synchronous network:
//   - Validity: an honest designated sender's message is delivered by every
//     honest validator within three ticks.
//   - Agreement: if any honest validator delivers a value for an instance,
//     every honest validator delivers that same value.
//   - Integrity: at most one delivery per instance, and if the designated
//     sender is honest, only its value.
//
// Quorums: echo on the sender's first value, ready after ceil((n+t+1)/2)
// echoes or t+1 readies, deliver after 2t+1 readies.
class RBEndpoint {
 public:
  using SendToAllFn = std::function<void(const Bytes&)>;
  using SenderOfFn = std::function<int(const RBInstanceId&)>;
  using DeliverFn = std::function<void(const RBInstanceId&, const Bytes&, int sender)>;

  RBEndpoint(int self, int n, int t, SendToAllFn sendToAll, SenderOfFn senderOf,
             DeliverFn onDeliver);

  // Starts an instance. Only the designated sender may broadcast, once.
  Status broadcast(const RBInstanceId& instance, const Bytes& message);

  // Feeds one rbSend/rbEcho/rbReady payload (kind byte already consumed).
  void onMessage(int from, MsgKind phase, BinReader& r);

  std::optional<Bytes> delivered(const RBInstanceId& instance) const;

  static Bytes encode(MsgKind phase, const RBInstanceId& instance, const Bytes& value);

 private:
  struct InstState {
    struct ValueState {
      Bytes value;
      std::uint64_t echoMask = 0;
      std::uint64_t readyMask = 0;
    };
    std::vector<ValueState> values;
    bool sent = false;
    bool sentEcho = false;
    bool sentReady = false;
    bool delivered = false;
    Bytes deliveredValue;

    ValueState& forValue(const Bytes& value);
  };

  static int popcount(std::uint64_t mask) { return __builtin_popcountll(mask); }

  int self_;
  int n_;
  int t_;
  SendToAllFn sendToAll_;
  SenderOfFn senderOf_;
  DeliverFn onDeliver_;
  std::map<RBInstanceId, InstState> instances_;
};

}  // namespace bridgesim
