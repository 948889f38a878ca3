#include "bridgesim/rb.hpp"

namespace bridgesim {

std::string RBInstanceId::str() const {
  switch (kind) {
    case Kind::proposal: return "proposal/sid=" + std::to_string(sid);
    case Kind::signStart: return "signStart/sid=" + std::to_string(sid);
    case Kind::custom: return custom;
  }
  return "?";
}

void writeInstanceId(BinWriter& w, const RBInstanceId& id) {
  w.u8(static_cast<std::uint8_t>(id.kind));
  w.u64(id.sid);
  if (id.kind == RBInstanceId::Kind::custom) w.str(id.custom);
}

RBInstanceId readInstanceId(BinReader& r) {
  RBInstanceId id;
  id.kind = static_cast<RBInstanceId::Kind>(r.u8());
  id.sid = r.u64();
  if (id.kind == RBInstanceId::Kind::custom) id.custom = r.str();
  return id;
}

void writeDepositId(BinWriter& w, const DepositIdentifier& id) {
  w.str(id.chainId);
  w.hash(id.txHash);
  w.u64(id.txNonce);
}

DepositIdentifier readDepositId(BinReader& r) {
  DepositIdentifier id;
  id.chainId = r.str();
  id.txHash = r.hash();
  id.txNonce = r.u64();
  return id;
}

RBEndpoint::RBEndpoint(int self, int n, int t, SendToAllFn sendToAll, SenderOfFn senderOf,
                       DeliverFn onDeliver)
    : self_(self),
      n_(n),
      t_(t),
      sendToAll_(std::move(sendToAll)),
      senderOf_(std::move(senderOf)),
      onDeliver_(std::move(onDeliver)) {}

Bytes RBEndpoint::encode(MsgKind phase, const RBInstanceId& instance, const Bytes& value) {
  BinWriter w;
  w.u8(static_cast<std::uint8_t>(phase));
  writeInstanceId(w, instance);
  w.bytes(value);
  return w.take();
}

Status RBEndpoint::broadcast(const RBInstanceId& instance, const Bytes& message) {
  if (senderOf_(instance) != self_) return Err::NotDesignatedSender;
  auto& st = instances_[instance];
  if (st.sent) return Err::DuplicateBroadcast;
  st.sent = true;
  sendToAll_(encode(MsgKind::rbSend, instance, message));
  return okStatus();
}

RBEndpoint::InstState::ValueState& RBEndpoint::InstState::forValue(const Bytes& value) {
  for (auto& entry : values)
    if (entry.value == value) return entry;
  values.push_back({value, 0, 0});
  return values.back();
}

void RBEndpoint::onMessage(int from, MsgKind phase, BinReader& r) {
  RBInstanceId instance = readInstanceId(r);
  Bytes value = r.bytes();
  if (!r.ok()) return;
  auto& st = instances_[instance];

  if (phase == MsgKind::rbSend) {
    // Echo only the designated sender's first value.
    if (from != senderOf_(instance)) return;
    if (st.sentEcho) return;
    st.sentEcho = true;
    sendToAll_(encode(MsgKind::rbEcho, instance, value));
    return;
  }

  if (from < 0 || from >= n_ || from >= 64) return;
  const std::uint64_t bit = 1ULL << from;
  auto& vs = st.forValue(value);

  if (phase == MsgKind::rbEcho) {
    if (vs.echoMask & bit) return;
    vs.echoMask |= bit;
    const int echoQuorum = (n_ + t_ + 2) / 2;  // ceil((n+t+1)/2)
    if (!st.sentReady && popcount(vs.echoMask) >= echoQuorum) {
      st.sentReady = true;
      sendToAll_(encode(MsgKind::rbReady, instance, value));
    }
    return;
  }

  if (phase == MsgKind::rbReady) {
    if (vs.readyMask & bit) return;
    vs.readyMask |= bit;
    if (!st.sentReady && popcount(vs.readyMask) >= t_ + 1) {
      st.sentReady = true;
      sendToAll_(encode(MsgKind::rbReady, instance, value));
    }
    if (!st.delivered && popcount(vs.readyMask) >= 2 * t_ + 1) {
      st.delivered = true;
      st.deliveredValue = value;
      onDeliver_(instance, value, senderOf_(instance));
    }
  }
}

std::optional<Bytes> RBEndpoint::delivered(const RBInstanceId& instance) const {
  auto it = instances_.find(instance);
  if (it == instances_.end() || !it->second.delivered) return std::nullopt;
  return it->second.deliveredValue;
}

}  // namespace bridgesim
