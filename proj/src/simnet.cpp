#include "bridgesim/simnet.hpp"

#include <algorithm>

#include "bridgesim/wire.hpp"

namespace bridgesim {

void EventLog::record(Tick tick, const char* kind, int from, int to, const std::string& instance,
                      std::size_t bytes) {
  std::string line = "tick=" + std::to_string(tick) + " kind=" + kind +
                     " from=" + std::to_string(from) + " to=" + std::to_string(to) +
                     " instance=" + instance + " bytes=" + std::to_string(bytes);
  lines_.push_back(std::move(line));
}

std::string describePayload(const Bytes& payload) {
  BinReader r(payload);
  auto kind = static_cast<MsgKind>(r.u8());
  switch (kind) {
    case MsgKind::rbSend:
    case MsgKind::rbEcho:
    case MsgKind::rbReady:
      return readInstanceId(r).str();
    case MsgKind::submitWithdrawal:
      return "submitWithdrawal";
    case MsgKind::acceptance:
      return "acceptance/sid=" + std::to_string(r.u64());
    case MsgKind::signature:
      return "signature/sid=" + std::to_string(r.u64());
    case MsgKind::checkWithdrawalReq:
      return "checkWithdrawal";
    case MsgKind::checkWithdrawalResp:
      return "checkWithdrawalResp";
  }
  return "unknown";
}

SimNetwork::SimNetwork(int endpoints, EventLog* log)
    : endpoints_(endpoints), muted_(endpoints, 0), log_(log) {}

void SimNetwork::send(int from, int to, Bytes payload) {
  if (from >= 0 && from < endpoints_ && muted_[from]) return;
  inject(from, to, std::move(payload), tick_ + 1);
}

void SimNetwork::inject(int from, int to, Bytes payload, Tick deliverAt) {
  if (log_) log_->record(tick_, "send", from, to, describePayload(payload), payload.size());
  Envelope env;
  env.from = from;
  env.to = to;
  env.seq = seq_++;
  env.deliverAt = deliverAt;
  env.payload = std::move(payload);
  queue_[deliverAt].push_back(std::move(env));
}

void SimNetwork::setMuted(int endpoint, bool muted) {
  if (endpoint >= 0 && endpoint < endpoints_) muted_[endpoint] = muted ? 1 : 0;
}

std::vector<Envelope> SimNetwork::advanceTick() {
  ++tick_;
  std::vector<Envelope> due;
  auto it = queue_.find(tick_);
  if (it != queue_.end()) {
    due = std::move(it->second);
    queue_.erase(it);
  }
  std::sort(due.begin(), due.end(), [](const Envelope& a, const Envelope& b) {
    return std::tie(a.from, a.to, a.seq) < std::tie(b.from, b.to, b.seq);
  });
  if (log_) {
    for (const auto& env : due)
      log_->record(tick_, "deliver", env.from, env.to, describePayload(env.payload),
                   env.payload.size());
  }
  return due;
}

}  // namespace bridgesim
