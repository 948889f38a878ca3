#pragma once

#include <functional>
#include <map>

#include "bridgesim/common.hpp"

namespace bridgesim {

// Envelope between two endpoints. Delivery order within a tick is fixed by
// (from, to, seq), so a run is a pure function of the inputs.
struct Envelope {
  int from = 0;
  int to = 0;
  std::uint64_t seq = 0;
  Tick deliverAt = 0;
  Bytes payload;
};

// Append-only event log. Lines follow the format
//   tick=<k> kind=<send|deliver|rb-deliver> from=<i> to=<j> instance=<id> bytes=<len>
// A null log pointer disables logging entirely (hot paths skip formatting).
class EventLog {
 public:
  void record(Tick tick, const char* kind, int from, int to, const std::string& instance,
              std::size_t bytes);
  const std::vector<std::string>& lines() const { return lines_; }

 private:
  std::vector<std::string> lines_;
};

// Names the wire-level purpose of a payload for the event log. Payloads start
// with a message-kind byte, so the tag is derived rather than carried.
std::string describePayload(const Bytes& payload);

// Synchronous round-based message layer: a message sent at tick k is
// delivered at tick k+1. Endpoints are small integers (validators first,
// then client actors).
class SimNetwork {
 public:
  explicit SimNetwork(int endpoints, EventLog* log = nullptr);

  Tick now() const { return tick_; }
  int endpoints() const { return endpoints_; }

  // Honest send: one hop of latency.
  void send(int from, int to, Bytes payload);

  // Harness injection with an explicit delivery tick (>= now()+1, or 0 before
  // the first tick runs).
  void inject(int from, int to, Bytes payload, Tick deliverAt);

  // Crash knob: a muted endpoint stops sending; its inbound traffic still
  // arrives (and is ignored by a crashed node's handler).
  void setMuted(int endpoint, bool muted);

  // Advances the clock by one tick and returns the envelopes due, sorted by
  // (from, to, seq).
  std::vector<Envelope> advanceTick();

 private:
  int endpoints_;
  Tick tick_ = -1;
  std::uint64_t seq_ = 0;
  std::map<Tick, std::vector<Envelope>> queue_;
  std::vector<char> muted_;
  EventLog* log_;
};

}  // namespace bridgesim
