#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace bridgesim {

using Bytes = std::vector<std::uint8_t>;
using Hash32 = std::array<std::uint8_t, 32>;
using Tick = std::int64_t;

enum class Err {
  None,
  IllegalTransition,
  NotFound,
  NotConfirmed,
  NoSuchEvent,
  WrongEventKind,
  WrongAddress,
  MissingOpReturn,
  MalformedOpReturn,
  NotABurn,
  BadServiceEntry,
  ZeroAmount,
  EmptyAddress,
  InsufficientFunds,
  BadSignature,
  AlreadyWithdrawn,
  DuplicateTx,
  UnknownTx,
  DoubleSpend,
  BadWitness,
  MalformedTx,
  IndexOutOfRange,
  DuplicateSession,
  UnknownSession,
  NotASigner,
  TooFewSigners,
  MessageMismatch,
  SessionClosed,
  DuplicateBroadcast,
  NotDesignatedSender,
  UnsupportedChain,
  InvalidTarget,
  NoPendingRequest,
  ConfigError,
  Truncated,
};

const char* errName(Err e);

// Result<T>: either a value or an error code. Deliberately minimal; the
// simulator never throws across module boundaries.
template <typename T>
class Result {
 public:
  Result(T value) : value_(std::move(value)) {}
  Result(Err err) : err_(err) {}

  bool ok() const { return value_.has_value(); }
  explicit operator bool() const { return ok(); }
  Err error() const { return err_; }

  const T& operator*() const { return *value_; }
  T& operator*() { return *value_; }
  const T* operator->() const { return &*value_; }
  T* operator->() { return &*value_; }

 private:
  std::optional<T> value_;
  Err err_ = Err::None;
};

struct Unit {};
using Status = Result<Unit>;
inline Status okStatus() { return Status(Unit{}); }

std::string toHex(std::span<const std::uint8_t> data);
std::optional<Bytes> fromHex(const std::string& hex);

inline std::string toHex(const Hash32& h) {
  return toHex(std::span<const std::uint8_t>(h.data(), h.size()));
}

// Little-endian, length-prefixed binary codec used for every serialized
// structure in the simulator (wire messages, transaction preimages, hashes).
class BinWriter {
 public:
  void u8(std::uint8_t v) { buf_.push_back(v); }
  void u32(std::uint32_t v) {
    for (int i = 0; i < 4; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void u64(std::uint64_t v) {
    for (int i = 0; i < 8; ++i) buf_.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  }
  void raw(std::span<const std::uint8_t> data) { buf_.insert(buf_.end(), data.begin(), data.end()); }
  void bytes(std::span<const std::uint8_t> data) {
    u32(static_cast<std::uint32_t>(data.size()));
    raw(data);
  }
  void bytes(const Bytes& data) { bytes(std::span<const std::uint8_t>(data.data(), data.size())); }
  void str(const std::string& s) {
    u32(static_cast<std::uint32_t>(s.size()));
    buf_.insert(buf_.end(), s.begin(), s.end());
  }
  void hash(const Hash32& h) { raw(std::span<const std::uint8_t>(h.data(), h.size())); }

  const Bytes& buffer() const { return buf_; }
  Bytes take() { return std::move(buf_); }

 private:
  Bytes buf_;
};

class BinReader {
 public:
  explicit BinReader(std::span<const std::uint8_t> data) : data_(data) {}
  explicit BinReader(const Bytes& data) : data_(data.data(), data.size()) {}

  std::uint8_t u8() {
    if (!need(1)) return 0;
    return data_[pos_++];
  }
  std::uint32_t u32() {
    if (!need(4)) return 0;
    std::uint32_t v = 0;
    for (int i = 0; i < 4; ++i) v |= static_cast<std::uint32_t>(data_[pos_++]) << (8 * i);
    return v;
  }
  std::uint64_t u64() {
    if (!need(8)) return 0;
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(data_[pos_++]) << (8 * i);
    return v;
  }
  Bytes bytes() {
    std::uint32_t len = u32();
    if (!need(len)) return {};
    Bytes out(data_.begin() + pos_, data_.begin() + pos_ + len);
    pos_ += len;
    return out;
  }
  std::string str() {
    std::uint32_t len = u32();
    if (!need(len)) return {};
    std::string out(reinterpret_cast<const char*>(data_.data()) + pos_, len);
    pos_ += len;
    return out;
  }
  Hash32 hash() {
    Hash32 h{};
    if (!need(32)) return h;
    std::memcpy(h.data(), data_.data() + pos_, 32);
    pos_ += 32;
    return h;
  }

  bool ok() const { return ok_; }
  bool atEnd() const { return ok_ && pos_ == data_.size(); }
  std::size_t remaining() const { return data_.size() - pos_; }

 private:
  bool need(std::size_t n) {
    if (!ok_ || data_.size() - pos_ < n) {
      ok_ = false;
      return false;
    }
    return true;
  }

  std::span<const std::uint8_t> data_;
  std::size_t pos_ = 0;
  bool ok_ = true;
};

// SplitMix64. Fixed constants; every seeded random choice in the simulator
// flows through this generator so runs are reproducible bit for bit.
struct SplitMix64 {
  std::uint64_t state = 0;

  explicit SplitMix64(std::uint64_t seed = 0) : state(seed) {}

  std::uint64_t next() {
    state += 0x9e3779b97f4a7c15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, bound). Modulo bias is irrelevant at 64-bit width for the
  // small bounds used here.
  std::uint64_t below(std::uint64_t bound) { return next() % bound; }

  // Uniform double in [0, 1).
  double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

}  // namespace bridgesim
