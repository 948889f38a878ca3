#include "bridgesim/common.hpp"

namespace bridgesim {

const char* errName(Err e) {
  switch (e) {
    case Err::None: return "None";
    case Err::IllegalTransition: return "IllegalTransition";
    case Err::NotFound: return "NotFound";
    case Err::NotConfirmed: return "NotConfirmed";
    case Err::NoSuchEvent: return "NoSuchEvent";
    case Err::WrongEventKind: return "WrongEventKind";
    case Err::WrongAddress: return "WrongAddress";
    case Err::MissingOpReturn: return "MissingOpReturn";
    case Err::MalformedOpReturn: return "MalformedOpReturn";
    case Err::NotABurn: return "NotABurn";
    case Err::BadServiceEntry: return "BadServiceEntry";
    case Err::ZeroAmount: return "ZeroAmount";
    case Err::EmptyAddress: return "EmptyAddress";
    case Err::InsufficientFunds: return "InsufficientFunds";
    case Err::BadSignature: return "BadSignature";
    case Err::AlreadyWithdrawn: return "AlreadyWithdrawn";
    case Err::DuplicateTx: return "DuplicateTx";
    case Err::UnknownTx: return "UnknownTx";
    case Err::DoubleSpend: return "DoubleSpend";
    case Err::BadWitness: return "BadWitness";
    case Err::MalformedTx: return "MalformedTx";
    case Err::IndexOutOfRange: return "IndexOutOfRange";
    case Err::DuplicateSession: return "DuplicateSession";
    case Err::UnknownSession: return "UnknownSession";
    case Err::NotASigner: return "NotASigner";
    case Err::TooFewSigners: return "TooFewSigners";
    case Err::MessageMismatch: return "MessageMismatch";
    case Err::SessionClosed: return "SessionClosed";
    case Err::DuplicateBroadcast: return "DuplicateBroadcast";
    case Err::NotDesignatedSender: return "NotDesignatedSender";
    case Err::UnsupportedChain: return "UnsupportedChain";
    case Err::InvalidTarget: return "InvalidTarget";
    case Err::NoPendingRequest: return "NoPendingRequest";
    case Err::ConfigError: return "ConfigError";
    case Err::Truncated: return "Truncated";
  }
  return "Unknown";
}

std::string toHex(std::span<const std::uint8_t> data) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  out.reserve(data.size() * 2);
  for (std::uint8_t b : data) {
    out.push_back(digits[b >> 4]);
    out.push_back(digits[b & 0xf]);
  }
  return out;
}

static int hexVal(char c) {
  if (c >= '0' && c <= '9') return c - '0';
  if (c >= 'a' && c <= 'f') return c - 'a' + 10;
  if (c >= 'A' && c <= 'F') return c - 'A' + 10;
  return -1;
}

std::optional<Bytes> fromHex(const std::string& hex) {
  if (hex.size() % 2 != 0) return std::nullopt;
  Bytes out;
  out.reserve(hex.size() / 2);
  for (std::size_t i = 0; i < hex.size(); i += 2) {
    int hi = hexVal(hex[i]);
    int lo = hexVal(hex[i + 1]);
    if (hi < 0 || lo < 0) return std::nullopt;
    out.push_back(static_cast<std::uint8_t>((hi << 4) | lo));
  }
  return out;
}

}  // namespace bridgesim
