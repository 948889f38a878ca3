#include "bridgesim/model.hpp"

#include <charconv>

namespace bridgesim {

const char* chainKindName(ChainKind k) {
  switch (k) {
    case ChainKind::evm: return "evm";
    case ChainKind::utxo: return "utxo";
    case ChainKind::burnEmit: return "burnEmit";
  }
  return "unknown";
}

std::optional<ChainKind> chainKindFromName(const std::string& name) {
  if (name == "evm") return ChainKind::evm;
  if (name == "utxo") return ChainKind::utxo;
  if (name == "burnEmit") return ChainKind::burnEmit;
  return std::nullopt;
}

std::string DepositIdentifier::canonical() const {
  return chainId + ":" + toHex(txHash) + ":" + std::to_string(txNonce);
}

std::optional<DepositIdentifier> DepositIdentifier::parse(const std::string& text) {
  auto noncePos = text.rfind(':');
  if (noncePos == std::string::npos || noncePos + 1 >= text.size()) return std::nullopt;
  auto hashPos = text.rfind(':', noncePos - 1);
  if (hashPos == std::string::npos || hashPos == 0) return std::nullopt;

  DepositIdentifier id;
  id.chainId = text.substr(0, hashPos);
  auto hashHex = text.substr(hashPos + 1, noncePos - hashPos - 1);
  auto raw = fromHex(hashHex);
  if (!raw || raw->size() != 32) return std::nullopt;
  std::copy(raw->begin(), raw->end(), id.txHash.begin());

  const char* first = text.data() + noncePos + 1;
  const char* last = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(first, last, id.txNonce);
  if (ec != std::errc{} || ptr != last) return std::nullopt;
  return id;
}

const char* statusName(RequestStatus s) {
  switch (s) {
    case RequestStatus::invalid: return "invalid";
    case RequestStatus::pending: return "pending";
    case RequestStatus::processing: return "processing";
    case RequestStatus::processed: return "processed";
    case RequestStatus::finalized: return "finalized";
  }
  return "unknown";
}

const char* statusEventName(StatusEvent e) {
  switch (e) {
    case StatusEvent::DepositVerified: return "DepositVerified";
    case StatusEvent::SignStartDelivered: return "SignStartDelivered";
    case StatusEvent::ValidSignatureDelivered: return "ValidSignatureDelivered";
    case StatusEvent::SigningFailed: return "SigningFailed";
    case StatusEvent::WithdrawalSubmitted: return "WithdrawalSubmitted";
  }
  return "unknown";
}

Result<RequestStatus> statusTransition(RequestStatus from, StatusEvent event) {
  switch (event) {
    case StatusEvent::DepositVerified:
      if (from == RequestStatus::invalid) return RequestStatus::pending;
      break;
    case StatusEvent::SignStartDelivered:
      if (from == RequestStatus::pending) return RequestStatus::processing;
      break;
    case StatusEvent::ValidSignatureDelivered:
      if (from == RequestStatus::invalid || from == RequestStatus::pending ||
          from == RequestStatus::processing)
        return RequestStatus::processed;
      break;
    case StatusEvent::SigningFailed:
      if (from == RequestStatus::processing) return RequestStatus::pending;
      break;
    case StatusEvent::WithdrawalSubmitted:
      if (from == RequestStatus::processed) return RequestStatus::finalized;
      break;
  }
  return Err::IllegalTransition;
}

Hash32 canonicalFieldHash(const DepositData& d) {
  BinWriter w;
  w.str(d.sourceChainId);
  w.hash(d.depositTxHash);
  w.u64(d.txNonce);
  w.str(d.targetChainId);
  w.str(d.tokenAddr);
  w.u64(d.amount);
  w.str(d.targetAddr);
  return sha256(w.buffer());
}

Hash32 sighashForInput(std::span<const std::uint8_t> coreTx, std::uint32_t index,
                       std::span<const std::uint8_t> prevoutScript) {
  BinWriter w;
  w.raw(coreTx);
  w.u32(index);
  w.raw(prevoutScript);
  return sha256(w.buffer());
}

SignHashes canonicalSignHash(const DepositData& d, ChainKind targetKind, const Bytes& txPreimage,
                             const std::vector<Bytes>& prevoutScripts) {
  switch (targetKind) {
    case ChainKind::evm:
      return {canonicalFieldHash(d)};
    case ChainKind::burnEmit:
      return {sha256(txPreimage)};
    case ChainKind::utxo: {
      SignHashes out;
      out.reserve(prevoutScripts.size());
      for (std::uint32_t i = 0; i < prevoutScripts.size(); ++i)
        out.push_back(sighashForInput(txPreimage, i,
                                      std::span<const std::uint8_t>(prevoutScripts[i].data(),
                                                                    prevoutScripts[i].size())));
      return out;
    }
  }
  return {};
}

Bytes encodeTargetInfo(const std::string& targetChainId, const std::string& targetAddr) {
  BinWriter w;
  w.str(targetChainId);
  w.str(targetAddr);
  return w.take();
}

Result<std::pair<std::string, std::string>> decodeTargetInfo(std::span<const std::uint8_t> data) {
  BinReader r(data);
  auto chain = r.str();
  auto addr = r.str();
  if (!r.atEnd() || chain.empty()) return Err::Truncated;
  return std::make_pair(chain, addr);
}

}  // namespace bridgesim
