#pragma once

#include <map>
#include <tuple>

#include "bridgesim/common.hpp"
#include "bridgesim/crypto.hpp"

namespace bridgesim {

enum class ChainKind { evm, utxo, burnEmit };

const char* chainKindName(ChainKind k);
std::optional<ChainKind> chainKindFromName(const std::string& name);

// A deposit is identified by the chain it happened on, the hash of the
// transaction that carried it, and a nonce disambiguating multiple deposits
// inside one transaction (event index on EVM, output index on UTXO chains).
struct DepositIdentifier {
  std::string chainId;
  Hash32 txHash{};
  std::uint64_t txNonce = 0;

  std::string canonical() const;
  static std::optional<DepositIdentifier> parse(const std::string& text);

  friend bool operator==(const DepositIdentifier&, const DepositIdentifier&) = default;
  friend bool operator<(const DepositIdentifier& a, const DepositIdentifier& b) {
    return std::tie(a.chainId, a.txHash, a.txNonce) < std::tie(b.chainId, b.txHash, b.txNonce);
  }
};

// Everything a validator learns about a deposit by inspecting the source
// chain. `sender` is informational; it is excluded from the sign hash so a
// withdrawal contract can recompute the hash without knowing it.
struct DepositData {
  std::string sourceChainId;
  Hash32 depositTxHash{};
  std::uint64_t txNonce = 0;
  std::string sender;
  std::string tokenAddr;
  std::uint64_t amount = 0;
  std::string targetChainId;
  std::string targetAddr;

  friend bool operator==(const DepositData&, const DepositData&) = default;
};

using SignHashes = std::vector<Hash32>;

struct WithdrawalData {
  SignHashes signHash;
  std::vector<int> signers;
  std::optional<Bytes> signature;
  std::optional<Hash32> withdrawalTxHash;
};

enum class RequestStatus { invalid, pending, processing, processed, finalized };

const char* statusName(RequestStatus s);

// Events that drive the request state machine. A valid threshold signature
// moves any not-yet-processed request straight to processed: a validator can
// be convinced by the signature alone, even if it never saw the proposal.
enum class StatusEvent {
  DepositVerified,
  SignStartDelivered,
  ValidSignatureDelivered,
  SigningFailed,
  WithdrawalSubmitted,
};

const char* statusEventName(StatusEvent e);

Result<RequestStatus> statusTransition(RequestStatus from, StatusEvent event);

struct RequestData {
  DepositIdentifier depositId;
  std::optional<DepositData> depositData;
  WithdrawalData withdrawalData;
  RequestStatus status = RequestStatus::invalid;
};

// All protocol timing is expressed in simulator ticks. The defaults mirror a
// deployment with a 1s tick: 5s acceptance window inside a 10s consensus
// phase, 10s signing phase, 10s finalization phase.
struct ProtocolParams {
  int n = 4;
  int t = 1;
  int committeeSize = 0;  // 0 means t + 1

  Tick acceptanceBoundary = 5;
  Tick consensusBoundary = 10;
  Tick signBoundary = 10;
  Tick finalizeBoundary = 10;

  int committee() const { return committeeSize > 0 ? committeeSize : t + 1; }
  Tick sessionTicks() const { return consensusBoundary + signBoundary + finalizeBoundary; }
};

// Hash a withdrawal request into the message(s) the committee signs. Every
// variable-length field is length-prefixed so distinct field values can never
// produce the same byte stream.
Hash32 canonicalFieldHash(const DepositData& d);

// Per-input sighash for UTXO transactions: core bytes of the transaction,
// the input index, and the script bytes of the output being spent.
Hash32 sighashForInput(std::span<const std::uint8_t> coreTx, std::uint32_t index,
                       std::span<const std::uint8_t> prevoutScript);

// Dispatch by target kind: EVM targets sign the canonical field hash, burn/
// emit targets sign the hash of the emit transaction preimage, UTXO targets
// sign one sighash per transaction input.
SignHashes canonicalSignHash(const DepositData& d, ChainKind targetKind,
                             const Bytes& txPreimage,
                             const std::vector<Bytes>& prevoutScripts = {});

// Target descriptor embedded in deposits (OP_RETURN payload on UTXO chains,
// service entry on burn/emit chains).
Bytes encodeTargetInfo(const std::string& targetChainId, const std::string& targetAddr);
Result<std::pair<std::string, std::string>> decodeTargetInfo(std::span<const std::uint8_t> data);

}  // namespace bridgesim
