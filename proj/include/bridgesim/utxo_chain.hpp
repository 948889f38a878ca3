#pragma once

#include <map>
#include <set>

#include "bridgesim/tss.hpp"

namespace bridgesim {

struct Outpoint {
  Hash32 txid{};
  std::uint32_t vout = 0;

  friend bool operator==(const Outpoint&, const Outpoint&) = default;
  friend bool operator<(const Outpoint& a, const Outpoint& b) {
    return std::tie(a.txid, a.vout) < std::tie(b.txid, b.vout);
  }
};

// An output is either a payment (address, value) or a data carrier
// (opReturn set, unspendable, excluded from the UTXO set).
struct UtxoOutput {
  std::uint64_t value = 0;
  std::string address;
  std::optional<Bytes> opReturn;
};

struct WitnessEntry {
  enum class Kind : std::uint8_t { none = 0, clientMark = 1, groupSig = 2 };
  Kind kind = Kind::none;
  Bytes data;
};

struct UtxoTx {
  std::vector<Outpoint> vin;
  std::vector<UtxoOutput> vout;
  std::vector<WitnessEntry> witnesses;  // parallel to vin, not part of the txid
};

// Witness-free serialization; the txid commits to it.
Bytes coreSerialize(const UtxoTx& tx);
Hash32 txidOf(const UtxoTx& tx);
Bytes scriptBytes(const UtxoOutput& out);

// UTXO chain with zero fees (inputs must exactly equal outputs), a mempool
// that confirms at the end of each tick, and a reorg hook that unwinds a
// confirmed transaction. Spending an output owned by the bridge address
// requires a group signature over that input's sighash.
class UtxoChain {
 public:
  struct TxRecord {
    UtxoTx tx;
    std::uint64_t inclusionHeight = 0;
    bool mined = false;
    bool reorged = false;
  };

  struct TxView {
    const TxRecord* record = nullptr;
    std::int64_t confirmations = 0;
  };

  UtxoChain(std::string chainId, std::string bridgeAddress, GroupKey groupKey);

  const std::string& chainId() const { return chainId_; }
  const std::string& bridgeAddress() const { return bridgeAddress_; }

  // Genesis funding, used only by scenario setup.
  Outpoint addGenesisOutput(const std::string& address, std::uint64_t value);

  Result<Hash32> submitTx(const UtxoTx& tx);
  Result<TxView> getTransaction(const Hash32& txid) const;

  // Unwinds a confirmed transaction: its inputs return to the UTXO set, its
  // outputs leave it. Refused when any output has already been spent; the
  // transaction does not come back on its own afterwards.
  Status injectReorg(const Hash32& txid);

  std::uint64_t advanceBlock();
  std::uint64_t height() const { return height_; }

  const std::map<Outpoint, UtxoOutput>& utxoSet() const { return utxoSet_; }
  const std::set<Outpoint>& mempoolSpent() const { return mempoolSpent_; }
  Result<UtxoOutput> lookupOutput(const Outpoint& op) const;
  const std::map<Hash32, TxRecord>& transactions() const { return txs_; }
  std::uint64_t genesisTotal() const { return genesisTotal_; }
  std::uint64_t utxoTotal() const;

 private:
  std::string chainId_;
  std::string bridgeAddress_;
  GroupKey groupKey_;

  std::uint64_t height_ = 0;
  std::uint64_t genesisSeq_ = 0;
  std::uint64_t genesisTotal_ = 0;
  std::map<Hash32, TxRecord> txs_;
  std::vector<Hash32> mempool_;
  std::set<Outpoint> mempoolSpent_;
  std::map<Outpoint, UtxoOutput> utxoSet_;
};

}  // namespace bridgesim
