#pragma once

#include <map>

#include "bridgesim/tss.hpp"

namespace bridgesim {

// Asset-register chain in the style of privacy coins with a bridge hook:
// burning reduces supply and carries the bridge target in a service entry;
// emitting mints against a group signature. An emit transaction embeds the
// source deposit it pays out, which makes replays collide on the txHash.
class BurnEmitChain {
 public:
  struct EmitArgs {
    std::string assetId;
    std::uint64_t amount = 0;
    std::string recipient;
    std::string srcChainId;
    Hash32 srcTxHash{};
    std::uint64_t srcTxNonce = 0;

    friend bool operator==(const EmitArgs&, const EmitArgs&) = default;
  };

  struct TxRecord {
    enum class Kind : std::uint8_t { burn, emit, other };
    Kind kind = Kind::other;
    std::string assetId;
    std::uint64_t amount = 0;
    std::string sender;
    std::string recipient;
    std::vector<Bytes> serviceEntries;
    EmitArgs emitArgs;
    Hash32 txHash{};
    std::uint64_t inclusionHeight = 0;
    bool mined = false;
  };

  struct TxView {
    const TxRecord* record = nullptr;
    std::int64_t confirmations = 0;
  };

  BurnEmitChain(std::string chainId, GroupKey groupKey);

  const std::string& chainId() const { return chainId_; }

  void createAsset(const std::string& assetId,
                   const std::map<std::string, std::uint64_t>& balances);

  Result<Hash32> submitBurn(const std::string& sender, const std::string& assetId,
                            std::uint64_t amount, std::vector<Bytes> serviceEntries);
  Result<Hash32> submitOther(const std::string& sender, std::vector<Bytes> serviceEntries);

  Bytes serializeEmit(const EmitArgs& args) const;
  Result<Hash32> submitEmit(const EmitArgs& args, const Bytes& signature);

  Result<TxView> getTransaction(const Hash32& txHash) const;
  std::uint64_t advanceBlock();
  std::uint64_t height() const { return height_; }

  std::uint64_t supply(const std::string& assetId) const;
  std::uint64_t balance(const std::string& assetId, const std::string& addr) const;
  std::uint64_t balanceTotal(const std::string& assetId) const;
  std::uint64_t genesisSupply(const std::string& assetId) const;
  std::vector<std::string> assetIds() const;
  const std::map<Hash32, TxRecord>& transactions() const { return txs_; }

 private:
  Hash32 nextTxHash();
  Hash32 recordTx(TxRecord rec);

  std::string chainId_;
  GroupKey groupKey_;

  std::uint64_t height_ = 0;
  std::uint64_t txSeq_ = 0;
  std::map<Hash32, TxRecord> txs_;
  std::vector<Hash32> pending_;
  std::map<std::string, std::uint64_t> supply_;
  std::map<std::string, std::uint64_t> genesisSupply_;
  std::map<std::string, std::map<std::string, std::uint64_t>> balances_;
};

}  // namespace bridgesim
