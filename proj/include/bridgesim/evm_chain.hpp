#pragma once

#include <map>
#include <set>

#include "bridgesim/tss.hpp"

namespace bridgesim {

// Account-based chain with a bridge contract. Transactions submitted during a
// tick are included in the block sealed by advanceBlock() at the end of that
// tick; until then lookups behave like an RPC node that has not seen the
// receipt yet.
class EvmChain {
 public:
  struct Event {
    enum class Kind : std::uint8_t { depositErc20, depositNative, withdrawal, other };
    Kind kind = Kind::other;
    std::string emitter;
    std::string sender;
    std::string tokenAddr;
    std::uint64_t amount = 0;
    std::string targetChainId;
    std::string targetAddr;
  };

  struct Tx {
    Hash32 txHash{};
    std::string from;
    std::uint64_t inclusionHeight = 0;
    bool mined = false;
    std::vector<Event> events;
  };

  struct TxView {
    const Tx* tx = nullptr;
    std::int64_t confirmations = 0;
  };

  struct WithdrawArgs {
    bool erc20 = true;
    std::string tokenAddr;
    std::uint64_t amount = 0;
    std::string receiver;
    std::string sourceChainId;
    Hash32 depositTxHash{};
    std::uint64_t depositTxNonce = 0;
  };

  struct WithdrawalRecord {
    Hash32 txHash{};
    Hash32 signHash{};
    WithdrawArgs args;
  };

  EvmChain(std::string chainId, std::string bridgeContract, GroupKey groupKey);

  const std::string& chainId() const { return chainId_; }
  const std::string& bridgeContract() const { return bridgeContract_; }

  // Genesis funding, used only by scenario setup.
  void creditNative(const std::string& addr, std::uint64_t amount);
  void creditToken(const std::string& token, const std::string& addr, std::uint64_t amount);

  Result<Hash32> depositErc20(const std::string& sender, const std::string& token,
                              std::uint64_t amount, const std::string& targetChainId,
                              const std::string& targetAddr);
  Result<Hash32> depositNative(const std::string& sender, std::uint64_t amount,
                               const std::string& targetChainId, const std::string& targetAddr);

  // Bridge contract withdrawal. The contract re-derives the sign hash from
  // the call arguments and accepts any submitter carrying a valid group
  // signature over it.
  Result<Hash32> withdraw(const WithdrawArgs& args, const Bytes& signature);

  Result<TxView> getTransaction(const Hash32& txHash) const;

  std::uint64_t advanceBlock();
  std::uint64_t height() const { return height_; }

  // Faulty-provider hook: records a transaction with arbitrary events and no
  // state effects, as a lying RPC endpoint would report it.
  Hash32 injectFabricatedTx(const std::string& from, std::vector<Event> events);

  // Ablation switch for the sign-hash replay guard.
  void setReplayProtection(bool enabled) { replayProtection_ = enabled; }

  std::uint64_t nativeBalance(const std::string& addr) const;
  std::uint64_t tokenBalance(const std::string& token, const std::string& addr) const;
  std::uint64_t nativeTotal() const;
  std::uint64_t tokenTotal(const std::string& token) const;
  std::vector<std::string> tokenIds() const;
  const std::vector<WithdrawalRecord>& withdrawals() const { return withdrawals_; }
  const std::set<Hash32>& usedSignHashes() const { return usedSignHashes_; }

 private:
  Hash32 nextTxHash();
  Hash32 recordTx(const std::string& from, std::vector<Event> events);

  std::string chainId_;
  std::string bridgeContract_;
  GroupKey groupKey_;
  bool replayProtection_ = true;

  std::uint64_t height_ = 0;
  std::uint64_t txSeq_ = 0;
  std::map<Hash32, Tx> txs_;
  std::vector<Hash32> pending_;
  std::map<std::string, std::uint64_t> native_;
  std::map<std::string, std::map<std::string, std::uint64_t>> tokens_;
  std::set<Hash32> usedSignHashes_;
  std::vector<WithdrawalRecord> withdrawals_;
};

}  // namespace bridgesim
