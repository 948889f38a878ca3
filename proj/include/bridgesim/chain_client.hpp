#pragma once

#include <memory>

#include "bridgesim/burn_emit_chain.hpp"
#include "bridgesim/evm_chain.hpp"
#include "bridgesim/utxo_chain.hpp"

namespace bridgesim {

// Read/write access to one chain, as seen by one validator. Deposit
// verification is local: a client only ever consults its own chain view.
// Instances are per validator because in-flight withdrawal bookkeeping
// (locked UTXO inputs) is validator-local state.
class ChainClient {
 public:
  virtual ~ChainClient() = default;

  virtual ChainKind kind() const = 0;
  virtual const std::string& chainId() const = 0;
  virtual int requiredConfirmations() const = 0;

  // Resolves a deposit identifier against the chain and extracts the
  // transfer it encodes.
  virtual Result<DepositData> getDepositData(const DepositIdentifier& id) const = 0;

  // The message(s) the signing committee must sign to execute this
  // withdrawal on this (target) chain.
  virtual Result<SignHashes> getHashOfWithdrawal(const DepositData& d) const = 0;

  // Executes the withdrawal on this (target) chain with a group signature.
  virtual Result<Hash32> submitWithdrawal(const DepositData& d, const Bytes& signature) = 0;

  virtual bool validTargetAddress(const std::string& addr) const = 0;
  virtual bool validTargetAmount(std::uint64_t amount) const { return amount > 0; }

  // Housekeeping between sessions; only meaningful for UTXO clients.
  virtual void pruneLocks() {}
};

class EvmChainClient final : public ChainClient {
 public:
  EvmChainClient(EvmChain* chain, int requiredConfirmations);

  ChainKind kind() const override { return ChainKind::evm; }
  const std::string& chainId() const override { return chain_->chainId(); }
  int requiredConfirmations() const override { return required_; }

  Result<DepositData> getDepositData(const DepositIdentifier& id) const override;
  Result<SignHashes> getHashOfWithdrawal(const DepositData& d) const override;
  Result<Hash32> submitWithdrawal(const DepositData& d, const Bytes& signature) override;
  bool validTargetAddress(const std::string& addr) const override;

  static EvmChain::WithdrawArgs withdrawArgs(const DepositData& d);

 private:
  EvmChain* chain_;
  int required_;
};

// Greedy coin selection in lexicographic (txid, vout) order over the owner's
// confirmed outputs, skipping anything in `excluded`.
Result<std::vector<Outpoint>> selectUtxos(const UtxoChain& chain, const std::string& owner,
                                          std::uint64_t amount,
                                          const std::set<Outpoint>& excluded);

class UtxoChainClient final : public ChainClient {
 public:
  UtxoChainClient(UtxoChain* chain, int requiredConfirmations);

  ChainKind kind() const override { return ChainKind::utxo; }
  const std::string& chainId() const override { return chain_->chainId(); }
  int requiredConfirmations() const override { return required_; }

  Result<DepositData> getDepositData(const DepositIdentifier& id) const override;

  // Deterministic unsigned withdrawal transaction: pure function of the
  // confirmed chain state, the locked-input set and the deposit.
  Result<UtxoTx> getWithdrawalTx(const DepositData& d) const;

  static Result<Hash32> computeSighash(const UtxoTx& tx, std::uint32_t index,
                                       const UtxoChain& chain);

  Result<SignHashes> getHashOfWithdrawal(const DepositData& d) const override;

  // Splits a signature blob into per-input witnesses.
  static Result<UtxoTx> injectSignatures(UtxoTx tx, const Bytes& signature);

  Result<Hash32> submitWithdrawal(const DepositData& d, const Bytes& signature) override;
  bool validTargetAddress(const std::string& addr) const override;
  void pruneLocks() override;

  const std::map<Outpoint, Hash32>& lockedInputs() const { return locked_; }

 private:
  UtxoChain* chain_;
  int required_;
  std::map<Outpoint, Hash32> locked_;  // outpoint -> txid of the lock holder
};

class BurnEmitChainClient final : public ChainClient {
 public:
  BurnEmitChainClient(BurnEmitChain* chain, int requiredConfirmations);

  ChainKind kind() const override { return ChainKind::burnEmit; }
  const std::string& chainId() const override { return chain_->chainId(); }
  int requiredConfirmations() const override { return required_; }

  Result<DepositData> getDepositData(const DepositIdentifier& id) const override;
  BurnEmitChain::EmitArgs getWithdrawalTx(const DepositData& d) const;
  Result<SignHashes> getHashOfWithdrawal(const DepositData& d) const override;
  Result<Hash32> submitWithdrawal(const DepositData& d, const Bytes& signature) override;
  bool validTargetAddress(const std::string& addr) const override;

 private:
  BurnEmitChain* chain_;
  int required_;
};

}  // namespace bridgesim
