#include "bridgesim/evm_chain.hpp"

namespace bridgesim {

EvmChain::EvmChain(std::string chainId, std::string bridgeContract, GroupKey groupKey)
    : chainId_(std::move(chainId)),
      bridgeContract_(std::move(bridgeContract)),
      groupKey_(std::move(groupKey)) {}

void EvmChain::creditNative(const std::string& addr, std::uint64_t amount) {
  native_[addr] += amount;
}

void EvmChain::creditToken(const std::string& token, const std::string& addr,
                           std::uint64_t amount) {
  tokens_[token][addr] += amount;
}

Hash32 EvmChain::nextTxHash() {
  BinWriter w;
  w.str(chainId_);
  w.str("tx");
  w.u64(txSeq_++);
  return sha256(w.buffer());
}

Hash32 EvmChain::recordTx(const std::string& from, std::vector<Event> events) {
  Tx tx;
  tx.txHash = nextTxHash();
  tx.from = from;
  tx.events = std::move(events);
  pending_.push_back(tx.txHash);
  Hash32 h = tx.txHash;
  txs_.emplace(h, std::move(tx));
  return h;
}

Result<Hash32> EvmChain::depositErc20(const std::string& sender, const std::string& token,
                                      std::uint64_t amount, const std::string& targetChainId,
                                      const std::string& targetAddr) {
  if (amount == 0) return Err::ZeroAmount;
  if (token.empty() || sender.empty()) return Err::EmptyAddress;
  auto& balances = tokens_[token];
  if (balances[sender] < amount) return Err::InsufficientFunds;
  balances[sender] -= amount;
  balances[bridgeContract_] += amount;
  Event ev;
  ev.kind = Event::Kind::depositErc20;
  ev.emitter = bridgeContract_;
  ev.sender = sender;
  ev.tokenAddr = token;
  ev.amount = amount;
  ev.targetChainId = targetChainId;
  ev.targetAddr = targetAddr;
  return recordTx(sender, {ev});
}

Result<Hash32> EvmChain::depositNative(const std::string& sender, std::uint64_t amount,
                                       const std::string& targetChainId,
                                       const std::string& targetAddr) {
  if (amount == 0) return Err::ZeroAmount;
  if (sender.empty()) return Err::EmptyAddress;
  if (native_[sender] < amount) return Err::InsufficientFunds;
  native_[sender] -= amount;
  native_[bridgeContract_] += amount;
  Event ev;
  ev.kind = Event::Kind::depositNative;
  ev.emitter = bridgeContract_;
  ev.sender = sender;
  ev.amount = amount;
  ev.targetChainId = targetChainId;
  ev.targetAddr = targetAddr;
  return recordTx(sender, {ev});
}

Result<Hash32> EvmChain::withdraw(const WithdrawArgs& args, const Bytes& signature) {
  if (args.amount == 0) return Err::ZeroAmount;
  if (args.receiver.empty() || (args.erc20 && args.tokenAddr.empty())) return Err::EmptyAddress;

  DepositData d;
  d.sourceChainId = args.sourceChainId;
  d.depositTxHash = args.depositTxHash;
  d.txNonce = args.depositTxNonce;
  d.tokenAddr = args.tokenAddr;
  d.amount = args.amount;
  d.targetChainId = chainId_;
  d.targetAddr = args.receiver;
  Hash32 signHash = canonicalFieldHash(d);

  if (!TssEngine::verify(groupKey_, {signHash}, signature)) return Err::BadSignature;
  if (replayProtection_ && usedSignHashes_.count(signHash)) return Err::AlreadyWithdrawn;

  if (args.erc20) {
    auto& balances = tokens_[args.tokenAddr];
    if (balances[bridgeContract_] < args.amount) return Err::InsufficientFunds;
    balances[bridgeContract_] -= args.amount;
    balances[args.receiver] += args.amount;
  } else {
    if (native_[bridgeContract_] < args.amount) return Err::InsufficientFunds;
    native_[bridgeContract_] -= args.amount;
    native_[args.receiver] += args.amount;
  }
  usedSignHashes_.insert(signHash);

  Event ev;
  ev.kind = Event::Kind::withdrawal;
  ev.emitter = bridgeContract_;
  ev.tokenAddr = args.tokenAddr;
  ev.amount = args.amount;
  ev.targetAddr = args.receiver;
  Hash32 txHash = recordTx(args.receiver, {ev});
  withdrawals_.push_back({txHash, signHash, args});
  return txHash;
}

Result<EvmChain::TxView> EvmChain::getTransaction(const Hash32& txHash) const {
  auto it = txs_.find(txHash);
  if (it == txs_.end() || !it->second.mined) return Err::NotFound;
  TxView view;
  view.tx = &it->second;
  view.confirmations = static_cast<std::int64_t>(height_ - it->second.inclusionHeight) + 1;
  return view;
}

std::uint64_t EvmChain::advanceBlock() {
  ++height_;
  for (const auto& h : pending_) {
    auto& tx = txs_.at(h);
    tx.mined = true;
    tx.inclusionHeight = height_;
  }
  pending_.clear();
  return height_;
}

Hash32 EvmChain::injectFabricatedTx(const std::string& from, std::vector<Event> events) {
  return recordTx(from, std::move(events));
}

std::uint64_t EvmChain::nativeBalance(const std::string& addr) const {
  auto it = native_.find(addr);
  return it == native_.end() ? 0 : it->second;
}

std::uint64_t EvmChain::tokenBalance(const std::string& token, const std::string& addr) const {
  auto t = tokens_.find(token);
  if (t == tokens_.end()) return 0;
  auto it = t->second.find(addr);
  return it == t->second.end() ? 0 : it->second;
}

std::uint64_t EvmChain::nativeTotal() const {
  std::uint64_t sum = 0;
  for (const auto& [addr, v] : native_) sum += v;
  return sum;
}

std::vector<std::string> EvmChain::tokenIds() const {
  std::vector<std::string> ids;
  for (const auto& [token, balances] : tokens_) ids.push_back(token);
  return ids;
}

std::uint64_t EvmChain::tokenTotal(const std::string& token) const {
  std::uint64_t sum = 0;
  auto t = tokens_.find(token);
  if (t == tokens_.end()) return 0;
  for (const auto& [addr, v] : t->second) sum += v;
  return sum;
}

}  // namespace bridgesim
