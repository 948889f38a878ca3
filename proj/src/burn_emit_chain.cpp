#include "bridgesim/burn_emit_chain.hpp"

namespace bridgesim {

BurnEmitChain::BurnEmitChain(std::string chainId, GroupKey groupKey)
    : chainId_(std::move(chainId)), groupKey_(std::move(groupKey)) {}

void BurnEmitChain::createAsset(const std::string& assetId,
                                const std::map<std::string, std::uint64_t>& balances) {
  std::uint64_t total = 0;
  for (const auto& [addr, v] : balances) {
    balances_[assetId][addr] += v;
    total += v;
  }
  supply_[assetId] += total;
  genesisSupply_[assetId] += total;
}

Hash32 BurnEmitChain::nextTxHash() {
  BinWriter w;
  w.str(chainId_);
  w.str("tx");
  w.u64(txSeq_++);
  return sha256(w.buffer());
}

Hash32 BurnEmitChain::recordTx(TxRecord rec) {
  Hash32 h = rec.txHash;
  pending_.push_back(h);
  txs_.emplace(h, std::move(rec));
  return h;
}

Result<Hash32> BurnEmitChain::submitBurn(const std::string& sender, const std::string& assetId,
                                         std::uint64_t amount,
                                         std::vector<Bytes> serviceEntries) {
  if (amount == 0) return Err::ZeroAmount;
  if (sender.empty()) return Err::EmptyAddress;
  auto& bal = balances_[assetId][sender];
  if (bal < amount) return Err::InsufficientFunds;
  bal -= amount;
  supply_[assetId] -= amount;

  TxRecord rec;
  rec.kind = TxRecord::Kind::burn;
  rec.assetId = assetId;
  rec.amount = amount;
  rec.sender = sender;
  rec.serviceEntries = std::move(serviceEntries);
  rec.txHash = nextTxHash();
  return recordTx(std::move(rec));
}

Result<Hash32> BurnEmitChain::submitOther(const std::string& sender,
                                          std::vector<Bytes> serviceEntries) {
  TxRecord rec;
  rec.kind = TxRecord::Kind::other;
  rec.sender = sender;
  rec.serviceEntries = std::move(serviceEntries);
  rec.txHash = nextTxHash();
  return recordTx(std::move(rec));
}

Bytes BurnEmitChain::serializeEmit(const EmitArgs& args) const {
  BinWriter w;
  w.str("emit");
  w.str(chainId_);
  w.str(args.assetId);
  w.u64(args.amount);
  w.str(args.recipient);
  w.str(args.srcChainId);
  w.hash(args.srcTxHash);
  w.u64(args.srcTxNonce);
  return w.take();
}

Result<Hash32> BurnEmitChain::submitEmit(const EmitArgs& args, const Bytes& signature) {
  if (args.amount == 0) return Err::ZeroAmount;
  if (args.recipient.empty()) return Err::EmptyAddress;
  Bytes preimage = serializeEmit(args);
  Hash32 msg = sha256(preimage);
  if (!TssEngine::verify(groupKey_, {msg}, signature)) return Err::BadSignature;
  Hash32 txHash = msg;
  if (txs_.count(txHash)) return Err::DuplicateTx;

  supply_[args.assetId] += args.amount;
  balances_[args.assetId][args.recipient] += args.amount;

  TxRecord rec;
  rec.kind = TxRecord::Kind::emit;
  rec.assetId = args.assetId;
  rec.amount = args.amount;
  rec.recipient = args.recipient;
  rec.emitArgs = args;
  rec.txHash = txHash;
  return recordTx(std::move(rec));
}

Result<BurnEmitChain::TxView> BurnEmitChain::getTransaction(const Hash32& txHash) const {
  auto it = txs_.find(txHash);
  if (it == txs_.end() || !it->second.mined) return Err::NotFound;
  TxView view;
  view.record = &it->second;
  view.confirmations = static_cast<std::int64_t>(height_ - it->second.inclusionHeight) + 1;
  return view;
}

std::uint64_t BurnEmitChain::advanceBlock() {
  ++height_;
  for (const auto& h : pending_) {
    auto& rec = txs_.at(h);
    rec.mined = true;
    rec.inclusionHeight = height_;
  }
  pending_.clear();
  return height_;
}

std::uint64_t BurnEmitChain::supply(const std::string& assetId) const {
  auto it = supply_.find(assetId);
  return it == supply_.end() ? 0 : it->second;
}

std::uint64_t BurnEmitChain::balance(const std::string& assetId, const std::string& addr) const {
  auto a = balances_.find(assetId);
  if (a == balances_.end()) return 0;
  auto it = a->second.find(addr);
  return it == a->second.end() ? 0 : it->second;
}

std::uint64_t BurnEmitChain::balanceTotal(const std::string& assetId) const {
  std::uint64_t sum = 0;
  auto a = balances_.find(assetId);
  if (a == balances_.end()) return 0;
  for (const auto& [addr, v] : a->second) sum += v;
  return sum;
}

std::uint64_t BurnEmitChain::genesisSupply(const std::string& assetId) const {
  auto it = genesisSupply_.find(assetId);
  return it == genesisSupply_.end() ? 0 : it->second;
}

std::vector<std::string> BurnEmitChain::assetIds() const {
  std::vector<std::string> ids;
  for (const auto& [asset, total] : supply_) ids.push_back(asset);
  return ids;
}

}  // namespace bridgesim
