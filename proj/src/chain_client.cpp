#include "bridgesim/chain_client.hpp"

namespace bridgesim {

EvmChainClient::EvmChainClient(EvmChain* chain, int requiredConfirmations)
    : chain_(chain), required_(requiredConfirmations) {}

Result<DepositData> EvmChainClient::getDepositData(const DepositIdentifier& id) const {
  auto view = chain_->getTransaction(id.txHash);
  if (!view) return view.error();
  if (view->confirmations < required_) return Err::NotConfirmed;
  const auto& events = view->tx->events;
  if (id.txNonce >= events.size()) return Err::NoSuchEvent;
  const auto& ev = events[id.txNonce];
  if (ev.emitter != chain_->bridgeContract()) return Err::WrongAddress;
  if (ev.kind != EvmChain::Event::Kind::depositErc20 &&
      ev.kind != EvmChain::Event::Kind::depositNative)
    return Err::WrongEventKind;

  DepositData d;
  d.sourceChainId = chain_->chainId();
  d.depositTxHash = id.txHash;
  d.txNonce = id.txNonce;
  d.sender = ev.sender;
  d.tokenAddr = ev.kind == EvmChain::Event::Kind::depositErc20 ? ev.tokenAddr : std::string{};
  d.amount = ev.amount;
  d.targetChainId = ev.targetChainId;
  d.targetAddr = ev.targetAddr;
  return d;
}

Result<SignHashes> EvmChainClient::getHashOfWithdrawal(const DepositData& d) const {
  return SignHashes{canonicalFieldHash(d)};
}

EvmChain::WithdrawArgs EvmChainClient::withdrawArgs(const DepositData& d) {
  EvmChain::WithdrawArgs args;
  args.erc20 = !d.tokenAddr.empty();
  args.tokenAddr = d.tokenAddr;
  args.amount = d.amount;
  args.receiver = d.targetAddr;
  args.sourceChainId = d.sourceChainId;
  args.depositTxHash = d.depositTxHash;
  args.depositTxNonce = d.txNonce;
  return args;
}

Result<Hash32> EvmChainClient::submitWithdrawal(const DepositData& d, const Bytes& signature) {
  return chain_->withdraw(withdrawArgs(d), signature);
}

bool EvmChainClient::validTargetAddress(const std::string& addr) const {
  return addr.size() > 2 && addr[0] == '0' && addr[1] == 'x';
}

Result<std::vector<Outpoint>> selectUtxos(const UtxoChain& chain, const std::string& owner,
                                          std::uint64_t amount,
                                          const std::set<Outpoint>& excluded) {
  std::vector<Outpoint> picked;
  std::uint64_t total = 0;
  for (const auto& [op, out] : chain.utxoSet()) {
    if (out.address != owner || excluded.count(op)) continue;
    picked.push_back(op);
    total += out.value;
    if (total >= amount) return picked;
  }
  return Err::InsufficientFunds;
}

UtxoChainClient::UtxoChainClient(UtxoChain* chain, int requiredConfirmations)
    : chain_(chain), required_(requiredConfirmations) {}

Result<DepositData> UtxoChainClient::getDepositData(const DepositIdentifier& id) const {
  auto view = chain_->getTransaction(id.txHash);
  if (!view) return view.error();
  if (view->confirmations < required_) return Err::NotConfirmed;
  const auto& tx = view->record->tx;
  if (id.txNonce >= tx.vout.size()) return Err::NoSuchEvent;
  const auto& payout = tx.vout[id.txNonce];
  if (payout.opReturn || payout.address != chain_->bridgeAddress()) return Err::WrongAddress;
  if (id.txNonce + 1 >= tx.vout.size() || !tx.vout[id.txNonce + 1].opReturn)
    return Err::MissingOpReturn;
  const Bytes& payload = *tx.vout[id.txNonce + 1].opReturn;
  auto target = decodeTargetInfo(std::span<const std::uint8_t>(payload.data(), payload.size()));
  if (!target) return Err::MalformedOpReturn;

  DepositData d;
  d.sourceChainId = chain_->chainId();
  d.depositTxHash = id.txHash;
  d.txNonce = id.txNonce;
  if (!tx.vin.empty()) {
    auto prev = chain_->lookupOutput(tx.vin[0]);
    if (prev) d.sender = prev->address;
  }
  d.amount = payout.value;
  d.targetChainId = target->first;
  d.targetAddr = target->second;
  return d;
}

Result<UtxoTx> UtxoChainClient::getWithdrawalTx(const DepositData& d) const {
  std::set<Outpoint> excluded;
  for (const auto& [op, txid] : locked_) excluded.insert(op);
  auto picked = selectUtxos(*chain_, chain_->bridgeAddress(), d.amount, excluded);
  if (!picked) return picked.error();

  UtxoTx tx;
  tx.vin = *picked;
  std::uint64_t total = 0;
  for (const auto& op : tx.vin) total += chain_->utxoSet().at(op).value;
  tx.vout.push_back({d.amount, d.targetAddr, std::nullopt});
  if (total > d.amount) tx.vout.push_back({total - d.amount, chain_->bridgeAddress(), std::nullopt});
  tx.witnesses.resize(tx.vin.size());
  return tx;
}

Result<Hash32> UtxoChainClient::computeSighash(const UtxoTx& tx, std::uint32_t index,
                                               const UtxoChain& chain) {
  if (index >= tx.vin.size()) return Err::IndexOutOfRange;
  auto prev = chain.lookupOutput(tx.vin[index]);
  if (!prev) return prev.error();
  Bytes core = coreSerialize(tx);
  Bytes script = scriptBytes(*prev);
  return sighashForInput(core, index, script);
}

Result<SignHashes> UtxoChainClient::getHashOfWithdrawal(const DepositData& d) const {
  auto tx = getWithdrawalTx(d);
  if (!tx) return tx.error();
  SignHashes hashes;
  hashes.reserve(tx->vin.size());
  for (std::uint32_t i = 0; i < tx->vin.size(); ++i) {
    auto h = computeSighash(*tx, i, *chain_);
    if (!h) return h.error();
    hashes.push_back(*h);
  }
  return hashes;
}

Result<UtxoTx> UtxoChainClient::injectSignatures(UtxoTx tx, const Bytes& signature) {
  BinReader r(signature);
  std::uint32_t count = r.u32();
  if (!r.ok() || count != tx.vin.size()) return Err::BadSignature;
  if (r.remaining() != static_cast<std::size_t>(count) * 64) return Err::BadSignature;
  for (std::uint32_t i = 0; i < count; ++i) {
    std::array<std::uint8_t, 64> part{};
    for (auto& b : part) b = r.u8();
    // Each witness is a standalone one-hash signature blob.
    BinWriter w;
    w.u32(1);
    w.raw(part);
    WitnessEntry wit;
    wit.kind = WitnessEntry::Kind::groupSig;
    wit.data = w.take();
    tx.witnesses[i] = std::move(wit);
  }
  return tx;
}

Result<Hash32> UtxoChainClient::submitWithdrawal(const DepositData& d, const Bytes& signature) {
  auto unsignedTx = getWithdrawalTx(d);
  if (!unsignedTx) return unsignedTx.error();
  auto signedTx = injectSignatures(*unsignedTx, signature);
  if (!signedTx) return signedTx.error();
  Hash32 txid = txidOf(*signedTx);
  auto res = chain_->submitTx(*signedTx);
  if (res || res.error() == Err::DuplicateTx) {
    for (const auto& op : signedTx->vin) locked_.emplace(op, txid);
  }
  if (!res) return res.error();
  return txid;
}

bool UtxoChainClient::validTargetAddress(const std::string& addr) const { return !addr.empty(); }

void UtxoChainClient::pruneLocks() {
  for (auto it = locked_.begin(); it != locked_.end();) {
    auto view = chain_->getTransaction(it->second);
    bool keep = view && view->confirmations == 0;  // still in the mempool
    it = keep ? std::next(it) : locked_.erase(it);
  }
}

BurnEmitChainClient::BurnEmitChainClient(BurnEmitChain* chain, int requiredConfirmations)
    : chain_(chain), required_(requiredConfirmations) {}

Result<DepositData> BurnEmitChainClient::getDepositData(const DepositIdentifier& id) const {
  auto view = chain_->getTransaction(id.txHash);
  if (!view) return view.error();
  if (view->confirmations < required_) return Err::NotConfirmed;
  const auto& rec = *view->record;
  if (id.txNonce != 0) return Err::NoSuchEvent;
  if (rec.kind != BurnEmitChain::TxRecord::Kind::burn) return Err::NotABurn;
  if (rec.serviceEntries.empty()) return Err::BadServiceEntry;
  const Bytes& entry = rec.serviceEntries[0];
  auto target = decodeTargetInfo(std::span<const std::uint8_t>(entry.data(), entry.size()));
  if (!target) return Err::BadServiceEntry;

  DepositData d;
  d.sourceChainId = chain_->chainId();
  d.depositTxHash = id.txHash;
  d.txNonce = id.txNonce;
  d.sender = rec.sender;
  d.tokenAddr = rec.assetId;
  d.amount = rec.amount;
  d.targetChainId = target->first;
  d.targetAddr = target->second;
  return d;
}

BurnEmitChain::EmitArgs BurnEmitChainClient::getWithdrawalTx(const DepositData& d) const {
  BurnEmitChain::EmitArgs args;
  args.assetId = d.tokenAddr.empty() ? "native" : d.tokenAddr;
  args.amount = d.amount;
  args.recipient = d.targetAddr;
  args.srcChainId = d.sourceChainId;
  args.srcTxHash = d.depositTxHash;
  args.srcTxNonce = d.txNonce;
  return args;
}

Result<SignHashes> BurnEmitChainClient::getHashOfWithdrawal(const DepositData& d) const {
  return SignHashes{sha256(chain_->serializeEmit(getWithdrawalTx(d)))};
}

Result<Hash32> BurnEmitChainClient::submitWithdrawal(const DepositData& d,
                                                     const Bytes& signature) {
  return chain_->submitEmit(getWithdrawalTx(d), signature);
}

bool BurnEmitChainClient::validTargetAddress(const std::string& addr) const {
  return !addr.empty();
}

}  // namespace bridgesim
