#include "bridgesim/utxo_chain.hpp"

#include <algorithm>

namespace bridgesim {

Bytes coreSerialize(const UtxoTx& tx) {
  BinWriter w;
  w.u32(static_cast<std::uint32_t>(tx.vin.size()));
  for (const auto& in : tx.vin) {
    w.hash(in.txid);
    w.u32(in.vout);
  }
  w.u32(static_cast<std::uint32_t>(tx.vout.size()));
  for (const auto& out : tx.vout) {
    w.u64(out.value);
    w.str(out.address);
    if (out.opReturn) {
      w.u8(1);
      w.bytes(*out.opReturn);
    } else {
      w.u8(0);
    }
  }
  return w.take();
}

Hash32 txidOf(const UtxoTx& tx) { return sha256(coreSerialize(tx)); }

Bytes scriptBytes(const UtxoOutput& out) {
  BinWriter w;
  w.str(out.address);
  if (out.opReturn) {
    w.u8(1);
    w.bytes(*out.opReturn);
  } else {
    w.u8(0);
  }
  return w.take();
}

UtxoChain::UtxoChain(std::string chainId, std::string bridgeAddress, GroupKey groupKey)
    : chainId_(std::move(chainId)),
      bridgeAddress_(std::move(bridgeAddress)),
      groupKey_(std::move(groupKey)) {}

Outpoint UtxoChain::addGenesisOutput(const std::string& address, std::uint64_t value) {
  UtxoTx tx;
  BinWriter seed;
  seed.str(chainId_);
  seed.str("genesis");
  seed.u64(genesisSeq_++);
  tx.vin.push_back({sha256(seed.buffer()), 0});
  tx.vout.push_back({value, address, std::nullopt});
  Hash32 txid = txidOf(tx);

  TxRecord rec;
  rec.tx = std::move(tx);
  rec.mined = true;
  rec.inclusionHeight = 0;
  txs_.emplace(txid, std::move(rec));
  Outpoint op{txid, 0};
  utxoSet_[op] = txs_.at(txid).tx.vout[0];
  genesisTotal_ += value;
  return op;
}

Result<Hash32> UtxoChain::submitTx(const UtxoTx& tx) {
  if (tx.vin.empty() || tx.vout.empty()) return Err::MalformedTx;
  if (tx.witnesses.size() != tx.vin.size()) return Err::MalformedTx;

  std::set<Outpoint> seen;
  for (const auto& in : tx.vin)
    if (!seen.insert(in).second) return Err::MalformedTx;

  Hash32 txid = txidOf(tx);
  auto known = txs_.find(txid);
  if (known != txs_.end() && !known->second.reorged) return Err::DuplicateTx;

  std::uint64_t inSum = 0;
  std::vector<const UtxoOutput*> prevouts;
  prevouts.reserve(tx.vin.size());
  for (const auto& in : tx.vin) {
    auto it = utxoSet_.find(in);
    if (it == utxoSet_.end() || mempoolSpent_.count(in)) return Err::DoubleSpend;
    prevouts.push_back(&it->second);
    inSum += it->second.value;
  }

  std::uint64_t outSum = 0;
  for (const auto& out : tx.vout) outSum += out.value;
  if (inSum != outSum) return Err::MalformedTx;

  Bytes core = coreSerialize(tx);
  for (std::size_t i = 0; i < tx.vin.size(); ++i) {
    if (prevouts[i]->address != bridgeAddress_) continue;
    const auto& wit = tx.witnesses[i];
    if (wit.kind != WitnessEntry::Kind::groupSig) return Err::BadWitness;
    Bytes script = scriptBytes(*prevouts[i]);
    Hash32 sighash = sighashForInput(core, static_cast<std::uint32_t>(i), script);
    if (!TssEngine::verify(groupKey_, {sighash}, wit.data)) return Err::BadWitness;
  }

  if (known != txs_.end()) {
    known->second.reorged = false;
    known->second.mined = false;
  } else {
    TxRecord rec;
    rec.tx = tx;
    txs_.emplace(txid, std::move(rec));
  }
  mempool_.push_back(txid);
  for (const auto& in : tx.vin) mempoolSpent_.insert(in);
  return txid;
}

Result<UtxoChain::TxView> UtxoChain::getTransaction(const Hash32& txid) const {
  auto it = txs_.find(txid);
  if (it == txs_.end()) return Err::NotFound;
  TxView view;
  view.record = &it->second;
  if (it->second.reorged)
    view.confirmations = -1;
  else if (!it->second.mined)
    view.confirmations = 0;
  else
    view.confirmations = static_cast<std::int64_t>(height_ - it->second.inclusionHeight) + 1;
  return view;
}

Status UtxoChain::injectReorg(const Hash32& txid) {
  auto it = txs_.find(txid);
  if (it == txs_.end() || !it->second.mined || it->second.reorged) return Err::UnknownTx;
  TxRecord& rec = it->second;

  for (std::uint32_t i = 0; i < rec.tx.vout.size(); ++i) {
    if (rec.tx.vout[i].opReturn) continue;
    Outpoint op{txid, i};
    if (!utxoSet_.count(op) || mempoolSpent_.count(op)) return Err::DoubleSpend;
  }

  rec.reorged = true;
  for (std::uint32_t i = 0; i < rec.tx.vout.size(); ++i) {
    if (rec.tx.vout[i].opReturn) continue;
    utxoSet_.erase(Outpoint{txid, i});
  }
  for (const auto& in : rec.tx.vin) {
    auto src = txs_.find(in.txid);
    if (src == txs_.end() || src->second.reorged) continue;
    const auto& out = src->second.tx.vout.at(in.vout);
    if (!out.opReturn) utxoSet_[in] = out;
  }
  return okStatus();
}

std::uint64_t UtxoChain::advanceBlock() {
  ++height_;
  for (const auto& txid : mempool_) {
    auto& rec = txs_.at(txid);
    for (const auto& in : rec.tx.vin) {
      utxoSet_.erase(in);
      mempoolSpent_.erase(in);
    }
    for (std::uint32_t i = 0; i < rec.tx.vout.size(); ++i) {
      if (rec.tx.vout[i].opReturn) continue;
      utxoSet_[Outpoint{txid, i}] = rec.tx.vout[i];
    }
    rec.mined = true;
    rec.inclusionHeight = height_;
  }
  mempool_.clear();
  return height_;
}

Result<UtxoOutput> UtxoChain::lookupOutput(const Outpoint& op) const {
  auto it = txs_.find(op.txid);
  if (it == txs_.end() || it->second.reorged) return Err::NotFound;
  if (op.vout >= it->second.tx.vout.size()) return Err::IndexOutOfRange;
  return it->second.tx.vout[op.vout];
}

std::uint64_t UtxoChain::utxoTotal() const {
  std::uint64_t sum = 0;
  for (const auto& [op, out] : utxoSet_) sum += out.value;
  return sum;
}

}  // namespace bridgesim
