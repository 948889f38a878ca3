#include "bridgesim/observer.hpp"

#include <algorithm>
#include <sstream>

namespace bridgesim {

namespace {

std::string assetOf(const DepositData& d) {
  return d.tokenAddr.empty() ? "native" : d.tokenAddr;
}

// Pulls the deposit identifier back out of a signing-session id of the form
// sign/sid=<k>/<canonical>/<digest>.
std::optional<DepositIdentifier> depositOfSession(const std::string& sessionId) {
  auto first = sessionId.find('/');
  if (first == std::string::npos) return std::nullopt;
  auto second = sessionId.find('/', first + 1);
  auto last = sessionId.rfind('/');
  if (second == std::string::npos || last == second) return std::nullopt;
  return DepositIdentifier::parse(sessionId.substr(second + 1, last - second - 1));
}

}  // namespace

SafetyObserver::SafetyObserver(const World& world) : world_(world) {
  for (const auto& cfg : world_.config().chains) {
    if (cfg.kind != ChainKind::evm) continue;
    const EvmChain* chain = world_.evm(cfg.chainId);
    evmNativeBaseline_[cfg.chainId] = chain->nativeTotal();
    for (const auto& token : chain->tokenIds())
      evmTokenBaseline_[cfg.chainId][token] = chain->tokenTotal(token);
  }
}

void SafetyObserver::onSessionEnd(std::uint64_t sid) {
  checkAgreement(sid);
  std::ostringstream when;
  when << "session " << sid;
  checkConservation(when.str().c_str());
}

void SafetyObserver::finalChecks() {
  checkConservation("final");
  checkWithdrawalBacking();
}

void SafetyObserver::checkAgreement(std::uint64_t sid) {
  auto honest = world_.honestValidators();
  for (int v : honest) {
    auto prop = world_.validators()[v]->proposalSeen(sid);
    if (prop) chosen_.insert(prop->depositId);
  }

  for (const auto& id : chosen_) {
    std::optional<RequestStatus> agreed;
    for (int v : honest) {
      const auto& requests = world_.validators()[v]->requests();
      auto it = requests.find(id);
      if (it == requests.end()) {
        std::ostringstream msg;
        msg << "agreement: session " << sid << ": validator " << v
            << " has no record of chosen request " << id.canonical();
        violations_.push_back(msg.str());
        continue;
      }
      const RequestData& req = it->second;
      if (req.status != RequestStatus::invalid && !req.depositData) {
        std::ostringstream msg;
        msg << "agreement: session " << sid << ": validator " << v << " holds request "
            << id.canonical() << " at " << statusName(req.status) << " without deposit data";
        violations_.push_back(msg.str());
      }
      if (!agreed) {
        agreed = req.status;
      } else if (*agreed != req.status) {
        std::ostringstream msg;
        msg << "agreement: session " << sid << ": honest validators disagree on "
            << id.canonical() << ": " << statusName(*agreed) << " vs " << statusName(req.status)
            << " at validator " << v;
        violations_.push_back(msg.str());
      }
    }
  }
}

void SafetyObserver::checkConservation(const char* when) {
  for (const auto& cfg : world_.config().chains) {
    switch (cfg.kind) {
      case ChainKind::evm: {
        const EvmChain* chain = world_.evm(cfg.chainId);
        std::uint64_t native = chain->nativeTotal();
        std::uint64_t base = evmNativeBaseline_.at(cfg.chainId);
        if (native != base) {
          std::ostringstream msg;
          msg << "conservation (" << when << "): chain " << cfg.chainId << " native total "
              << native << " != " << base;
          violations_.push_back(msg.str());
        }
        auto tokens = chain->tokenIds();
        for (const auto& [token, total] : evmTokenBaseline_[cfg.chainId])
          if (std::find(tokens.begin(), tokens.end(), token) == tokens.end())
            tokens.push_back(token);
        for (const auto& token : tokens) {
          std::uint64_t have = chain->tokenTotal(token);
          std::uint64_t want = 0;
          auto it = evmTokenBaseline_[cfg.chainId].find(token);
          if (it != evmTokenBaseline_[cfg.chainId].end()) want = it->second;
          if (have != want) {
            std::ostringstream msg;
            msg << "conservation (" << when << "): chain " << cfg.chainId << " token " << token
                << " total " << have << " != " << want;
            violations_.push_back(msg.str());
          }
        }
        break;
      }
      case ChainKind::utxo: {
        const UtxoChain* chain = world_.utxo(cfg.chainId);
        if (chain->utxoTotal() != chain->genesisTotal()) {
          std::ostringstream msg;
          msg << "conservation (" << when << "): chain " << cfg.chainId << " utxo total "
              << chain->utxoTotal() << " != genesis " << chain->genesisTotal();
          violations_.push_back(msg.str());
        }
        break;
      }
      case ChainKind::burnEmit: {
        const BurnEmitChain* chain = world_.burnEmit(cfg.chainId);
        for (const auto& asset : chain->assetIds()) {
          std::uint64_t burns = 0, emits = 0;
          for (const auto& [hash, tx] : chain->transactions()) {
            if (tx.assetId != asset) continue;
            if (tx.kind == BurnEmitChain::TxRecord::Kind::burn) burns += tx.amount;
            if (tx.kind == BurnEmitChain::TxRecord::Kind::emit) emits += tx.amount;
          }
          std::uint64_t want = chain->genesisSupply(asset) - burns + emits;
          if (chain->supply(asset) != want) {
            std::ostringstream msg;
            msg << "conservation (" << when << "): chain " << cfg.chainId << " asset " << asset
                << " supply " << chain->supply(asset) << " != " << want;
            violations_.push_back(msg.str());
          }
          if (chain->balanceTotal(asset) != chain->supply(asset)) {
            std::ostringstream msg;
            msg << "conservation (" << when << "): chain " << cfg.chainId << " asset " << asset
                << " balances " << chain->balanceTotal(asset) << " != supply "
                << chain->supply(asset);
            violations_.push_back(msg.str());
          }
        }
        break;
      }
    }
  }
}

Result<DepositData> SafetyObserver::depositOnSource(const DepositIdentifier& id) const {
  auto client = world_.makeClient(id.chainId);
  if (!client) return Err::UnsupportedChain;
  return client->getDepositData(id);
}

void SafetyObserver::checkWithdrawalBacking() {
  std::map<DepositIdentifier, int> paid;

  auto flag = [&](const std::string& chainId, const DepositIdentifier& id,
                  const std::string& what) {
    std::ostringstream msg;
    msg << "backing: chain " << chainId << ": withdrawal for " << id.canonical() << " " << what;
    violations_.push_back(msg.str());
  };

  for (const auto& cfg : world_.config().chains) {
    switch (cfg.kind) {
      case ChainKind::evm: {
        const EvmChain* chain = world_.evm(cfg.chainId);
        for (const auto& rec : chain->withdrawals()) {
          DepositIdentifier id{rec.args.sourceChainId, rec.args.depositTxHash,
                               rec.args.depositTxNonce};
          ++paid[id];
          auto dep = depositOnSource(id);
          if (!dep) {
            flag(cfg.chainId, id, std::string("has no confirmed source deposit (") +
                                      errName(dep.error()) + ")");
            continue;
          }
          if (dep->targetChainId != cfg.chainId)
            flag(cfg.chainId, id, "targets chain " + dep->targetChainId);
          if (dep->targetAddr != rec.args.receiver)
            flag(cfg.chainId, id, "pays " + rec.args.receiver + " instead of " + dep->targetAddr);
          if (dep->amount != rec.args.amount)
            flag(cfg.chainId, id, "pays the wrong amount");
          bool erc20 = !dep->tokenAddr.empty();
          if (erc20 != rec.args.erc20 || (erc20 && dep->tokenAddr != rec.args.tokenAddr))
            flag(cfg.chainId, id, "pays the wrong asset");
        }
        break;
      }
      case ChainKind::burnEmit: {
        const BurnEmitChain* chain = world_.burnEmit(cfg.chainId);
        for (const auto& [hash, tx] : chain->transactions()) {
          if (tx.kind != BurnEmitChain::TxRecord::Kind::emit) continue;
          DepositIdentifier id{tx.emitArgs.srcChainId, tx.emitArgs.srcTxHash,
                               tx.emitArgs.srcTxNonce};
          ++paid[id];
          auto dep = depositOnSource(id);
          if (!dep) {
            flag(cfg.chainId, id, std::string("has no confirmed source deposit (") +
                                      errName(dep.error()) + ")");
            continue;
          }
          if (dep->targetChainId != cfg.chainId)
            flag(cfg.chainId, id, "targets chain " + dep->targetChainId);
          if (dep->targetAddr != tx.emitArgs.recipient)
            flag(cfg.chainId, id, "pays " + tx.emitArgs.recipient + " instead of " +
                                      dep->targetAddr);
          if (dep->amount != tx.emitArgs.amount) flag(cfg.chainId, id, "pays the wrong amount");
          if (assetOf(*dep) != tx.emitArgs.assetId) flag(cfg.chainId, id, "pays the wrong asset");
        }
        break;
      }
      case ChainKind::utxo: {
        const UtxoChain* chain = world_.utxo(cfg.chainId);
        for (const auto& [txid, rec] : chain->transactions()) {
          if (!rec.mined || rec.reorged) continue;
          bool spendsBridge = false;
          for (const auto& in : rec.tx.vin) {
            auto prev = chain->lookupOutput(in);
            if (prev && prev->address == chain->bridgeAddress()) spendsBridge = true;
          }
          if (!spendsBridge) continue;

          SignHashes hashes;
          bool hashed = true;
          for (std::uint32_t i = 0; i < rec.tx.vin.size(); ++i) {
            auto h = UtxoChainClient::computeSighash(rec.tx, i, *chain);
            if (!h) {
              hashed = false;
              break;
            }
            hashes.push_back(*h);
          }

          std::optional<DepositIdentifier> id;
          if (hashed) {
            for (const auto& [sessionId, session] : world_.engine().sessions()) {
              if (!session.completedAt || session.message != hashes) continue;
              id = depositOfSession(sessionId);
              break;
            }
          }
          if (!id) {
            std::ostringstream msg;
            msg << "backing: chain " << cfg.chainId << ": bridge funds spent by "
                << toHex(txid) << " outside any completed signing session";
            violations_.push_back(msg.str());
            continue;
          }

          ++paid[*id];
          auto dep = depositOnSource(*id);
          if (!dep) {
            flag(cfg.chainId, *id, std::string("has no confirmed source deposit (") +
                                       errName(dep.error()) + ")");
            continue;
          }
          if (dep->targetChainId != cfg.chainId)
            flag(cfg.chainId, *id, "targets chain " + dep->targetChainId);
          bool pays = false;
          for (const auto& out : rec.tx.vout)
            if (!out.opReturn && out.address == dep->targetAddr && out.value == dep->amount)
              pays = true;
          if (!pays) flag(cfg.chainId, *id, "does not pay the deposited amount to its target");
        }
        break;
      }
    }
  }

  for (const auto& [id, count] : paid) {
    if (count <= 1) continue;
    std::ostringstream msg;
    msg << "backing: deposit " << id.canonical() << " paid out " << count << " times";
    violations_.push_back(msg.str());
  }
}

}  // namespace bridgesim
