#include "bridgesim/simulation.hpp"

#include <algorithm>

#include "bridgesim/observer.hpp"

namespace bridgesim {

int defaultConfirmations(ChainKind kind) {
  switch (kind) {
    case ChainKind::evm: return 3;
    case ChainKind::utxo: return 2;
    case ChainKind::burnEmit: return 1;
  }
  return 1;
}

const char* sessionOutcomeName(SessionOutcome o) {
  switch (o) {
    case SessionOutcome::Idle: return "Idle";
    case SessionOutcome::NoProposal: return "NoProposal";
    case SessionOutcome::SigningFailed: return "SigningFailed";
    case SessionOutcome::Stalled: return "Stalled";
    case SessionOutcome::Finalized: return "Finalized";
  }
  return "unknown";
}

World::World(const WorldConfig& config) : config_(config) {
  if (config_.logging) log_ = std::make_unique<EventLog>();
  int endpoints = config_.params.n + static_cast<int>(config_.requests.size());
  net_ = std::make_unique<SimNetwork>(endpoints, log_.get());

  Seed32 seed{};
  SplitMix64 seeder(config_.seed ^ 0xa076bc9d1f8c3a2bULL);
  for (int i = 0; i < 4; ++i) {
    std::uint64_t word = seeder.next();
    for (int b = 0; b < 8; ++b) seed[i * 8 + b] = static_cast<std::uint8_t>(word >> (8 * b));
  }
  engine_ = std::make_unique<TssEngine>("bridge-group", seed, config_.params.t + 1);

  if (config_.seededProposer) {
    int n = config_.params.n;
    std::uint64_t nonce = config_.instanceNonce;
    proposerOf_ = [n, nonce](std::uint64_t sid) {
      SplitMix64 g(nonce ^ (sid * 0xd1b54a32d192ed03ULL + 0xbf58476d1ce4e5b9ULL));
      return static_cast<int>(g.next() % static_cast<std::uint64_t>(n));
    };
  } else {
    int n = config_.params.n;
    proposerOf_ = [n](std::uint64_t sid) { return static_cast<int>(sid % n); };
  }

  setupChains();
  setupValidators();

  actors_.resize(config_.requests.size());
  requestDeposits_.resize(config_.requests.size());
  fillerTxids_.resize(config_.fillers.size());
  for (std::size_t i = 0; i < actors_.size(); ++i)
    actors_[i].requestIndex = static_cast<int>(i);

  for (std::size_t i = 0; i < config_.requests.size(); ++i)
    if (config_.requests[i].depositTick < 0) performDeposit(static_cast<int>(i));
  for (auto& [id, chain] : evm_)
    for (int k = 0; k < requiredConfirmations(id); ++k) chain->advanceBlock();
  for (auto& [id, chain] : utxo_)
    for (int k = 0; k < requiredConfirmations(id); ++k) chain->advanceBlock();
  for (auto& [id, chain] : burnEmit_)
    for (int k = 0; k < requiredConfirmations(id); ++k) chain->advanceBlock();

  if (config_.observerChecks) observer_ = std::make_unique<SafetyObserver>(*this);
}

World::~World() = default;

void World::setupChains() {
  for (const auto& cfg : config_.chains) {
    switch (cfg.kind) {
      case ChainKind::evm: {
        auto chain = std::make_unique<EvmChain>(cfg.chainId, cfg.bridgeAddress,
                                                engine_->groupKey());
        for (const auto& [addr, v] : cfg.genesisNative) chain->creditNative(addr, v);
        for (const auto& [token, balances] : cfg.genesisTokens)
          for (const auto& [addr, v] : balances) chain->creditToken(token, addr, v);
        evm_.emplace(cfg.chainId, std::move(chain));
        break;
      }
      case ChainKind::utxo: {
        auto chain = std::make_unique<UtxoChain>(cfg.chainId, cfg.bridgeAddress,
                                                 engine_->groupKey());
        for (const auto& [addr, v] : cfg.genesisOutputs) chain->addGenesisOutput(addr, v);
        utxo_.emplace(cfg.chainId, std::move(chain));
        break;
      }
      case ChainKind::burnEmit: {
        auto chain = std::make_unique<BurnEmitChain>(cfg.chainId, engine_->groupKey());
        for (const auto& [asset, balances] : cfg.genesisAssets) chain->createAsset(asset, balances);
        burnEmit_.emplace(cfg.chainId, std::move(chain));
        break;
      }
    }
  }
}

std::optional<ChainKind> World::kindOf(const std::string& chainId) const {
  if (evm_.count(chainId)) return ChainKind::evm;
  if (utxo_.count(chainId)) return ChainKind::utxo;
  if (burnEmit_.count(chainId)) return ChainKind::burnEmit;
  return std::nullopt;
}

int World::requiredConfirmations(const std::string& chainId) const {
  for (const auto& cfg : config_.chains)
    if (cfg.chainId == chainId)
      return cfg.requiredConfirmations > 0 ? cfg.requiredConfirmations
                                           : defaultConfirmations(cfg.kind);
  return 1;
}

std::unique_ptr<ChainClient> World::makeClient(const std::string& chainId) const {
  auto kind = kindOf(chainId);
  if (!kind) return nullptr;
  int required = requiredConfirmations(chainId);
  switch (*kind) {
    case ChainKind::evm:
      return std::make_unique<EvmChainClient>(evm_.at(chainId).get(), required);
    case ChainKind::utxo:
      return std::make_unique<UtxoChainClient>(utxo_.at(chainId).get(), required);
    case ChainKind::burnEmit:
      return std::make_unique<BurnEmitChainClient>(burnEmit_.at(chainId).get(), required);
  }
  return nullptr;
}

void World::setupValidators() {
  std::vector<std::uint32_t> flags(config_.params.n, 0);
  std::vector<int> adversaryPeers;
  for (const auto& adv : config_.adversaries) {
    if (adv.validator < 0 || adv.validator >= config_.params.n) continue;
    flags[adv.validator] |= adv.flags;
  }
  for (int v = 0; v < config_.params.n; ++v)
    if (flags[v] != 0) adversaryPeers.push_back(v);

  for (int v = 0; v < config_.params.n; ++v) {
    ValidatorNode::Context ctx;
    ctx.index = v;
    ctx.params = config_.params;
    ctx.flags.bits = flags[v];
    ctx.sessionStart = config_.sessionStart;
    ctx.instanceNonce = config_.instanceNonce;
    ctx.proposerOf = proposerOf_;
    if (flags[v] != 0) ctx.adversaryPeers = adversaryPeers;

    std::map<std::string, std::unique_ptr<ChainClient>> clients;
    for (const auto& cfg : config_.chains) clients[cfg.chainId] = makeClient(cfg.chainId);
    validators_.push_back(
        std::make_unique<ValidatorNode>(std::move(ctx), net_.get(), engine_.get(),
                                        std::move(clients)));
  }
}

std::vector<int> World::honestValidators() const {
  std::vector<int> out;
  for (int v = 0; v < config_.params.n; ++v)
    if (validators_[v]->honest()) out.push_back(v);
  return out;
}

EvmChain* World::evm(const std::string& chainId) {
  auto it = evm_.find(chainId);
  return it == evm_.end() ? nullptr : it->second.get();
}
UtxoChain* World::utxo(const std::string& chainId) {
  auto it = utxo_.find(chainId);
  return it == utxo_.end() ? nullptr : it->second.get();
}
BurnEmitChain* World::burnEmit(const std::string& chainId) {
  auto it = burnEmit_.find(chainId);
  return it == burnEmit_.end() ? nullptr : it->second.get();
}
const EvmChain* World::evm(const std::string& chainId) const {
  auto it = evm_.find(chainId);
  return it == evm_.end() ? nullptr : it->second.get();
}
const UtxoChain* World::utxo(const std::string& chainId) const {
  auto it = utxo_.find(chainId);
  return it == utxo_.end() ? nullptr : it->second.get();
}
const BurnEmitChain* World::burnEmit(const std::string& chainId) const {
  auto it = burnEmit_.find(chainId);
  return it == burnEmit_.end() ? nullptr : it->second.get();
}

void World::performDeposit(int requestIndex) {
  const RequestConfig& cfg = config_.requests[requestIndex];
  switch (cfg.kind) {
    case RequestConfig::Kind::garbage: {
      BinWriter w;
      w.str("garbage");
      w.u64(static_cast<std::uint64_t>(requestIndex));
      w.u64(config_.seed);
      requestDeposits_[requestIndex] =
          DepositIdentifier{cfg.sourceChainId, sha256(w.buffer()), 0};
      return;
    }
    case RequestConfig::Kind::erc20:
    case RequestConfig::Kind::native: {
      EvmChain* chain = evm(cfg.sourceChainId);
      if (!chain) return;
      auto res = cfg.kind == RequestConfig::Kind::erc20
                     ? chain->depositErc20(cfg.sender, cfg.tokenAddr, cfg.amount,
                                           cfg.targetChainId, cfg.targetAddr)
                     : chain->depositNative(cfg.sender, cfg.amount, cfg.targetChainId,
                                            cfg.targetAddr);
      if (res) requestDeposits_[requestIndex] = DepositIdentifier{cfg.sourceChainId, *res, 0};
      return;
    }
    case RequestConfig::Kind::utxo: {
      UtxoChain* chain = utxo(cfg.sourceChainId);
      if (!chain) return;
      std::set<Outpoint> excluded = chain->mempoolSpent();
      auto picked = selectUtxos(*chain, cfg.sender, cfg.amount, excluded);
      if (!picked) return;
      std::uint64_t total = 0;
      for (const auto& op : *picked) total += chain->utxoSet().at(op).value;
      UtxoTx tx;
      tx.vin = *picked;
      tx.vout.push_back({cfg.amount, chain->bridgeAddress(), std::nullopt});
      tx.vout.push_back({0, "", encodeTargetInfo(cfg.targetChainId, cfg.targetAddr)});
      if (total > cfg.amount) tx.vout.push_back({total - cfg.amount, cfg.sender, std::nullopt});
      tx.witnesses.assign(tx.vin.size(), {WitnessEntry::Kind::clientMark, {}});
      auto res = chain->submitTx(tx);
      if (res) requestDeposits_[requestIndex] = DepositIdentifier{cfg.sourceChainId, *res, 0};
      return;
    }
    case RequestConfig::Kind::burn: {
      BurnEmitChain* chain = burnEmit(cfg.sourceChainId);
      if (!chain) return;
      auto res = chain->submitBurn(cfg.sender, cfg.tokenAddr, cfg.amount,
                                   {encodeTargetInfo(cfg.targetChainId, cfg.targetAddr)});
      if (res) requestDeposits_[requestIndex] = DepositIdentifier{cfg.sourceChainId, *res, 0};
      return;
    }
  }
}

void World::scenarioActions(Tick now) {
  for (std::size_t i = 0; i < config_.fillers.size(); ++i) {
    const FillerConfig& f = config_.fillers[i];
    if (f.tick != now) continue;
    UtxoChain* chain = utxo(f.chainId);
    if (!chain) continue;
    auto picked = selectUtxos(*chain, f.owner, f.value, chain->mempoolSpent());
    if (!picked) continue;
    std::uint64_t total = 0;
    for (const auto& op : *picked) total += chain->utxoSet().at(op).value;
    UtxoTx tx;
    tx.vin = *picked;
    tx.vout.push_back({f.value, f.owner, std::nullopt});
    if (total > f.value) tx.vout.push_back({total - f.value, f.owner, std::nullopt});
    tx.witnesses.assign(tx.vin.size(), {WitnessEntry::Kind::clientMark, {}});
    auto res = chain->submitTx(tx);
    if (res) fillerTxids_[i] = *res;
  }
  for (const auto& r : config_.reorgs) {
    if (r.tick != now) continue;
    UtxoChain* chain = utxo(r.chainId);
    if (!chain) continue;
    if (r.fillerIndex < 0 || r.fillerIndex >= static_cast<int>(fillerTxids_.size())) continue;
    if (!fillerTxids_[r.fillerIndex]) continue;
    chain->injectReorg(*fillerTxids_[r.fillerIndex]);
  }
}

void World::clientActions(Tick now) {
  for (std::size_t i = 0; i < actors_.size(); ++i) {
    ClientActor& actor = actors_[i];
    const RequestConfig& cfg = config_.requests[i];
    int endpoint = config_.params.n + static_cast<int>(i);

    if (cfg.depositTick >= 0 && cfg.depositTick == now) performDeposit(static_cast<int>(i));

    if (!actor.submitted && now >= cfg.submitTick && requestDeposits_[i]) {
      BinWriter w;
      w.u8(static_cast<std::uint8_t>(MsgKind::submitWithdrawal));
      writeDepositId(w, *requestDeposits_[i]);
      Bytes payload = w.take();
      if (cfg.submitTo.empty()) {
        for (int v = 0; v < config_.params.n; ++v) net_->send(endpoint, v, payload);
      } else {
        for (int v : cfg.submitTo)
          if (v >= 0 && v < config_.params.n) net_->send(endpoint, v, payload);
      }
      actor.submitted = true;
    }

    if (cfg.clientWithdraw && actor.submitted && !actor.withdrawn && requestDeposits_[i] &&
        now >= cfg.submitTick + 2 && (now - cfg.submitTick) % 2 == 0) {
      BinWriter w;
      w.u8(static_cast<std::uint8_t>(MsgKind::checkWithdrawalReq));
      writeDepositId(w, *requestDeposits_[i]);
      int target = static_cast<int>((now / 2) % config_.params.n);
      net_->send(endpoint, target, w.take());
    }
  }
}

void World::onClientEnvelope(const Envelope& env) {
  int idx = env.to - config_.params.n;
  if (idx < 0 || idx >= static_cast<int>(actors_.size())) return;
  ClientActor& actor = actors_[idx];
  const RequestConfig& cfg = config_.requests[idx];

  BinReader r(env.payload);
  if (static_cast<MsgKind>(r.u8()) != MsgKind::checkWithdrawalResp) return;
  if (r.u8() == 0) return;
  readDepositId(r);
  auto status = static_cast<RequestStatus>(r.u8());
  (void)status;
  if (r.u8() == 0) return;
  DepositData d = readDepositData(r);
  if (r.u8() == 0) return;
  Bytes sig = r.bytes();
  if (!r.ok() || actor.withdrawn) return;

  EvmChain* chain = evm(cfg.targetChainId);
  if (!chain) return;
  auto res = chain->withdraw(EvmChainClient::withdrawArgs(d), sig);
  if (res || res.error() == Err::AlreadyWithdrawn) actor.withdrawn = true;
}

void World::step() {
  auto envelopes = net_->advanceTick();
  Tick now = net_->now();
  for (const auto& env : envelopes) {
    if (env.to >= 0 && env.to < config_.params.n)
      validators_[env.to]->onEnvelope(env);
    else
      onClientEnvelope(env);
  }
  for (const auto& em : engine_->step(now)) {
    for (int s : em.signers)
      if (s >= 0 && s < config_.params.n) validators_[s]->onTssEmission(em);
  }
  scenarioActions(now);
  clientActions(now);
  for (auto& v : validators_) v->onTick(now);
  for (auto& [id, chain] : evm_) chain->advanceBlock();
  for (auto& [id, chain] : utxo_) chain->advanceBlock();
  for (auto& [id, chain] : burnEmit_) chain->advanceBlock();
}

void World::classifySession(SessionRecord& rec) const {
  auto honest = honestValidators();
  int h = honest.empty() ? 0 : honest.front();
  const ValidatorNode& v = *validators_[h];
  rec.proposal = v.proposalSeen(rec.sid);
  rec.signers = v.signersSeen(rec.sid);

  if (!rec.proposal) {
    bool anyActionable = false;
    for (const auto& [id, req] : v.requests())
      if (req.status == RequestStatus::pending || req.status == RequestStatus::processing)
        anyActionable = true;
    rec.outcome = anyActionable ? SessionOutcome::NoProposal : SessionOutcome::Idle;
    return;
  }
  if (!rec.signers) {
    rec.outcome = SessionOutcome::NoProposal;
    return;
  }
  for (int idx : honest) {
    auto req = validators_[idx]->requests().find(rec.proposal->depositId);
    if (req != validators_[idx]->requests().end() &&
        req->second.status == RequestStatus::finalized) {
      rec.outcome = SessionOutcome::Finalized;
      return;
    }
  }
  std::string prefix = "sign/sid=" + std::to_string(rec.sid) + "/";
  for (const auto& [sessionId, session] : engine().sessions()) {
    if (sessionId.rfind(prefix, 0) == 0 && session.completedAt) {
      rec.outcome = SessionOutcome::Stalled;
      return;
    }
  }
  rec.outcome = SessionOutcome::SigningFailed;
}

void World::closeSession(std::uint64_t sid) {
  SessionRecord rec;
  rec.sid = sid;
  rec.proposer = proposerOf_(sid);
  classifySession(rec);
  sessionRecords_.push_back(std::move(rec));
  if (observer_) observer_->onSessionEnd(sid);
}

const SessionRecord* World::runSession() {
  if (nextSession_ >= static_cast<std::uint64_t>(config_.maxSessions)) return nullptr;
  Tick target = config_.sessionStart +
                static_cast<Tick>(nextSession_ + 1) * config_.params.sessionTicks() - 1;
  while (net_->now() < target) step();
  closeSession(nextSession_);
  ++nextSession_;
  return &sessionRecords_.back();
}

void World::run() {
  while (runSession() != nullptr) {
  }
  for (Tick i = 0; i < config_.drainTicks; ++i) step();
  if (observer_) observer_->finalChecks();
}

const std::vector<std::string>& World::violations() const {
  return observer_ ? observer_->violations() : noViolations_;
}

}  // namespace bridgesim
