#include "bridgesim/validator.hpp"

#include <algorithm>

namespace bridgesim {

namespace {

struct FlagName {
  std::uint32_t bit;
  const char* name;
};

constexpr FlagName kFlagNames[] = {
    {AdversaryFlags::silentSigner, "silentSigner"},
    {AdversaryFlags::neverAccept, "neverAccept"},
    {AdversaryFlags::crashedProposer, "crashedProposer"},
    {AdversaryFlags::arbitraryCommittee, "arbitraryCommittee"},
    {AdversaryFlags::acceptThenAbort, "acceptThenAbort"},
    {AdversaryFlags::corruptProposal, "corruptProposal"},
    {AdversaryFlags::forgeProposal, "forgeProposal"},
    {AdversaryFlags::colludeSign, "colludeSign"},
};

void writeProposal(BinWriter& w, const Proposal& prop) {
  writeDepositId(w, prop.depositId);
  w.u32(static_cast<std::uint32_t>(prop.signHash.size()));
  for (const auto& h : prop.signHash) w.hash(h);
}

Proposal readProposal(BinReader& r) {
  Proposal prop;
  prop.depositId = readDepositId(r);
  std::uint32_t count = r.u32();
  if (count > 1024) count = 0;
  prop.signHash.reserve(count);
  for (std::uint32_t i = 0; i < count; ++i) prop.signHash.push_back(r.hash());
  return prop;
}

}  // namespace

std::string AdversaryFlags::str() const {
  std::string out;
  for (const auto& f : kFlagNames) {
    if (!(bits & f.bit)) continue;
    if (!out.empty()) out += "+";
    out += f.name;
  }
  return out.empty() ? "honest" : out;
}

std::optional<std::uint32_t> AdversaryFlags::flagFromName(const std::string& name) {
  for (const auto& f : kFlagNames)
    if (name == f.name) return f.bit;
  return std::nullopt;
}

std::vector<int> selectSigners(std::vector<int> acceptors, int proposer, int committeeSize,
                               const std::function<std::uint64_t()>& next) {
  std::sort(acceptors.begin(), acceptors.end());
  while (static_cast<int>(acceptors.size()) > committeeSize - 1) {
    std::uint64_t x = next();
    acceptors.erase(acceptors.begin() + static_cast<std::ptrdiff_t>(x % acceptors.size()));
  }
  acceptors.push_back(proposer);
  std::sort(acceptors.begin(), acceptors.end());
  return acceptors;
}

void writeDepositData(BinWriter& w, const DepositData& d) {
  w.str(d.sourceChainId);
  w.hash(d.depositTxHash);
  w.u64(d.txNonce);
  w.str(d.sender);
  w.str(d.tokenAddr);
  w.u64(d.amount);
  w.str(d.targetChainId);
  w.str(d.targetAddr);
}

DepositData readDepositData(BinReader& r) {
  DepositData d;
  d.sourceChainId = r.str();
  d.depositTxHash = r.hash();
  d.txNonce = r.u64();
  d.sender = r.str();
  d.tokenAddr = r.str();
  d.amount = r.u64();
  d.targetChainId = r.str();
  d.targetAddr = r.str();
  return d;
}

ValidatorNode::ValidatorNode(Context ctx, SimNetwork* net, TssEngine* engine,
                             std::map<std::string, std::unique_ptr<ChainClient>> clients)
    : ctx_(std::move(ctx)),
      net_(net),
      engine_(engine),
      clients_(std::move(clients)),
      rb_(
          ctx_.index, ctx_.params.n, ctx_.params.t,
          [this](const Bytes& payload) { sendToValidators(payload); },
          [this](const RBInstanceId& inst) {
            return inst.kind == RBInstanceId::Kind::custom
                       ? 0
                       : ctx_.proposerOf ? ctx_.proposerOf(inst.sid)
                                         : static_cast<int>(inst.sid % ctx_.params.n);
          },
          [this](const RBInstanceId& inst, const Bytes& value, int sender) {
            onRbDeliver(inst, value, sender);
          }) {
  if (!ctx_.proposerOf) {
    int n = ctx_.params.n;
    ctx_.proposerOf = [n](std::uint64_t sid) { return static_cast<int>(sid % n); };
  }
}

std::uint64_t ValidatorNode::sidAt(Tick now) const {
  if (now < ctx_.sessionStart) return 0;
  return static_cast<std::uint64_t>((now - ctx_.sessionStart) / ctx_.params.sessionTicks());
}

Tick ValidatorNode::sessionBase(std::uint64_t sid) const {
  return ctx_.sessionStart + static_cast<Tick>(sid) * ctx_.params.sessionTicks();
}

void ValidatorNode::sendToValidators(const Bytes& payload) {
  for (int v = 0; v < ctx_.params.n; ++v) net_->send(ctx_.index, v, payload);
}

ChainClient* ValidatorNode::clientFor(const std::string& chainId) const {
  auto it = clients_.find(chainId);
  return it == clients_.end() ? nullptr : it->second.get();
}

RequestData& ValidatorNode::ensureRequest(const DepositIdentifier& id, Tick now) {
  auto [it, inserted] = requests_.try_emplace(id);
  if (inserted) {
    it->second.depositId = id;
    arrival_.emplace(id, now);
  }
  return it->second;
}

void ValidatorNode::verifyDeposit(RequestData& req) {
  ChainClient* source = clientFor(req.depositId.chainId);
  if (!source) return;
  auto data = source->getDepositData(req.depositId);
  if (!data) return;
  ChainClient* target = clientFor(data->targetChainId);
  if (!target || data->targetChainId == req.depositId.chainId) return;
  if (!target->validTargetAddress(data->targetAddr) || !target->validTargetAmount(data->amount))
    return;
  auto next = statusTransition(req.status, StatusEvent::DepositVerified);
  if (!next) return;
  req.depositData = *data;
  req.status = *next;
}

Result<SignHashes> ValidatorNode::hashOfRequest(const RequestData& req) const {
  if (!req.depositData) return Err::NotFound;
  ChainClient* target = clientFor(req.depositData->targetChainId);
  if (!target) return Err::UnsupportedChain;
  return target->getHashOfWithdrawal(*req.depositData);
}

void ValidatorNode::onEnvelope(const Envelope& env) {
  now_ = net_->now();
  BinReader r(env.payload);
  auto kind = static_cast<MsgKind>(r.u8());
  switch (kind) {
    case MsgKind::rbSend:
    case MsgKind::rbEcho:
    case MsgKind::rbReady:
      rb_.onMessage(env.from, kind, r);
      return;
    case MsgKind::submitWithdrawal:
      handleSubmit(readDepositId(r), now_);
      return;
    case MsgKind::acceptance: {
      std::uint64_t sid = r.u64();
      Proposal prop = readProposal(r);
      if (r.ok()) handleAcceptance(env.from, sid, prop, now_);
      return;
    }
    case MsgKind::signature: {
      std::uint64_t sid = r.u64();
      DepositIdentifier id = readDepositId(r);
      Bytes sig = r.bytes();
      if (r.ok()) handleSignature(sid, id, sig, now_);
      return;
    }
    case MsgKind::checkWithdrawalReq:
      handleCheckReq(env.from, readDepositId(r));
      return;
    case MsgKind::checkWithdrawalResp:
      return;
  }
}

void ValidatorNode::handleSubmit(const DepositIdentifier& id, Tick now) {
  if (!clientFor(id.chainId)) return;
  bool firstSight = !requests_.count(id);
  ensureRequest(id, now);
  if (firstSight && !echoed_.count(id)) {
    echoed_.insert(id);
    BinWriter w;
    w.u8(static_cast<std::uint8_t>(MsgKind::submitWithdrawal));
    writeDepositId(w, id);
    Bytes payload = w.take();
    for (int v = 0; v < ctx_.params.n; ++v)
      if (v != ctx_.index) net_->send(ctx_.index, v, payload);
  }
}

void ValidatorNode::onRbDeliver(const RBInstanceId& instance, const Bytes& value, int) {
  if (instance.kind == RBInstanceId::Kind::custom) return;
  BinReader r(value);
  if (instance.kind == RBInstanceId::Kind::proposal) {
    Proposal prop = readProposal(r);
    if (!r.ok() || prop.signHash.empty()) return;
    proposalSeen_.emplace(instance.sid, prop);
    handleProposal(instance.sid, prop, now_);
    return;
  }
  SignStart ss;
  ss.prop = readProposal(r);
  std::uint32_t count = r.u32();
  if (count > 64) return;
  for (std::uint32_t i = 0; i < count; ++i) ss.signers.push_back(static_cast<int>(r.u32()));
  if (!r.ok() || ss.prop.signHash.empty()) return;
  signStartSeen_.emplace(instance.sid, ss);
  handleSignStart(instance.sid, ss, now_);
}

void ValidatorNode::handleProposal(std::uint64_t sid, const Proposal& prop, Tick now) {
  if (now < ctx_.sessionStart || sidAt(now) != sid) return;
  RequestData& req = ensureRequest(prop.depositId, now);
  if (req.status == RequestStatus::invalid) verifyDeposit(req);

  bool accept = false;
  if (ctx_.flags.has(AdversaryFlags::acceptThenAbort) ||
      ctx_.flags.has(AdversaryFlags::colludeSign)) {
    accept = true;
  } else if (ctx_.flags.has(AdversaryFlags::neverAccept)) {
    accept = false;
  } else if (req.status == RequestStatus::pending && req.depositData) {
    auto expected = hashOfRequest(req);
    accept = expected && *expected == prop.signHash;
  }
  if (!accept) return;

  accepted_[sid] = prop;
  int proposer = ctx_.proposerOf(sid);
  if (proposer == ctx_.index) return;
  BinWriter w;
  w.u8(static_cast<std::uint8_t>(MsgKind::acceptance));
  w.u64(sid);
  writeProposal(w, prop);
  net_->send(ctx_.index, proposer, w.take());
}

void ValidatorNode::handleAcceptance(int from, std::uint64_t sid, const Proposal& prop,
                                     Tick now) {
  auto it = proposer_.find(sid);
  if (it == proposer_.end() || !it->second.proposed || it->second.signStartSent) return;
  if (now > sessionBase(sid) + ctx_.params.acceptanceBoundary) return;
  if (from < 0 || from >= ctx_.params.n || from == ctx_.index) return;
  if (!ctx_.flags.has(AdversaryFlags::arbitraryCommittee) &&
      !ctx_.flags.has(AdversaryFlags::forgeProposal)) {
    if (!(prop == it->second.prop)) return;
  }
  it->second.acceptors.insert(from);
}

void ValidatorNode::handleSignStart(std::uint64_t sid, const SignStart& ss, Tick now) {
  auto acc = accepted_.find(sid);
  if (acc == accepted_.end() || !(acc->second == ss.prop)) return;
  auto reqIt = requests_.find(ss.prop.depositId);
  if (reqIt == requests_.end()) return;
  RequestData& req = reqIt->second;
  auto next = statusTransition(req.status, StatusEvent::SignStartDelivered);
  if (!next) return;
  req.status = *next;
  req.withdrawalData.signHash = ss.prop.signHash;
  req.withdrawalData.signers = ss.signers;
  (void)now;
}

void ValidatorNode::handleSignature(std::uint64_t sid, const DepositIdentifier& id,
                                    const Bytes& sig, Tick now) {
  RequestData& req = ensureRequest(id, now);
  if (req.status == RequestStatus::processed || req.status == RequestStatus::finalized) return;

  // Bind the signature to the hash this validator believes should have been
  // signed: the broadcast-agreed proposal for this session if one matches,
  // otherwise its own view of the request.
  SignHashes expected;
  auto seen = proposalSeen_.find(sid);
  if (seen != proposalSeen_.end() && seen->second.depositId == id) {
    expected = seen->second.signHash;
  } else if (!req.withdrawalData.signHash.empty()) {
    expected = req.withdrawalData.signHash;
  } else {
    if (req.status == RequestStatus::invalid) verifyDeposit(req);
    auto computed = hashOfRequest(req);
    if (!computed) return;
    expected = *computed;
  }

  if (!TssEngine::verify(engine_->groupKey(), expected, sig)) return;

  // A valid signature implies at least one honest committee member verified
  // the deposit; re-verify locally so the withdrawal data is available for
  // finalization before adopting the processed state.
  if (req.status == RequestStatus::invalid) verifyDeposit(req);
  if (!req.depositData) return;
  auto next = statusTransition(req.status, StatusEvent::ValidSignatureDelivered);
  if (!next) return;
  req.status = *next;
  req.withdrawalData.signHash = expected;
  req.withdrawalData.signature = sig;
}

void ValidatorNode::handleCheckReq(int from, const DepositIdentifier& id) {
  BinWriter w;
  w.u8(static_cast<std::uint8_t>(MsgKind::checkWithdrawalResp));
  auto it = requests_.find(id);
  w.u8(it != requests_.end() ? 1 : 0);
  writeDepositId(w, id);
  if (it != requests_.end()) {
    const RequestData& req = it->second;
    w.u8(static_cast<std::uint8_t>(req.status));
    w.u8(req.depositData ? 1 : 0);
    if (req.depositData) writeDepositData(w, *req.depositData);
    w.u8(req.withdrawalData.signature ? 1 : 0);
    if (req.withdrawalData.signature) w.bytes(*req.withdrawalData.signature);
  }
  net_->send(ctx_.index, from, w.take());
}

Result<RequestData> ValidatorNode::checkWithdrawal(const DepositIdentifier& id) const {
  auto it = requests_.find(id);
  if (it == requests_.end()) return Err::NotFound;
  return it->second;
}

void ValidatorNode::onTick(Tick now) {
  now_ = now;
  // Retry verification of unverified requests every tick. All validators do
  // this against the same chain state at the same tick, so their verdicts
  // agree even when a submit reached them on different ticks.
  for (auto& [id, req] : requests_)
    if (req.status == RequestStatus::invalid) verifyDeposit(req);
  if (now < ctx_.sessionStart) return;
  Tick offset = (now - ctx_.sessionStart) % ctx_.params.sessionTicks();
  std::uint64_t sid = sidAt(now);

  if (offset == 0) beginSession(sid, now);
  if (offset == ctx_.params.acceptanceBoundary) closeAcceptance(sid, now);
  if (offset == ctx_.params.consensusBoundary) beginSigning(sid, now);
  if (offset == ctx_.params.consensusBoundary + ctx_.params.signBoundary)
    revertAndFinalize(sid, now);
}

void ValidatorNode::beginSession(std::uint64_t sid, Tick now) {
  for (auto& [chainId, client] : clients_) client->pruneLocks();

  if (ctx_.proposerOf(sid) != ctx_.index) return;
  if (ctx_.flags.has(AdversaryFlags::crashedProposer)) return;

  Proposal prop;
  bool have = false;

  if (ctx_.flags.has(AdversaryFlags::forgeProposal)) {
    // Invent a deposit that never happened, targeting the first EVM chain.
    DepositData fd;
    BinWriter seed;
    seed.str("forged");
    seed.u64(sid);
    fd.depositTxHash = sha256(seed.buffer());
    fd.txNonce = 0;
    fd.amount = 1000;
    for (auto& [chainId, client] : clients_) {
      if (client->kind() == ChainKind::evm)
        fd.targetChainId = chainId;
      else if (fd.sourceChainId.empty())
        fd.sourceChainId = chainId;
    }
    if (fd.targetChainId.empty() || fd.sourceChainId.empty()) return;
    fd.targetAddr = "0xintruder";
    fd.tokenAddr = "";
    auto target = clientFor(fd.targetChainId);
    auto hashes = target->getHashOfWithdrawal(fd);
    if (!hashes) return;
    prop.depositId = {fd.sourceChainId, fd.depositTxHash, fd.txNonce};
    prop.signHash = *hashes;
    RequestData& req = ensureRequest(prop.depositId, now);
    req.depositData = fd;
    req.status = RequestStatus::pending;
    have = true;
  } else {
    // Oldest pending request whose withdrawal hash is computable.
    std::vector<std::pair<std::pair<Tick, std::string>, const DepositIdentifier*>> order;
    for (const auto& [id, req] : requests_) {
      if (req.status != RequestStatus::pending) continue;
      order.push_back({{arrival_.at(id), id.canonical()}, &id});
    }
    std::sort(order.begin(), order.end());
    for (const auto& [key, idPtr] : order) {
      const RequestData& req = requests_.at(*idPtr);
      auto hashes = hashOfRequest(req);
      if (!hashes) continue;
      prop.depositId = *idPtr;
      prop.signHash = *hashes;
      have = true;
      break;
    }
  }
  if (!have) return;

  if (ctx_.flags.has(AdversaryFlags::corruptProposal)) prop.signHash[0][0] ^= 1;

  auto& ps = proposer_[sid];
  ps.prop = prop;
  BinWriter w;
  writeProposal(w, prop);
  if (rb_.broadcast(RBInstanceId::proposal(sid), w.take())) {
    ps.proposed = true;
    accepted_[sid] = prop;
  }
}

void ValidatorNode::closeAcceptance(std::uint64_t sid, Tick now) {
  auto it = proposer_.find(sid);
  if (it == proposer_.end() || !it->second.proposed || it->second.signStartSent) return;
  ProposerState& ps = it->second;

  std::vector<int> signers;
  if (ctx_.flags.has(AdversaryFlags::forgeProposal)) {
    for (int peer : ctx_.adversaryPeers) {
      if (static_cast<int>(signers.size()) >= ctx_.params.committee()) break;
      signers.push_back(peer);
    }
    std::sort(signers.begin(), signers.end());
  } else if (ctx_.flags.has(AdversaryFlags::arbitraryCommittee)) {
    // Complete control over the draw: take the highest-indexed acceptors.
    std::vector<int> acceptors(ps.acceptors.begin(), ps.acceptors.end());
    std::sort(acceptors.rbegin(), acceptors.rend());
    acceptors.resize(std::min<std::size_t>(acceptors.size(), ctx_.params.committee() - 1));
    signers = acceptors;
    signers.push_back(ctx_.index);
    std::sort(signers.begin(), signers.end());
  } else {
    if (static_cast<int>(ps.acceptors.size()) < ctx_.params.committee() - 1) return;
    std::vector<int> acceptors(ps.acceptors.begin(), ps.acceptors.end());
    SplitMix64 prg(ctx_.instanceNonce + sid);
    signers = selectSigners(acceptors, ctx_.index, ctx_.params.committee(),
                            [&prg] { return prg.next(); });
  }
  if (signers.empty()) return;

  BinWriter w;
  writeProposal(w, ps.prop);
  w.u32(static_cast<std::uint32_t>(signers.size()));
  for (int s : signers) w.u32(static_cast<std::uint32_t>(s));
  if (rb_.broadcast(RBInstanceId::signStart(sid), w.take())) ps.signStartSent = true;
  (void)now;
}

void ValidatorNode::beginSigning(std::uint64_t sid, Tick now) {
  auto it = signStartSeen_.find(sid);
  if (it == signStartSeen_.end()) return;
  const SignStart& ss = it->second;
  if (std::find(ss.signers.begin(), ss.signers.end(), ctx_.index) == ss.signers.end()) return;

  std::string sessionId = tssSessionId(sid, ss.prop.depositId, ss.signers, ss.prop.signHash);
  Tick deadline = sessionBase(sid) + ctx_.params.consensusBoundary + ctx_.params.signBoundary - 1;
  engine_->startSigning(sessionId, ss.signers, ss.prop.signHash, deadline, now);
  tssSessions_.emplace(sessionId, sid);

  if (ctx_.flags.has(AdversaryFlags::silentSigner) ||
      ctx_.flags.has(AdversaryFlags::acceptThenAbort))
    return;

  bool approve = false;
  if (ctx_.flags.has(AdversaryFlags::colludeSign)) {
    approve = true;
  } else {
    auto acc = accepted_.find(sid);
    auto reqIt = requests_.find(ss.prop.depositId);
    approve = acc != accepted_.end() && acc->second == ss.prop && reqIt != requests_.end() &&
              reqIt->second.status == RequestStatus::processing;
  }
  if (approve) engine_->approve(sessionId, ctx_.index, ss.prop.signHash, now);
}

void ValidatorNode::onTssEmission(const TssEngine::Emission& em) {
  if (em.state != TssEngine::SignState::ready) return;
  auto it = tssSessions_.find(em.sessionId);
  if (it == tssSessions_.end()) return;
  std::uint64_t sid = it->second;
  auto ss = signStartSeen_.find(sid);
  if (ss == signStartSeen_.end()) return;

  BinWriter w;
  w.u8(static_cast<std::uint8_t>(MsgKind::signature));
  w.u64(sid);
  writeDepositId(w, ss->second.prop.depositId);
  w.bytes(em.signature);
  sendToValidators(w.take());
}

void ValidatorNode::revertAndFinalize(std::uint64_t sid, Tick now) {
  (void)sid;
  (void)now;
  for (auto& [id, req] : requests_) {
    if (req.status == RequestStatus::processing && !req.withdrawalData.signature) {
      auto next = statusTransition(req.status, StatusEvent::SigningFailed);
      if (next) {
        req.status = *next;
        req.withdrawalData = {};
      }
    }
  }
  for (auto& [id, req] : requests_) {
    if (req.status != RequestStatus::processed) continue;
    if (!req.depositData || !req.withdrawalData.signature) continue;
    ChainClient* target = clientFor(req.depositData->targetChainId);
    if (!target) continue;
    auto res = target->submitWithdrawal(*req.depositData, *req.withdrawalData.signature);
    bool done = res.ok() || res.error() == Err::AlreadyWithdrawn || res.error() == Err::DuplicateTx;
    if (!done) continue;
    auto next = statusTransition(req.status, StatusEvent::WithdrawalSubmitted);
    if (next) {
      req.status = *next;
      if (res) req.withdrawalData.withdrawalTxHash = *res;
    }
  }
}

std::optional<Proposal> ValidatorNode::proposalSeen(std::uint64_t sid) const {
  auto it = proposalSeen_.find(sid);
  if (it == proposalSeen_.end()) return std::nullopt;
  return it->second;
}

std::optional<std::vector<int>> ValidatorNode::signersSeen(std::uint64_t sid) const {
  auto it = signStartSeen_.find(sid);
  if (it == signStartSeen_.end()) return std::nullopt;
  return it->second.signers;
}

}  // namespace bridgesim
