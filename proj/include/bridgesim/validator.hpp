#pragma once

#include <functional>
#include <map>
#include <memory>
#include <set>

#include "bridgesim/chain_client.hpp"
#include "bridgesim/rb.hpp"
#include "bridgesim/simnet.hpp"
#include "bridgesim/tss.hpp"

namespace bridgesim {

// Behaviour switches for Byzantine validators. Flags compose; an honest
// validator has none set.
struct AdversaryFlags {
  enum : std::uint32_t {
    silentSigner = 1u << 0,      // never approves in the signing phase
    neverAccept = 1u << 1,       // never sends acceptances
    crashedProposer = 1u << 2,   // sends nothing when it is the proposer
    arbitraryCommittee = 1u << 3,  // as proposer, ignores the committee draw
    acceptThenAbort = 1u << 4,   // accepts any proposal, then withholds approval
    corruptProposal = 1u << 5,   // as proposer, flips a bit in the sign hash
    forgeProposal = 1u << 6,     // as proposer, invents a deposit out of thin air
    colludeSign = 1u << 7,       // approves any message it is asked to sign
  };

  std::uint32_t bits = 0;

  bool has(std::uint32_t flag) const { return (bits & flag) != 0; }
  bool any() const { return bits != 0; }

  std::string str() const;
  static std::optional<std::uint32_t> flagFromName(const std::string& name);
};

struct Proposal {
  DepositIdentifier depositId;
  SignHashes signHash;

  friend bool operator==(const Proposal&, const Proposal&) = default;
};

// Committee draw: repeatedly removes a uniformly chosen acceptor until
// committeeSize - 1 remain, then adds the proposer. `next` supplies the raw
// 64-bit draws; production code seeds a SplitMix64 stream with the session id
// (plus the run's instance nonce).
std::vector<int> selectSigners(std::vector<int> acceptors, int proposer, int committeeSize,
                               const std::function<std::uint64_t()>& next);

// One protocol validator: verifies deposits against its own chain views,
// participates in proposal/acceptance/committee flow, signs via the
// threshold engine and finalizes withdrawals on the target chain.
class ValidatorNode {
 public:
  struct Context {
    int index = 0;
    ProtocolParams params;
    AdversaryFlags flags;
    Tick sessionStart = 2;
    std::uint64_t instanceNonce = 0;
    std::function<int(std::uint64_t)> proposerOf;
    std::vector<int> adversaryPeers;  // collusion directory, adversaries only
  };

  ValidatorNode(Context ctx, SimNetwork* net, TssEngine* engine,
                std::map<std::string, std::unique_ptr<ChainClient>> clients);

  int index() const { return ctx_.index; }
  const AdversaryFlags& flags() const { return ctx_.flags; }
  bool honest() const { return !ctx_.flags.any(); }

  void onEnvelope(const Envelope& env);
  void onTssEmission(const TssEngine::Emission& em);
  void onTick(Tick now);

  Result<RequestData> checkWithdrawal(const DepositIdentifier& id) const;
  const std::map<DepositIdentifier, RequestData>& requests() const { return requests_; }

  std::optional<Proposal> proposalSeen(std::uint64_t sid) const;
  std::optional<std::vector<int>> signersSeen(std::uint64_t sid) const;

  std::uint64_t sidAt(Tick now) const;
  Tick sessionBase(std::uint64_t sid) const;

 private:
  struct SignStart {
    Proposal prop;
    std::vector<int> signers;
  };

  struct ProposerState {
    Proposal prop;
    bool proposed = false;
    bool signStartSent = false;
    std::set<int> acceptors;
  };

  void sendToValidators(const Bytes& payload);

  ChainClient* clientFor(const std::string& chainId) const;
  void verifyDeposit(RequestData& req);
  Result<SignHashes> hashOfRequest(const RequestData& req) const;

  void handleSubmit(const DepositIdentifier& id, Tick now);
  void handleAcceptance(int from, std::uint64_t sid, const Proposal& prop, Tick now);
  void handleSignature(std::uint64_t sid, const DepositIdentifier& id, const Bytes& sig,
                       Tick now);
  void handleCheckReq(int from, const DepositIdentifier& id);

  void onRbDeliver(const RBInstanceId& instance, const Bytes& value, int sender);
  void handleProposal(std::uint64_t sid, const Proposal& prop, Tick now);
  void handleSignStart(std::uint64_t sid, const SignStart& ss, Tick now);

  void beginSession(std::uint64_t sid, Tick now);
  void closeAcceptance(std::uint64_t sid, Tick now);
  void beginSigning(std::uint64_t sid, Tick now);
  void revertAndFinalize(std::uint64_t sid, Tick now);

  RequestData& ensureRequest(const DepositIdentifier& id, Tick now);

  Context ctx_;
  SimNetwork* net_;
  TssEngine* engine_;
  std::map<std::string, std::unique_ptr<ChainClient>> clients_;
  RBEndpoint rb_;

  std::map<DepositIdentifier, RequestData> requests_;
  std::map<DepositIdentifier, Tick> arrival_;
  std::set<DepositIdentifier> echoed_;
  std::map<std::uint64_t, Proposal> proposalSeen_;
  std::map<std::uint64_t, Proposal> accepted_;
  std::map<std::uint64_t, SignStart> signStartSeen_;
  std::map<std::uint64_t, ProposerState> proposer_;
  std::map<std::string, std::uint64_t> tssSessions_;
  Tick now_ = 0;
};

void writeDepositData(BinWriter& w, const DepositData& d);
DepositData readDepositData(BinReader& r);

}  // namespace bridgesim
