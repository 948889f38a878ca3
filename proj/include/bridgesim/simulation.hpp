#pragma once

#include <memory>

#include "bridgesim/validator.hpp"

namespace bridgesim {

class SafetyObserver;

struct ChainConfig {
  std::string chainId;
  ChainKind kind = ChainKind::evm;
  int requiredConfirmations = 0;  // 0 means the kind's default (evm 3, utxo 2, burnEmit 1)
  std::string bridgeAddress;      // contract address on EVM chains

  std::map<std::string, std::uint64_t> genesisNative;
  std::map<std::string, std::map<std::string, std::uint64_t>> genesisTokens;
  std::vector<std::pair<std::string, std::uint64_t>> genesisOutputs;
  std::map<std::string, std::map<std::string, std::uint64_t>> genesisAssets;
};

int defaultConfirmations(ChainKind kind);

struct RequestConfig {
  enum class Kind { erc20, native, utxo, burn, garbage };

  int client = 0;
  Kind kind = Kind::erc20;
  std::string sourceChainId;
  std::string targetChainId;
  std::string tokenAddr;
  std::uint64_t amount = 0;
  std::string sender;
  std::string targetAddr;
  Tick depositTick = -1;  // negative: confirmed before the simulation starts
  Tick submitTick = 0;
  std::vector<int> submitTo;  // empty: all validators
  bool clientWithdraw = false;
};

struct FillerConfig {
  std::string chainId;
  Tick tick = 0;
  std::string owner;
  std::uint64_t value = 0;
};

struct ReorgConfig {
  std::string chainId;
  Tick tick = 0;
  int fillerIndex = 0;
};

struct AdversaryConfig {
  int validator = 0;
  std::uint32_t flags = 0;
};

struct WorldConfig {
  std::string name = "scenario";
  std::uint64_t seed = 1;
  ProtocolParams params;
  Tick sessionStart = 2;
  int maxSessions = 4;
  Tick drainTicks = 6;
  bool seededProposer = false;  // false: round-robin by session id
  std::uint64_t instanceNonce = 0;
  bool observerChecks = true;
  bool logging = false;

  std::vector<AdversaryConfig> adversaries;
  std::vector<ChainConfig> chains;
  std::vector<RequestConfig> requests;
  std::vector<FillerConfig> fillers;
  std::vector<ReorgConfig> reorgs;
};

enum class SessionOutcome { Idle, NoProposal, SigningFailed, Stalled, Finalized };
const char* sessionOutcomeName(SessionOutcome o);

struct SessionRecord {
  std::uint64_t sid = 0;
  int proposer = 0;
  std::optional<Proposal> proposal;
  std::optional<std::vector<int>> signers;
  SessionOutcome outcome = SessionOutcome::Idle;
};

// One full simulation: chains, signing oracle, validators, client actors and
// the deterministic network, driven tick by tick.
class World {
 public:
  explicit World(const WorldConfig& config);
  ~World();

  // Runs every configured session plus the drain window.
  void run();

  // Runs through the end of the next session and returns its record; null
  // once all sessions have run.
  const SessionRecord* runSession();

  const WorldConfig& config() const { return config_; }
  const std::vector<SessionRecord>& sessions() const { return sessionRecords_; }
  const std::vector<std::string>& violations() const;
  const EventLog* eventLog() const { return log_.get(); }

  EvmChain* evm(const std::string& chainId);
  UtxoChain* utxo(const std::string& chainId);
  BurnEmitChain* burnEmit(const std::string& chainId);
  const EvmChain* evm(const std::string& chainId) const;
  const UtxoChain* utxo(const std::string& chainId) const;
  const BurnEmitChain* burnEmit(const std::string& chainId) const;
  std::optional<ChainKind> kindOf(const std::string& chainId) const;
  int requiredConfirmations(const std::string& chainId) const;

  TssEngine& engine() { return *engine_; }
  const TssEngine& engine() const { return *engine_; }
  const std::vector<std::unique_ptr<ValidatorNode>>& validators() const { return validators_; }
  std::vector<int> honestValidators() const;

  const std::vector<std::optional<DepositIdentifier>>& requestDeposits() const {
    return requestDeposits_;
  }

  std::unique_ptr<ChainClient> makeClient(const std::string& chainId) const;

  Tick now() const { return net_->now(); }

 private:
  struct ClientActor {
    int requestIndex = 0;
    bool submitted = false;
    bool withdrawn = false;
  };

  void setupChains();
  void setupValidators();
  void performDeposit(int requestIndex);
  void scenarioActions(Tick now);
  void clientActions(Tick now);
  void onClientEnvelope(const Envelope& env);
  void step();
  void closeSession(std::uint64_t sid);
  void classifySession(SessionRecord& rec) const;

  WorldConfig config_;
  std::unique_ptr<EventLog> log_;
  std::unique_ptr<SimNetwork> net_;
  std::unique_ptr<TssEngine> engine_;
  std::map<std::string, std::unique_ptr<EvmChain>> evm_;
  std::map<std::string, std::unique_ptr<UtxoChain>> utxo_;
  std::map<std::string, std::unique_ptr<BurnEmitChain>> burnEmit_;
  std::vector<std::unique_ptr<ValidatorNode>> validators_;
  std::vector<ClientActor> actors_;
  std::vector<std::optional<DepositIdentifier>> requestDeposits_;
  std::vector<std::optional<Hash32>> fillerTxids_;
  std::vector<SessionRecord> sessionRecords_;
  std::unique_ptr<SafetyObserver> observer_;
  std::vector<std::string> noViolations_;
  std::uint64_t nextSession_ = 0;
  std::function<int(std::uint64_t)> proposerOf_;
};

}  // namespace bridgesim
