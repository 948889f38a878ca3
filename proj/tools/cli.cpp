#include <cmath>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "bridgesim/liveness.hpp"
#include "bridgesim/observer.hpp"
#include "bridgesim/scenario.hpp"

namespace {

using namespace bridgesim;

int cmdRun(const std::string& path, bool printLog) {
  std::string error;
  auto config = loadScenarioFile(path, &error);
  if (!config) {
    std::cerr << "error: " << path << ": " << error << "\n";
    return 1;
  }
  if (printLog) config->logging = true;

  World world(*config);
  world.run();

  std::cout << "scenario " << config->name << ": n=" << config->params.n
            << " t=" << config->params.t << " sessions=" << config->maxSessions << "\n";
  for (const auto& rec : world.sessions()) {
    std::cout << "session " << rec.sid << ": proposer=" << rec.proposer;
    if (rec.proposal) std::cout << " request=" << rec.proposal->depositId.canonical();
    if (rec.signers) {
      std::cout << " committee=";
      for (std::size_t i = 0; i < rec.signers->size(); ++i)
        std::cout << (i ? "," : "") << (*rec.signers)[i];
    }
    std::cout << " outcome=" << sessionOutcomeName(rec.outcome) << "\n";
  }

  auto honest = world.honestValidators();
  if (!honest.empty()) {
    for (const auto& [id, req] : world.validators()[honest.front()]->requests())
      std::cout << "request " << id.canonical() << ": " << statusName(req.status) << "\n";
  }

  if (printLog && world.eventLog())
    for (const auto& line : world.eventLog()->lines()) std::cout << line << "\n";

  if (!world.violations().empty()) {
    for (const auto& v : world.violations()) std::cerr << "VIOLATION " << v << "\n";
    std::cerr << world.violations().size() << " safety violation(s)\n";
    return 2;
  }
  std::cout << "no safety violations\n";
  return 0;
}

int cmdLivenessCurve(const LivenessOptions& opt, const std::string& outPath) {
  auto points = livenessCurve(opt);
  std::string csv = livenessCsv(points);
  if (outPath.empty() || outPath == "-") {
    std::cout << csv;
  } else {
    std::ofstream out(outPath);
    if (!out) {
      std::cerr << "error: cannot write " << outPath << "\n";
      return 1;
    }
    out << csv;
    std::cout << "wrote " << points.size() << " points to " << outPath << "\n";
  }
  return 0;
}

int cmdFormula(int n, int t, int rounds) {
  if (n < 1 || t < 0 || t >= n) {
    std::cerr << "error: need n >= 1 and 0 <= t < n\n";
    return 1;
  }
  std::cout.precision(10);
  std::cout << "p(session)  = " << sessionSuccessProbability(n, t) << "  ["
            << sessionSuccessRational(n, t) << "]\n";
  std::cout << "p(" << rounds << " rounds) = " << livenessProbability(n, t, rounds) << "  ["
            << livenessRational(n, t, rounds) << "]\n";
  return 0;
}

WorldConfig happyPath(ChainKind sourceKind, ChainKind targetKind, std::uint64_t seed) {
  WorldConfig base = randomScenario(seed, 0);
  base.chains.clear();
  base.requests.clear();
  base.fillers.clear();
  base.reorgs.clear();
  base.adversaries.clear();
  base.params.n = 4;
  base.params.t = 1;
  base.maxSessions = 3;
  base.seededProposer = false;
  base.name = std::string(chainKindName(sourceKind)) + "-to-" + chainKindName(targetKind);

  auto chainFor = [](ChainKind kind) {
    ChainConfig c;
    c.kind = kind;
    switch (kind) {
      case ChainKind::evm:
        c.chainId = "evm-1";
        c.bridgeAddress = "0xbridge";
        c.genesisNative = {{"0xclient", 10000}, {"0xbridge", 10000}};
        c.genesisTokens = {{"tok-1", {{"0xclient", 10000}, {"0xbridge", 10000}}},
                           {"ast-1", {{"0xbridge", 10000}}}};
        break;
      case ChainKind::utxo:
        c.chainId = "btc-1";
        c.bridgeAddress = "btc-bridge";
        for (int i = 0; i < 4; ++i) c.genesisOutputs.emplace_back("btc-client", 500);
        for (int i = 0; i < 4; ++i) c.genesisOutputs.emplace_back("btc-bridge", 500);
        break;
      case ChainKind::burnEmit:
        c.chainId = "zec-1";
        c.genesisAssets = {{"ast-1", {{"z-client", 10000}}}};
        break;
    }
    return c;
  };
  base.chains.push_back(chainFor(sourceKind));
  base.chains.push_back(chainFor(targetKind));

  RequestConfig req;
  req.sourceChainId = base.chains[0].chainId;
  req.targetChainId = base.chains[1].chainId;
  req.amount = 75;
  switch (sourceKind) {
    case ChainKind::evm:
      req.kind = RequestConfig::Kind::native;
      req.sender = "0xclient";
      break;
    case ChainKind::utxo:
      req.kind = RequestConfig::Kind::utxo;
      req.sender = "btc-client";
      break;
    case ChainKind::burnEmit:
      req.kind = RequestConfig::Kind::burn;
      req.tokenAddr = "ast-1";
      req.sender = "z-client";
      break;
  }
  switch (targetKind) {
    case ChainKind::evm: req.targetAddr = "0xdest"; break;
    case ChainKind::utxo: req.targetAddr = "btc-dest"; break;
    case ChainKind::burnEmit: req.targetAddr = "z-dest"; break;
  }
  base.requests.push_back(req);
  return base;
}

int cmdSelftest() {
  int failures = 0;
  auto check = [&](bool ok, const std::string& what) {
    std::cout << (ok ? "ok   " : "FAIL ") << what << "\n";
    if (!ok) ++failures;
  };

  check(std::abs(sessionSuccessProbability(4, 1) - 0.5) < 1e-12, "formula p(4,1) = 1/2");
  check(std::abs(sessionSuccessProbability(10, 3) - 1.0 / 6.0) < 1e-12, "formula p(10,3) = 1/6");
  check(std::abs(livenessProbability(4, 1, 10) - 0.9990234375) < 1e-12,
        "formula liveness(4,1,10) = 1 - 2^-10");
  check(sessionSuccessProbability(7, 0) == 1.0, "formula p(n,0) = 1");

  const ChainKind kinds[3] = {ChainKind::evm, ChainKind::utxo, ChainKind::burnEmit};
  for (int s = 0; s < 3; ++s) {
    for (int d = 0; d < 3; ++d) {
      if (s == d) continue;
      WorldConfig cfg = happyPath(kinds[s], kinds[d], 7);
      World world(cfg);
      world.run();
      bool finalized = false;
      for (const auto& rec : world.sessions())
        if (rec.outcome == SessionOutcome::Finalized) finalized = true;
      check(finalized && world.violations().empty(), "happy path " + cfg.name);
    }
  }

  bool fuzzClean = true;
  for (std::uint64_t i = 0; i < 20 && fuzzClean; ++i) {
    World world(randomScenario(42, i));
    world.run();
    if (!world.violations().empty()) fuzzClean = false;
  }
  check(fuzzClean, "20 random adversarial scenarios, no violations");

  if (failures) {
    std::cerr << failures << " selftest failure(s)\n";
    return 2;
  }
  std::cout << "selftest: ok\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deterministic cross-chain bridge protocol simulator"};
  app.require_subcommand(1);

  std::string scenarioPath;
  bool printLog = false;
  auto* run = app.add_subcommand("run", "Run a scenario file and report the outcome");
  run->add_option("scenario", scenarioPath, "Scenario JSON file")->required();
  run->add_flag("--log", printLog, "Print the network event log");

  LivenessOptions opt;
  std::string outPath;
  auto* curve = app.add_subcommand("liveness-curve",
                                   "Measure finalization probability against the closed form");
  curve->add_option("--n", opt.n, "Validator count")->required();
  curve->add_option("--t", opt.t, "Adversary count")->required();
  curve->add_option("--trials", opt.trials, "Simulated protocol runs");
  curve->add_option("--max-sessions", opt.maxSessions, "Sessions per run (curve length)");
  curve->add_option("--seed", opt.seed, "Trial seed");
  curve->add_option("--threads", opt.threads, "Worker threads (0: auto)");
  curve->add_option("--out", outPath, "CSV output path ('-' for stdout)");

  int fn = 4, ft = 1, fr = 1;
  auto* formula = app.add_subcommand("formula", "Print the closed-form liveness probability");
  formula->add_option("--n", fn, "Validator count")->required();
  formula->add_option("--t", ft, "Adversary count")->required();
  formula->add_option("--r", fr, "Number of sessions");

  auto* selftest = app.add_subcommand("selftest", "Run built-in end-to-end checks");

  CLI11_PARSE(app, argc, argv);

  if (run->parsed()) return cmdRun(scenarioPath, printLog);
  if (curve->parsed()) return cmdLivenessCurve(opt, outPath);
  if (formula->parsed()) return cmdFormula(fn, ft, fr);
  if (selftest->parsed()) return cmdSelftest();
  return 1;
}
