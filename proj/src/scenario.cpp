#include "bridgesim/scenario.hpp"

#include <fstream>
#include <sstream>

#include "json.hpp"

namespace bridgesim {

namespace {

using nlohmann::json;

struct ParseError {
  std::string message;
};

[[noreturn]] void fail(const std::string& message) { throw ParseError{message}; }

const json& member(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) fail(std::string("missing field '") + key + "'");
  return *it;
}

std::uint64_t asU64(const json& j, const char* key) {
  const json& v = member(j, key);
  if (!v.is_number_unsigned() && !v.is_number_integer()) fail(std::string(key) + " must be a number");
  if (!v.is_number_unsigned() && v.get<std::int64_t>() < 0) fail(std::string(key) + " must be >= 0");
  return v.get<std::uint64_t>();
}

std::int64_t asI64(const json& j, const char* key) {
  const json& v = member(j, key);
  if (!v.is_number_integer() && !v.is_number_unsigned()) fail(std::string(key) + " must be a number");
  return v.get<std::int64_t>();
}

std::string asStr(const json& j, const char* key) {
  const json& v = member(j, key);
  if (!v.is_string()) fail(std::string(key) + " must be a string");
  return v.get<std::string>();
}

std::uint64_t optU64(const json& j, const char* key, std::uint64_t fallback) {
  return j.contains(key) ? asU64(j, key) : fallback;
}

std::int64_t optI64(const json& j, const char* key, std::int64_t fallback) {
  return j.contains(key) ? asI64(j, key) : fallback;
}

std::string optStr(const json& j, const char* key, const std::string& fallback) {
  return j.contains(key) ? asStr(j, key) : fallback;
}

bool optBool(const json& j, const char* key, bool fallback) {
  if (!j.contains(key)) return fallback;
  const json& v = j.at(key);
  if (!v.is_boolean()) fail(std::string(key) + " must be a boolean");
  return v.get<bool>();
}

std::map<std::string, std::uint64_t> balanceMap(const json& v, const char* what) {
  if (!v.is_object()) fail(std::string(what) + " must map addresses to amounts");
  std::map<std::string, std::uint64_t> out;
  for (const auto& [addr, amount] : v.items()) {
    if (!amount.is_number_unsigned() && !amount.is_number_integer())
      fail(std::string(what) + ": amount for " + addr + " must be a number");
    out[addr] = amount.get<std::uint64_t>();
  }
  return out;
}

ChainConfig parseChain(const json& j) {
  ChainConfig cfg;
  cfg.chainId = asStr(j, "id");
  std::string kind = asStr(j, "kind");
  auto parsed = chainKindFromName(kind);
  if (!parsed) fail("unknown chain kind '" + kind + "'");
  cfg.kind = *parsed;
  cfg.requiredConfirmations = static_cast<int>(optI64(j, "confirmations", 0));
  if (cfg.requiredConfirmations < 0) fail("confirmations must be >= 0");
  cfg.bridgeAddress = optStr(j, "bridgeAddress", "bridge:" + cfg.chainId);
  if (!j.contains("genesis")) return cfg;
  const json& g = member(j, "genesis");
  if (!g.is_object()) fail("genesis must be an object");
  if (g.contains("native")) cfg.genesisNative = balanceMap(g.at("native"), "genesis.native");
  if (g.contains("tokens")) {
    if (!g.at("tokens").is_object()) fail("genesis.tokens must be an object");
    for (const auto& [token, balances] : g.at("tokens").items())
      cfg.genesisTokens[token] = balanceMap(balances, "genesis.tokens");
  }
  if (g.contains("outputs")) {
    const json& outs = g.at("outputs");
    if (!outs.is_array()) fail("genesis.outputs must be an array");
    for (const json& entry : outs) {
      if (!entry.is_array() || entry.size() != 2 || !entry.at(0).is_string())
        fail("genesis.outputs entries are [address, value] pairs");
      cfg.genesisOutputs.emplace_back(entry.at(0).get<std::string>(),
                                      entry.at(1).get<std::uint64_t>());
    }
  }
  if (g.contains("assets")) {
    if (!g.at("assets").is_object()) fail("genesis.assets must be an object");
    for (const auto& [asset, balances] : g.at("assets").items())
      cfg.genesisAssets[asset] = balanceMap(balances, "genesis.assets");
  }
  return cfg;
}

RequestConfig::Kind requestKind(const std::string& name) {
  if (name == "erc20") return RequestConfig::Kind::erc20;
  if (name == "native") return RequestConfig::Kind::native;
  if (name == "utxo") return RequestConfig::Kind::utxo;
  if (name == "burn") return RequestConfig::Kind::burn;
  if (name == "garbage") return RequestConfig::Kind::garbage;
  fail("unknown request kind '" + name + "'");
}

const char* requestKindName(RequestConfig::Kind k) {
  switch (k) {
    case RequestConfig::Kind::erc20: return "erc20";
    case RequestConfig::Kind::native: return "native";
    case RequestConfig::Kind::utxo: return "utxo";
    case RequestConfig::Kind::burn: return "burn";
    case RequestConfig::Kind::garbage: return "garbage";
  }
  return "erc20";
}

RequestConfig parseRequest(const json& j) {
  RequestConfig cfg;
  cfg.kind = requestKind(asStr(j, "kind"));
  cfg.sourceChainId = asStr(j, "source");
  cfg.targetChainId = optStr(j, "target", "");
  cfg.tokenAddr = optStr(j, "token", "");
  cfg.amount = optU64(j, "amount", 0);
  cfg.sender = optStr(j, "sender", "");
  cfg.targetAddr = optStr(j, "targetAddress", "");
  cfg.depositTick = optI64(j, "depositTick", -1);
  cfg.submitTick = optI64(j, "submitTick", 0);
  cfg.clientWithdraw = optBool(j, "clientWithdraw", false);
  if (j.contains("submitTo")) {
    const json& to = j.at("submitTo");
    if (!to.is_array()) fail("submitTo must be an array of validator indices");
    for (const json& v : to) cfg.submitTo.push_back(v.get<int>());
  }
  return cfg;
}

WorldConfig parseDocument(const json& j) {
  if (!j.is_object()) fail("scenario must be a JSON object");
  WorldConfig cfg;
  cfg.name = optStr(j, "name", "scenario");
  cfg.seed = optU64(j, "seed", 1);
  cfg.params.n = static_cast<int>(asI64(j, "validators"));
  if (cfg.params.n < 1) fail("validators must be >= 1");
  cfg.params.t = static_cast<int>(optI64(j, "faultTolerance", cfg.params.n / 3));
  if (cfg.params.t < 0 || 3 * cfg.params.t > cfg.params.n)
    fail("faultTolerance must satisfy 0 <= 3t <= n");
  cfg.params.committeeSize = static_cast<int>(optI64(j, "committeeSize", 0));
  if (cfg.params.committee() > cfg.params.n) fail("committeeSize exceeds validator count");
  cfg.sessionStart = optI64(j, "sessionStart", 2);
  cfg.maxSessions = static_cast<int>(optI64(j, "maxSessions", 4));
  if (cfg.maxSessions < 0) fail("maxSessions must be >= 0");
  cfg.drainTicks = optI64(j, "drainTicks", 6);
  cfg.seededProposer = optBool(j, "seededProposer", false);
  cfg.instanceNonce = optU64(j, "instanceNonce", 0);
  cfg.observerChecks = optBool(j, "observer", true);
  cfg.logging = optBool(j, "logging", false);

  if (j.contains("adversaries")) {
    for (const json& a : j.at("adversaries")) {
      AdversaryConfig adv;
      adv.validator = static_cast<int>(asI64(a, "validator"));
      if (adv.validator < 0 || adv.validator >= cfg.params.n)
        fail("adversary index out of range");
      const json& flags = member(a, "flags");
      if (!flags.is_array()) fail("adversary flags must be an array of names");
      for (const json& f : flags) {
        auto bit = AdversaryFlags::flagFromName(f.get<std::string>());
        if (!bit) fail("unknown adversary flag '" + f.get<std::string>() + "'");
        adv.flags |= *bit;
      }
      cfg.adversaries.push_back(adv);
    }
  }

  std::set<std::string> chainIds;
  if (j.contains("chains")) {
    for (const json& c : j.at("chains")) {
      ChainConfig chain = parseChain(c);
      if (!chainIds.insert(chain.chainId).second)
        fail("duplicate chain id '" + chain.chainId + "'");
      cfg.chains.push_back(std::move(chain));
    }
  }

  if (j.contains("requests")) {
    for (const json& r : j.at("requests")) {
      RequestConfig req = parseRequest(r);
      if (!chainIds.count(req.sourceChainId))
        fail("request source chain '" + req.sourceChainId + "' is not declared");
      for (int v : req.submitTo)
        if (v < 0 || v >= cfg.params.n) fail("submitTo index out of range");
      cfg.requests.push_back(std::move(req));
    }
  }

  if (j.contains("fillers")) {
    for (const json& f : j.at("fillers")) {
      FillerConfig filler;
      filler.chainId = asStr(f, "chain");
      filler.tick = asI64(f, "tick");
      filler.owner = asStr(f, "owner");
      filler.value = asU64(f, "value");
      if (!chainIds.count(filler.chainId))
        fail("filler chain '" + filler.chainId + "' is not declared");
      cfg.fillers.push_back(std::move(filler));
    }
  }

  if (j.contains("reorgs")) {
    for (const json& r : j.at("reorgs")) {
      ReorgConfig reorg;
      reorg.chainId = asStr(r, "chain");
      reorg.tick = asI64(r, "tick");
      reorg.fillerIndex = static_cast<int>(asI64(r, "filler"));
      if (reorg.fillerIndex < 0 || reorg.fillerIndex >= static_cast<int>(cfg.fillers.size()))
        fail("reorg filler index out of range");
      cfg.reorgs.push_back(reorg);
    }
  }

  return cfg;
}

}  // namespace

Result<WorldConfig> parseScenario(const std::string& text, std::string* error) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) {
    if (error) *error = "not valid JSON";
    return Err::ConfigError;
  }
  try {
    return parseDocument(j);
  } catch (const ParseError& e) {
    if (error) *error = e.message;
    return Err::ConfigError;
  } catch (const std::exception& e) {
    if (error) *error = e.what();
    return Err::ConfigError;
  }
}

Result<WorldConfig> loadScenarioFile(const std::string& path, std::string* error) {
  std::ifstream in(path);
  if (!in) {
    if (error) *error = "cannot open " + path;
    return Err::ConfigError;
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  return parseScenario(buf.str(), error);
}

std::string scenarioToJson(const WorldConfig& config) {
  json j;
  j["name"] = config.name;
  j["seed"] = config.seed;
  j["validators"] = config.params.n;
  j["faultTolerance"] = config.params.t;
  if (config.params.committeeSize > 0) j["committeeSize"] = config.params.committeeSize;
  j["sessionStart"] = config.sessionStart;
  j["maxSessions"] = config.maxSessions;
  j["drainTicks"] = config.drainTicks;
  j["seededProposer"] = config.seededProposer;
  j["instanceNonce"] = config.instanceNonce;
  j["observer"] = config.observerChecks;
  j["logging"] = config.logging;

  j["adversaries"] = json::array();
  for (const auto& adv : config.adversaries) {
    json flags = json::array();
    for (std::uint32_t bit = 1; bit != 0 && bit <= adv.flags; bit <<= 1)
      if (adv.flags & bit) flags.push_back(AdversaryFlags{bit}.str());
    j["adversaries"].push_back({{"validator", adv.validator}, {"flags", flags}});
  }

  j["chains"] = json::array();
  for (const auto& chain : config.chains) {
    json c;
    c["id"] = chain.chainId;
    c["kind"] = chainKindName(chain.kind);
    if (chain.requiredConfirmations > 0) c["confirmations"] = chain.requiredConfirmations;
    c["bridgeAddress"] = chain.bridgeAddress;
    json g = json::object();
    if (!chain.genesisNative.empty()) g["native"] = chain.genesisNative;
    if (!chain.genesisTokens.empty()) g["tokens"] = chain.genesisTokens;
    if (!chain.genesisOutputs.empty()) {
      json outs = json::array();
      for (const auto& [addr, value] : chain.genesisOutputs) outs.push_back({addr, value});
      g["outputs"] = outs;
    }
    if (!chain.genesisAssets.empty()) g["assets"] = chain.genesisAssets;
    if (!g.empty()) c["genesis"] = g;
    j["chains"].push_back(c);
  }

  j["requests"] = json::array();
  for (const auto& req : config.requests) {
    json r;
    r["kind"] = requestKindName(req.kind);
    r["source"] = req.sourceChainId;
    if (!req.targetChainId.empty()) r["target"] = req.targetChainId;
    if (!req.tokenAddr.empty()) r["token"] = req.tokenAddr;
    r["amount"] = req.amount;
    if (!req.sender.empty()) r["sender"] = req.sender;
    if (!req.targetAddr.empty()) r["targetAddress"] = req.targetAddr;
    r["depositTick"] = req.depositTick;
    r["submitTick"] = req.submitTick;
    if (!req.submitTo.empty()) r["submitTo"] = req.submitTo;
    if (req.clientWithdraw) r["clientWithdraw"] = true;
    j["requests"].push_back(r);
  }

  if (!config.fillers.empty()) {
    j["fillers"] = json::array();
    for (const auto& f : config.fillers)
      j["fillers"].push_back(
          {{"chain", f.chainId}, {"tick", f.tick}, {"owner", f.owner}, {"value", f.value}});
  }
  if (!config.reorgs.empty()) {
    j["reorgs"] = json::array();
    for (const auto& r : config.reorgs)
      j["reorgs"].push_back({{"chain", r.chainId}, {"tick", r.tick}, {"filler", r.fillerIndex}});
  }
  return j.dump(2);
}

WorldConfig randomScenario(std::uint64_t seed, std::uint64_t index) {
  SplitMix64 rng(seed ^ (index * 0x9e3779b97f4a7c15ULL + 0x2545f4914f6cdd1dULL));

  WorldConfig cfg;
  cfg.name = "fuzz-" + std::to_string(index);
  cfg.seed = rng.next();
  cfg.params.n = 4 + static_cast<int>(rng.below(10));
  cfg.params.t = cfg.params.n / 3;
  cfg.maxSessions = 4 + static_cast<int>(rng.below(4));
  cfg.seededProposer = rng.below(2) == 0;
  cfg.instanceNonce = rng.below(1 << 16);
  cfg.logging = false;

  int adversaryCount = static_cast<int>(rng.below(cfg.params.t + 1));
  std::vector<int> pool(cfg.params.n);
  for (int i = 0; i < cfg.params.n; ++i) pool[i] = i;
  for (int a = 0; a < adversaryCount; ++a) {
    std::size_t pick = rng.below(pool.size());
    AdversaryConfig adv;
    adv.validator = pool[pick];
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
    adv.flags = 1 + static_cast<std::uint32_t>(rng.below(255));
    cfg.adversaries.push_back(adv);
  }

  const ChainKind kinds[3] = {ChainKind::evm, ChainKind::utxo, ChainKind::burnEmit};
  std::uint64_t pair = rng.below(6);
  ChainKind sourceKind = kinds[pair / 2];
  ChainKind targetKind = kinds[(pair / 2 + 1 + pair % 2) % 3];

  auto addChain = [&](ChainKind kind) -> const ChainConfig& {
    ChainConfig c;
    c.kind = kind;
    switch (kind) {
      case ChainKind::evm:
        c.chainId = "evm-1";
        c.bridgeAddress = "0xbridge";
        c.genesisNative = {{"0xclient", 100000}, {"0xbridge", 100000}};
        c.genesisTokens = {{"tok-1", {{"0xclient", 100000}, {"0xbridge", 100000}}},
                           {"ast-1", {{"0xbridge", 100000}}}};
        break;
      case ChainKind::utxo:
        c.chainId = "btc-1";
        c.bridgeAddress = "btc-bridge";
        for (int i = 0; i < 5; ++i) c.genesisOutputs.emplace_back("btc-client", 500);
        for (int i = 0; i < 5; ++i) c.genesisOutputs.emplace_back("btc-bridge", 500);
        for (int i = 0; i < 3; ++i) c.genesisOutputs.emplace_back("btc-noise", 100);
        break;
      case ChainKind::burnEmit:
        c.chainId = "zec-1";
        c.genesisAssets = {{"ast-1", {{"z-client", 100000}}}};
        break;
    }
    cfg.chains.push_back(std::move(c));
    return cfg.chains.back();
  };
  std::string sourceId = addChain(sourceKind).chainId;
  std::string targetId = addChain(targetKind).chainId;

  auto senderOn = [](ChainKind kind) {
    switch (kind) {
      case ChainKind::evm: return "0xclient";
      case ChainKind::utxo: return "btc-client";
      case ChainKind::burnEmit: return "z-client";
    }
    return "client";
  };
  auto destOn = [](ChainKind kind) {
    switch (kind) {
      case ChainKind::evm: return "0xdest";
      case ChainKind::utxo: return "btc-dest";
      case ChainKind::burnEmit: return "z-dest";
    }
    return "dest";
  };

  int requestCount = 1 + static_cast<int>(rng.below(2));
  for (int r = 0; r < requestCount; ++r) {
    RequestConfig req;
    req.sourceChainId = sourceId;
    req.targetChainId = targetId;
    req.amount = 10 + rng.below(191);
    req.sender = senderOn(sourceKind);
    req.targetAddr = destOn(targetKind);
    switch (sourceKind) {
      case ChainKind::evm:
        req.kind = rng.below(2) == 0 ? RequestConfig::Kind::erc20 : RequestConfig::Kind::native;
        if (req.kind == RequestConfig::Kind::erc20) req.tokenAddr = "tok-1";
        break;
      case ChainKind::utxo:
        req.kind = RequestConfig::Kind::utxo;
        break;
      case ChainKind::burnEmit:
        req.kind = RequestConfig::Kind::burn;
        req.tokenAddr = "ast-1";
        break;
    }
    if (rng.below(10) == 0) req.kind = RequestConfig::Kind::garbage;
    req.depositTick = rng.below(2) == 0 ? -1 : static_cast<Tick>(rng.below(3));
    Tick earliest = req.depositTick < 0 ? 0 : req.depositTick;
    req.submitTick = earliest + static_cast<Tick>(rng.below(3));
    if (rng.below(2) == 0) {
      int count = 1 + static_cast<int>(rng.below(cfg.params.n));
      std::vector<int> vpool(cfg.params.n);
      for (int i = 0; i < cfg.params.n; ++i) vpool[i] = i;
      for (int k = 0; k < count; ++k) {
        std::size_t pick = rng.below(vpool.size());
        req.submitTo.push_back(vpool[pick]);
        vpool.erase(vpool.begin() + static_cast<std::ptrdiff_t>(pick));
      }
    }
    if (targetKind == ChainKind::evm && rng.below(2) == 0) req.clientWithdraw = true;
    cfg.requests.push_back(std::move(req));
  }

  if (sourceKind == ChainKind::utxo || targetKind == ChainKind::utxo) {
    std::string utxoId = sourceKind == ChainKind::utxo ? sourceId : targetId;
    int fillerCount = static_cast<int>(rng.below(4));
    for (int f = 0; f < fillerCount; ++f) {
      FillerConfig filler;
      filler.chainId = utxoId;
      filler.tick = static_cast<Tick>(rng.below(20));
      filler.owner = "btc-noise";
      filler.value = 10 + rng.below(40);
      cfg.fillers.push_back(filler);
      if (rng.below(5) < 2) {
        ReorgConfig reorg;
        reorg.chainId = utxoId;
        reorg.tick = filler.tick + 1 + static_cast<Tick>(rng.below(8));
        reorg.fillerIndex = f;
        cfg.reorgs.push_back(reorg);
      }
    }
  }

  return cfg;
}

}  // namespace bridgesim
