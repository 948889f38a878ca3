#include "bridgesim/liveness.hpp"

#include <boost/multiprecision/cpp_int.hpp>
#include <cmath>
#include <sstream>
#include <thread>

namespace bridgesim {

namespace {

using boost::multiprecision::cpp_rational;

cpp_rational sessionSuccessExact(int n, int t) {
  if (n <= 0 || t < 0 || t >= n) return 0;
  cpp_rational p(n - t, n);
  for (int i = 1; i <= t; ++i) {
    if (n - i - t <= 0) return 0;
    p *= cpp_rational(n - i - t, n - i);
  }
  return p;
}

cpp_rational livenessExact(int n, int t, int rounds) {
  cpp_rational miss = 1 - sessionSuccessExact(n, t);
  cpp_rational all(1);
  for (int r = 0; r < rounds; ++r) all *= miss;
  return 1 - all;
}

std::string rationalStr(const cpp_rational& q) {
  std::ostringstream out;
  out << q;
  return out.str();
}

WorldConfig trialConfig(int n, int t, std::uint64_t trialSeed) {
  SplitMix64 rng(trialSeed);

  WorldConfig cfg;
  cfg.name = "liveness-trial";
  cfg.seed = rng.next();
  cfg.params.n = n;
  cfg.params.t = t;
  cfg.seededProposer = true;
  cfg.instanceNonce = rng.next();
  cfg.logging = false;
  cfg.drainTicks = 0;

  std::vector<int> pool(n);
  for (int i = 0; i < n; ++i) pool[i] = i;
  for (int a = 0; a < t; ++a) {
    std::size_t pick = rng.below(pool.size());
    AdversaryConfig adv;
    adv.validator = pool[pick];
    adv.flags = AdversaryFlags::crashedProposer | AdversaryFlags::acceptThenAbort;
    cfg.adversaries.push_back(adv);
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
  }

  ChainConfig source;
  source.chainId = "evm-1";
  source.kind = ChainKind::evm;
  source.bridgeAddress = "0xbridge";
  source.genesisNative = {{"0xclient", 1000}};
  cfg.chains.push_back(std::move(source));

  ChainConfig target;
  target.chainId = "zec-1";
  target.kind = ChainKind::burnEmit;
  cfg.chains.push_back(std::move(target));

  RequestConfig req;
  req.kind = RequestConfig::Kind::native;
  req.sourceChainId = "evm-1";
  req.targetChainId = "zec-1";
  req.amount = 100;
  req.sender = "0xclient";
  req.targetAddr = "z-dest";
  req.depositTick = -1;
  req.submitTick = 0;
  cfg.requests.push_back(std::move(req));

  return cfg;
}

// Session index (0-based) of the first finalized session, or -1.
int runTrial(int n, int t, int maxSessions, std::uint64_t trialSeed) {
  WorldConfig cfg = trialConfig(n, t, trialSeed);
  cfg.maxSessions = maxSessions;
  World world(cfg);
  for (int s = 0; s < maxSessions; ++s) {
    const SessionRecord* rec = world.runSession();
    if (!rec) break;
    if (rec->outcome == SessionOutcome::Finalized) return s;
  }
  return -1;
}

}  // namespace

double sessionSuccessProbability(int n, int t) {
  return static_cast<double>(sessionSuccessExact(n, t));
}

double livenessProbability(int n, int t, int rounds) {
  return static_cast<double>(livenessExact(n, t, rounds));
}

std::string sessionSuccessRational(int n, int t) {
  return rationalStr(sessionSuccessExact(n, t));
}

std::string livenessRational(int n, int t, int rounds) {
  return rationalStr(livenessExact(n, t, rounds));
}

std::vector<LivenessPoint> livenessCurve(const LivenessOptions& opt) {
  int workers = opt.threads > 0 ? opt.threads
                                : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min<int>(workers, std::max(1, opt.trials));

  // firstSuccess[s] counts trials whose first finalized session was s.
  std::vector<std::vector<std::uint64_t>> counts(
      workers, std::vector<std::uint64_t>(static_cast<std::size_t>(opt.maxSessions), 0));

  auto work = [&](int worker) {
    for (int trial = worker; trial < opt.trials; trial += workers) {
      std::uint64_t trialSeed =
          SplitMix64(opt.seed ^ (static_cast<std::uint64_t>(trial) * 0x9e3779b97f4a7c15ULL +
                                 0x8e9d5aab87963a1dULL))
              .next();
      int s = runTrial(opt.n, opt.t, opt.maxSessions, trialSeed);
      if (s >= 0) ++counts[worker][static_cast<std::size_t>(s)];
    }
  };

  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& th : pool) th.join();
  }

  std::vector<LivenessPoint> points;
  std::uint64_t cumulative = 0;
  for (int r = 1; r <= opt.maxSessions; ++r) {
    for (int w = 0; w < workers; ++w) cumulative += counts[w][static_cast<std::size_t>(r - 1)];
    LivenessPoint pt;
    pt.rounds = r;
    pt.analytic = livenessProbability(opt.n, opt.t, r);
    pt.empirical = opt.trials > 0 ? static_cast<double>(cumulative) / opt.trials : 0.0;
    if (opt.trials > 0)
      pt.ciHalfWidth =
          opt.confidenceZ * std::sqrt(pt.empirical * (1.0 - pt.empirical) / opt.trials);
    points.push_back(pt);
  }
  return points;
}

std::string livenessCsv(const std::vector<LivenessPoint>& points) {
  std::ostringstream out;
  out << "r,analytic,empirical,ci\n";
  out.precision(10);
  for (const auto& pt : points)
    out << pt.rounds << "," << pt.analytic << "," << pt.empirical << "," << pt.ciHalfWidth
        << "\n";
  return out.str();
}

}  // namespace bridgesim
