#pragma once

#include "bridgesim/simulation.hpp"

namespace bridgesim {

// Probability that a single session finalizes a pending request when t of
// the n validators are adversarial (crashing as proposer, withholding their
// signature as committee members) and everyone else follows the protocol:
//
//   p = ((n - t) / n) * prod_{i=1..t} (n - i - t) / (n - i)
//
// i.e. the uniformly chosen proposer is honest and the t committee slots
// drawn from the remaining n - 1 validators all land on honest ones.
// Computed in exact rational arithmetic, rounded once at the end.
double sessionSuccessProbability(int n, int t);

// Probability that at least one of r consecutive sessions succeeds:
// 1 - (1 - p)^r.
double livenessProbability(int n, int t, int rounds);

// Exact forms, as "numerator/denominator" strings.
std::string sessionSuccessRational(int n, int t);
std::string livenessRational(int n, int t, int rounds);

struct LivenessPoint {
  int rounds = 0;
  double analytic = 0;
  double empirical = 0;
  double ciHalfWidth = 0;
};

struct LivenessOptions {
  int n = 4;
  int t = 1;
  int trials = 1000;
  int maxSessions = 20;
  std::uint64_t seed = 1;
  double confidenceZ = 2.5758;  // two-sided 99%
  int threads = 0;              // 0: one per hardware thread
};

// Runs `trials` independent protocol simulations with t adversaries each and
// measures, for every r in [1, maxSessions], the fraction that finalized the
// request within its first r sessions.
std::vector<LivenessPoint> livenessCurve(const LivenessOptions& opt);

// csv with header r,analytic,empirical,ci
std::string livenessCsv(const std::vector<LivenessPoint>& points);

}  // namespace bridgesim
