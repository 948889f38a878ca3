#pragma once

#include "bridgesim/simulation.hpp"

namespace bridgesim {

// Omniscient safety checker. It reads every chain, the signing oracle and
// every validator's state, and reports violations of:
//   - withdrawal backing: every executed withdrawal maps to exactly one
//     matching, confirmed deposit, and no deposit is paid out twice;
//   - conservation: per-chain totals never change except through the
//     protocol's own mint/burn semantics;
//   - boundary agreement: at every session boundary, all honest validators
//     agree on the status of every request a session has chosen.
class SafetyObserver {
 public:
  explicit SafetyObserver(const World& world);

  void onSessionEnd(std::uint64_t sid);
  void finalChecks();

  const std::vector<std::string>& violations() const { return violations_; }

 private:
  void checkAgreement(std::uint64_t sid);
  void checkConservation(const char* when);
  void checkWithdrawalBacking();
  Result<DepositData> depositOnSource(const DepositIdentifier& id) const;

  const World& world_;
  std::map<std::string, std::uint64_t> evmNativeBaseline_;
  std::map<std::string, std::map<std::string, std::uint64_t>> evmTokenBaseline_;
  std::set<DepositIdentifier> chosen_;
  std::vector<std::string> violations_;
};

}  // namespace bridgesim
