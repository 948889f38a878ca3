#pragma once

#include "bridgesim/simulation.hpp"

namespace bridgesim {

// Parses a JSON scenario document into a runnable configuration. On failure
// returns ConfigError and, when `error` is given, a human-readable reason.
Result<WorldConfig> parseScenario(const std::string& text, std::string* error = nullptr);
Result<WorldConfig> loadScenarioFile(const std::string& path, std::string* error = nullptr);

// Serializes a configuration back into the scenario document format.
std::string scenarioToJson(const WorldConfig& config);

// Deterministic scenario fuzzer: every (seed, index) pair maps to one
// well-funded two-chain configuration with up to t adversaries of random
// behaviour, random requests, and background traffic with reorgs.
WorldConfig randomScenario(std::uint64_t seed, std::uint64_t index);

}  // namespace bridgesim
