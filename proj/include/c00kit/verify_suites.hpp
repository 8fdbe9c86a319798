#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "c00kit/json_io.hpp"

namespace c00 {

// Knobs for the named verification suites; each suite reads the ones its
// report echoes. Defaults match the documented check sizes.
struct SuiteOptions {
  std::uint64_t seed = 2026;
  std::uint32_t max_e = 6;       // azimi-identity: all E within {1..max_e}
  std::uint32_t max_sum = 3;     // composition: all m + n <= max_sum
  std::uint32_t universe = 12;   // composition: materialization universe
  std::vector<Ordinal> xis;      // partition: indices (empty means 0, 1, 2)
  std::uint32_t partition_n = 8; // partition: all universes 1..partition_n
  std::uint32_t trials = 200;    // tsirelson-block
  std::uint32_t samples = 500;   // lift-spreading: per k
  std::uint32_t instances = 100; // cutting-plane
};

struct SuiteResult {
  std::string name;
  bool pass = false;
  Json report; // config echo plus per-check details and counterexamples
};

const std::vector<std::string>& suite_names();
SuiteResult run_suite(const std::string& name, const SuiteOptions& opt);

} // namespace c00
