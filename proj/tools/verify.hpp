#pragma once

#include <string>
#include <vector>

#include "output.hpp"
#include "survgame/partition.hpp"

namespace survgame::cli {

struct SuiteResult {
  std::string name;
  // "pass", "fail" or "skipped".
  std::string status;
  json metrics;
  // Wall time; reported on the console only so that files stay reproducible.
  double seconds = 0.0;
};

struct VerifyOptions {
  int dp_n = 101;
  int dp_k = 32;
  double dp_dt = 0.02;
  int oracle_samples = 500;
  int reintegrations = 20;
  unsigned seed = 42;
};

inline const std::vector<std::string> kSuiteNames{
    "hamiltonian", "continuity", "symmetry", "fan", "oracle"};

SuiteResult run_suite(const std::string& name, const GameParams& p,
                      const Partition& part, const VerifyOptions& opts);

}  // namespace survgame::cli
