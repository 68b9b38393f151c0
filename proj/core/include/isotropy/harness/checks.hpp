#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace isotropy::harness {

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

/// Fast invariant suite behind `isotropy check`: generator known answers,
/// eigensolver accuracy, exact John identities, the trace law on every
/// sampler, oracle agreement and sparsifier certificates. Runs in a few
/// seconds; a check that throws is reported as failed.
std::vector<CheckResult> run_checks(std::uint64_t seed);

}  // namespace isotropy::harness
