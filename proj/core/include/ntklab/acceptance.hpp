#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace ntk {

struct CriterionResult {
  int id = 0;
  std::string name;
  bool passed = false;
  std::string detail;
  double seconds = 0.0;
};

inline constexpr int kCriterionCount = 13;
inline constexpr std::uint64_t kAcceptanceSeed = 20240611;

std::string criterion_name(int id);

/// Runs one numbered criterion (1..13).
CriterionResult run_criterion(int id, std::uint64_t seed = kAcceptanceSeed);

/// Runs the listed criteria (all when empty) on up to `jobs` threads;
/// results come back in the order requested.
std::vector<CriterionResult> run_acceptance(std::uint64_t seed = kAcceptanceSeed, std::size_t jobs = 1,
                                            std::vector<int> ids = {});

/// Kernel concentration on a random sphere (n = 8, d = 6) where the
/// continuous kernel is well conditioned. Informational only.
std::string concentration_on_sphere_note(std::uint64_t seed = kAcceptanceSeed);

}  // namespace ntk
