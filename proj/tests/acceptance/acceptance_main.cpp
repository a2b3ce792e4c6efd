#include <cstdio>
#include <cstdlib>
#include <string>

#include "ntklab/acceptance.hpp"

int main(int argc, char** argv) {
  std::uint64_t seed = ntk::kAcceptanceSeed;
  if (const char* env = std::getenv("NTKLAB_SEED")) seed = std::stoull(env);
  std::vector<int> ids;
  for (int k = 1; k < argc; ++k) ids.push_back(std::stoi(argv[k]));
  const bool all = ids.empty();
  if (all)
    for (int k = 1; k <= ntk::kCriterionCount; ++k) ids.push_back(k);

  int failed = 0;
  for (int id : ids) {
    const auto r = ntk::run_criterion(id, seed);
    std::printf("[%s] %2d %s (%.1fs): %s\n", r.passed ? "PASS" : "FAIL", r.id, r.name.c_str(), r.seconds,
                r.detail.c_str());
    std::fflush(stdout);
    failed += !r.passed;
  }
  if (all) std::printf("[INFO] %s\n", ntk::concentration_on_sphere_note(seed).c_str());
  std::printf("%d criteria failed\n", failed);
  return failed == 0 ? 0 : 1;
}
