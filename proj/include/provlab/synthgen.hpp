#pragma once

#include <cstdint>

#include "provlab/analysis.hpp"
#include "provlab/model.hpp"
#include "provlab/run.hpp"

namespace provlab {

// Fixed 64-bit PRNG (SplitMix64). Chosen for platform-independent streams
// and cheap splitting: child streams are seeded from the parent so that
// independent artifacts can be generated in parallel.
struct SplitMix64 {
  std::uint64_t state = 0;

  explicit SplitMix64(std::uint64_t seed) : state(seed) {}
  std::uint64_t next();
  SplitMix64 split() { return SplitMix64(next()); }
  // Uniform in [0, n); n >= 1.
  int below(int n) { return static_cast<int>(next() % static_cast<std::uint64_t>(n)); }
  bool chance(int percent) { return below(100) < percent; }
};

// The four dataset factors plus the seed.
struct GenParams {
  int workflow_size = 40;    // occurrences per right-hand side
  int module_degree = 4;     // ports per module side
  int nesting_depth = 4;     // composite hub levels above the cycle
  int recursion_length = 2;  // composites per cycle
  std::uint64_t seed = 1;
};

struct GeneratedGrammar {
  WorkflowGrammar grammar;
  DependencyAssignment lambda; // atomic modules only
};

// Random strictly linear-recursive grammar, safe by construction: hubs get a
// single production each and the recursion cycle closes on an absorbing
// all-true fixpoint, then the result is re-verified with the analyzer.
GeneratedGrammar gen_grammar(const GenParams &p);

// Random derivation whose replay lands in [0.9n, 1.1n] items (or exhausts
// the pending composites first, which raises InputError with the size that
// was actually reachable).
std::vector<Step> gen_run(const WorkflowGrammar &g, const Classification &cls,
                          int target_items, std::uint64_t seed);

// Random safe view with `size` expandable composites (the start symbol is
// always among them). White-box views restrict lambda* and are safe
// outright; grey=true additionally sprinkles spurious true entries and
// rejection-samples until the analyzer accepts, falling back to white after
// 100 tries.
View gen_safe_view(const WorkflowGrammar &g, const DependencyAssignment &lambda,
                   int size, bool grey, std::uint64_t seed);

} // namespace provlab
