#pragma once

#include <cstdint>
#include <optional>

#include "provlab/run.hpp"

namespace provlab {

// Ground-truth reachability over the flattened port graph of a projected
// run. Deliberately shares no traversal or edge-construction code with the
// decoder: vertices are items, edges go item -> consuming port -> (module
// dependency) -> producing port -> item.
class FlatReach {
public:
  // `effective` assigns a matrix to every module that can hold live ports
  // in the projection: the view assignment for opaque modules and lambda'*
  // for composites that are still pending.
  FlatReach(const Projection &proj, const DependencyAssignment &effective);

  // Does full-run item `to` depend on full-run item `from`? Reflexive.
  // Throws NotVisibleError when either item has no counterpart in the
  // projection.
  bool reachable(int from, int to) const;

  int vertex_count() const { return n_; }

private:
  const Projection *proj_;
  int n_ = 0; // projected items
  std::vector<std::vector<int>> succ_; // item -> items one hop downstream
  bool closed_ = false;
  std::vector<std::vector<std::uint64_t>> closure_; // bitset rows
  int lookup(int full_id) const;
  bool search(int from, int to) const;
};

// Exhaustive safety check by bounded derivation enumeration: derive every
// terminal workflow for each composite using at most `bound` production
// applications and compare the induced matrices pairwise. Meant for tiny
// grammars; used to cross-check the worklist analysis.
struct EnumSafetyResult {
  bool safe = true;
  bool exhausted = false; // every derivation closed within the bound
  int module = -1;        // first offender
  BoolMatrix first, second;
};

EnumSafetyResult enumerate_and_check_safety(const WorkflowGrammar &g,
                                            const DependencyAssignment &lambda,
                                            int bound);

} // namespace provlab
