#pragma once

#include <map>
#include <optional>
#include <utility>
#include <vector>

#include "provlab/model.hpp"

namespace provlab {

// Edge ids are (k, i): production id k, 1-based topological position i of the
// target occurrence in k's right-hand side.
using EdgeId = std::pair<int, int>;

struct ProductionGraphEdge {
  int from = -1; // lhs module
  int to = -1;   // occurrence module
  EdgeId id;
};

struct ProductionGraph {
  int n_modules = 0;
  std::vector<ProductionGraphEdge> edges;
  // For each production id, the occurrence index (into rhs.occurrences)
  // sitting at topological position i (1-based): occ_at[k][i-1].
  std::map<int, std::vector<int>> occ_at_position;
};

ProductionGraph build_production_graph(const WorkflowGrammar &g);

enum class RecursionClass { NonRecursive, Linear, StrictlyLinear, General };

const char *recursion_class_name(RecursionClass c);

struct CycleRef {
  int cycle = 0;    // 1-based cycle id s
  int position = 0; // 1-based position inside C(s)
};

// C(s) tables of a strictly linear-recursive grammar. Cycle s is the list of
// its member edges in chain order, starting from the lexicographically
// smallest edge id; cycles are sorted by that smallest member.
struct CycleTable {
  std::vector<std::vector<EdgeId>> cycles;
  std::map<EdgeId, CycleRef> edge_cycle;   // member edge -> (s, position)
  std::map<int, CycleRef> module_cycle;    // cycle vertex -> (s, position of
                                           // its unique outgoing cycle edge)
  int size() const { return static_cast<int>(cycles.size()); }
  const std::vector<EdgeId> &cycle(int s) const { return cycles[s - 1]; }
};

struct Classification {
  RecursionClass cls = RecursionClass::NonRecursive;
  CycleTable cycles; // populated only for StrictlyLinear
};

Classification classify_recursion(const WorkflowGrammar &g,
                                  const ProductionGraph &pg);

// Boundary dependency matrix induced by a workflow whose occurrences all
// carry matrices in `dep`: reachability from each initial input to each
// final output through data edges and per-occurrence dependency edges.
BoolMatrix induced_matrix(const WorkflowGrammar &g, const SimpleWorkflow &w,
                          const DependencyAssignment &dep);

// Same, but expressed on the lhs ports of a production via its port maps.
BoolMatrix production_induced(const WorkflowGrammar &g, const Production &p,
                              const DependencyAssignment &dep);

struct UnsafeWitness {
  int production_id = 0;
  BoolMatrix expected; // lambda* already fixed for the lhs
  BoolMatrix induced;  // what this production induces
  std::vector<int> trace; // production ids in worklist verification order
};

struct FullAssignmentResult {
  bool safe = false;
  DependencyAssignment lambda_star; // atomics + composites when safe
  std::optional<UnsafeWitness> witness;
  std::vector<int> unproductive; // composites never verifiable
};

// Lemma 1 worklist: seed with the atomic matrices, verify productions whose
// right-hand sides are fully assigned, propagate to left-hand sides, flag
// the first inconsistency as Unsafe.
FullAssignmentResult compute_full_assignment(const WorkflowGrammar &g,
                                             const DependencyAssignment &lambda);

// Everything the analyze entry point reports for one grammar + assignment.
struct AnalysisResult {
  ProductionGraph graph;
  Classification classification;
  FullAssignmentResult assignment;
};

AnalysisResult analyze(const WorkflowGrammar &g, const DependencyAssignment &lambda);

} // namespace provlab
