#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "provlab/matrix.hpp"

namespace provlab {

enum class PortSide { Input, Output };

// A port of an occurrence inside a workflow. Everything is 0-based in
// memory; file formats are 1-based.
struct PortRef {
  int occurrence = -1;
  int port = 0;
  bool operator==(const PortRef &) const = default;
  auto operator<=>(const PortRef &) const = default;
};

// Data edge from an output port to an input port of two distinct occurrences.
struct DataEdge {
  PortRef from; // output side
  PortRef to;   // input side
  bool operator==(const DataEdge &) const = default;
};

// A simple workflow: DAG of module occurrences, no two data edges sharing an
// endpoint, every port either on a data edge or on the boundary lists.
struct SimpleWorkflow {
  std::vector<int> occurrences; // module ids, declaration order
  std::vector<DataEdge> edges;
  std::vector<PortRef> initial_inputs; // input ports fed from the boundary
  std::vector<PortRef> final_outputs;  // output ports exposed on the boundary
};

struct Production {
  int id = 0; // 1-based, stable across view restriction
  int lhs = -1;
  SimpleWorkflow rhs;
  // Port bijection: lhs input x maps to rhs.initial_inputs[input_map[x]],
  // lhs output y maps to rhs.final_outputs[output_map[y]]. Identity unless
  // the file says otherwise.
  std::vector<int> input_map;
  std::vector<int> output_map;
};

struct ModuleDecl {
  std::string name;
  int inputs = 0;
  int outputs = 0;
  bool composite = false;
};

struct WorkflowGrammar {
  std::vector<ModuleDecl> modules;
  int start = -1;
  std::vector<Production> productions;

  int module_index(std::string_view name) const;
  const ModuleDecl &mod(int m) const { return modules[m]; }
  std::vector<int> productions_of(int module) const; // indices into productions
  const Production *production_by_id(int id) const;
  int max_arity() const;
};

// Dependency assignment: module id -> inputs x outputs boolean matrix.
using DependencyAssignment = std::map<int, BoolMatrix>;

// A user view: which composite modules may be expanded, plus dependency
// matrices for everything that can surface unexpanded.
struct View {
  std::vector<int> expandable; // sorted module ids
  DependencyAssignment assignment;

  bool is_expandable(int m) const;
};

struct Violation {
  std::string code;
  std::string message;
};
using ValidationReport = std::vector<Violation>;

// Structural checks of Defs 1-5: duplicate names, bad start symbol, port
// arity mismatches, adjacent or dangling edges, cyclic workflows, boundary
// map bijectivity, missing productions, and Def 5 coverage of the given
// dependency matrices. Empty report means valid.
ValidationReport validate_grammar(const WorkflowGrammar &g,
                                  const DependencyAssignment &lambda);

// Deterministic Kahn order of w's occurrences (indices into w.occurrences),
// ties broken by declaration index. Throws StructuralError on a cycle.
std::vector<int> topological_order(const SimpleWorkflow &w);

// The view grammar G_{Dp}: productions filtered to expandable left-hand
// sides, underivable modules dropped, surviving non-expandable composites
// kept as opaque occurrences. Production ids are preserved. Module indices
// are renumbered; map back by name.
WorkflowGrammar restrict_grammar(const WorkflowGrammar &g, const View &v);

// Modules of g reachable from the start symbol using only productions whose
// lhs is expandable in v. For the default view pass all composites.
std::vector<char> derivable_modules(const WorkflowGrammar &g, const View &v);

// The default view of a grammar: every composite expandable, atomics carry
// lambda.
View default_view(const WorkflowGrammar &g, const DependencyAssignment &lambda);

// The dependency matrices a restricted grammar needs, keyed by its own
// module indices. View assignments are keyed by full-grammar ids; modules
// are matched by name. Throws InputError when a matrix is missing.
DependencyAssignment view_assignment_for(const WorkflowGrammar &full,
                                         const WorkflowGrammar &restricted,
                                         const View &v);

} // namespace provlab
