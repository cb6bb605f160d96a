#include "provlab/model.hpp"

#include <algorithm>
#include <queue>
#include <set>

#include "provlab/errors.hpp"

namespace provlab {

int WorkflowGrammar::module_index(std::string_view name) const {
  for (size_t i = 0; i < modules.size(); ++i)
    if (modules[i].name == name) return static_cast<int>(i);
  return -1;
}

std::vector<int> WorkflowGrammar::productions_of(int module) const {
  std::vector<int> out;
  for (size_t i = 0; i < productions.size(); ++i)
    if (productions[i].lhs == module) out.push_back(static_cast<int>(i));
  return out;
}

const Production *WorkflowGrammar::production_by_id(int id) const {
  for (const auto &p : productions)
    if (p.id == id) return &p;
  return nullptr;
}

int WorkflowGrammar::max_arity() const {
  int m = 0;
  for (const auto &d : modules) m = std::max({m, d.inputs, d.outputs});
  return m;
}

bool View::is_expandable(int m) const {
  return std::binary_search(expandable.begin(), expandable.end(), m);
}

namespace {

// Occurrence-level adjacency of a workflow; multi-edges collapsed.
std::vector<std::vector<int>> occurrence_adjacency(const SimpleWorkflow &w) {
  std::vector<std::set<int>> adj(w.occurrences.size());
  for (const auto &e : w.edges)
    if (e.from.occurrence != e.to.occurrence)
      adj[e.from.occurrence].insert(e.to.occurrence);
  std::vector<std::vector<int>> out(adj.size());
  for (size_t i = 0; i < adj.size(); ++i)
    out[i].assign(adj[i].begin(), adj[i].end());
  return out;
}

} // namespace

std::vector<int> topological_order(const SimpleWorkflow &w) {
  const int n = static_cast<int>(w.occurrences.size());
  auto adj = occurrence_adjacency(w);
  std::vector<int> indeg(n, 0);
  for (int u = 0; u < n; ++u)
    for (int v : adj[u]) ++indeg[v];

  // Min-heap on declaration index keeps the order canonical.
  std::priority_queue<int, std::vector<int>, std::greater<int>> ready;
  for (int u = 0; u < n; ++u)
    if (indeg[u] == 0) ready.push(u);

  std::vector<int> order;
  order.reserve(n);
  while (!ready.empty()) {
    int u = ready.top();
    ready.pop();
    order.push_back(u);
    for (int v : adj[u])
      if (--indeg[v] == 0) ready.push(v);
  }
  if (static_cast<int>(order.size()) != n)
    throw StructuralError("workflow occurrence graph is cyclic");
  return order;
}

namespace {

void check_workflow(const WorkflowGrammar &g, const Production &p,
                    ValidationReport &report) {
  const auto tag = "p" + std::to_string(p.id);
  const SimpleWorkflow &w = p.rhs;
  const int n = static_cast<int>(w.occurrences.size());
  if (n == 0) {
    report.push_back({"empty-workflow", tag + ": no occurrences"});
    return;
  }
  for (int m : w.occurrences)
    if (m < 0 || m >= static_cast<int>(g.modules.size())) {
      report.push_back({"bad-occurrence", tag + ": unknown module id"});
      return;
    }

  auto in_range = [&](const PortRef &r, PortSide side) {
    if (r.occurrence < 0 || r.occurrence >= n) return false;
    const ModuleDecl &d = g.mod(w.occurrences[r.occurrence]);
    int arity = side == PortSide::Input ? d.inputs : d.outputs;
    return r.port >= 0 && r.port < arity;
  };

  // Each input port must be fed exactly once (edge or boundary); each output
  // used at most once by an edge, the rest on the boundary exactly once.
  std::map<PortRef, int> in_uses, out_uses;
  bool range_ok = true;
  for (const auto &e : w.edges) {
    if (!in_range(e.from, PortSide::Output) || !in_range(e.to, PortSide::Input)) {
      report.push_back({"port-range", tag + ": edge references a port out of range"});
      range_ok = false;
      continue;
    }
    if (e.from.occurrence == e.to.occurrence)
      report.push_back({"self-edge", tag + ": data edge within one occurrence"});
    ++out_uses[e.from];
    ++in_uses[e.to];
  }
  for (const auto &r : w.initial_inputs) {
    if (!in_range(r, PortSide::Input)) {
      report.push_back({"port-range", tag + ": initial input out of range"});
      range_ok = false;
      continue;
    }
    ++in_uses[r];
  }
  for (const auto &r : w.final_outputs) {
    if (!in_range(r, PortSide::Output)) {
      report.push_back({"port-range", tag + ": final output out of range"});
      range_ok = false;
      continue;
    }
    ++out_uses[r];
  }
  if (!range_ok) return;

  for (int o = 0; o < n; ++o) {
    const ModuleDecl &d = g.mod(w.occurrences[o]);
    for (int x = 0; x < d.inputs; ++x) {
      int uses = 0;
      if (auto it = in_uses.find({o, x}); it != in_uses.end()) uses = it->second;
      if (uses != 1)
        report.push_back({"port-coverage",
                          tag + ": input port " + std::to_string(x + 1) +
                              " of occurrence " + std::to_string(o + 1) +
                              (uses == 0 ? " unconnected" : " multiply connected")});
    }
    for (int y = 0; y < d.outputs; ++y) {
      int uses = 0;
      if (auto it = out_uses.find({o, y}); it != out_uses.end()) uses = it->second;
      if (uses != 1)
        report.push_back({"port-coverage",
                          tag + ": output port " + std::to_string(y + 1) +
                              " of occurrence " + std::to_string(o + 1) +
                              (uses == 0 ? " unconnected" : " multiply connected")});
    }
  }

  // Pairwise non-adjacent data edges: no shared module occurrence between
  // two distinct edges beyond the one endpoint each port already enforces.
  // With single-use ports the remaining adjacency to rule out is an edge
  // pair forming out->in on the same ordered occurrence pair twice, which
  // simple workflows allow, so nothing extra here; adjacency in the Def 2
  // sense (edges sharing a port) is covered by the coverage check above.

  try {
    topological_order(w);
  } catch (const StructuralError &) {
    report.push_back({"cyclic-workflow", tag + ": occurrence graph has a cycle"});
  }

  // Boundary bijections against the lhs arity.
  const ModuleDecl &lhs = g.mod(p.lhs);
  if (static_cast<int>(w.initial_inputs.size()) != lhs.inputs)
    report.push_back({"arity", tag + ": " + std::to_string(w.initial_inputs.size()) +
                                   " initial inputs for " + std::to_string(lhs.inputs) +
                                   "-input module " + lhs.name});
  if (static_cast<int>(w.final_outputs.size()) != lhs.outputs)
    report.push_back({"arity", tag + ": " + std::to_string(w.final_outputs.size()) +
                                   " final outputs for " + std::to_string(lhs.outputs) +
                                   "-output module " + lhs.name});
  auto check_perm = [&](const std::vector<int> &perm, size_t size, const char *what) {
    if (perm.empty()) return; // identity
    if (perm.size() != size) {
      report.push_back({"port-map", tag + ": " + what + " has wrong size"});
      return;
    }
    std::vector<char> seen(size, 0);
    for (int v : perm) {
      if (v < 0 || v >= static_cast<int>(size) || seen[v]) {
        report.push_back({"port-map", tag + ": " + what + " is not a permutation"});
        return;
      }
      seen[v] = 1;
    }
  };
  check_perm(p.input_map, w.initial_inputs.size(), "input map");
  check_perm(p.output_map, w.final_outputs.size(), "output map");
}

} // namespace

ValidationReport validate_grammar(const WorkflowGrammar &g,
                                  const DependencyAssignment &lambda) {
  ValidationReport report;
  std::set<std::string> names;
  for (const auto &d : g.modules) {
    if (!names.insert(d.name).second)
      report.push_back({"duplicate-module", "module '" + d.name + "' declared twice"});
    if (d.inputs < 1 || d.outputs < 1)
      report.push_back({"arity", "module '" + d.name + "' must have at least one input and output"});
  }
  if (g.start < 0 || g.start >= static_cast<int>(g.modules.size()))
    report.push_back({"start", "start symbol missing"});
  else if (!g.mod(g.start).composite)
    report.push_back({"start", "start symbol must be composite"});

  std::set<int> seen_ids;
  for (const auto &p : g.productions) {
    if (!seen_ids.insert(p.id).second)
      report.push_back({"duplicate-production", "production id " + std::to_string(p.id) + " reused"});
    if (p.lhs < 0 || p.lhs >= static_cast<int>(g.modules.size())) {
      report.push_back({"bad-lhs", "production with unknown lhs"});
      continue;
    }
    if (!g.mod(p.lhs).composite)
      report.push_back({"bad-lhs", "production for atomic module " + g.mod(p.lhs).name});
    check_workflow(g, p, report);
  }

  for (size_t m = 0; m < g.modules.size(); ++m) {
    const ModuleDecl &d = g.modules[m];
    if (d.composite) {
      if (g.productions_of(static_cast<int>(m)).empty())
        report.push_back({"no-production", "composite module '" + d.name + "' has no production"});
      continue;
    }
    auto it = lambda.find(static_cast<int>(m));
    if (it == lambda.end()) {
      report.push_back({"missing-dependencies", "atomic module '" + d.name + "' has no dependency matrix"});
      continue;
    }
    const BoolMatrix &mat = it->second;
    if (mat.rows() != d.inputs || mat.cols() != d.outputs)
      report.push_back({"dependency-shape", "dependency matrix of '" + d.name + "' has wrong shape"});
    else if (!mat.rows_covered() || !mat.cols_covered())
      report.push_back({"dependency-coverage",
                        "dependency matrix of '" + d.name +
                            "' leaves a port without any dependency"});
  }
  return report;
}

std::vector<char> derivable_modules(const WorkflowGrammar &g, const View &v) {
  std::vector<char> reach(g.modules.size(), 0);
  if (g.start < 0) return reach;
  std::vector<int> stack{g.start};
  reach[g.start] = 1;
  while (!stack.empty()) {
    int m = stack.back();
    stack.pop_back();
    if (!g.mod(m).composite || !v.is_expandable(m)) continue;
    for (int pi : g.productions_of(m))
      for (int occ : g.productions[pi].rhs.occurrences)
        if (!reach[occ]) {
          reach[occ] = 1;
          stack.push_back(occ);
        }
  }
  return reach;
}

WorkflowGrammar restrict_grammar(const WorkflowGrammar &g, const View &v) {
  auto reach = derivable_modules(g, v);
  WorkflowGrammar out;
  std::vector<int> remap(g.modules.size(), -1);
  for (size_t m = 0; m < g.modules.size(); ++m) {
    if (!reach[m]) continue;
    remap[m] = static_cast<int>(out.modules.size());
    ModuleDecl d = g.modules[m];
    // Surviving composites outside Dp act as opaque (atomic) modules.
    if (d.composite && !v.is_expandable(static_cast<int>(m))) d.composite = false;
    out.modules.push_back(d);
  }
  out.start = g.start >= 0 ? remap[g.start] : -1;
  for (const auto &p : g.productions) {
    if (!reach[p.lhs] || !v.is_expandable(p.lhs)) continue;
    Production q = p;
    q.lhs = remap[p.lhs];
    for (auto &occ : q.rhs.occurrences) occ = remap[occ];
    out.productions.push_back(std::move(q));
  }
  return out;
}

View default_view(const WorkflowGrammar &g, const DependencyAssignment &lambda) {
  View v;
  for (size_t m = 0; m < g.modules.size(); ++m)
    if (g.modules[m].composite) v.expandable.push_back(static_cast<int>(m));
  v.assignment = lambda;
  return v;
}

DependencyAssignment view_assignment_for(const WorkflowGrammar &full,
                                         const WorkflowGrammar &restricted,
                                         const View &v) {
  DependencyAssignment out;
  for (size_t i = 0; i < restricted.modules.size(); ++i) {
    if (restricted.modules[i].composite) continue;
    int full_id = full.module_index(restricted.modules[i].name);
    auto it = v.assignment.find(full_id);
    if (it == v.assignment.end())
      throw InputError("view lacks a dependency matrix for module " +
                       restricted.modules[i].name);
    out[static_cast<int>(i)] = it->second;
  }
  return out;
}

} // namespace provlab
