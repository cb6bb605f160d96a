#include "provlab/analysis.hpp"

#include <algorithm>
#include <deque>
#include <set>

#include "provlab/errors.hpp"

namespace provlab {

ProductionGraph build_production_graph(const WorkflowGrammar &g) {
  ProductionGraph pg;
  pg.n_modules = static_cast<int>(g.modules.size());
  for (const auto &p : g.productions) {
    auto order = topological_order(p.rhs);
    pg.occ_at_position[p.id] = order;
    for (size_t i = 0; i < order.size(); ++i)
      pg.edges.push_back({p.lhs, p.rhs.occurrences[order[i]],
                          {p.id, static_cast<int>(i) + 1}});
  }
  return pg;
}

const char *recursion_class_name(RecursionClass c) {
  switch (c) {
    case RecursionClass::NonRecursive: return "non_recursive";
    case RecursionClass::Linear: return "linear";
    case RecursionClass::StrictlyLinear: return "strictly_linear";
    case RecursionClass::General: return "general";
  }
  return "?";
}

namespace {

// Reflexive-transitive reachability over the module graph.
std::vector<std::vector<char>> module_reachability(const ProductionGraph &pg) {
  int n = pg.n_modules;
  std::vector<std::vector<int>> adj(n);
  for (const auto &e : pg.edges) adj[e.from].push_back(e.to);
  std::vector<std::vector<char>> reach(n, std::vector<char>(n, 0));
  for (int s = 0; s < n; ++s) {
    std::vector<int> stack{s};
    reach[s][s] = 1;
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      for (int v : adj[u])
        if (!reach[s][v]) {
          reach[s][v] = 1;
          stack.push_back(v);
        }
    }
  }
  return reach;
}

// Strongly connected components, Kosaraju. Returns component id per module.
std::vector<int> scc_components(const ProductionGraph &pg, int &count) {
  int n = pg.n_modules;
  std::vector<std::vector<int>> adj(n), radj(n);
  for (const auto &e : pg.edges) {
    adj[e.from].push_back(e.to);
    radj[e.to].push_back(e.from);
  }
  std::vector<char> seen(n, 0);
  std::vector<int> order;
  order.reserve(n);
  // Iterative post-order.
  for (int s = 0; s < n; ++s) {
    if (seen[s]) continue;
    std::vector<std::pair<int, size_t>> stack{{s, 0}};
    seen[s] = 1;
    while (!stack.empty()) {
      auto &[u, idx] = stack.back();
      if (idx < adj[u].size()) {
        int v = adj[u][idx++];
        if (!seen[v]) {
          seen[v] = 1;
          stack.emplace_back(v, 0);
        }
      } else {
        order.push_back(u);
        stack.pop_back();
      }
    }
  }
  std::vector<int> comp(n, -1);
  count = 0;
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    if (comp[*it] >= 0) continue;
    std::vector<int> stack{*it};
    comp[*it] = count;
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      for (int v : radj[u])
        if (comp[v] < 0) {
          comp[v] = count;
          stack.push_back(v);
        }
    }
    ++count;
  }
  return comp;
}

} // namespace

Classification classify_recursion(const WorkflowGrammar &g,
                                  const ProductionGraph &pg) {
  Classification out;
  int n_comp = 0;
  auto comp = scc_components(pg, n_comp);

  std::vector<int> comp_size(n_comp, 0);
  for (int c : comp) ++comp_size[c];
  std::vector<std::vector<ProductionGraphEdge>> intra(n_comp);
  for (const auto &e : pg.edges)
    if (comp[e.from] == comp[e.to]) intra[comp[e.from]].push_back(e);

  std::vector<int> nontrivial;
  for (int c = 0; c < n_comp; ++c)
    if (comp_size[c] > 1 || !intra[c].empty()) nontrivial.push_back(c);
  if (nontrivial.empty()) {
    out.cls = RecursionClass::NonRecursive;
    return out;
  }

  // Strictly linear: every nontrivial component is one simple cycle, i.e.
  // exactly as many internal edges as vertices and in/out degree one each.
  bool strict = true;
  for (int c : nontrivial) {
    if (static_cast<int>(intra[c].size()) != comp_size[c]) {
      strict = false;
      break;
    }
    std::map<int, int> outdeg, indeg;
    for (const auto &e : intra[c]) {
      ++outdeg[e.from];
      ++indeg[e.to];
    }
    for (const auto &[m, d] : outdeg)
      if (d != 1) strict = false;
    for (const auto &[m, d] : indeg)
      if (d != 1) strict = false;
    if (!strict) break;
  }

  if (strict) {
    out.cls = RecursionClass::StrictlyLinear;
    std::vector<std::vector<EdgeId>> cycles;
    for (int c : nontrivial) {
      std::map<int, ProductionGraphEdge> out_edge; // vertex -> its cycle edge
      for (const auto &e : intra[c]) out_edge[e.from] = e;
      EdgeId first = intra[c][0].id;
      int first_vertex = intra[c][0].from;
      for (const auto &e : intra[c])
        if (e.id < first) {
          first = e.id;
          first_vertex = e.from;
        }
      std::vector<EdgeId> cyc;
      int v = first_vertex;
      do {
        const auto &e = out_edge.at(v);
        cyc.push_back(e.id);
        v = e.to;
      } while (v != first_vertex);
      cycles.push_back(std::move(cyc));
    }
    std::sort(cycles.begin(), cycles.end(),
              [](const auto &a, const auto &b) { return a[0] < b[0]; });
    CycleTable &tab = out.cycles;
    tab.cycles = std::move(cycles);
    for (size_t s = 0; s < tab.cycles.size(); ++s)
      for (size_t p = 0; p < tab.cycles[s].size(); ++p) {
        EdgeId id = tab.cycles[s][p];
        CycleRef ref{static_cast<int>(s) + 1, static_cast<int>(p) + 1};
        tab.edge_cycle[id] = ref;
        const Production *prod = g.production_by_id(id.first);
        tab.module_cycle[prod->lhs] = ref;
      }
    return out;
  }

  // Linear (Def 12): no module can derive a workflow containing two
  // instances of itself. Non-linear exactly when some production reachable
  // from M has two occurrences that can each derive M again.
  auto reach = module_reachability(pg);
  for (const auto &p : g.productions) {
    const auto &occs = p.rhs.occurrences;
    for (size_t i = 0; i < occs.size(); ++i)
      for (size_t j = i + 1; j < occs.size(); ++j)
        for (int m = 0; m < pg.n_modules; ++m)
          if (reach[m][p.lhs] && reach[occs[i]][m] && reach[occs[j]][m]) {
            out.cls = RecursionClass::General;
            return out;
          }
  }
  out.cls = RecursionClass::Linear;
  return out;
}

BoolMatrix induced_matrix(const WorkflowGrammar &g, const SimpleWorkflow &w,
                          const DependencyAssignment &dep) {
  const int n = static_cast<int>(w.occurrences.size());
  // Port numbering: per occurrence, inputs then outputs.
  std::vector<int> offset(n + 1, 0);
  for (int o = 0; o < n; ++o) {
    const ModuleDecl &d = g.mod(w.occurrences[o]);
    offset[o + 1] = offset[o] + d.inputs + d.outputs;
  }
  auto in_id = [&](const PortRef &r) { return offset[r.occurrence] + r.port; };
  auto out_id = [&](const PortRef &r) {
    return offset[r.occurrence] + g.mod(w.occurrences[r.occurrence]).inputs + r.port;
  };

  std::vector<std::vector<int>> adj(offset[n]);
  for (const auto &e : w.edges) adj[out_id(e.from)].push_back(in_id(e.to));
  for (int o = 0; o < n; ++o) {
    int m = w.occurrences[o];
    auto it = dep.find(m);
    if (it == dep.end())
      throw StructuralError("no dependency matrix for occurrence of '" +
                            g.mod(m).name + "'");
    const BoolMatrix &mat = it->second;
    for (int x = 0; x < mat.rows(); ++x)
      for (int y = 0; y < mat.cols(); ++y)
        if (mat.at(x, y))
          adj[in_id({o, x})].push_back(out_id({o, y}));
  }

  BoolMatrix result(static_cast<int>(w.initial_inputs.size()),
                    static_cast<int>(w.final_outputs.size()));
  std::vector<char> seen(offset[n]);
  for (size_t s = 0; s < w.initial_inputs.size(); ++s) {
    std::fill(seen.begin(), seen.end(), 0);
    std::vector<int> stack{in_id(w.initial_inputs[s])};
    seen[stack[0]] = 1;
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      for (int v : adj[u])
        if (!seen[v]) {
          seen[v] = 1;
          stack.push_back(v);
        }
    }
    for (size_t t = 0; t < w.final_outputs.size(); ++t)
      if (seen[out_id(w.final_outputs[t])])
        result.set(static_cast<int>(s), static_cast<int>(t));
  }
  return result;
}

BoolMatrix production_induced(const WorkflowGrammar &g, const Production &p,
                              const DependencyAssignment &dep) {
  BoolMatrix base = induced_matrix(g, p.rhs, dep);
  auto imap = [&](int x) { return p.input_map.empty() ? x : p.input_map[x]; };
  auto omap = [&](int y) { return p.output_map.empty() ? y : p.output_map[y]; };
  BoolMatrix out(base.rows(), base.cols());
  for (int x = 0; x < base.rows(); ++x)
    for (int y = 0; y < base.cols(); ++y)
      if (base.at(imap(x), omap(y))) out.set(x, y);
  return out;
}

FullAssignmentResult compute_full_assignment(const WorkflowGrammar &g,
                                             const DependencyAssignment &lambda) {
  FullAssignmentResult res;
  res.lambda_star = lambda;
  std::vector<char> verified(g.productions.size(), 0);
  std::vector<int> trace;

  bool progress = true;
  while (progress) {
    progress = false;
    for (size_t pi = 0; pi < g.productions.size(); ++pi) {
      if (verified[pi]) continue;
      const Production &p = g.productions[pi];
      bool ready = true;
      for (int occ : p.rhs.occurrences)
        if (!res.lambda_star.count(occ)) {
          ready = false;
          break;
        }
      if (!ready) continue;
      BoolMatrix induced = production_induced(g, p, res.lambda_star);
      verified[pi] = 1;
      trace.push_back(p.id);
      progress = true;
      auto it = res.lambda_star.find(p.lhs);
      if (it == res.lambda_star.end()) {
        res.lambda_star.emplace(p.lhs, std::move(induced));
      } else if (!(it->second == induced)) {
        res.witness = UnsafeWitness{p.id, it->second, induced, trace};
        return res;
      }
    }
  }

  for (size_t m = 0; m < g.modules.size(); ++m)
    if (g.modules[m].composite && !res.lambda_star.count(static_cast<int>(m)))
      res.unproductive.push_back(static_cast<int>(m));
  res.safe = res.unproductive.empty();
  return res;
}

AnalysisResult analyze(const WorkflowGrammar &g, const DependencyAssignment &lambda) {
  AnalysisResult out;
  out.graph = build_production_graph(g);
  out.classification = classify_recursion(g, out.graph);
  out.assignment = compute_full_assignment(g, lambda);
  return out;
}

} // namespace provlab
