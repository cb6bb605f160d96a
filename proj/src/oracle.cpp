#include "provlab/oracle.hpp"

#include <map>

#include "provlab/analysis.hpp"
#include "provlab/errors.hpp"

namespace provlab {

FlatReach::FlatReach(const Projection &proj, const DependencyAssignment &effective)
    : proj_(&proj) {
  const RunState &run = proj.run;
  n_ = run.item_count();
  succ_.assign(n_ + 1, {});

  // Which item sits on which live port right now.
  std::map<std::pair<int, int>, int> at_input, at_output;
  for (const auto &d : run.items()) {
    if (d.consumer) at_input[{d.consumer->node, d.consumer->port}] = d.id;
    if (d.producer) at_output[{d.producer->node, d.producer->port}] = d.id;
  }

  for (size_t n = 0; n < run.nodes().size(); ++n) {
    const TreeNode &node = run.nodes()[n];
    if (node.kind != NodeKind::Instance || node.expanded) continue;
    auto it = effective.find(node.module);
    if (it == effective.end())
      throw StructuralError("no dependency matrix for live instance " +
                            run.node_name(static_cast<int>(n)));
    const BoolMatrix &m = it->second;
    for (int x = 0; x < m.rows(); ++x)
      for (int y = 0; y < m.cols(); ++y) {
        if (!m.at(x, y)) continue;
        auto in_it = at_input.find({static_cast<int>(n), x});
        auto out_it = at_output.find({static_cast<int>(n), y});
        if (in_it == at_input.end() || out_it == at_output.end())
          throw StructuralError("live port without an item in " +
                                run.node_name(static_cast<int>(n)));
        succ_[in_it->second].push_back(out_it->second);
      }
  }

  // Up to medium-sized runs: materialize the whole closure as bitset rows,
  // filled in reverse topological order of the item DAG.
  if (n_ <= 10000) {
    const size_t words = (static_cast<size_t>(n_) + 64) / 64;
    std::vector<int> indeg(n_ + 1, 0), topo;
    for (int u = 1; u <= n_; ++u)
      for (int v : succ_[u]) ++indeg[v];
    for (int u = 1; u <= n_; ++u)
      if (indeg[u] == 0) topo.push_back(u);
    for (size_t h = 0; h < topo.size(); ++h)
      for (int v : succ_[topo[h]])
        if (--indeg[v] == 0) topo.push_back(v);
    if (static_cast<int>(topo.size()) != n_)
      throw StructuralError("projected item graph is cyclic");
    closure_.assign(n_ + 1, {});
    for (auto it = topo.rbegin(); it != topo.rend(); ++it) {
      int u = *it;
      auto &row = closure_[u];
      row.assign(words, 0);
      row[u / 64] |= 1ull << (u % 64);
      for (int v : succ_[u]) {
        const auto &sub = closure_[v];
        for (size_t w = 0; w < words; ++w) row[w] |= sub[w];
      }
    }
    closed_ = true;
  }
}

int FlatReach::lookup(int full_id) const {
  auto it = proj_->proj_item_of.find(full_id);
  if (it == proj_->proj_item_of.end())
    throw NotVisibleError("item d" + std::to_string(full_id) +
                          " does not exist under this view");
  return it->second;
}

bool FlatReach::search(int from, int to) const {
  if (from == to) return true;
  std::vector<char> seen(n_ + 1, 0);
  std::vector<int> stack{from};
  seen[from] = 1;
  while (!stack.empty()) {
    int u = stack.back();
    stack.pop_back();
    for (int v : succ_[u]) {
      if (v == to) return true;
      if (!seen[v]) {
        seen[v] = 1;
        stack.push_back(v);
      }
    }
  }
  return false;
}

bool FlatReach::reachable(int from, int to) const {
  int f = lookup(from), t = lookup(to);
  if (closed_) return (closure_[f][t / 64] >> (t % 64)) & 1;
  return search(f, t);
}

namespace {

// Sentential workflow substitution: expand occurrence `j` with production
// `p`, splicing the right-hand side in place of the occurrence.
SimpleWorkflow substitute(const SimpleWorkflow &w, int j, const Production &p) {
  SimpleWorkflow out;
  const int n = static_cast<int>(w.occurrences.size());
  const int base = n - 1;
  auto remap = [&](int o) { return o < j ? o : o - 1; };
  for (int o = 0; o < n; ++o)
    if (o != j) out.occurrences.push_back(w.occurrences[o]);
  for (int r : p.rhs.occurrences) out.occurrences.push_back(r);

  auto imap = [&](int x) { return p.input_map.empty() ? x : p.input_map[x]; };
  auto omap = [&](int y) { return p.output_map.empty() ? y : p.output_map[y]; };
  auto sub_in = [&](const PortRef &r) -> PortRef {
    if (r.occurrence != j) return {remap(r.occurrence), r.port};
    PortRef t = p.rhs.initial_inputs[imap(r.port)];
    return {base + t.occurrence, t.port};
  };
  auto sub_out = [&](const PortRef &r) -> PortRef {
    if (r.occurrence != j) return {remap(r.occurrence), r.port};
    PortRef t = p.rhs.final_outputs[omap(r.port)];
    return {base + t.occurrence, t.port};
  };

  for (const auto &e : w.edges) out.edges.push_back({sub_out(e.from), sub_in(e.to)});
  for (const auto &e : p.rhs.edges)
    out.edges.push_back({{base + e.from.occurrence, e.from.port},
                         {base + e.to.occurrence, e.to.port}});
  for (const auto &r : w.initial_inputs) out.initial_inputs.push_back(sub_in(r));
  for (const auto &r : w.final_outputs) out.final_outputs.push_back(sub_out(r));
  return out;
}

struct Enumerator {
  const WorkflowGrammar &g;
  const DependencyAssignment &lambda;
  int bound;
  std::vector<BoolMatrix> results;
  bool exhausted = true;

  void walk(const SimpleWorkflow &w, int budget) {
    int leftmost = -1;
    for (size_t o = 0; o < w.occurrences.size(); ++o)
      if (g.mod(w.occurrences[o]).composite) {
        leftmost = static_cast<int>(o);
        break;
      }
    if (leftmost < 0) {
      BoolMatrix m = induced_matrix(g, w, lambda);
      for (const auto &r : results)
        if (r == m) return;
      results.push_back(std::move(m));
      return;
    }
    if (budget == 0) {
      exhausted = false;
      return;
    }
    for (int pi : g.productions_of(w.occurrences[leftmost]))
      walk(substitute(w, leftmost, g.productions[pi]), budget - 1);
  }
};

} // namespace

EnumSafetyResult enumerate_and_check_safety(const WorkflowGrammar &g,
                                            const DependencyAssignment &lambda,
                                            int bound) {
  EnumSafetyResult res;
  res.exhausted = true;
  for (size_t m = 0; m < g.modules.size(); ++m) {
    if (!g.modules[m].composite) continue;
    const ModuleDecl &d = g.modules[m];
    SimpleWorkflow w;
    w.occurrences.push_back(static_cast<int>(m));
    for (int x = 0; x < d.inputs; ++x) w.initial_inputs.push_back({0, x});
    for (int y = 0; y < d.outputs; ++y) w.final_outputs.push_back({0, y});

    Enumerator en{g, lambda, bound};
    en.walk(w, bound);
    if (!en.exhausted) res.exhausted = false;
    if (en.results.size() > 1) {
      res.safe = false;
      res.module = static_cast<int>(m);
      res.first = en.results[0];
      res.second = en.results[1];
      return res;
    }
  }
  return res;
}

} // namespace provlab
