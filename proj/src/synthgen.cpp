#include "provlab/synthgen.hpp"

#include <algorithm>
#include <string>

#include "provlab/errors.hpp"

namespace provlab {

std::uint64_t SplitMix64::next() {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ull);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
  return z ^ (z >> 31);
}

namespace {

// Random m x m matrix with every row and every column covered.
BoolMatrix random_covered(int m, SplitMix64 &rng) {
  BoolMatrix a(m, m);
  for (int x = 0; x < m; ++x)
    for (int y = 0; y < m; ++y)
      if (rng.chance(35)) a.set(x, y, true);
  for (int x = 0; x < m; ++x) {
    bool any = false;
    for (int y = 0; y < m; ++y) any = any || a.at(x, y);
    if (!any) a.set(x, rng.below(m), true);
  }
  for (int y = 0; y < m; ++y) {
    bool any = false;
    for (int x = 0; x < m; ++x) any = any || a.at(x, y);
    if (!any) a.set(rng.below(m), y, true);
  }
  return a;
}

// A right-hand side that is a fully wired chain: output p of each occurrence
// feeds input p of the next, the boundary is the first and last occurrence.
// All modules share the same arity, so any sequence composes.
SimpleWorkflow chain(const std::vector<int> &occurrences, int m) {
  SimpleWorkflow w;
  w.occurrences = occurrences;
  const int n = static_cast<int>(occurrences.size());
  for (int q = 0; q + 1 < n; ++q)
    for (int p = 0; p < m; ++p)
      w.edges.push_back({{q, p}, {q + 1, p}});
  for (int p = 0; p < m; ++p) w.initial_inputs.push_back({0, p});
  for (int p = 0; p < m; ++p) w.final_outputs.push_back({n - 1, p});
  return w;
}

} // namespace

GeneratedGrammar gen_grammar(const GenParams &p) {
  if (p.workflow_size < 1 || p.module_degree < 1 || p.nesting_depth < 1 ||
      p.recursion_length < 1)
    throw InputError("generator parameters must all be at least 1");

  SplitMix64 rng(p.seed);
  const int m = p.module_degree;
  const int d = p.nesting_depth;
  const int r = p.recursion_length;

  GeneratedGrammar out;
  WorkflowGrammar &g = out.grammar;
  auto add_module = [&](const std::string &name, bool composite) {
    g.modules.push_back({name, m, m, composite});
    return static_cast<int>(g.modules.size()) - 1;
  };

  std::vector<int> hubs, cyc, pool;
  hubs.push_back(add_module("S", true));
  for (int l = 2; l <= d; ++l) hubs.push_back(add_module("H" + std::to_string(l), true));
  for (int t = 1; t <= r; ++t) cyc.push_back(add_module("C" + std::to_string(t), true));
  for (int a = 1; a <= 4; ++a) {
    int id = add_module("a" + std::to_string(a), false);
    pool.push_back(id);
    out.lambda[id] = random_covered(m, rng);
  }
  // Absorbing terminal: an all-true matrix is a fixpoint of T -> A T B for
  // any row- and column-covered A and B, which is what makes the recursion
  // cycle consistent no matter which atomics surround it.
  int sync = add_module("sync", false);
  out.lambda[sync] = BoolMatrix(m, m, true);
  g.start = hubs[0];

  int next_id = 1;
  auto add_production = [&](int lhs, const std::vector<int> &occ) {
    g.productions.push_back({next_id++, lhs, chain(occ, m), {}, {}});
  };
  auto random_chain = [&](std::vector<std::pair<int, int>> fixed) {
    std::vector<int> occ(p.workflow_size);
    for (int q = 0; q < p.workflow_size; ++q) occ[q] = pool[rng.below(4)];
    for (auto [pos, mod] : fixed) occ[pos] = mod;
    return occ;
  };
  auto distinct_positions = [&](int count) {
    std::vector<std::pair<int, int>> fixed;
    std::vector<int> used;
    while (static_cast<int>(fixed.size()) < count) {
      int pos = rng.below(p.workflow_size);
      if (std::find(used.begin(), used.end(), pos) != used.end()) continue;
      used.push_back(pos);
      fixed.push_back({pos, 0});
    }
    return fixed;
  };

  // One production per hub; the child below may appear twice (fork pattern).
  for (size_t l = 0; l < hubs.size(); ++l) {
    int child = l + 1 < hubs.size() ? hubs[l + 1] : cyc[0];
    bool fork = l + 1 < hubs.size() && p.workflow_size >= 2 && rng.chance(50);
    auto fixed = distinct_positions(fork ? 2 : 1);
    for (auto &f : fixed) f.second = child;
    add_production(hubs[l], random_chain(fixed));
  }
  // One recursive production per cycle composite, closing C1 -> ... -> Cr -> C1.
  for (int t = 0; t < r; ++t) {
    auto fixed = distinct_positions(1);
    fixed[0].second = cyc[(t + 1) % r];
    add_production(cyc[t], random_chain(fixed));
  }
  // Terminator for the cycle entry; the sync occurrence pins its matrix to
  // the absorbing fixpoint.
  {
    auto fixed = distinct_positions(1);
    fixed[0].second = sync;
    add_production(cyc[0], random_chain(fixed));
  }

  ValidationReport rep = validate_grammar(g, out.lambda);
  if (!rep.empty())
    throw StructuralError("generated grammar failed validation: " + rep[0].message);
  AnalysisResult ana = analyze(g, out.lambda);
  if (ana.classification.cls != RecursionClass::StrictlyLinear)
    throw StructuralError("generated grammar is not strictly linear");
  if (!ana.assignment.safe)
    throw StructuralError("generated grammar is not safe");
  return out;
}

std::vector<Step> gen_run(const WorkflowGrammar &g, const Classification &cls,
                          int target_items, std::uint64_t seed) {
  if (target_items < 0) throw InputError("target size must be non-negative");
  SplitMix64 rng(seed);
  RunState run = RunState::start(g, cls);
  const long long lo = (9LL * target_items + 9) / 10;
  long long steps = 0, cap = 10LL * target_items + 1000;

  while (run.item_count() < lo && !run.pending().empty() && steps < cap) {
    const auto &pending = run.pending();
    int node = pending[rng.below(static_cast<int>(pending.size()))];
    int module = run.nodes()[node].module;
    std::vector<int> prods = g.productions_of(module);
    // Below the target, always stay on the cycle when a recursive production
    // exists; picking a terminator could strand the run short of 0.9n when
    // this was the only live spine.
    int pick;
    if (prods.size() > 1 && cls.cycles.module_cycle.count(module)) {
      std::vector<int> rec;
      for (int pi : prods) {
        bool recursive = false;
        for (int occ : g.productions[pi].rhs.occurrences)
          if (cls.cycles.module_cycle.count(occ)) recursive = true;
        if (recursive) rec.push_back(pi);
      }
      pick = rec.empty() ? prods[rng.below(static_cast<int>(prods.size()))]
                         : rec[rng.below(static_cast<int>(rec.size()))];
    } else {
      pick = prods[rng.below(static_cast<int>(prods.size()))];
    }
    run.apply(run.node_name(node), g.productions[pick].id);
    ++steps;
  }
  if (run.item_count() < lo)
    throw InputError("derivations cannot reach " + std::to_string(lo) +
                     " items; largest obtained was " +
                     std::to_string(run.item_count()));
  return run.log();
}

namespace {

bool view_is_safe(const WorkflowGrammar &g, const View &v) {
  WorkflowGrammar gv = restrict_grammar(g, v);
  FullAssignmentResult res =
      compute_full_assignment(gv, view_assignment_for(g, gv, v));
  return res.safe;
}

} // namespace

View gen_safe_view(const WorkflowGrammar &g, const DependencyAssignment &lambda,
                   int size, bool grey, std::uint64_t seed) {
  AnalysisResult ana = analyze(g, lambda);
  if (!ana.assignment.safe)
    throw InputError("base grammar is unsafe; cannot derive safe views");
  int composites = 0;
  for (const auto &mdecl : g.modules) composites += mdecl.composite ? 1 : 0;
  if (size < 1 || size > composites)
    throw InputError("view size must be between 1 and the composite count");

  SplitMix64 rng(seed);
  std::vector<int> chosen{g.start};
  while (static_cast<int>(chosen.size()) < size) {
    View probe{chosen, {}};
    std::sort(probe.expandable.begin(), probe.expandable.end());
    std::vector<char> reach = derivable_modules(g, probe);
    std::vector<int> frontier;
    for (size_t i = 0; i < g.modules.size(); ++i)
      if (reach[i] && g.modules[i].composite &&
          std::find(chosen.begin(), chosen.end(), static_cast<int>(i)) ==
              chosen.end())
        frontier.push_back(static_cast<int>(i));
    if (frontier.empty()) break;
    chosen.push_back(frontier[rng.below(static_cast<int>(frontier.size()))]);
  }
  std::sort(chosen.begin(), chosen.end());

  // White-box assignment: lambda* of the full analysis for everything that
  // can surface unexpanded. Safe by the uniqueness of lambda*.
  View white{chosen, {}};
  WorkflowGrammar gv = restrict_grammar(g, white);
  for (const auto &mdecl : gv.modules) {
    if (white.is_expandable(g.module_index(mdecl.name))) continue;
    int full_id = g.module_index(mdecl.name);
    white.assignment[full_id] = ana.assignment.lambda_star.at(full_id);
  }
  if (!grey) return white;

  std::vector<int> opaque;
  for (const auto &[id, mat] : white.assignment) opaque.push_back(id);
  for (int attempt = 0; attempt < 100; ++attempt) {
    View cand = white;
    // Early attempts only touch atomic leaves, whose extra entries cannot
    // create a production mismatch on their own; later attempts go anywhere.
    for (int id : opaque) {
      if (attempt < 50 && g.mod(id).composite) continue;
      if (!rng.chance(50)) continue;
      BoolMatrix &mat = cand.assignment[id];
      for (int extra = 0; extra < 2; ++extra)
        mat.set(rng.below(mat.rows()), rng.below(mat.cols()), true);
    }
    if (view_is_safe(g, cand)) return cand;
  }
  return white;
}

} // namespace provlab
