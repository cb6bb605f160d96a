#include <doctest.h>

#include "provlab/analysis.hpp"
#include "provlab/errors.hpp"
#include "provlab/model_json.hpp"

using namespace provlab;

namespace {

GrammarFile load(const char *name) {
  return parse_grammar(read_file(std::string(PROVLAB_FIXTURE_DIR) + "/" + name));
}

BoolMatrix mat(int r, int c, std::vector<std::pair<int, int>> pairs) {
  return BoolMatrix::from_pairs(r, c, pairs);
}

} // namespace

TEST_CASE("running example is strictly linear with the expected cycle table") {
  GrammarFile gf = load("fig2.json");
  AnalysisResult res = analyze(gf.grammar, gf.lambda);
  REQUIRE(res.classification.cls == RecursionClass::StrictlyLinear);
  const CycleTable &ct = res.classification.cycles;
  REQUIRE(ct.size() == 2);
  CHECK(ct.cycle(1) == std::vector<EdgeId>{{2, 2}, {4, 2}});
  CHECK(ct.cycle(2) == std::vector<EdgeId>{{6, 2}});
  CHECK(ct.edge_cycle.at({4, 2}).cycle == 1);
  CHECK(ct.edge_cycle.at({4, 2}).position == 2);
  int a = gf.grammar.module_index("A");
  CHECK(ct.module_cycle.at(a).cycle == 1);
  CHECK(ct.module_cycle.at(a).position == 1);
}

TEST_CASE("full assignment of the default view matches the published table") {
  GrammarFile gf = load("fig2.json");
  AnalysisResult res = analyze(gf.grammar, gf.lambda);
  REQUIRE(res.assignment.safe);
  const auto &ls = res.assignment.lambda_star;
  auto m = [&](const char *n) { return ls.at(gf.grammar.module_index(n)); };
  CHECK(m("S") == mat(2, 3, {{1, 1}, {1, 2}, {2, 2}, {2, 3}}));
  CHECK(m("A") == mat(2, 2, {{1, 1}, {1, 2}, {2, 2}}));
  CHECK(m("B") == mat(2, 2, {{1, 1}, {1, 2}, {2, 2}}));
  CHECK(m("C") == BoolMatrix::identity(2));
  CHECK(m("D") == BoolMatrix::identity(2));
  CHECK(m("E") == mat(2, 1, {{1, 1}, {2, 1}}));
}

TEST_CASE("restricted view yields the published view assignment") {
  GrammarFile gf = load("fig2.json");
  View u2 = parse_view(gf.grammar,
                       read_file(std::string(PROVLAB_FIXTURE_DIR) + "/fig2_view_u2.json"));
  WorkflowGrammar gv = restrict_grammar(gf.grammar, u2);
  auto fa = compute_full_assignment(gv, view_assignment_for(gf.grammar, gv, u2));
  REQUIRE(fa.safe);
  auto m = [&](const char *n) { return fa.lambda_star.at(gv.module_index(n)); };
  CHECK(m("S") == BoolMatrix(2, 3, true));
  CHECK(m("A") == BoolMatrix(2, 2, true));
  CHECK(m("B") == mat(2, 2, {{1, 1}, {1, 2}, {2, 2}}));
}

TEST_CASE("conflicting productions produce a witness") {
  GrammarFile gf = load("fig6.json");
  AnalysisResult res = analyze(gf.grammar, gf.lambda);
  CHECK_FALSE(res.assignment.safe);
  REQUIRE(res.assignment.witness.has_value());
  const UnsafeWitness &w = *res.assignment.witness;
  CHECK(w.expected != w.induced);
  CHECK((w.production_id == 1 || w.production_id == 2));
  CHECK_FALSE(w.trace.empty());
}

TEST_CASE("two self-loops on one module are linear but not strictly") {
  GrammarFile gf = load("fig8.json");
  AnalysisResult res = analyze(gf.grammar, gf.lambda);
  CHECK(res.classification.cls == RecursionClass::Linear);
}

TEST_CASE("acyclic grammar classifies as non-recursive") {
  GrammarFile gf = load("fig1.json");
  AnalysisResult res = analyze(gf.grammar, gf.lambda);
  CHECK(res.classification.cls == RecursionClass::NonRecursive);
  CHECK(res.assignment.safe);
}

TEST_CASE("composites without terminating derivations are unproductive") {
  GrammarFile gf = load("fig8.json");
  // Remove the only terminal production; S can then never finish.
  auto &prods = gf.grammar.productions;
  prods.erase(std::remove_if(prods.begin(), prods.end(),
                             [](const Production &p) { return p.id == 3; }),
              prods.end());
  auto fa = compute_full_assignment(gf.grammar, gf.lambda);
  CHECK_FALSE(fa.safe);
  CHECK_FALSE(fa.witness.has_value());
  REQUIRE(fa.unproductive.size() == 1);
  CHECK(fa.unproductive[0] == gf.grammar.start);
}

TEST_CASE("induced matrix composes data edges with dependency edges") {
  GrammarFile gf = load("fig2.json");
  // Production 1 under the atomic assignment plus lambda* of the composites.
  AnalysisResult res = analyze(gf.grammar, gf.lambda);
  const Production *p1 = gf.grammar.production_by_id(1);
  REQUIRE(p1 != nullptr);
  BoolMatrix induced = production_induced(gf.grammar, *p1, res.assignment.lambda_star);
  CHECK(induced == res.assignment.lambda_star.at(gf.grammar.start));
}

TEST_CASE("production graph edges use topological positions") {
  GrammarFile gf = load("fig2.json");
  ProductionGraph pg = build_production_graph(gf.grammar);
  // Production 5 is C -> [b, D, E]; positions follow the topological order
  // of the right-hand side.
  CHECK(pg.occ_at_position.at(5).size() == 3);
  int d = gf.grammar.module_index("D");
  bool found = false;
  for (const auto &e : pg.edges)
    if (e.id == EdgeId{5, 2}) {
      found = true;
      CHECK(e.to == d);
      CHECK(e.from == gf.grammar.module_index("C"));
    }
  CHECK(found);
}
