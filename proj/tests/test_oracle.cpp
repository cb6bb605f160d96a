#include <doctest.h>

#include "provlab/decode.hpp"
#include "provlab/errors.hpp"
#include "provlab/model_json.hpp"
#include "provlab/oracle.hpp"
#include "provlab/synthgen.hpp"

using namespace provlab;

namespace {

GrammarFile load(const char *name) {
  return parse_grammar(read_file(std::string(PROVLAB_FIXTURE_DIR) + "/" + name));
}

// Decode every visible pair through every variant and compare against the
// flattened-graph oracle. Returns the number of pairs checked.
long long cross_check(const GrammarFile &gf, const AnalysisResult &ana,
                      const std::vector<Step> &log, const View &v) {
  RunState full = RunState::replay(gf.grammar, ana.classification, log);
  Projection proj = project_view(gf.grammar, ana.classification, log, v);
  const WorkflowGrammar &gv = proj.run.grammar();
  FullAssignmentResult fav =
      compute_full_assignment(gv, view_assignment_for(gf.grammar, gv, v));
  REQUIRE(fav.safe);
  FlatReach oracle(proj, fav.lambda_star);

  std::vector<int> visible;
  for (const auto &[fid, pid] : proj.proj_item_of) visible.push_back(fid);

  std::vector<ViewLabel> vls;
  for (ViewVariant var : {ViewVariant::Default, ViewVariant::SpaceEfficient,
                          ViewVariant::QueryEfficient})
    vls.push_back(label_view(gf.grammar, ana.classification, v, var));

  long long checked = 0;
  for (int a : visible)
    for (int b : visible) {
      bool expect = oracle.reachable(a, b);
      for (const ViewLabel &vl : vls)
        CHECK(decode(full.item_label(a), full.item_label(b), vl).reachable == expect);
      ++checked;
    }
  return checked;
}

} // namespace

TEST_CASE("oracle agrees with the decoder on the running example") {
  GrammarFile gf = load("fig2.json");
  AnalysisResult ana = analyze(gf.grammar, gf.lambda);
  const std::vector<Step> log = {
      {"S:1", 1}, {"A:1", 2}, {"B:1", 4}, {"A:2", 2},
      {"B:2", 4}, {"A:3", 3}, {"C:4", 5}, {"D:1", 6}, {"D:2", 7},
  };
  View u2 = parse_view(gf.grammar,
                       read_file(std::string(PROVLAB_FIXTURE_DIR) + "/fig2_view_u2.json"));
  CHECK(cross_check(gf, ana, log, default_view(gf.grammar, gf.lambda)) > 0);
  CHECK(cross_check(gf, ana, log, u2) > 0);
}

TEST_CASE("oracle agrees with the decoder on generated runs and views") {
  GenParams p;
  p.workflow_size = 8;
  p.module_degree = 2;
  p.nesting_depth = 2;
  p.recursion_length = 3;
  for (std::uint64_t seed : {11u, 12u, 13u}) {
    p.seed = seed;
    GeneratedGrammar gg = gen_grammar(p);
    AnalysisResult ana = analyze(gg.grammar, gg.lambda);
    REQUIRE(ana.assignment.safe);
    std::vector<Step> log = gen_run(gg.grammar, ana.classification, 150, seed * 7 + 1);
    long long total = 0;
    for (std::uint64_t vs : {1u, 2u, 3u}) {
      View v = gen_safe_view(gg.grammar, gg.lambda, 2, vs % 2 == 0, vs);
      total += cross_check({gg.grammar, gg.lambda}, ana, log, v);
    }
    CHECK(total > 0);
  }
}

TEST_CASE("oracle rejects hidden items") {
  GrammarFile gf = load("fig2.json");
  AnalysisResult ana = analyze(gf.grammar, gf.lambda);
  const std::vector<Step> log = {
      {"S:1", 1}, {"A:1", 2}, {"B:1", 4}, {"A:2", 2},
      {"B:2", 4}, {"A:3", 3}, {"C:4", 5},
  };
  View u2 = parse_view(gf.grammar,
                       read_file(std::string(PROVLAB_FIXTURE_DIR) + "/fig2_view_u2.json"));
  Projection proj = project_view(gf.grammar, ana.classification, log, u2);
  const WorkflowGrammar &gv = proj.run.grammar();
  FullAssignmentResult fav =
      compute_full_assignment(gv, view_assignment_for(gf.grammar, gv, u2));
  FlatReach oracle(proj, fav.lambda_star);
  RunState full = RunState::replay(gf.grammar, ana.classification, log);
  int hidden = -1;
  for (int id = 1; id <= full.item_count(); ++id)
    if (!proj.proj_item_of.count(id)) hidden = id;
  REQUIRE(hidden > 0);
  CHECK_THROWS_AS(oracle.reachable(hidden, 1), NotVisibleError);
  CHECK_THROWS_AS(oracle.reachable(1, hidden), NotVisibleError);
}

TEST_CASE("bounded enumeration confirms the worklist verdicts") {
  GrammarFile safe = load("fig2.json");
  EnumSafetyResult rs = enumerate_and_check_safety(safe.grammar, safe.lambda, 12);
  CHECK(rs.safe);
  CHECK(compute_full_assignment(safe.grammar, safe.lambda).safe == rs.safe);

  GrammarFile unsafe_gf = load("fig6.json");
  EnumSafetyResult ru = enumerate_and_check_safety(unsafe_gf.grammar, unsafe_gf.lambda, 12);
  CHECK_FALSE(ru.safe);
  CHECK(ru.first != ru.second);
  CHECK(compute_full_assignment(unsafe_gf.grammar, unsafe_gf.lambda).safe == ru.safe);
}
