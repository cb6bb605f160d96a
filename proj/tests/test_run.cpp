#include <doctest.h>

#include <map>

#include "provlab/errors.hpp"
#include "provlab/model_json.hpp"
#include "provlab/run.hpp"

using namespace provlab;

namespace {

GrammarFile load(const char *name) {
  return parse_grammar(read_file(std::string(PROVLAB_FIXTURE_DIR) + "/" + name));
}

// Derivation of the running example that unrolls the A/B recursion to the
// fifth spine child and then expands the C below it.
const std::vector<Step> kSpineLog = {
    {"S:1", 1}, {"A:1", 2}, {"B:1", 4}, {"A:2", 2},
    {"B:2", 4}, {"A:3", 3}, {"C:4", 5},
};

EdgeLabel comp(int k, int i) { return {false, k, i, 0}; }
EdgeLabel rec(int s, int t, int i) { return {true, s, t, i}; }

} // namespace

TEST_CASE("start materializes the boundary items of the start module") {
  GrammarFile gf = load("fig2.json");
  AnalysisResult ana = analyze(gf.grammar, gf.lambda);
  RunState run = RunState::start(gf.grammar, ana.classification);
  CHECK(run.item_count() == 5); // 2 inputs + 3 outputs
  CHECK(run.pending().size() == 1);
  CHECK(run.node_name(0) == "S:1");
  CHECK_FALSE(run.src_label(1).has_value());
  auto dst = run.dst_label(1);
  REQUIRE(dst.has_value());
  CHECK(dst->path.empty());
  CHECK(dst->index == 1);
}

TEST_CASE("recursion flattens under a recursive node") {
  GrammarFile gf = load("fig2.json");
  AnalysisResult ana = analyze(gf.grammar, gf.lambda);
  RunState run = RunState::replay(gf.grammar, ana.classification, kSpineLog);

  // Spine children A:1, B:1, A:2, B:2, A:3 share one recursive parent.
  int a1 = run.find_instance("A:1");
  int a3 = run.find_instance("A:3");
  REQUIRE(a1 >= 0);
  REQUIRE(a3 >= 0);
  CHECK(run.nodes()[a1].parent == run.nodes()[a3].parent);
  CHECK(run.nodes()[run.nodes()[a1].parent].kind == NodeKind::Recursive);
  CHECK(run.root_path(a1) == std::vector<EdgeLabel>{comp(1, 3), rec(1, 1, 1)});
  CHECK(run.root_path(a3) == std::vector<EdgeLabel>{comp(1, 3), rec(1, 1, 5)});
}

TEST_CASE("depth stays within twice the composite count") {
  GrammarFile gf = load("fig2.json");
  AnalysisResult ana = analyze(gf.grammar, gf.lambda);
  RunState run = RunState::replay(gf.grammar, ana.classification, kSpineLog);
  CHECK(run.max_depth() <= 2 * 6);
}

TEST_CASE("the recursion example item label is reproduced exactly") {
  GrammarFile gf = load("fig2.json");
  AnalysisResult ana = analyze(gf.grammar, gf.lambda);
  RunState run = RunState::replay(gf.grammar, ana.classification, kSpineLog);

  // The item on the b -> D edge created by expanding the C below the fifth
  // spine child: its shared prefix reaches that C, the source hangs off b
  // (position 1 of production 5), the destination enters D's recursion.
  DataLabel expected;
  expected.shared_prefix = {comp(1, 3), rec(1, 1, 5), comp(3, 2)};
  expected.src = DataLabel::Tail{{comp(5, 1)}, 1};
  expected.dst = DataLabel::Tail{{comp(5, 2), rec(2, 1, 1)}, 2};

  bool found = false;
  for (const auto &[id, label] : run.all_labels())
    if (label == expected) found = true;
  CHECK(found);
}

TEST_CASE("labels are append-only across later expansions") {
  GrammarFile gf = load("fig2.json");
  AnalysisResult ana = analyze(gf.grammar, gf.lambda);
  RunState run = RunState::start(gf.grammar, ana.classification);
  std::map<int, DataLabel> before;
  for (const Step &s : kSpineLog) {
    run.apply(s.target, s.production);
    for (const auto &[id, label] : before) CHECK(run.item_label(id) == label);
    for (const auto &[id, label] : run.all_labels()) before.emplace(id, label);
  }
}

TEST_CASE("streaming label visitation matches the materialized list") {
  GrammarFile gf = load("fig2.json");
  AnalysisResult ana = analyze(gf.grammar, gf.lambda);
  RunState run = RunState::replay(gf.grammar, ana.classification, kSpineLog);
  auto all = run.all_labels();
  size_t at = 0;
  run.for_each_label([&](int id, const DataLabel &l) {
    REQUIRE(at < all.size());
    CHECK(all[at].first == id);
    CHECK(all[at].second == l);
    ++at;
  });
  CHECK(at == all.size());
}

TEST_CASE("log serialization replays bit-exactly") {
  GrammarFile gf = load("fig2.json");
  AnalysisResult ana = analyze(gf.grammar, gf.lambda);
  std::string text = serialize_log(kSpineLog);
  std::vector<Step> parsed = parse_log(text);
  REQUIRE(parsed.size() == kSpineLog.size());
  CHECK(serialize_log(parsed) == text);
  RunState a = RunState::replay(gf.grammar, ana.classification, kSpineLog);
  RunState b = RunState::replay(gf.grammar, ana.classification, parsed);
  CHECK(a.item_count() == b.item_count());
  CHECK(a.all_labels() == b.all_labels());
}

TEST_CASE("invalid steps are rejected") {
  GrammarFile gf = load("fig2.json");
  AnalysisResult ana = analyze(gf.grammar, gf.lambda);
  RunState run = RunState::start(gf.grammar, ana.classification);
  CHECK_THROWS_AS(run.apply("A:1", 2), InputError);  // no such instance yet
  CHECK_THROWS_AS(run.apply("S:1", 2), InputError);  // production of wrong lhs
  run.apply("S:1", 1);
  CHECK_THROWS_AS(run.apply("S:1", 1), InputError);  // already expanded
}

TEST_CASE("projection keeps only steps visible under the view") {
  GrammarFile gf = load("fig2.json");
  AnalysisResult ana = analyze(gf.grammar, gf.lambda);
  View u2 = parse_view(gf.grammar,
                       read_file(std::string(PROVLAB_FIXTURE_DIR) + "/fig2_view_u2.json"));
  Projection proj = project_view(gf.grammar, ana.classification, kSpineLog, u2);
  // C:4's expansion uses production 5, which U2 cannot see.
  CHECK(proj.run.log().size() == kSpineLog.size() - 1);
  CHECK(proj.run.item_count() < RunState::replay(gf.grammar, ana.classification, kSpineLog).item_count());
  // Projected items point back at their full-run counterparts.
  for (const auto &[fid, pid] : proj.proj_item_of)
    CHECK(proj.full_item_of[pid - 1] == fid);
}
