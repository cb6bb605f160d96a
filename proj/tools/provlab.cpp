// provlab: command-line surface over the workflow provenance labeling
// library. Subcommands wrap the library operations one to one; all output
// is JSON on stdout. Exit codes: 0 success (or "reachable" for query),
// 1 not reachable (query only), 2 input / visibility errors, 3 unsafe or
// unsupported recursion class.
#include <algorithm>
#include <cstdint>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "provlab/bench.hpp"
#include "provlab/decode.hpp"
#include "provlab/errors.hpp"
#include "provlab/model_json.hpp"
#include "provlab/oracle.hpp"
#include "provlab/run.hpp"
#include "provlab/synthgen.hpp"
#include "provlab/viewlabel.hpp"

using nlohmann::ordered_json;
using namespace provlab;

namespace {

ordered_json pairs_json(const BoolMatrix &m) {
  ordered_json arr = ordered_json::array();
  for (auto [in, out] : m.true_pairs()) arr.push_back({in, out});
  return arr;
}

ordered_json cycles_json(const CycleTable &ct) {
  ordered_json arr = ordered_json::array();
  for (const auto &cyc : ct.cycles) {
    ordered_json one = ordered_json::array();
    for (const auto &[k, i] : cyc) one.push_back({k, i});
    arr.push_back(one);
  }
  return arr;
}

void emit(const ordered_json &j) { std::cout << j.dump(2) << "\n"; }

GrammarFile load_grammar(const std::string &path) {
  return parse_grammar(read_file(path));
}

int parse_item_id(const std::string &s) {
  std::string t = s;
  if (!t.empty() && (t[0] == 'd' || t[0] == 'D')) t = t.substr(1);
  try {
    return std::stoi(t);
  } catch (const std::exception &) {
    throw InputError("item id must look like d42, got '" + s + "'");
  }
}

std::vector<uint8_t> read_bytes(const std::string &path) {
  std::string s = read_file(path);
  return std::vector<uint8_t>(s.begin(), s.end());
}

void write_bytes(const std::string &path, const std::vector<uint8_t> &b) {
  write_file(path, std::string(b.begin(), b.end()));
}

int cmd_validate(const std::string &grammar_path) {
  GrammarFile gf = load_grammar(grammar_path);
  ValidationReport rep = validate_grammar(gf.grammar, gf.lambda);
  ordered_json out;
  out["valid"] = rep.empty();
  out["violations"] = ordered_json::array();
  for (const auto &v : rep)
    out["violations"].push_back({{"code", v.code}, {"message", v.message}});
  emit(out);
  return rep.empty() ? 0 : 2;
}

int cmd_analyze(const std::string &grammar_path) {
  GrammarFile gf = load_grammar(grammar_path);
  AnalysisResult res = analyze(gf.grammar, gf.lambda);
  ordered_json out;
  out["recursion_class"] = recursion_class_name(res.classification.cls);
  if (res.classification.cls == RecursionClass::StrictlyLinear)
    out["cycles"] = cycles_json(res.classification.cycles);
  out["safe"] = res.assignment.safe;
  if (res.assignment.safe) {
    ordered_json ls;
    for (const auto &[m, mat] : res.assignment.lambda_star)
      ls[gf.grammar.mod(m).name] = pairs_json(mat);
    out["lambda_star"] = ls;
  } else if (res.assignment.witness) {
    const UnsafeWitness &w = *res.assignment.witness;
    out["witness"] = {{"production", w.production_id},
                      {"expected", pairs_json(w.expected)},
                      {"induced", pairs_json(w.induced)},
                      {"trace", w.trace}};
  }
  if (!res.assignment.unproductive.empty()) {
    ordered_json up = ordered_json::array();
    for (int m : res.assignment.unproductive) up.push_back(gf.grammar.mod(m).name);
    out["unproductive"] = up;
  }
  emit(out);
  return res.assignment.safe ? 0 : 3;
}

int cmd_generate_grammar(const GenParams &p, const std::string &out_path) {
  GeneratedGrammar gg = gen_grammar(p);
  std::string text = serialize_grammar({gg.grammar, gg.lambda});
  if (out_path.empty())
    std::cout << text;
  else
    write_file(out_path, text);
  ordered_json out;
  out["modules"] = gg.grammar.modules.size();
  out["productions"] = gg.grammar.productions.size();
  if (!out_path.empty()) {
    out["file"] = out_path;
    emit(out);
  }
  return 0;
}

int cmd_generate_run(const std::string &grammar_path, int items,
                     std::uint64_t seed, const std::string &out_path) {
  GrammarFile gf = load_grammar(grammar_path);
  AnalysisResult ana = analyze(gf.grammar, gf.lambda);
  std::vector<Step> log = gen_run(gf.grammar, ana.classification, items, seed);
  std::string text = serialize_log(log);
  if (out_path.empty())
    std::cout << text;
  else
    write_file(out_path, text);
  RunState run = RunState::replay(gf.grammar, ana.classification, log);
  ordered_json out;
  out["steps"] = log.size();
  out["items"] = run.item_count();
  if (!out_path.empty()) {
    out["file"] = out_path;
    emit(out);
  }
  return 0;
}

int cmd_generate_view(const std::string &grammar_path, int size, bool grey,
                      std::uint64_t seed, const std::string &out_path) {
  GrammarFile gf = load_grammar(grammar_path);
  View v = gen_safe_view(gf.grammar, gf.lambda, size, grey, seed);
  std::string text = serialize_view(gf.grammar, v);
  if (out_path.empty())
    std::cout << text;
  else
    write_file(out_path, text);
  ordered_json out;
  out["expandable"] = v.expandable.size();
  if (!out_path.empty()) {
    out["file"] = out_path;
    emit(out);
  }
  return 0;
}

int cmd_derive(const std::string &grammar_path, const std::string &log_path) {
  GrammarFile gf = load_grammar(grammar_path);
  AnalysisResult ana = analyze(gf.grammar, gf.lambda);
  RunState run =
      RunState::replay(gf.grammar, ana.classification, parse_log(read_file(log_path)));
  ordered_json out;
  out["steps"] = run.log().size();
  out["nodes"] = run.nodes().size();
  out["items"] = run.item_count();
  out["pending"] = run.pending().size();
  out["max_depth"] = run.max_depth();
  emit(out);
  return 0;
}

int cmd_label_run(const std::string &grammar_path, const std::string &log_path,
                  const std::string &out_path) {
  GrammarFile gf = load_grammar(grammar_path);
  AnalysisResult ana = analyze(gf.grammar, gf.lambda);
  RunState run =
      RunState::replay(gf.grammar, ana.classification, parse_log(read_file(log_path)));
  auto labels = run.all_labels();
  std::vector<uint8_t> store = serialize_label_store(labels);
  write_bytes(out_path, store);
  size_t max_bits = 0;
  for (const auto &[id, d] : labels) max_bits = std::max(max_bits, label_bits(d));
  ordered_json out;
  out["items"] = labels.size();
  out["bytes"] = store.size();
  out["max_label_bits"] = max_bits;
  out["file"] = out_path;
  emit(out);
  return 0;
}

int cmd_label_view(const std::string &grammar_path, const std::string &view_path,
                   const std::string &variant, const std::string &out_path) {
  GrammarFile gf = load_grammar(grammar_path);
  AnalysisResult ana = analyze(gf.grammar, gf.lambda);
  View v = view_path.empty() ? default_view(gf.grammar, gf.lambda)
                             : parse_view(gf.grammar, read_file(view_path));
  ViewLabel vl = label_view(gf.grammar, ana.classification, v,
                            variant_from_name(variant));
  write_file(out_path, serialize_view_label(vl));
  ordered_json out;
  out["variant"] = variant_name(vl.variant);
  out["bytes"] = vl.stored_bytes();
  out["file"] = out_path;
  emit(out);
  return 0;
}

int cmd_query(const std::string &view_label_path, const std::string &labels_path,
              const std::string &from, const std::string &to) {
  ViewLabel vl = parse_view_label(read_file(view_label_path));
  auto labels = parse_label_store(read_bytes(labels_path));
  int from_id = parse_item_id(from), to_id = parse_item_id(to);
  const DataLabel *d1 = nullptr, *d2 = nullptr;
  for (const auto &[id, d] : labels) {
    if (id == from_id) d1 = &d;
    if (id == to_id) d2 = &d;
  }
  if (!d1 || !d2) throw InputError("item not present in the label store");
  QueryVerdict v = decode(*d1, *d2, vl);
  ordered_json out;
  out["reachable"] = v.reachable;
  out["matrices_multiplied"] = v.matrices_multiplied;
  emit(out);
  return v.reachable ? 0 : 1;
}

int cmd_oracle_check(const std::string &grammar_path, const std::string &log_path,
                     const std::string &view_path, int pairs, std::uint64_t seed) {
  GrammarFile gf = load_grammar(grammar_path);
  AnalysisResult ana = analyze(gf.grammar, gf.lambda);
  View v = view_path.empty() ? default_view(gf.grammar, gf.lambda)
                             : parse_view(gf.grammar, read_file(view_path));
  std::vector<Step> log = parse_log(read_file(log_path));
  RunState full = RunState::replay(gf.grammar, ana.classification, log);
  Projection proj = project_view(gf.grammar, ana.classification, log, v);

  const WorkflowGrammar &gv = proj.run.grammar();
  FullAssignmentResult fav =
      compute_full_assignment(gv, view_assignment_for(gf.grammar, gv, v));
  if (!fav.safe) throw Error("unsafe", "view is unsafe; oracle undefined");
  FlatReach oracle(proj, fav.lambda_star);
  ViewLabel vl = label_view(gf.grammar, ana.classification, v, ViewVariant::Default);

  // Visible items only; hidden ones raise not-visible on both sides.
  std::vector<int> visible;
  for (const auto &[fid, pid] : proj.proj_item_of) visible.push_back(fid);
  std::sort(visible.begin(), visible.end());

  SplitMix64 rng(seed);
  ordered_json mismatches = ordered_json::array();
  long long checked = 0;
  auto check_pair = [&](int a, int b) {
    bool expect = oracle.reachable(a, b);
    bool got = decode(full.item_label(a), full.item_label(b), vl).reachable;
    ++checked;
    if (expect != got)
      mismatches.push_back({{"from", a}, {"to", b}, {"oracle", expect}, {"decode", got}});
  };
  if (pairs <= 0 ||
      static_cast<long long>(visible.size()) * static_cast<long long>(visible.size()) <= pairs) {
    for (int a : visible)
      for (int b : visible) check_pair(a, b);
  } else {
    for (int q = 0; q < pairs; ++q)
      check_pair(visible[rng.below(static_cast<int>(visible.size()))],
                 visible[rng.below(static_cast<int>(visible.size()))]);
  }
  ordered_json out;
  out["checked"] = checked;
  out["mismatches"] = mismatches;
  emit(out);
  return mismatches.empty() ? 0 : 1;
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"workflow provenance labeling toolkit"};
  app.require_subcommand(1);

  std::string grammar_path, view_path, log_path, labels_path, out_path;
  std::string variant = "default", from, to;
  std::uint64_t seed = 1;
  GenParams gp;
  int items = 1000, view_size = 2, pairs = 10000;
  bool grey = false;

  auto *validate = app.add_subcommand("validate", "check a grammar file");
  validate->add_option("--grammar", grammar_path)->required();

  auto *analyze_cmd = app.add_subcommand("analyze", "classify and run the safety analysis");
  analyze_cmd->add_option("--grammar", grammar_path)->required();

  auto *generate = app.add_subcommand("generate", "seeded synthetic artifacts");
  generate->require_subcommand(1);
  auto *gen_g = generate->add_subcommand("grammar", "random strictly linear grammar");
  gen_g->add_option("--seed", gp.seed);
  gen_g->add_option("--workflow-size", gp.workflow_size);
  gen_g->add_option("--module-degree", gp.module_degree);
  gen_g->add_option("--nesting-depth", gp.nesting_depth);
  gen_g->add_option("--recursion-length", gp.recursion_length);
  gen_g->add_option("--out", out_path);
  auto *gen_r = generate->add_subcommand("run", "random derivation log");
  gen_r->add_option("--grammar", grammar_path)->required();
  gen_r->add_option("--items", items);
  gen_r->add_option("--seed", seed);
  gen_r->add_option("--out", out_path);
  auto *gen_v = generate->add_subcommand("view", "random safe view");
  gen_v->add_option("--grammar", grammar_path)->required();
  gen_v->add_option("--size", view_size);
  gen_v->add_flag("--grey", grey);
  gen_v->add_option("--seed", seed);
  gen_v->add_option("--out", out_path);

  auto *derive = app.add_subcommand("derive", "replay a derivation log");
  derive->add_option("--grammar", grammar_path)->required();
  derive->add_option("--log", log_path)->required();

  auto *label_run = app.add_subcommand("label-run", "write the data label store of a run");
  label_run->add_option("--grammar", grammar_path)->required();
  label_run->add_option("--log", log_path)->required();
  label_run->add_option("--out", out_path)->required();

  auto *label_view_cmd = app.add_subcommand("label-view", "build a view label");
  label_view_cmd->add_option("--grammar", grammar_path)->required();
  label_view_cmd->add_option("--view", view_path);
  label_view_cmd->add_option("--variant", variant)
      ->check(CLI::IsMember({"default", "space", "space_efficient", "query",
                             "query_efficient"}));
  label_view_cmd->add_option("--out", out_path)->required();

  auto *query = app.add_subcommand("query", "decode one dependency query");
  query->add_option("--view", view_path)->required();
  query->add_option("--labels", labels_path)->required();
  query->add_option("--from", from)->required();
  query->add_option("--to", to)->required();

  auto *oracle = app.add_subcommand("oracle-check", "compare decode with the flat oracle");
  oracle->add_option("--grammar", grammar_path)->required();
  oracle->add_option("--log", log_path)->required();
  oracle->add_option("--view", view_path);
  oracle->add_option("--pairs", pairs);
  oracle->add_option("--seed", seed);

  BenchConfig bc;
  std::string sizes_arg;
  auto *bench = app.add_subcommand("bench", "benchmark harness, CSV output");
  bench->add_option("--sizes", sizes_arg, "comma separated run sizes");
  bench->add_option("--reps", bc.reps);
  bench->add_option("--seed", bc.seed);
  bench->add_option("--out-dir", bc.out_dir);
  bench->add_option("--samples", bc.query_samples);
  bool no_sweep = false;
  bench->add_flag("--no-sweep", no_sweep);

  CLI11_PARSE(app, argc, argv);

  try {
    if (*validate) return cmd_validate(grammar_path);
    if (*analyze_cmd) return cmd_analyze(grammar_path);
    if (*gen_g) return cmd_generate_grammar(gp, out_path);
    if (*gen_r) return cmd_generate_run(grammar_path, items, seed, out_path);
    if (*gen_v) return cmd_generate_view(grammar_path, view_size, grey, seed, out_path);
    if (*derive) return cmd_derive(grammar_path, log_path);
    if (*label_run) return cmd_label_run(grammar_path, log_path, out_path);
    if (*label_view_cmd)
      return cmd_label_view(grammar_path, view_path, variant, out_path);
    if (*query) return cmd_query(view_path, labels_path, from, to);
    if (*oracle) return cmd_oracle_check(grammar_path, log_path, view_path, pairs, seed);
    if (*bench) {
      if (!sizes_arg.empty()) {
        bc.sizes.clear();
        std::stringstream ss(sizes_arg);
        std::string tok;
        while (std::getline(ss, tok, ',')) bc.sizes.push_back(std::stoi(tok));
      }
      bc.factor_sweep = !no_sweep;
      run_bench(bc);
      ordered_json out;
      out["out_dir"] = bc.out_dir;
      emit(out);
      return 0;
    }
  } catch (const Error &e) {
    ordered_json out;
    out["error"] = e.code();
    out["message"] = e.what();
    std::cerr << out.dump(2) << "\n";
    if (e.code() == "unsafe" || e.code() == "recursion-class") return 3;
    return 2;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
