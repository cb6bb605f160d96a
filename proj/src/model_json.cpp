#include "provlab/model_json.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "provlab/errors.hpp"

namespace provlab {

using json = nlohmann::ordered_json;

namespace {

json parse_text(const std::string &text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw InputError("malformed JSON");
  return j;
}

PortRef parse_port(const json &j, const char *what) {
  if (!j.is_array() || j.size() != 2 || !j[0].is_number_integer() ||
      !j[1].is_number_integer())
    throw InputError(std::string(what) + " must be [occurrence, port]");
  return PortRef{j[0].get<int>() - 1, j[1].get<int>() - 1};
}

json port_json(const PortRef &r) {
  return json::array({r.occurrence + 1, r.port + 1});
}

std::vector<std::pair<int, int>> parse_pairs(const json &j, const std::string &name) {
  if (!j.is_array())
    throw InputError("dependencies of '" + name + "' must be a list of [in,out] pairs");
  std::vector<std::pair<int, int>> out;
  for (const auto &p : j) {
    if (!p.is_array() || p.size() != 2)
      throw InputError("dependencies of '" + name + "' must be [in,out] pairs");
    out.emplace_back(p[0].get<int>(), p[1].get<int>());
  }
  return out;
}

} // namespace

GrammarFile parse_grammar(const std::string &text) {
  json j = parse_text(text);
  GrammarFile gf;
  WorkflowGrammar &g = gf.grammar;
  if (!j.contains("modules") || !j["modules"].is_array())
    throw InputError("grammar file needs a 'modules' array");
  for (const auto &m : j["modules"]) {
    ModuleDecl d;
    d.name = m.value("name", std::string());
    if (d.name.empty()) throw InputError("module without a name");
    d.inputs = m.value("inputs", 0);
    d.outputs = m.value("outputs", 0);
    std::string kind = m.value("kind", std::string("atomic"));
    if (kind != "atomic" && kind != "composite")
      throw InputError("module '" + d.name + "': kind must be atomic or composite");
    d.composite = kind == "composite";
    g.modules.push_back(std::move(d));
  }
  std::string start = j.value("start", std::string());
  g.start = g.module_index(start);
  if (g.start < 0) throw InputError("start symbol '" + start + "' is not a module");

  int next_id = 1;
  const json productions = j.value("productions", json::array());
  for (const auto &p : productions) {
    Production prod;
    prod.id = p.value("id", next_id);
    next_id = prod.id + 1;
    std::string lhs = p.value("lhs", std::string());
    prod.lhs = g.module_index(lhs);
    if (prod.lhs < 0) throw InputError("production lhs '" + lhs + "' is not a module");
    for (const auto &occ : p.value("occurrences", json::array())) {
      int m = g.module_index(occ.get<std::string>());
      if (m < 0)
        throw InputError("production " + std::to_string(prod.id) +
                         ": unknown occurrence '" + occ.get<std::string>() + "'");
      prod.rhs.occurrences.push_back(m);
    }
    for (const auto &e : p.value("edges", json::array()))
      prod.rhs.edges.push_back(
          {parse_port(e.at("from"), "edge endpoint"), parse_port(e.at("to"), "edge endpoint")});
    for (const auto &r : p.value("initial_inputs", json::array()))
      prod.rhs.initial_inputs.push_back(parse_port(r, "initial input"));
    for (const auto &r : p.value("final_outputs", json::array()))
      prod.rhs.final_outputs.push_back(parse_port(r, "final output"));
    for (const auto &v : p.value("input_map", json::array()))
      prod.input_map.push_back(v.get<int>() - 1);
    for (const auto &v : p.value("output_map", json::array()))
      prod.output_map.push_back(v.get<int>() - 1);
    g.productions.push_back(std::move(prod));
  }

  const json deps = j.value("dependencies", json::object());
  for (const auto &[name, pairs] : deps.items()) {
    int m = g.module_index(name);
    if (m < 0) throw InputError("dependencies for unknown module '" + name + "'");
    const ModuleDecl &d = g.mod(m);
    gf.lambda[m] = BoolMatrix::from_pairs(d.inputs, d.outputs, parse_pairs(pairs, name));
  }
  return gf;
}

std::string serialize_grammar(const GrammarFile &gf) {
  const WorkflowGrammar &g = gf.grammar;
  json j;
  j["modules"] = json::array();
  for (const auto &d : g.modules)
    j["modules"].push_back({{"name", d.name},
                            {"inputs", d.inputs},
                            {"outputs", d.outputs},
                            {"kind", d.composite ? "composite" : "atomic"}});
  j["start"] = g.start >= 0 ? g.mod(g.start).name : "";
  j["productions"] = json::array();
  for (const auto &p : g.productions) {
    json pj;
    pj["id"] = p.id;
    pj["lhs"] = g.mod(p.lhs).name;
    pj["occurrences"] = json::array();
    for (int occ : p.rhs.occurrences) pj["occurrences"].push_back(g.mod(occ).name);
    pj["edges"] = json::array();
    for (const auto &e : p.rhs.edges)
      pj["edges"].push_back({{"from", port_json(e.from)}, {"to", port_json(e.to)}});
    pj["initial_inputs"] = json::array();
    for (const auto &r : p.rhs.initial_inputs) pj["initial_inputs"].push_back(port_json(r));
    pj["final_outputs"] = json::array();
    for (const auto &r : p.rhs.final_outputs) pj["final_outputs"].push_back(port_json(r));
    if (!p.input_map.empty()) {
      pj["input_map"] = json::array();
      for (int v : p.input_map) pj["input_map"].push_back(v + 1);
    }
    if (!p.output_map.empty()) {
      pj["output_map"] = json::array();
      for (int v : p.output_map) pj["output_map"].push_back(v + 1);
    }
    j["productions"].push_back(std::move(pj));
  }
  j["dependencies"] = json::object();
  for (const auto &[m, mat] : gf.lambda) {
    json pairs = json::array();
    for (auto [r, c] : mat.true_pairs()) pairs.push_back(json::array({r, c}));
    j["dependencies"][g.mod(m).name] = std::move(pairs);
  }
  return j.dump(2) + "\n";
}

View parse_view(const WorkflowGrammar &g, const std::string &text) {
  json j = parse_text(text);
  View v;
  const json expandable = j.value("expandable", json::array());
  for (const auto &name : expandable) {
    int m = g.module_index(name.get<std::string>());
    if (m < 0)
      throw InputError("view lists unknown module '" + name.get<std::string>() + "'");
    if (!g.mod(m).composite)
      throw InputError("view marks atomic module '" + g.mod(m).name + "' expandable");
    v.expandable.push_back(m);
  }
  std::sort(v.expandable.begin(), v.expandable.end());
  v.expandable.erase(std::unique(v.expandable.begin(), v.expandable.end()),
                     v.expandable.end());
  const json deps = j.value("dependencies", json::object());
  for (const auto &[name, pairs] : deps.items()) {
    int m = g.module_index(name);
    if (m < 0) throw InputError("view dependencies for unknown module '" + name + "'");
    const ModuleDecl &d = g.mod(m);
    v.assignment[m] = BoolMatrix::from_pairs(d.inputs, d.outputs, parse_pairs(pairs, name));
  }
  return v;
}

std::string serialize_view(const WorkflowGrammar &g, const View &v) {
  json j;
  j["expandable"] = json::array();
  for (int m : v.expandable) j["expandable"].push_back(g.mod(m).name);
  j["dependencies"] = json::object();
  for (const auto &[m, mat] : v.assignment) {
    json pairs = json::array();
    for (auto [r, c] : mat.true_pairs()) pairs.push_back(json::array({r, c}));
    j["dependencies"][g.mod(m).name] = std::move(pairs);
  }
  return j.dump(2) + "\n";
}

std::string read_file(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InputError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string &path, const std::string &data) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw InputError("cannot write " + path);
  out << data;
}

} // namespace provlab
