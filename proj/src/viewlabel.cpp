#include "provlab/viewlabel.hpp"

#include <algorithm>
#include <list>
#include <unordered_map>

#include <json.hpp>

#include "provlab/errors.hpp"
#include "provlab/model_json.hpp"

namespace provlab {

using json = nlohmann::ordered_json;

const char *variant_name(ViewVariant v) {
  switch (v) {
    case ViewVariant::Default: return "default";
    case ViewVariant::SpaceEfficient: return "space_efficient";
    case ViewVariant::QueryEfficient: return "query_efficient";
  }
  return "?";
}

ViewVariant variant_from_name(const std::string &name) {
  if (name == "default") return ViewVariant::Default;
  if (name == "space_efficient" || name == "space") return ViewVariant::SpaceEfficient;
  if (name == "query_efficient" || name == "query") return ViewVariant::QueryEfficient;
  throw InputError("unknown variant '" + name + "'");
}

const BoolMatrix &PowerSeq::get(long long e) const {
  if (e < 1) throw StructuralError("power exponent must be positive");
  if (e < b) return powers[static_cast<size_t>(e - 1)];
  long long reduced = a + (e - a) % (b - a);
  return powers[static_cast<size_t>(reduced - 1)];
}

PowerSeq build_power_seq(const BoolMatrix &x) {
  PowerSeq seq;
  BoolMatrix cur = x;
  while (true) {
    for (size_t i = 0; i < seq.powers.size(); ++i)
      if (seq.powers[i] == cur) {
        seq.a = static_cast<int>(i) + 1;
        seq.b = static_cast<int>(seq.powers.size()) + 1;
        return seq;
      }
    seq.powers.push_back(cur);
    cur = cur.multiply(x);
  }
}

// ---- cache state ----

struct ViewLabel::CacheState {
  std::mutex mu;
  // Bounded LRU over lazily computed I/O/Z matrices (space variant).
  using Key = std::tuple<char, int, int, int>;
  struct KeyHash {
    size_t operator()(const Key &k) const {
      auto [c, a, b, d] = k;
      size_t h = static_cast<size_t>(c);
      h = h * 1000003u + a;
      h = h * 1000003u + b;
      h = h * 1000003u + d;
      return h;
    }
  };
  static constexpr size_t kCapacity = 64;
  std::list<std::pair<Key, BoolMatrix>> lru;
  std::unordered_map<Key, std::list<std::pair<Key, BoolMatrix>>::iterator, KeyHash> index;
  std::map<std::pair<int, int>, PowerSeq> in_powers, out_powers;

  bool lookup(const Key &k, BoolMatrix &out) {
    std::lock_guard<std::mutex> lock(mu);
    auto it = index.find(k);
    if (it == index.end()) return false;
    lru.splice(lru.begin(), lru, it->second);
    out = lru.front().second;
    return true;
  }
  void insert(const Key &k, const BoolMatrix &m) {
    std::lock_guard<std::mutex> lock(mu);
    if (index.count(k)) return;
    lru.emplace_front(k, m);
    index[k] = lru.begin();
    if (lru.size() > kCapacity) {
      index.erase(lru.back().first);
      lru.pop_back();
    }
  }
};

void ViewLabel::finalize() {
  graph = build_production_graph(grammar);
  cache_ = std::make_shared<CacheState>();
}

const Production &ViewLabel::production(int k) const {
  const Production *p = grammar.production_by_id(k);
  if (!p) {
    if (full_production_ids.count(k))
      throw NotVisibleError("production " + std::to_string(k) +
                            " is hidden under this view");
    throw MismatchError("label references unknown production " + std::to_string(k));
  }
  return *p;
}

bool ViewLabel::has_production(int k) const {
  return grammar.production_by_id(k) != nullptr;
}

int ViewLabel::positions(int k) const {
  return static_cast<int>(production(k).rhs.occurrences.size());
}

int ViewLabel::module_at(int k, int i) const {
  const Production &p = production(k);
  const auto &order = graph.occ_at_position.at(k);
  if (i < 1 || i > static_cast<int>(order.size()))
    throw MismatchError("position " + std::to_string(i) +
                        " out of range in production " + std::to_string(k));
  return p.rhs.occurrences[order[i - 1]];
}

int ViewLabel::lhs_of(int k) const { return production(k).lhs; }

const BoolMatrix &ViewLabel::lambda_star_of(int module) const {
  return lambda_star.at(module);
}

const BoolMatrix &ViewLabel::lambda_star_start() const {
  return lambda_star.at(grammar.start);
}

namespace {

// Port-level reachability inside one production's right-hand side under a
// full assignment. Sources/targets are picked by the callers.
struct RhsPorts {
  const WorkflowGrammar &g;
  const Production &p;
  const DependencyAssignment &dep;
  std::vector<int> offset;
  std::vector<std::vector<int>> adj;

  RhsPorts(const WorkflowGrammar &g_, const Production &p_,
           const DependencyAssignment &dep_)
      : g(g_), p(p_), dep(dep_) {
    const auto &w = p.rhs;
    const int n = static_cast<int>(w.occurrences.size());
    offset.assign(n + 1, 0);
    for (int o = 0; o < n; ++o) {
      const ModuleDecl &d = g.mod(w.occurrences[o]);
      offset[o + 1] = offset[o] + d.inputs + d.outputs;
    }
    adj.assign(offset[n], {});
    for (const auto &e : w.edges) adj[out_id(e.from)].push_back(in_id(e.to));
    for (int o = 0; o < n; ++o) {
      const BoolMatrix &m = dep.at(w.occurrences[o]);
      for (int x = 0; x < m.rows(); ++x)
        for (int y = 0; y < m.cols(); ++y)
          if (m.at(x, y)) adj[in_id({o, x})].push_back(out_id({o, y}));
    }
  }

  int in_id(const PortRef &r) const { return offset[r.occurrence] + r.port; }
  int out_id(const PortRef &r) const {
    return offset[r.occurrence] + g.mod(p.rhs.occurrences[r.occurrence]).inputs + r.port;
  }

  std::vector<char> reach_from(int src) const {
    std::vector<char> seen(adj.size(), 0);
    std::vector<int> stack{src};
    seen[src] = 1;
    while (!stack.empty()) {
      int u = stack.back();
      stack.pop_back();
      for (int v : adj[u])
        if (!seen[v]) {
          seen[v] = 1;
          stack.push_back(v);
        }
    }
    return seen;
  }
};

} // namespace

BoolMatrix ViewLabel::compute_I(int k, int i) const {
  const Production &p = production(k);
  RhsPorts ports(grammar, p, lambda_star);
  int occ = graph.occ_at_position.at(k)[i - 1];
  const ModuleDecl &lhs = grammar.mod(p.lhs);
  const ModuleDecl &tgt = grammar.mod(p.rhs.occurrences[occ]);
  BoolMatrix out(lhs.inputs, tgt.inputs);
  auto imap = [&](int x) { return p.input_map.empty() ? x : p.input_map[x]; };
  for (int x = 0; x < lhs.inputs; ++x) {
    auto seen = ports.reach_from(ports.in_id(p.rhs.initial_inputs[imap(x)]));
    for (int y = 0; y < tgt.inputs; ++y)
      if (seen[ports.in_id({occ, y})]) out.set(x, y);
  }
  return out;
}

BoolMatrix ViewLabel::compute_O(int k, int i) const {
  const Production &p = production(k);
  RhsPorts ports(grammar, p, lambda_star);
  int occ = graph.occ_at_position.at(k)[i - 1];
  const ModuleDecl &lhs = grammar.mod(p.lhs);
  const ModuleDecl &src = grammar.mod(p.rhs.occurrences[occ]);
  BoolMatrix out(lhs.outputs, src.outputs);
  auto omap = [&](int r) { return p.output_map.empty() ? r : p.output_map[r]; };
  for (int c = 0; c < src.outputs; ++c) {
    auto seen = ports.reach_from(ports.out_id({occ, c}));
    for (int r = 0; r < lhs.outputs; ++r)
      if (seen[ports.out_id(p.rhs.final_outputs[omap(r)])]) out.set(r, c);
  }
  return out;
}

BoolMatrix ViewLabel::compute_Z(int k, int i, int j) const {
  const Production &p = production(k);
  int occ_i = graph.occ_at_position.at(k)[i - 1];
  int occ_j = graph.occ_at_position.at(k)[j - 1];
  const ModuleDecl &mi = grammar.mod(p.rhs.occurrences[occ_i]);
  const ModuleDecl &mj = grammar.mod(p.rhs.occurrences[occ_j]);
  BoolMatrix out(mi.outputs, mj.inputs);
  if (i >= j) return out;
  RhsPorts ports(grammar, p, lambda_star);
  for (int x = 0; x < mi.outputs; ++x) {
    auto seen = ports.reach_from(ports.out_id({occ_i, x}));
    for (int y = 0; y < mj.inputs; ++y)
      if (seen[ports.in_id({occ_j, y})]) out.set(x, y);
  }
  return out;
}

BoolMatrix ViewLabel::input_matrix(int k, int i) const {
  if (variant != ViewVariant::SpaceEfficient) {
    auto it = I_tab.find({k, i});
    if (it != I_tab.end()) return it->second;
    production(k); // raises the right error for unknown/hidden ids
    throw MismatchError("no I-matrix for edge (" + std::to_string(k) + "," +
                        std::to_string(i) + ")");
  }
  CacheState::Key key{'I', k, i, 0};
  BoolMatrix m;
  if (cache_->lookup(key, m)) return m;
  m = compute_I(k, i);
  cache_->insert(key, m);
  return m;
}

BoolMatrix ViewLabel::output_matrix(int k, int i) const {
  if (variant != ViewVariant::SpaceEfficient) {
    auto it = O_tab.find({k, i});
    if (it != O_tab.end()) return it->second;
    production(k);
    throw MismatchError("no O-matrix for edge (" + std::to_string(k) + "," +
                        std::to_string(i) + ")");
  }
  CacheState::Key key{'O', k, i, 0};
  BoolMatrix m;
  if (cache_->lookup(key, m)) return m;
  m = compute_O(k, i);
  cache_->insert(key, m);
  return m;
}

BoolMatrix ViewLabel::z_matrix(int k, int i, int j) const {
  if (i >= j) return compute_Z(k, i, j); // all-false, built on the fly
  if (variant != ViewVariant::SpaceEfficient) {
    auto it = Z_tab.find({k, i, j});
    if (it != Z_tab.end()) return it->second;
    production(k);
    throw MismatchError("no Z-matrix for (" + std::to_string(k) + "," +
                        std::to_string(i) + "," + std::to_string(j) + ")");
  }
  CacheState::Key key{'Z', k, i, j};
  BoolMatrix m;
  if (cache_->lookup(key, m)) return m;
  m = compute_Z(k, i, j);
  cache_->insert(key, m);
  return m;
}

const std::vector<EdgeId> &ViewLabel::cycle(int s) const {
  auto it = cycles.find(s);
  if (it == cycles.end()) {
    if (s >= 1 && s <= full_cycle_count)
      throw NotVisibleError("cycle " + std::to_string(s) +
                            " is hidden under this view");
    throw MismatchError("label references unknown cycle " + std::to_string(s));
  }
  return it->second;
}

int ViewLabel::cycle_offset(int s, int t, int spine_pos) const {
  int l = static_cast<int>(cycle(s).size());
  return (t - 1 + spine_pos - 1) % l + 1;
}

int ViewLabel::spine_module(int s, int t, int spine_pos) const {
  const auto &edges = cycle(s);
  EdgeId e = edges[cycle_offset(s, t, spine_pos) - 1];
  return lhs_of(e.first);
}

int ViewLabel::cycle_position_of_production(int s, int k) const {
  const auto &edges = cycle(s);
  for (size_t p = 0; p < edges.size(); ++p)
    if (edges[p].first == k) return edges[p].second;
  throw MismatchError("production " + std::to_string(k) + " is not on cycle " +
                      std::to_string(s));
}

const PowerSeq &ViewLabel::power_seq(bool in_dir, int s, int o) const {
  if (variant == ViewVariant::QueryEfficient) {
    const auto &tab = in_dir ? in_powers : out_powers;
    auto it = tab.find({s, o});
    if (it != tab.end()) return it->second;
  }
  auto &cache = in_dir ? cache_->in_powers : cache_->out_powers;
  {
    std::lock_guard<std::mutex> lock(cache_->mu);
    auto it = cache.find({s, o});
    if (it != cache.end()) return it->second;
  }
  // One full loop starting at table offset o.
  const auto &edges = cycle(s);
  const int l = static_cast<int>(edges.size());
  BoolMatrix x;
  for (int j = 0; j < l; ++j) {
    EdgeId e = edges[(o - 1 + j) % l];
    BoolMatrix f = in_dir ? input_matrix(e.first, e.second)
                          : output_matrix(e.first, e.second);
    x = j == 0 ? f : x.multiply(f);
  }
  PowerSeq seq = build_power_seq(x);
  std::lock_guard<std::mutex> lock(cache_->mu);
  return cache.emplace(std::make_pair(s, o), std::move(seq)).first->second;
}

BoolMatrix ViewLabel::cycle_in_product(int s, int o, long long count,
                                       int &mults) const {
  const auto &edges = cycle(s);
  const int l = static_cast<int>(edges.size());
  int start_module = lhs_of(edges[o - 1].first);
  if (count == 0) return BoolMatrix::identity(grammar.mod(start_module).inputs);
  long long q = count / l;
  int rem = static_cast<int>(count % l);
  BoolMatrix result;
  bool have = false;
  if (q > 0) {
    result = power_seq(true, s, o).get(q);
    have = true;
  }
  for (int j = 0; j < rem; ++j) {
    EdgeId e = edges[(o - 1 + j) % l];
    BoolMatrix f = input_matrix(e.first, e.second);
    if (have) {
      result = result.multiply(f);
      ++mults;
    } else {
      result = std::move(f);
      have = true;
    }
  }
  return result;
}

BoolMatrix ViewLabel::cycle_out_product(int s, int o, long long count,
                                        int &mults) const {
  const auto &edges = cycle(s);
  const int l = static_cast<int>(edges.size());
  int start_module = lhs_of(edges[o - 1].first);
  if (count == 0) return BoolMatrix::identity(grammar.mod(start_module).outputs);
  long long q = count / l;
  int rem = static_cast<int>(count % l);
  BoolMatrix result;
  bool have = false;
  if (q > 0) {
    result = power_seq(false, s, o).get(q);
    have = true;
  }
  for (int j = 0; j < rem; ++j) {
    EdgeId e = edges[(o - 1 + j) % l];
    BoolMatrix f = output_matrix(e.first, e.second);
    if (have) {
      result = result.multiply(f);
      ++mults;
    } else {
      result = std::move(f);
      have = true;
    }
  }
  return result;
}

ViewLabel label_view(const WorkflowGrammar &g, const Classification &cls,
                     const View &v, ViewVariant variant) {
  if (cls.cls != RecursionClass::StrictlyLinear &&
      cls.cls != RecursionClass::NonRecursive)
    throw UnsupportedClassError(
        "labeling requires a strictly linear-recursive grammar (got " +
        std::string(recursion_class_name(cls.cls)) + ")");

  ViewLabel vl;
  vl.variant = variant;
  vl.grammar = restrict_grammar(g, v);

  DependencyAssignment mapped;
  for (size_t m = 0; m < vl.grammar.modules.size(); ++m) {
    if (vl.grammar.modules[m].composite) continue;
    int orig = g.module_index(vl.grammar.modules[m].name);
    auto it = v.assignment.find(orig);
    if (it == v.assignment.end())
      throw InputError("view gives no dependencies for module '" +
                       vl.grammar.modules[m].name + "'");
    mapped[static_cast<int>(m)] = it->second;
  }
  auto fa = compute_full_assignment(vl.grammar, mapped);
  if (fa.witness)
    throw Error("unsafe", "view is unsafe: production " +
                              std::to_string(fa.witness->production_id) +
                              " induces a conflicting matrix");
  if (!fa.safe)
    throw Error("unsafe", "view grammar has unproductive composite modules");
  vl.lambda_star = std::move(fa.lambda_star);

  for (size_t s = 0; s < cls.cycles.cycles.size(); ++s) {
    const auto &edges = cls.cycles.cycles[s];
    bool all = std::all_of(edges.begin(), edges.end(), [&](const EdgeId &e) {
      return vl.grammar.production_by_id(e.first) != nullptr;
    });
    if (all) vl.cycles[static_cast<int>(s) + 1] = edges;
    vl.full_cycles[static_cast<int>(s) + 1] = edges;
  }
  for (const auto &p : g.productions) vl.full_production_ids.insert(p.id);
  vl.full_cycle_count = static_cast<int>(cls.cycles.cycles.size());
  vl.finalize();

  if (variant != ViewVariant::SpaceEfficient) {
    for (const auto &p : vl.grammar.productions) {
      int m = static_cast<int>(p.rhs.occurrences.size());
      for (int i = 1; i <= m; ++i) {
        vl.I_tab[{p.id, i}] = vl.compute_I(p.id, i);
        vl.O_tab[{p.id, i}] = vl.compute_O(p.id, i);
        for (int j = i + 1; j <= m; ++j)
          vl.Z_tab[{p.id, i, j}] = vl.compute_Z(p.id, i, j);
      }
    }
  }
  if (variant == ViewVariant::QueryEfficient) {
    for (const auto &[s, edges] : vl.cycles) {
      const int l = static_cast<int>(edges.size());
      for (int o = 1; o <= l; ++o) {
        for (bool in_dir : {true, false}) {
          BoolMatrix x;
          for (int j = 0; j < l; ++j) {
            EdgeId e = edges[(o - 1 + j) % l];
            BoolMatrix f = in_dir ? vl.compute_I(e.first, e.second)
                                  : vl.compute_O(e.first, e.second);
            x = j == 0 ? f : x.multiply(f);
          }
          auto &tab = in_dir ? vl.in_powers : vl.out_powers;
          tab[{s, o}] = build_power_seq(x);
        }
      }
    }
  }
  return vl;
}

// ---- serialization ----

namespace {

json matrix_rows(const BoolMatrix &m) {
  json rows = json::array();
  for (int r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (int c = 0; c < m.cols(); ++c) row.push_back(m.at(r, c) ? 1 : 0);
    rows.push_back(std::move(row));
  }
  return rows;
}

BoolMatrix matrix_from_rows(const json &rows, int want_rows, int want_cols) {
  if (!rows.is_array() || static_cast<int>(rows.size()) != want_rows)
    throw InputError("matrix row count mismatch in view label");
  BoolMatrix m(want_rows, want_cols);
  for (int r = 0; r < want_rows; ++r) {
    if (static_cast<int>(rows[r].size()) != want_cols)
      throw InputError("matrix column count mismatch in view label");
    for (int c = 0; c < want_cols; ++c)
      if (rows[r][c].get<int>()) m.set(r, c);
  }
  return m;
}

BoolMatrix matrix_from_rows_free(const json &rows) {
  int r = static_cast<int>(rows.size());
  int c = r ? static_cast<int>(rows[0].size()) : 0;
  return matrix_from_rows(rows, r, c);
}

} // namespace

std::string serialize_view_label(const ViewLabel &vl) {
  json j;
  j["variant"] = variant_name(vl.variant);
  GrammarFile gf;
  gf.grammar = vl.grammar;
  for (const auto &[m, mat] : vl.lambda_star)
    if (!vl.grammar.mod(m).composite) gf.lambda[m] = mat;
  j["grammar"] = json::parse(serialize_grammar(gf));
  j["lambda_star"] = json::object();
  for (const auto &[m, mat] : vl.lambda_star)
    j["lambda_star"][vl.grammar.mod(m).name] = matrix_rows(mat);
  j["cycles"] = json::array();
  for (const auto &[s, edges] : vl.cycles) {
    json e = json::array();
    for (const auto &[k, i] : edges) e.push_back(json::array({k, i}));
    j["cycles"].push_back({{"id", s}, {"edges", std::move(e)}});
  }
  j["full_cycles"] = json::array();
  for (const auto &[s, edges] : vl.full_cycles) {
    json e = json::array();
    for (const auto &[k, i] : edges) e.push_back(json::array({k, i}));
    j["full_cycles"].push_back({{"id", s}, {"edges", std::move(e)}});
  }
  j["full_productions"] = json::array();
  for (int k : vl.full_production_ids) j["full_productions"].push_back(k);
  j["full_cycle_count"] = vl.full_cycle_count;

  if (vl.variant != ViewVariant::SpaceEfficient) {
    json itab = json::array(), otab = json::array(), ztab = json::array();
    for (const auto &[key, m] : vl.I_tab)
      itab.push_back({{"k", key.first}, {"i", key.second}, {"m", matrix_rows(m)}});
    for (const auto &[key, m] : vl.O_tab)
      otab.push_back({{"k", key.first}, {"i", key.second}, {"m", matrix_rows(m)}});
    for (const auto &[key, m] : vl.Z_tab)
      ztab.push_back({{"k", std::get<0>(key)},
                      {"i", std::get<1>(key)},
                      {"j", std::get<2>(key)},
                      {"m", matrix_rows(m)}});
    j["I"] = std::move(itab);
    j["O"] = std::move(otab);
    j["Z"] = std::move(ztab);
  }
  if (vl.variant == ViewVariant::QueryEfficient) {
    json powers = json::array();
    auto dump = [&](const char *dir, const std::map<std::pair<int, int>, PowerSeq> &tab) {
      for (const auto &[key, seq] : tab) {
        json ps = json::array();
        for (const auto &m : seq.powers) ps.push_back(matrix_rows(m));
        powers.push_back({{"s", key.first},
                          {"o", key.second},
                          {"dir", dir},
                          {"a", seq.a},
                          {"b", seq.b},
                          {"powers", std::move(ps)}});
      }
    };
    dump("in", vl.in_powers);
    dump("out", vl.out_powers);
    j["powers"] = std::move(powers);
  }
  return j.dump(2) + "\n";
}

ViewLabel parse_view_label(const std::string &text) {
  json j = json::parse(text, nullptr, false);
  if (j.is_discarded()) throw InputError("malformed view label JSON");
  ViewLabel vl;
  vl.variant = variant_from_name(j.value("variant", std::string()));
  GrammarFile gf = parse_grammar(j.at("grammar").dump());
  vl.grammar = std::move(gf.grammar);
  for (const auto &[name, rows] : j.at("lambda_star").items()) {
    int m = vl.grammar.module_index(name);
    if (m < 0) throw InputError("lambda* for unknown module '" + name + "'");
    const ModuleDecl &d = vl.grammar.mod(m);
    vl.lambda_star[m] = matrix_from_rows(rows, d.inputs, d.outputs);
  }
  for (const auto &c : j.value("cycles", json::array())) {
    std::vector<EdgeId> edges;
    for (const auto &e : c.at("edges")) edges.emplace_back(e[0].get<int>(), e[1].get<int>());
    vl.cycles[c.at("id").get<int>()] = std::move(edges);
  }
  for (const auto &c : j.value("full_cycles", json::array())) {
    std::vector<EdgeId> edges;
    for (const auto &e : c.at("edges")) edges.emplace_back(e[0].get<int>(), e[1].get<int>());
    vl.full_cycles[c.at("id").get<int>()] = std::move(edges);
  }
  for (const auto &k : j.value("full_productions", json::array()))
    vl.full_production_ids.insert(k.get<int>());
  vl.full_cycle_count = j.value("full_cycle_count", 0);
  for (const auto &e : j.value("I", json::array()))
    vl.I_tab[{e.at("k").get<int>(), e.at("i").get<int>()}] =
        matrix_from_rows_free(e.at("m"));
  for (const auto &e : j.value("O", json::array()))
    vl.O_tab[{e.at("k").get<int>(), e.at("i").get<int>()}] =
        matrix_from_rows_free(e.at("m"));
  for (const auto &e : j.value("Z", json::array()))
    vl.Z_tab[{e.at("k").get<int>(), e.at("i").get<int>(), e.at("j").get<int>()}] =
        matrix_from_rows_free(e.at("m"));
  for (const auto &e : j.value("powers", json::array())) {
    PowerSeq seq;
    seq.a = e.at("a").get<int>();
    seq.b = e.at("b").get<int>();
    for (const auto &m : e.at("powers")) seq.powers.push_back(matrix_from_rows_free(m));
    auto &tab = e.at("dir").get<std::string>() == "in" ? vl.in_powers : vl.out_powers;
    tab[{e.at("s").get<int>(), e.at("o").get<int>()}] = std::move(seq);
  }
  vl.finalize();
  return vl;
}

size_t ViewLabel::stored_bytes() const { return serialize_view_label(*this).size(); }

} // namespace provlab
