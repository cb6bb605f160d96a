#include "provlab/run.hpp"

#include <algorithm>

#include <json.hpp>

#include "provlab/errors.hpp"

namespace provlab {

using json = nlohmann::ordered_json;

std::string serialize_log(const std::vector<Step> &log) {
  std::string out;
  for (const auto &s : log) {
    json j;
    j["target"] = s.target;
    j["production"] = s.production;
    out += j.dump();
    out += '\n';
  }
  return out;
}

std::vector<Step> parse_log(const std::string &text) {
  std::vector<Step> out;
  size_t pos = 0;
  while (pos < text.size()) {
    size_t nl = text.find('\n', pos);
    if (nl == std::string::npos) nl = text.size();
    std::string line = text.substr(pos, nl - pos);
    pos = nl + 1;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j = json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.contains("target") || !j.contains("production"))
      throw InputError("malformed derivation log line: " + line);
    out.push_back({j["target"].get<std::string>(), j["production"].get<int>()});
  }
  return out;
}

int &RunState::port_slot(const PortInstance &p, PortSide side) {
  const TreeNode &n = nodes_[p.node];
  int off = side == PortSide::Output ? grammar_.mod(n.module).inputs + p.port
                                     : p.port;
  return port_items_[n.port_base + off];
}

int RunState::new_instance(int module, int parent, EdgeLabel label) {
  TreeNode n;
  n.kind = NodeKind::Instance;
  n.parent = parent;
  n.parent_label = label;
  n.depth = parent < 0 ? 1 : nodes_[parent].depth + 1;
  n.module = module;
  n.ordinal = ++module_count_[module];
  const ModuleDecl &decl = grammar_.mod(module);
  n.port_base = static_cast<int>(port_items_.size());
  port_items_.resize(port_items_.size() + decl.inputs + decl.outputs, 0);
  int id = static_cast<int>(nodes_.size());
  nodes_.push_back(n);
  by_name_[node_name(id)] = id;
  max_depth_ = std::max(max_depth_, n.depth);
  if (grammar_.mod(module).composite) pending_.push_back(id);
  return id;
}

int RunState::new_recursive(int cycle, int enter_t, int parent, EdgeLabel label) {
  TreeNode n;
  n.kind = NodeKind::Recursive;
  n.parent = parent;
  n.parent_label = label;
  n.depth = nodes_[parent].depth + 1;
  n.cycle = cycle;
  n.enter_t = enter_t;
  n.ordinal = ++recursive_count_;
  int id = static_cast<int>(nodes_.size());
  nodes_.push_back(n);
  max_depth_ = std::max(max_depth_, n.depth);
  return id;
}

std::string RunState::node_name(int node) const {
  const TreeNode &n = nodes_[node];
  if (n.kind == NodeKind::Recursive) return "R:" + std::to_string(n.ordinal);
  return grammar_.mod(n.module).name + ":" + std::to_string(n.ordinal);
}

int RunState::find_instance(const std::string &name) const {
  auto it = by_name_.find(name);
  return it == by_name_.end() ? -1 : it->second;
}

std::vector<EdgeLabel> RunState::root_path(int node) const {
  std::vector<EdgeLabel> path;
  for (int n = node; nodes_[n].parent >= 0; n = nodes_[n].parent)
    path.push_back(nodes_[n].parent_label);
  std::reverse(path.begin(), path.end());
  return path;
}

RunState RunState::start(const WorkflowGrammar &g, const Classification &cls) {
  RunState r;
  r.grammar_ = g;
  r.cls_ = cls;
  if (g.start < 0) throw StructuralError("grammar has no start symbol");
  int root = r.new_instance(g.start, -1, EdgeLabel{});
  const ModuleDecl &s = g.mod(g.start);
  for (int x = 0; x < s.inputs; ++x) {
    DataItem d;
    d.id = static_cast<int>(r.items_.size()) + 1;
    d.dst_anchor = PortInstance{root, x};
    d.consumer = PortInstance{root, x};
    d.created_by = root;
    r.port_slot(*d.consumer, PortSide::Input) = d.id;
    r.items_.push_back(std::move(d));
  }
  for (int y = 0; y < s.outputs; ++y) {
    DataItem d;
    d.id = static_cast<int>(r.items_.size()) + 1;
    d.src_anchor = PortInstance{root, y};
    d.producer = PortInstance{root, y};
    d.created_by = root;
    r.port_slot(*d.producer, PortSide::Output) = d.id;
    r.items_.push_back(std::move(d));
  }
  return r;
}

std::vector<int> RunState::apply(const std::string &target, int production_id) {
  int node = find_instance(target);
  if (node < 0) throw InputError("no instance named '" + target + "'");
  TreeNode &n = nodes_[node];
  if (n.kind != NodeKind::Instance || !grammar_.mod(n.module).composite)
    throw InputError("'" + target + "' is not a composite instance");
  if (n.expanded) throw InputError("'" + target + "' already expanded");
  const Production *p = grammar_.production_by_id(production_id);
  if (!p) throw InputError("unknown production " + std::to_string(production_id));
  if (p->lhs != n.module)
    throw InputError("production " + std::to_string(production_id) +
                     " does not rewrite " + grammar_.mod(n.module).name);
  auto created = apply_node(node, *p);
  log_.push_back({target, production_id});
  return created;
}

std::vector<int> RunState::apply_node(int node, const Production &p) {
  nodes_[node].expanded = true;
  pending_.erase(std::find(pending_.begin(), pending_.end(), node));

  // order[i-1] = occurrence at position i; memoized, the order of one
  // production never changes.
  auto cached = topo_cache_.find(p.id);
  if (cached == topo_cache_.end())
    cached = topo_cache_.emplace(p.id, topological_order(p.rhs)).first;
  const std::vector<int> &order = cached->second;
  const int m = static_cast<int>(order.size());
  std::vector<int> node_of_occ(m, -1);
  const bool strict = cls_.cls == RecursionClass::StrictlyLinear;

  for (int i = 1; i <= m; ++i) {
    int occ = order[i - 1];
    int module = p.rhs.occurrences[occ];
    EdgeId eid{p.id, i};
    int created = -1;
    const CycleRef *on_cycle_edge = nullptr;
    const CycleRef *module_on_cycle = nullptr;
    if (strict) {
      if (auto it = cls_.cycles.edge_cycle.find(eid); it != cls_.cycles.edge_cycle.end())
        on_cycle_edge = &it->second;
      if (auto it = cls_.cycles.module_cycle.find(module); it != cls_.cycles.module_cycle.end())
        module_on_cycle = &it->second;
    }
    if (on_cycle_edge) {
      // The expansion continues an unfolding: append to the recursive node
      // that owns the expanded instance. If the instance is not under one
      // (start symbol on a cycle), open a fresh recursive node here.
      int parent = nodes_[node].parent;
      int owner = -1;
      if (parent >= 0 && nodes_[parent].kind == NodeKind::Recursive &&
          nodes_[parent].cycle == on_cycle_edge->cycle)
        owner = parent;
      if (owner < 0) {
        int t = module_on_cycle ? module_on_cycle->position : 1;
        owner = new_recursive(on_cycle_edge->cycle, t, node,
                              EdgeLabel{false, p.id, i, 0});
      }
      TreeNode &own = nodes_[owner];
      created = new_instance(module, owner,
                             EdgeLabel{true, own.cycle, own.enter_t, ++own.children});
    } else if (module_on_cycle) {
      // Non-cycle edge into a cycle vertex: a new unfolding starts.
      int rec = new_recursive(module_on_cycle->cycle, module_on_cycle->position,
                              node, EdgeLabel{false, p.id, i, 0});
      TreeNode &own = nodes_[rec];
      created = new_instance(module, rec,
                             EdgeLabel{true, own.cycle, own.enter_t, ++own.children});
    } else {
      created = new_instance(module, node, EdgeLabel{false, p.id, i, 0});
    }
    node_of_occ[occ] = created;
  }
  last_created_nodes_.clear();
  for (int i = 1; i <= m; ++i) last_created_nodes_.push_back(node_of_occ[order[i - 1]]);

  // Re-attach boundary items through the port bijection; labels stay put.
  const ModuleDecl &lhs = grammar_.mod(p.lhs);
  auto imap = [&](int x) { return p.input_map.empty() ? x : p.input_map[x]; };
  auto omap = [&](int y) { return p.output_map.empty() ? y : p.output_map[y]; };
  for (int x = 0; x < lhs.inputs; ++x) {
    int &slot = port_slot({node, x}, PortSide::Input);
    if (slot == 0)
      throw StructuralError("missing item at input of " + node_name(node));
    DataItem &d = items_[slot - 1];
    slot = 0;
    const PortRef &r = p.rhs.initial_inputs[imap(x)];
    d.consumer = PortInstance{node_of_occ[r.occurrence], r.port};
    port_slot(*d.consumer, PortSide::Input) = d.id;
  }
  for (int y = 0; y < lhs.outputs; ++y) {
    int &slot = port_slot({node, y}, PortSide::Output);
    if (slot == 0)
      throw StructuralError("missing item at output of " + node_name(node));
    DataItem &d = items_[slot - 1];
    slot = 0;
    const PortRef &r = p.rhs.final_outputs[omap(y)];
    d.producer = PortInstance{node_of_occ[r.occurrence], r.port};
    port_slot(*d.producer, PortSide::Output) = d.id;
  }

  // One fresh item per internal data edge, labeled at its creating ports.
  std::vector<int> created_items;
  for (const auto &e : p.rhs.edges) {
    DataItem d;
    d.id = static_cast<int>(items_.size()) + 1;
    d.producer = PortInstance{node_of_occ[e.from.occurrence], e.from.port};
    d.consumer = PortInstance{node_of_occ[e.to.occurrence], e.to.port};
    d.src_anchor = *d.producer;
    d.dst_anchor = *d.consumer;
    d.created_by = node;
    port_slot(*d.producer, PortSide::Output) = d.id;
    port_slot(*d.consumer, PortSide::Input) = d.id;
    created_items.push_back(d.id);
    items_.push_back(std::move(d));
  }
  return created_items;
}

RunState RunState::replay(const WorkflowGrammar &g, const Classification &cls,
                          const std::vector<Step> &log) {
  RunState r = start(g, cls);
  // The log pins the final sizes; reserving up front avoids growth copies
  // of the item records, which carry heap-allocated labels.
  size_t occs = 0, edges = 0;
  for (const auto &s : log)
    if (const Production *p = g.production_by_id(s.production)) {
      occs += p->rhs.occurrences.size();
      edges += p->rhs.edges.size();
    }
  r.nodes_.reserve(2 + 2 * occs);
  r.items_.reserve(r.items_.size() + edges);
  r.port_items_.reserve(2 * edges + 16);
  for (const auto &s : log) r.apply(s.target, s.production);
  return r;
}

std::optional<PortLabel> RunState::src_label(int id) const {
  const DataItem &d = items_[id - 1];
  if (d.src_anchor.node < 0) return std::nullopt;
  return PortLabel{root_path(d.src_anchor.node), PortSide::Output,
                   d.src_anchor.port + 1};
}

std::optional<PortLabel> RunState::dst_label(int id) const {
  const DataItem &d = items_[id - 1];
  if (d.dst_anchor.node < 0) return std::nullopt;
  return PortLabel{root_path(d.dst_anchor.node), PortSide::Input,
                   d.dst_anchor.port + 1};
}

DataLabel RunState::item_label(int id) const {
  return DataLabel::from_ports(src_label(id), dst_label(id));
}

std::vector<std::pair<int, DataLabel>> RunState::all_labels() const {
  std::vector<std::pair<int, DataLabel>> out;
  out.reserve(items_.size());
  // Anchors repeat heavily across items; memoize one root path per node.
  std::vector<std::optional<std::vector<EdgeLabel>>> paths(nodes_.size());
  auto path_of = [&](int node) -> const std::vector<EdgeLabel> & {
    auto &slot = paths[node];
    if (!slot) slot = root_path(node);
    return *slot;
  };
  for (const auto &d : items_) {
    std::optional<PortLabel> src, dst;
    if (d.src_anchor.node >= 0)
      src = PortLabel{path_of(d.src_anchor.node), PortSide::Output,
                      d.src_anchor.port + 1};
    if (d.dst_anchor.node >= 0)
      dst = PortLabel{path_of(d.dst_anchor.node), PortSide::Input,
                      d.dst_anchor.port + 1};
    out.emplace_back(d.id, DataLabel::from_ports(src, dst));
  }
  return out;
}

void RunState::for_each_label(
    const std::function<void(int, const DataLabel &)> &fn) const {
  // Paths are short (bounded by the tree depth), so walking the ancestors
  // into reused scratch buffers beats memoizing one heap vector per node.
  std::vector<EdgeLabel> sp, dp;
  auto fill = [&](int node, std::vector<EdgeLabel> &out) {
    out.clear();
    for (int n = node; nodes_[n].parent >= 0; n = nodes_[n].parent)
      out.push_back(nodes_[n].parent_label);
    std::reverse(out.begin(), out.end());
  };
  auto path_of = [&](int node, std::vector<EdgeLabel> &out)
      -> const std::vector<EdgeLabel> & {
    fill(node, out);
    return out;
  };
  // One label object across the whole pass; assign() keeps the vector
  // capacities, so steady state allocates nothing per item.
  DataLabel d;
  for (const auto &it : items_) {
    const bool has_src = it.src_anchor.node >= 0;
    const bool has_dst = it.dst_anchor.node >= 0;
    if (has_src && has_dst) {
      path_of(it.src_anchor.node, sp);
      path_of(it.dst_anchor.node, dp);
      size_t common = 0;
      while (common < sp.size() && common < dp.size() && sp[common] == dp[common])
        ++common;
      d.shared_prefix.assign(sp.begin(), sp.begin() + common);
      if (!d.src) d.src.emplace();
      d.src->suffix.assign(sp.begin() + common, sp.end());
      d.src->index = it.src_anchor.port + 1;
      if (!d.dst) d.dst.emplace();
      d.dst->suffix.assign(dp.begin() + common, dp.end());
      d.dst->index = it.dst_anchor.port + 1;
    } else {
      d.shared_prefix.clear();
      if (has_src) {
        if (!d.src) d.src.emplace();
        path_of(it.src_anchor.node, sp);
        d.src->suffix.assign(sp.begin(), sp.end());
        d.src->index = it.src_anchor.port + 1;
      } else {
        d.src.reset();
      }
      if (has_dst) {
        if (!d.dst) d.dst.emplace();
        path_of(it.dst_anchor.node, dp);
        d.dst->suffix.assign(dp.begin(), dp.end());
        d.dst->index = it.dst_anchor.port + 1;
      } else {
        d.dst.reset();
      }
    }
    fn(it.id, d);
  }
}

Projection project_view(const WorkflowGrammar &g, const Classification &cls,
                        const std::vector<Step> &log, const View &v) {
  WorkflowGrammar rg = restrict_grammar(g, v);
  auto pg = build_production_graph(rg);
  Classification vcls = classify_recursion(rg, pg);

  RunState full = RunState::start(g, cls);
  Projection proj{RunState::start(rg, vcls), {}, {}};

  std::unordered_map<int, int> node_map{{0, 0}};
  auto pair_items = [&](int full_id, int proj_id) {
    proj.proj_item_of[full_id] = proj_id;
    while (static_cast<int>(proj.full_item_of.size()) < proj_id)
      proj.full_item_of.push_back(0);
    proj.full_item_of[proj_id - 1] = full_id;
  };
  for (int i = 1; i <= full.item_count(); ++i) pair_items(i, i);

  for (const auto &s : log) {
    int fn = full.find_instance(s.target);
    if (fn < 0) throw InputError("log references unknown instance '" + s.target + "'");
    auto full_items = full.apply(s.target, s.production);
    const auto &full_nodes = full.last_created();

    auto it = node_map.find(fn);
    if (it == node_map.end() || !rg.production_by_id(s.production)) continue;
    auto proj_items = proj.run.apply(proj.run.node_name(it->second), s.production);
    const auto &proj_nodes = proj.run.last_created();

    for (size_t i = 0; i < full_nodes.size(); ++i)
      node_map[full_nodes[i]] = proj_nodes[i];
    for (size_t i = 0; i < full_items.size(); ++i)
      pair_items(full_items[i], proj_items[i]);
  }
  return proj;
}

} // namespace provlab
