#pragma once

#include <functional>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "provlab/analysis.hpp"
#include "provlab/label.hpp"
#include "provlab/model.hpp"

namespace provlab {

enum class NodeKind { Instance, Recursive };

// Node of the compressed parse tree. Instance nodes are module instances
// (composite or atomic); recursive nodes group the spine of one cycle
// unfolding and are named R:n.
struct TreeNode {
  NodeKind kind = NodeKind::Instance;
  int parent = -1;
  EdgeLabel parent_label; // undefined for the root
  int depth = 1;          // nodes on the root path, root = 1
  int module = -1;        // Instance only
  int ordinal = 0;        // A:3 -> 3, R:2 -> 2
  bool expanded = false;  // Instance only
  int cycle = 0;          // Recursive only: cycle id s
  int enter_t = 0;        // Recursive only: table position t at entry
  int children = 0;       // Recursive only: spine children so far
  int port_base = -1;     // Instance only: first slot in the port table
};

struct PortInstance {
  int node = -1;
  int port = 0; // 0-based
  bool operator==(const PortInstance &) const = default;
};

struct DataItem {
  int id = 0; // 1-based creation order; printed as d<id>
  // Creation-time endpoints (node = -1 when absent). The parse tree is
  // append-only, so the root path of an anchor never changes and the
  // immutable labels are materialized from it on demand.
  PortInstance src_anchor{-1, 0}, dst_anchor{-1, 0};
  std::optional<PortInstance> producer, consumer; // live endpoints
  int created_by = -1; // tree node whose expansion created the item
};

struct Step {
  std::string target; // instance name, e.g. "A:2"
  int production = 0; // production id
};

// Derivation log: one JSON object per line.
std::string serialize_log(const std::vector<Step> &log);
std::vector<Step> parse_log(const std::string &text);

// A (possibly partial) run: compressed parse tree, data items with labels,
// pending composite instances. Built by start() and apply(); labels are
// append-only and never rewritten by later expansions.
class RunState {
public:
  static RunState start(const WorkflowGrammar &g, const Classification &cls);

  // Expand a pending composite instance with production `id`. Returns the
  // ids of the freshly created items. Records the step in the log.
  std::vector<int> apply(const std::string &target, int production_id);

  static RunState replay(const WorkflowGrammar &g, const Classification &cls,
                         const std::vector<Step> &log);

  const WorkflowGrammar &grammar() const { return grammar_; }
  const Classification &classification() const { return cls_; }
  const std::vector<TreeNode> &nodes() const { return nodes_; }
  const std::vector<DataItem> &items() const { return items_; }
  const std::vector<Step> &log() const { return log_; }
  const std::vector<int> &pending() const { return pending_; }
  int max_depth() const { return max_depth_; }
  std::string node_name(int node) const;
  int find_instance(const std::string &name) const; // -1 if absent
  const DataItem &item(int id) const { return items_[id - 1]; }
  int item_count() const { return static_cast<int>(items_.size()); }

  // Root path of a node (edge labels top-down).
  std::vector<EdgeLabel> root_path(int node) const;

  // Immutable creation-time port labels, absent on the start boundary.
  std::optional<PortLabel> src_label(int id) const;
  std::optional<PortLabel> dst_label(int id) const;

  DataLabel item_label(int id) const;
  std::vector<std::pair<int, DataLabel>> all_labels() const;

  // Visit every label in creation order. The label object is reused
  // between calls, so callers must copy it to keep it.
  void for_each_label(const std::function<void(int, const DataLabel &)> &fn) const;

  // Instance nodes created by the most recent apply(), in topological
  // position order. Used to align a run with its projections.
  const std::vector<int> &last_created() const { return last_created_nodes_; }

private:
  WorkflowGrammar grammar_; // owned copy; runs outlive caller scopes
  Classification cls_;
  std::vector<TreeNode> nodes_;
  std::vector<DataItem> items_;
  std::vector<Step> log_;
  std::vector<int> pending_; // unexpanded composite instance nodes
  std::unordered_map<std::string, int> by_name_;
  // Item id at each live port, indexed by TreeNode::port_base + port
  // (inputs first, then outputs); 0 = no item attached.
  std::vector<int> port_items_;
  std::unordered_map<int, std::vector<int>> topo_cache_; // production id -> order
  std::unordered_map<int, int> module_count_;
  std::vector<int> last_created_nodes_;
  int recursive_count_ = 0;
  int max_depth_ = 1;

  int new_instance(int module, int parent, EdgeLabel label);
  int new_recursive(int cycle, int enter_t, int parent, EdgeLabel label);
  int &port_slot(const PortInstance &p, PortSide side);
  std::vector<int> apply_node(int node, const Production &p);
};

// Projection of a run onto a view: the same log replayed over the view
// grammar, steps outside the view (or targeting hidden instances) skipped.
struct Projection {
  RunState run;                  // over the view grammar
  std::vector<int> full_item_of; // projected item id (1-based) -> full id
  std::unordered_map<int, int> proj_item_of; // full id -> projected id
};

Projection project_view(const WorkflowGrammar &g, const Classification &cls,
                        const std::vector<Step> &log, const View &v);

} // namespace provlab
