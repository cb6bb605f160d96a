#pragma once

#include <list>
#include <map>
#include <memory>
#include <mutex>
#include <set>
#include <tuple>

#include "provlab/analysis.hpp"
#include "provlab/label.hpp"
#include "provlab/model.hpp"

namespace provlab {

enum class ViewVariant { Default, SpaceEfficient, QueryEfficient };

const char *variant_name(ViewVariant v);
ViewVariant variant_from_name(const std::string &name);

// Powers X^1..X^b of one square matrix together with its index/period pair
// (a, b): the least a with X^a = X^b for some b > a, then the least such b.
struct PowerSeq {
  std::vector<BoolMatrix> powers; // powers[e-1] = X^e
  int a = 0, b = 0;
  const BoolMatrix &get(long long e) const; // e >= 1, reduced via the period
};

PowerSeq build_power_seq(const BoolMatrix &x);

// The label of a view: everything the decoder needs to answer dependency
// queries against that view. The three variants trade precomputation for
// space; all answer identically.
class ViewLabel {
public:
  ViewVariant variant = ViewVariant::Default;
  WorkflowGrammar grammar;            // the view grammar G_{Dp}
  ProductionGraph graph;              // over `grammar`
  DependencyAssignment lambda_star;   // full assignment over `grammar`
  // Cycle table restricted to cycles fully inside the view, keyed by the
  // full grammar's cycle ids.
  std::map<int, std::vector<EdgeId>> cycles;
  std::set<int> full_production_ids;  // for mismatch vs. not-visible
  int full_cycle_count = 0;
  // All cycle tables of the full grammar (edge ids only). The decoder uses
  // them to rewrite recursive path elements of cycles that are not fully
  // visible into the plain composite edges the view sees instead.
  std::map<int, std::vector<EdgeId>> full_cycles;

  // Materialized tables (Default and QueryEfficient variants).
  std::map<EdgeId, BoolMatrix> I_tab, O_tab;
  std::map<std::tuple<int, int, int>, BoolMatrix> Z_tab;
  // QueryEfficient: precomputed loop powers per (cycle, offset).
  std::map<std::pair<int, int>, PowerSeq> in_powers, out_powers;

  // ---- decoder-facing accessors (thread safe) ----
  bool has_production(int k) const;
  int positions(int k) const;              // number of rhs occurrences
  int module_at(int k, int i) const;       // module at topological position i
  int lhs_of(int k) const;
  const BoolMatrix &lambda_star_of(int module) const;
  const BoolMatrix &lambda_star_start() const;

  BoolMatrix input_matrix(int k, int i) const;   // I(k,i)
  BoolMatrix output_matrix(int k, int i) const;  // O(k,i)
  BoolMatrix z_matrix(int k, int i, int j) const;

  const std::vector<EdgeId> &cycle(int s) const;
  int cycle_offset(int s, int t, int spine_pos) const; // 1-based table offset
  int spine_module(int s, int t, int spine_pos) const;
  // Position in C(s) of production k's cycle edge; throws MismatchError.
  int cycle_position_of_production(int s, int k) const;

  // Product of `count` consecutive I (resp. O) cycle factors starting at
  // table offset `o`, full loops collapsed through the stored/cached power
  // sequence. `mults` counts only the explicit products performed here.
  BoolMatrix cycle_in_product(int s, int o, long long count, int &mults) const;
  BoolMatrix cycle_out_product(int s, int o, long long count, int &mults) const;

  size_t stored_bytes() const; // serialized size, for reporting

private:
  friend ViewLabel label_view(const WorkflowGrammar &, const Classification &,
                              const View &, ViewVariant);
  friend ViewLabel parse_view_label(const std::string &);

  BoolMatrix compute_I(int k, int i) const;
  BoolMatrix compute_O(int k, int i) const;
  BoolMatrix compute_Z(int k, int i, int j) const;
  const PowerSeq &power_seq(bool in_dir, int s, int o) const;
  const Production &production(int k) const;

  // Lazy caches: bounded LRU for the space variant's matrices, plain cache
  // for lazily materialized power sequences. Shared so the label stays
  // copyable; all access goes through one mutex.
  struct CacheState;
  mutable std::shared_ptr<CacheState> cache_;

  void finalize(); // rebuild graph + caches after construction/parsing
};

// Build the view label of a safe view over a strictly linear-recursive
// grammar. Throws UnsupportedClassError for other recursion classes and
// Error("unsafe", ...) for unsafe views.
ViewLabel label_view(const WorkflowGrammar &g, const Classification &cls,
                     const View &v, ViewVariant variant);

std::string serialize_view_label(const ViewLabel &vl);
ViewLabel parse_view_label(const std::string &text);

} // namespace provlab
