#pragma once

#include "provlab/label.hpp"
#include "provlab/viewlabel.hpp"

namespace provlab {

struct QueryVerdict {
  bool reachable = false;
  int matrices_multiplied = 0;
};

// Reachability matrix from the inputs of the node reached by `e`'s parent
// down to the inputs of the node `e` leads to. Recursive labels collapse
// their loop products through the view label's period machinery. `mults`
// counts the boolean products performed at decode level.
BoolMatrix inputs_matrix(const EdgeLabel &e, const ViewLabel &vl, int &mults);
BoolMatrix outputs_matrix(const EdgeLabel &e, const ViewLabel &vl, int &mults);

// Does d2 depend on d1 under the labeled view? Pure label algebra: no run
// state is consulted. Throws NotVisibleError for hidden items and
// MismatchError for labels that do not belong to the view's grammar.
QueryVerdict decode(const DataLabel &d1, const DataLabel &d2, const ViewLabel &vl);

} // namespace provlab
