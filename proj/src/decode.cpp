#include "provlab/decode.hpp"

#include "provlab/errors.hpp"

namespace provlab {

BoolMatrix inputs_matrix(const EdgeLabel &e, const ViewLabel &vl, int &mults) {
  if (!e.recursive) return vl.input_matrix(e.a, e.b);
  return vl.cycle_in_product(e.a, e.b, e.c - 1, mults);
}

BoolMatrix outputs_matrix(const EdgeLabel &e, const ViewLabel &vl, int &mults) {
  if (!e.recursive) return vl.output_matrix(e.a, e.b);
  return vl.cycle_out_product(e.a, e.b, e.c - 1, mults);
}

namespace {

// Rewrite recursive elements whose cycle is not fully visible in the view.
// The view grammar has no such cycle, so it sees the spine as ordinary
// nesting: the entry child is just the occurrence its creating edge points
// to (the element disappears) and each later spine child was created by one
// cycle production, i.e. by the composite edge at the next table offset.
// Whether those productions are themselves visible is checked afterwards,
// element by element, like for any other composite edge.
std::vector<EdgeLabel> normalize_path(const std::vector<EdgeLabel> &path,
                                      const ViewLabel &vl) {
  std::vector<EdgeLabel> out;
  out.reserve(path.size());
  for (const auto &e : path) {
    if (!e.recursive || vl.cycles.count(e.a)) {
      out.push_back(e);
      continue;
    }
    auto it = vl.full_cycles.find(e.a);
    if (it == vl.full_cycles.end())
      throw MismatchError("label names unknown cycle " + std::to_string(e.a));
    const auto &edges = it->second;
    const int l = static_cast<int>(edges.size());
    if (e.b < 1 || e.b > l || e.c < 1)
      throw MismatchError("recursive edge " + e.to_string() + " out of range");
    for (int child = 2; child <= e.c; ++child) {
      const EdgeId &ce = edges[(e.b - 1 + child - 2) % l];
      out.push_back({false, ce.first, ce.second, 0});
    }
  }
  return out;
}

void check_path(const std::vector<EdgeLabel> &path, const ViewLabel &vl) {
  for (const auto &e : path) {
    if (!e.recursive) {
      int m = vl.positions(e.a); // raises not-visible / mismatch
      if (e.b < 1 || e.b > m)
        throw MismatchError("edge " + e.to_string() + " out of range");
    } else {
      const auto &cyc = vl.cycle(e.a);
      if (e.b < 1 || e.b > static_cast<int>(cyc.size()) || e.c < 1)
        throw MismatchError("recursive edge " + e.to_string() + " out of range");
    }
  }
}

// Product of inputs (resp. outputs) matrices over path[from..], identity of
// the given dimension when the range is empty.
BoolMatrix tail_inputs(const std::vector<EdgeLabel> &path, size_t from,
                       const ViewLabel &vl, int &mults, int dim_if_empty) {
  if (from >= path.size()) return BoolMatrix::identity(dim_if_empty);
  BoolMatrix m = inputs_matrix(path[from], vl, mults);
  for (size_t a = from + 1; a < path.size(); ++a) {
    m = m.multiply(inputs_matrix(path[a], vl, mults));
    ++mults;
  }
  return m;
}

BoolMatrix tail_outputs(const std::vector<EdgeLabel> &path, size_t from,
                        const ViewLabel &vl, int &mults, int dim_if_empty) {
  if (from >= path.size()) return BoolMatrix::identity(dim_if_empty);
  BoolMatrix m = outputs_matrix(path[from], vl, mults);
  for (size_t a = from + 1; a < path.size(); ++a) {
    m = m.multiply(outputs_matrix(path[a], vl, mults));
    ++mults;
  }
  return m;
}

int module_inputs(const ViewLabel &vl, int module) {
  return vl.grammar.mod(module).inputs;
}
int module_outputs(const ViewLabel &vl, int module) {
  return vl.grammar.mod(module).outputs;
}

} // namespace

QueryVerdict decode(const DataLabel &d1, const DataLabel &d2, const ViewLabel &vl) {
  int mults = 0;
  auto o1p = d1.src_port();
  auto i1p = d1.dst_port();
  auto o2p = d2.src_port();
  auto i2p = d2.dst_port();
  // An item is visible exactly when its whole creation chain is; both
  // endpoint paths lie on that chain. Hidden-cycle spines are rewritten to
  // the nesting the view sees before any visibility verdict.
  for (auto *p : {&o1p, &i1p, &o2p, &i2p})
    if (*p) (*p)->path = normalize_path((*p)->path, vl);
  if (o1p) check_path(o1p->path, vl);
  if (i1p) check_path(i1p->path, vl);
  if (o2p) check_path(o2p->path, vl);
  if (i2p) check_path(i2p->path, vl);

  if (d1 == d2) return {true, 0};
  // A final output of the start module feeds nothing further; an initial
  // input of the start module is fed by nothing.
  if (!d1.dst) return {false, 0};
  if (!d2.src) return {false, 0};

  const bool s_in = !d1.src;   // d1 is an initial input of S
  const bool s_out = !d2.dst;  // d2 is a final output of S
  const PortLabel &o1 = s_in ? *i1p : *o1p;
  const PortLabel &i2 = s_out ? *o2p : *i2p;
  const int x = o1.index, y = i2.index;

  if (s_in && s_out)
    return {vl.lambda_star_start().at(x - 1, y - 1), mults};
  if (s_in) {
    BoolMatrix m = tail_inputs(i2.path, 0, vl, mults,
                               vl.grammar.mod(vl.grammar.start).inputs);
    return {m.at(x - 1, y - 1), mults};
  }
  if (s_out) {
    BoolMatrix m = tail_outputs(o1.path, 0, vl, mults,
                                vl.grammar.mod(vl.grammar.start).outputs);
    return {m.at(y - 1, x - 1), mults};
  }

  const auto &l1 = o1.path;
  const auto &l2 = i2.path;
  size_t l = 0;
  while (l < l1.size() && l < l2.size() && l1[l] == l2[l]) ++l;
  // Case 1: one anchor above the other; outputs cannot feed back inside.
  if (l == l1.size() || l == l2.size()) return {false, mults};

  const EdgeLabel &e = l1[l];
  const EdgeLabel &ep = l2[l];
  if (e.recursive != ep.recursive)
    throw MismatchError("divergent path elements of different kinds");

  if (!e.recursive) {
    if (e.a != ep.a)
      throw MismatchError("divergent children of one node name two productions");
    const int k = e.a, i = e.b, j = ep.b;
    if (i == j) throw MismatchError("paths diverge on an identical edge label");
    if (i > j) return {false, mults}; // Z(k,i,j) is all-false there
    BoolMatrix O = tail_outputs(l1, l + 1, vl, mults,
                                module_outputs(vl, vl.module_at(k, i)));
    BoolMatrix I = tail_inputs(l2, l + 1, vl, mults,
                               module_inputs(vl, vl.module_at(k, j)));
    BoolMatrix r = O.transpose().multiply(vl.z_matrix(k, i, j));
    ++mults;
    r = r.multiply(I);
    ++mults;
    return {r.at(x - 1, y - 1), mults};
  }

  if (e.a != ep.a || e.b != ep.b)
    throw MismatchError("divergent spine children of different recursions");
  const int s = e.a, t = e.b, i = e.c, j = ep.c;
  if (i == j) throw MismatchError("paths diverge on an identical spine label");

  if (i < j) {
    // d1 sits inside spine child i; the only route down to child j leaves
    // through the inputs of child i+1, the cycle occurrence of child i's
    // expanding production.
    if (l + 1 == l1.size()) return {false, mults}; // o1 on child i's boundary
    const EdgeLabel &en = l1[l + 1];
    if (en.recursive)
      throw MismatchError("recursive label directly under a spine child");
    const int ki = en.a, ipos = en.b;
    const int ci = vl.cycle_position_of_production(s, ki);
    BoolMatrix O = tail_outputs(l1, l + 2, vl, mults,
                                module_outputs(vl, vl.module_at(ki, ipos)));
    BoolMatrix Z = vl.z_matrix(ki, ipos, ci);
    BoolMatrix Ip = vl.cycle_in_product(s, vl.cycle_offset(s, t, i + 1),
                                        j - i - 1, mults);
    BoolMatrix I = tail_inputs(l2, l + 1, vl, mults,
                               module_inputs(vl, vl.spine_module(s, t, j)));
    BoolMatrix r = O.transpose().multiply(Z);
    ++mults;
    r = r.multiply(Ip);
    ++mults;
    r = r.multiply(I);
    ++mults;
    return {r.at(x - 1, y - 1), mults};
  }

  // i > j: d1 is nested deeper; the flow climbs out through the outputs of
  // the spine chain up to child j+1 and crosses child j's workflow there.
  if (l + 1 == l2.size()) return {false, mults}; // i2 on child j's boundary
  const EdgeLabel &en = l2[l + 1];
  if (en.recursive)
    throw MismatchError("recursive label directly under a spine child");
  const int kj = en.a, jpos = en.b;
  const int cj = vl.cycle_position_of_production(s, kj);
  BoolMatrix O = tail_outputs(l1, l + 1, vl, mults,
                              module_outputs(vl, vl.spine_module(s, t, i)));
  BoolMatrix Op = vl.cycle_out_product(s, vl.cycle_offset(s, t, j + 1),
                                       i - j - 1, mults);
  BoolMatrix Z = vl.z_matrix(kj, cj, jpos);
  BoolMatrix I = tail_inputs(l2, l + 2, vl, mults,
                             module_inputs(vl, vl.module_at(kj, jpos)));
  BoolMatrix r = O.transpose().multiply(Op.transpose());
  ++mults;
  r = r.multiply(Z);
  ++mults;
  r = r.multiply(I);
  ++mults;
  return {r.at(x - 1, y - 1), mults};
}

} // namespace provlab
