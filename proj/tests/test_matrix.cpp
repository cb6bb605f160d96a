#include <doctest.h>

#include "provlab/errors.hpp"
#include "provlab/matrix.hpp"

using namespace provlab;

TEST_CASE("boolean product over the or-and semiring") {
  BoolMatrix a = BoolMatrix::from_pairs(2, 3, {{1, 1}, {1, 2}, {2, 3}});
  BoolMatrix b = BoolMatrix::from_pairs(3, 2, {{2, 1}, {3, 2}});
  BoolMatrix p = a.multiply(b);
  CHECK(p.rows() == 2);
  CHECK(p.cols() == 2);
  CHECK(p.at(0, 0));
  CHECK_FALSE(p.at(0, 1));
  CHECK_FALSE(p.at(1, 0));
  CHECK(p.at(1, 1));
  CHECK_THROWS_AS(b.multiply(a.transpose()), StructuralError);
}

TEST_CASE("transpose and union") {
  BoolMatrix a = BoolMatrix::from_pairs(2, 3, {{1, 2}, {2, 1}});
  BoolMatrix t = a.transpose();
  CHECK(t.rows() == 3);
  CHECK(t.at(1, 0));
  CHECK(t.at(0, 1));
  BoolMatrix u = a.unite(BoolMatrix::from_pairs(2, 3, {{2, 3}}));
  CHECK(u.count() == 3);
}

TEST_CASE("identity is neutral for multiplication") {
  BoolMatrix a = BoolMatrix::from_pairs(3, 3, {{1, 2}, {2, 2}, {3, 1}});
  CHECK(a.multiply(BoolMatrix::identity(3)) == a);
  CHECK(BoolMatrix::identity(3).multiply(a) == a);
}

TEST_CASE("row and column coverage") {
  CHECK(BoolMatrix::from_pairs(2, 2, {{1, 1}, {2, 2}}).rows_covered());
  CHECK(BoolMatrix::from_pairs(2, 2, {{1, 1}, {2, 2}}).cols_covered());
  CHECK_FALSE(BoolMatrix::from_pairs(2, 2, {{1, 1}, {1, 2}}).rows_covered());
  CHECK_FALSE(BoolMatrix::from_pairs(2, 2, {{1, 1}, {2, 1}}).cols_covered());
}

TEST_CASE("pair round trip keeps row-major order") {
  std::vector<std::pair<int, int>> pairs = {{1, 1}, {1, 3}, {2, 2}};
  BoolMatrix m = BoolMatrix::from_pairs(2, 3, pairs);
  CHECK(m.true_pairs() == pairs);
  CHECK_THROWS_AS(BoolMatrix::from_pairs(2, 2, {{3, 1}}), InputError);
  CHECK_THROWS_AS(BoolMatrix::from_pairs(2, 2, {{1, 0}}), InputError);
}

TEST_CASE("containment is subset of true cells") {
  BoolMatrix big = BoolMatrix::from_pairs(2, 2, {{1, 1}, {1, 2}, {2, 2}});
  BoolMatrix small = BoolMatrix::from_pairs(2, 2, {{1, 1}, {2, 2}});
  CHECK(big.contains(small));
  CHECK_FALSE(small.contains(big));
}
