#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace provlab {

// Dense boolean matrix over the (or, and) semiring. Dimensions in this
// library are tiny (port counts of a single module), so a byte per cell is
// fine and keeps the code obvious.
class BoolMatrix {
public:
  BoolMatrix() = default;
  BoolMatrix(int rows, int cols, bool fill = false)
      : rows_(rows), cols_(cols),
        bits_(static_cast<size_t>(rows) * cols, fill ? 1 : 0) {}

  static BoolMatrix identity(int n) {
    BoolMatrix m(n, n);
    for (int i = 0; i < n; ++i) m.set(i, i);
    return m;
  }

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  bool empty() const { return rows_ == 0 || cols_ == 0; }

  bool at(int r, int c) const {
    return bits_[static_cast<size_t>(r) * cols_ + c] != 0;
  }
  void set(int r, int c, bool v = true) {
    bits_[static_cast<size_t>(r) * cols_ + c] = v ? 1 : 0;
  }

  // Boolean product; asserts inner dimensions agree.
  BoolMatrix multiply(const BoolMatrix &rhs) const;
  BoolMatrix transpose() const;
  // Elementwise or; dimensions must agree.
  BoolMatrix unite(const BoolMatrix &rhs) const;

  bool operator==(const BoolMatrix &o) const = default;

  // True when every row (resp. column) contains at least one true entry.
  bool rows_covered() const;
  bool cols_covered() const;
  bool contains(const BoolMatrix &o) const; // o subset of *this, same dims

  size_t count() const;

  // (in_port, out_port) pairs, 1-based, row-major; the grammar file form.
  std::vector<std::pair<int, int>> true_pairs() const;
  static BoolMatrix from_pairs(int rows, int cols,
                               const std::vector<std::pair<int, int>> &pairs);

  std::string to_string() const; // rows of 0/1, for diagnostics

private:
  int rows_ = 0, cols_ = 0;
  std::vector<uint8_t> bits_;
};

} // namespace provlab
