#include "provlab/matrix.hpp"

#include "provlab/errors.hpp"

namespace provlab {

BoolMatrix BoolMatrix::multiply(const BoolMatrix &rhs) const {
  if (cols_ != rhs.rows_)
    throw StructuralError("matrix product dimension mismatch: " +
                          std::to_string(cols_) + " vs " +
                          std::to_string(rhs.rows_));
  BoolMatrix out(rows_, rhs.cols_);
  for (int r = 0; r < rows_; ++r)
    for (int k = 0; k < cols_; ++k) {
      if (!at(r, k)) continue;
      for (int c = 0; c < rhs.cols_; ++c)
        if (rhs.at(k, c)) out.set(r, c);
    }
  return out;
}

BoolMatrix BoolMatrix::transpose() const {
  BoolMatrix out(cols_, rows_);
  for (int r = 0; r < rows_; ++r)
    for (int c = 0; c < cols_; ++c)
      if (at(r, c)) out.set(c, r);
  return out;
}

BoolMatrix BoolMatrix::unite(const BoolMatrix &rhs) const {
  if (rows_ != rhs.rows_ || cols_ != rhs.cols_)
    throw StructuralError("matrix union dimension mismatch");
  BoolMatrix out = *this;
  for (int r = 0; r < rows_; ++r)
    for (int c = 0; c < cols_; ++c)
      if (rhs.at(r, c)) out.set(r, c);
  return out;
}

bool BoolMatrix::rows_covered() const {
  for (int r = 0; r < rows_; ++r) {
    bool any = false;
    for (int c = 0; c < cols_ && !any; ++c) any = at(r, c);
    if (!any) return false;
  }
  return true;
}

bool BoolMatrix::cols_covered() const {
  for (int c = 0; c < cols_; ++c) {
    bool any = false;
    for (int r = 0; r < rows_ && !any; ++r) any = at(r, c);
    if (!any) return false;
  }
  return true;
}

bool BoolMatrix::contains(const BoolMatrix &o) const {
  if (rows_ != o.rows_ || cols_ != o.cols_) return false;
  for (int r = 0; r < rows_; ++r)
    for (int c = 0; c < cols_; ++c)
      if (o.at(r, c) && !at(r, c)) return false;
  return true;
}

size_t BoolMatrix::count() const {
  size_t n = 0;
  for (uint8_t b : bits_) n += b;
  return n;
}

std::vector<std::pair<int, int>> BoolMatrix::true_pairs() const {
  std::vector<std::pair<int, int>> out;
  for (int r = 0; r < rows_; ++r)
    for (int c = 0; c < cols_; ++c)
      if (at(r, c)) out.emplace_back(r + 1, c + 1);
  return out;
}

BoolMatrix BoolMatrix::from_pairs(
    int rows, int cols, const std::vector<std::pair<int, int>> &pairs) {
  BoolMatrix m(rows, cols);
  for (auto [r, c] : pairs) {
    if (r < 1 || r > rows || c < 1 || c > cols)
      throw InputError("dependency pair (" + std::to_string(r) + "," +
                       std::to_string(c) + ") out of range for " +
                       std::to_string(rows) + "x" + std::to_string(cols) +
                       " module");
    m.set(r - 1, c - 1);
  }
  return m;
}

std::string BoolMatrix::to_string() const {
  std::string s;
  for (int r = 0; r < rows_; ++r) {
    if (r) s += '\n';
    for (int c = 0; c < cols_; ++c) s += at(r, c) ? '1' : '0';
  }
  return s;
}

} // namespace provlab
