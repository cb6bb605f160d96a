#pragma once

#include <stdexcept>
#include <string>

namespace provlab {

// Base for everything thrown by the library. `code` is a stable short tag
// that the CLI maps to exit codes and JSON error objects.
class Error : public std::runtime_error {
public:
  Error(std::string code, const std::string &msg)
      : std::runtime_error(msg), code_(std::move(code)) {}
  const std::string &code() const { return code_; }

private:
  std::string code_;
};

// Malformed input files, unknown names, schema violations.
struct InputError : Error {
  explicit InputError(const std::string &msg) : Error("input", msg) {}
};

// Grammar/workflow structure violations (cyclic workflow, arity mismatch...).
struct StructuralError : Error {
  explicit StructuralError(const std::string &msg) : Error("structure", msg) {}
};

// Operation applied to a grammar outside its supported class
// (e.g. labeling a grammar that is not strictly linear-recursive).
struct UnsupportedClassError : Error {
  explicit UnsupportedClassError(const std::string &msg)
      : Error("recursion-class", msg) {}
};

// Query mentions an item that is not visible under the queried view.
struct NotVisibleError : Error {
  explicit NotVisibleError(const std::string &msg)
      : Error("not-visible", msg) {}
};

// Label refers to productions or cycles the view label has never heard of.
struct MismatchError : Error {
  explicit MismatchError(const std::string &msg) : Error("mismatch", msg) {}
};

// Corrupt or truncated encoded labels / label stores.
struct CodecError : Error {
  explicit CodecError(const std::string &msg) : Error("codec", msg) {}
};

} // namespace provlab
