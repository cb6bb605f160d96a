#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "provlab/model.hpp"

namespace provlab {

// One step of a root path in the compressed parse tree. Composite edges are
// (k, i): production k, topological position i. Recursive edges are
// (s, t, i): cycle s entered at table position t, spine child i.
struct EdgeLabel {
  bool recursive = false;
  int a = 0; // k or s
  int b = 0; // i or t
  int c = 0; // unused or i
  bool operator==(const EdgeLabel &) const = default;
  auto operator<=>(const EdgeLabel &) const = default;
  std::string to_string() const;
};

// Label of one port instance: root path of the node that first created the
// port, plus side and 1-based port index. Immutable once assigned.
struct PortLabel {
  std::vector<EdgeLabel> path;
  PortSide side = PortSide::Input;
  int index = 0; // 1-based
  bool operator==(const PortLabel &) const = default;
  std::string to_string() const;
};

// Label of a data item d = (o, i): the producing output port and the
// consuming input port, with their common root-path prefix stored once.
// Initial inputs of the start module have no source side; final outputs of
// the start module have no destination side.
struct DataLabel {
  struct Tail {
    std::vector<EdgeLabel> suffix;
    int index = 0; // 1-based port index
    bool operator==(const Tail &) const = default;
  };
  std::vector<EdgeLabel> shared_prefix;
  std::optional<Tail> src; // output side
  std::optional<Tail> dst; // input side

  bool operator==(const DataLabel &) const = default;

  static DataLabel from_ports(const std::optional<PortLabel> &o,
                              const std::optional<PortLabel> &i);
  // Reconstructed full-path port labels.
  std::optional<PortLabel> src_port() const;
  std::optional<PortLabel> dst_port() const;
  std::string to_string() const;
};

// Variable-length binary codec: base-128 varints, the recursive/composite
// kind folded into the low bit of each element's first varint.
std::vector<uint8_t> encode_label(const DataLabel &d);
DataLabel decode_label(const std::vector<uint8_t> &bytes); // throws CodecError
size_t label_bits(const DataLabel &d);                     // encoded size * 8

// Label store file: little "PLBS" header then (item id, length, bytes)
// records, varint-coded, byte-exact round trip.
std::vector<uint8_t> serialize_label_store(
    const std::vector<std::pair<int, DataLabel>> &labels);
std::vector<std::pair<int, DataLabel>> parse_label_store(
    const std::vector<uint8_t> &bytes);

} // namespace provlab
