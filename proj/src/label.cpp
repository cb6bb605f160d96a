#include "provlab/label.hpp"

#include "provlab/errors.hpp"

namespace provlab {

std::string EdgeLabel::to_string() const {
  if (recursive)
    return "(" + std::to_string(a) + "," + std::to_string(b) + "," +
           std::to_string(c) + ")";
  return "(" + std::to_string(a) + "," + std::to_string(b) + ")";
}

std::string PortLabel::to_string() const {
  std::string s = "{";
  for (const auto &e : path) s += e.to_string() + ",";
  s += std::to_string(index);
  s += side == PortSide::Input ? "}in" : "}out";
  return s;
}

DataLabel DataLabel::from_ports(const std::optional<PortLabel> &o,
                                const std::optional<PortLabel> &i) {
  DataLabel d;
  if (o && i) {
    size_t common = 0;
    while (common < o->path.size() && common < i->path.size() &&
           o->path[common] == i->path[common])
      ++common;
    d.shared_prefix.assign(o->path.begin(), o->path.begin() + common);
    d.src = Tail{{o->path.begin() + common, o->path.end()}, o->index};
    d.dst = Tail{{i->path.begin() + common, i->path.end()}, i->index};
  } else if (o) {
    d.src = Tail{o->path, o->index};
  } else if (i) {
    d.dst = Tail{i->path, i->index};
  } else {
    throw StructuralError("data item with neither endpoint");
  }
  return d;
}

std::optional<PortLabel> DataLabel::src_port() const {
  if (!src) return std::nullopt;
  PortLabel p;
  p.path = shared_prefix;
  p.path.insert(p.path.end(), src->suffix.begin(), src->suffix.end());
  p.side = PortSide::Output;
  p.index = src->index;
  return p;
}

std::optional<PortLabel> DataLabel::dst_port() const {
  if (!dst) return std::nullopt;
  PortLabel p;
  p.path = shared_prefix;
  p.path.insert(p.path.end(), dst->suffix.begin(), dst->suffix.end());
  p.side = PortSide::Input;
  p.index = dst->index;
  return p;
}

std::string DataLabel::to_string() const {
  std::string s = "(";
  auto op = src_port();
  auto ip = dst_port();
  s += op ? op->to_string() : "-";
  s += ", ";
  s += ip ? ip->to_string() : "-";
  s += ")";
  return s;
}

namespace {

void put_varint(std::vector<uint8_t> &out, uint64_t v) {
  while (v >= 0x80) {
    out.push_back(static_cast<uint8_t>(v) | 0x80);
    v >>= 7;
  }
  out.push_back(static_cast<uint8_t>(v));
}

uint64_t get_varint(const std::vector<uint8_t> &in, size_t &pos) {
  uint64_t v = 0;
  int shift = 0;
  while (true) {
    if (pos >= in.size()) throw CodecError("truncated varint");
    uint8_t b = in[pos++];
    v |= static_cast<uint64_t>(b & 0x7f) << shift;
    if (!(b & 0x80)) return v;
    shift += 7;
    if (shift > 63) throw CodecError("varint too long");
  }
}

void put_edge(std::vector<uint8_t> &out, const EdgeLabel &e) {
  put_varint(out, (static_cast<uint64_t>(e.a) << 1) | (e.recursive ? 1 : 0));
  put_varint(out, static_cast<uint64_t>(e.b));
  if (e.recursive) put_varint(out, static_cast<uint64_t>(e.c));
}

EdgeLabel get_edge(const std::vector<uint8_t> &in, size_t &pos) {
  EdgeLabel e;
  uint64_t head = get_varint(in, pos);
  e.recursive = head & 1;
  e.a = static_cast<int>(head >> 1);
  e.b = static_cast<int>(get_varint(in, pos));
  if (e.recursive) e.c = static_cast<int>(get_varint(in, pos));
  return e;
}

void put_path(std::vector<uint8_t> &out, const std::vector<EdgeLabel> &path) {
  put_varint(out, path.size());
  for (const auto &e : path) put_edge(out, e);
}

std::vector<EdgeLabel> get_path(const std::vector<uint8_t> &in, size_t &pos) {
  size_t n = static_cast<size_t>(get_varint(in, pos));
  if (n > in.size()) throw CodecError("path length exceeds payload");
  std::vector<EdgeLabel> path;
  path.reserve(n);
  for (size_t i = 0; i < n; ++i) path.push_back(get_edge(in, pos));
  return path;
}

} // namespace

std::vector<uint8_t> encode_label(const DataLabel &d) {
  std::vector<uint8_t> out;
  uint8_t flags = (d.src ? 1 : 0) | (d.dst ? 2 : 0);
  out.push_back(flags);
  put_path(out, d.shared_prefix);
  if (d.src) {
    put_path(out, d.src->suffix);
    put_varint(out, static_cast<uint64_t>(d.src->index));
  }
  if (d.dst) {
    put_path(out, d.dst->suffix);
    put_varint(out, static_cast<uint64_t>(d.dst->index));
  }
  return out;
}

DataLabel decode_label(const std::vector<uint8_t> &bytes) {
  if (bytes.empty()) throw CodecError("empty label");
  size_t pos = 0;
  uint8_t flags = bytes[pos++];
  if (flags == 0 || flags > 3) throw CodecError("bad label flags");
  DataLabel d;
  d.shared_prefix = get_path(bytes, pos);
  if (flags & 1) {
    DataLabel::Tail t;
    t.suffix = get_path(bytes, pos);
    t.index = static_cast<int>(get_varint(bytes, pos));
    d.src = std::move(t);
  }
  if (flags & 2) {
    DataLabel::Tail t;
    t.suffix = get_path(bytes, pos);
    t.index = static_cast<int>(get_varint(bytes, pos));
    d.dst = std::move(t);
  }
  if (pos != bytes.size()) throw CodecError("trailing bytes after label");
  return d;
}

size_t label_bits(const DataLabel &d) { return encode_label(d).size() * 8; }

std::vector<uint8_t> serialize_label_store(
    const std::vector<std::pair<int, DataLabel>> &labels) {
  std::vector<uint8_t> out{'P', 'L', 'B', 'S'};
  put_varint(out, labels.size());
  for (const auto &[id, label] : labels) {
    put_varint(out, static_cast<uint64_t>(id));
    auto enc = encode_label(label);
    put_varint(out, enc.size());
    out.insert(out.end(), enc.begin(), enc.end());
  }
  return out;
}

std::vector<std::pair<int, DataLabel>> parse_label_store(
    const std::vector<uint8_t> &bytes) {
  if (bytes.size() < 4 || bytes[0] != 'P' || bytes[1] != 'L' || bytes[2] != 'B' ||
      bytes[3] != 'S')
    throw CodecError("not a label store");
  size_t pos = 4;
  size_t count = static_cast<size_t>(get_varint(bytes, pos));
  std::vector<std::pair<int, DataLabel>> out;
  out.reserve(count);
  for (size_t i = 0; i < count; ++i) {
    int id = static_cast<int>(get_varint(bytes, pos));
    size_t len = static_cast<size_t>(get_varint(bytes, pos));
    if (pos + len > bytes.size()) throw CodecError("truncated label store");
    std::vector<uint8_t> rec(bytes.begin() + pos, bytes.begin() + pos + len);
    pos += len;
    out.emplace_back(id, decode_label(rec));
  }
  if (pos != bytes.size()) throw CodecError("trailing bytes in label store");
  return out;
}

} // namespace provlab
