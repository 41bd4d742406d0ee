#pragma once

// JSON file formats for posets, lattices, towers and cubes, with error
// messages that point at a line and column of the input.

#include <json.hpp>

#include <cctype>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "patchwork/dlattice.hpp"
#include "patchwork/kzero.hpp"
#include "patchwork/tower.hpp"
#include "patchwork/vsheaf.hpp"

namespace patchwork::io {

using nlohmann::json;

struct Location {
  std::size_t line = 1;
  std::size_t column = 1;
};

namespace detail {

inline std::string escape_pointer_token(const std::string& s) {
  std::string out;
  for (char c : s) {
    if (c == '~')
      out += "~0";
    else if (c == '/')
      out += "~1";
    else
      out += c;
  }
  return out;
}

/// Start offset of every value in already validated JSON text, keyed by its
/// JSON pointer.
class OffsetIndex {
 public:
  explicit OffsetIndex(const std::string& text) : text_(text) {
    skip_ws();
    value("");
  }
  const std::map<std::string, std::size_t>& offsets() const { return offsets_; }

 private:
  void skip_ws() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }
  std::string string_token() {
    const std::size_t start = pos_++;
    while (pos_ < text_.size() && text_[pos_] != '"') pos_ += (text_[pos_] == '\\') ? 2 : 1;
    ++pos_;
    return json::parse(text_.substr(start, pos_ - start)).get<std::string>();
  }
  void value(const std::string& ptr) {
    offsets_.emplace(ptr, pos_);
    const char c = text_[pos_];
    if (c == '{') {
      ++pos_;
      skip_ws();
      while (text_[pos_] != '}') {
        const std::string key = string_token();
        skip_ws();
        ++pos_;  // colon
        skip_ws();
        value(ptr + "/" + escape_pointer_token(key));
        skip_ws();
        if (text_[pos_] == ',') ++pos_;
        skip_ws();
      }
      ++pos_;
    } else if (c == '[') {
      ++pos_;
      skip_ws();
      for (std::size_t i = 0; text_[pos_] != ']'; ++i) {
        value(ptr + "/" + std::to_string(i));
        skip_ws();
        if (text_[pos_] == ',') ++pos_;
        skip_ws();
      }
      ++pos_;
    } else if (c == '"') {
      string_token();
    } else {
      while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_])) && text_[pos_] != ',' &&
             text_[pos_] != ']' && text_[pos_] != '}')
        ++pos_;
    }
  }

  const std::string& text_;
  std::size_t pos_ = 0;
  std::map<std::string, std::size_t> offsets_;
};

}  // namespace detail

/// A parsed JSON document that remembers where each value came from.
class Document {
 public:
  static Document parse(std::string text, std::string source) {
    Document d;
    d.text_ = std::move(text);
    d.source_ = std::move(source);
    try {
      d.root_ = json::parse(d.text_);
    } catch (const json::parse_error& e) {
      const std::size_t byte = e.byte == 0 ? 0 : e.byte - 1;
      std::string what = e.what();
      // nlohmann prefixes its own position; keep only the explanation.
      if (auto p = what.find(": "); p != std::string::npos) what = what.substr(p + 2);
      throw InputError(d.where(byte) + ": malformed JSON: " + what);
    }
    d.offsets_ = detail::OffsetIndex(d.text_).offsets();
    return d;
  }

  static Document load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw InputError(path + ": cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse(ss.str(), path);
  }

  const json& root() const { return root_; }
  const std::string& source() const { return source_; }

  Location locate_offset(std::size_t offset) const {
    Location l;
    for (std::size_t i = 0; i < offset && i < text_.size(); ++i) {
      if (text_[i] == '\n') {
        ++l.line;
        l.column = 1;
      } else if ((static_cast<unsigned char>(text_[i]) & 0xC0) != 0x80) {
        ++l.column;
      }
    }
    return l;
  }
  Location locate(const std::string& pointer) const {
    auto it = offsets_.find(pointer);
    return locate_offset(it == offsets_.end() ? 0 : it->second);
  }
  std::string where(std::size_t offset) const {
    const auto l = locate_offset(offset);
    return source_ + ":" + std::to_string(l.line) + ":" + std::to_string(l.column);
  }

  [[noreturn]] void fail(const std::string& pointer, const std::string& message) const {
    const auto l = locate(pointer);
    throw InputError(source_ + ":" + std::to_string(l.line) + ":" + std::to_string(l.column) + ": " +
                     (pointer.empty() ? "" : "at " + pointer + ": ") + message);
  }

 private:
  std::string text_;
  std::string source_;
  json root_;
  std::map<std::string, std::size_t> offsets_;
};

/// A value inside a Document, with typed accessors that fail at its location.
class Node {
 public:
  Node(const Document& doc, const json& v, std::string pointer) : doc_(&doc), v_(&v), ptr_(std::move(pointer)) {}
  static Node root(const Document& doc) { return Node(doc, doc.root(), ""); }

  const json& value() const { return *v_; }
  const std::string& pointer() const { return ptr_; }
  [[noreturn]] void fail(const std::string& message) const { doc_->fail(ptr_, message); }

  bool is_object() const { return v_->is_object(); }
  bool is_array() const { return v_->is_array(); }
  bool is_string() const { return v_->is_string(); }
  bool has(const std::string& key) const { return v_->is_object() && v_->contains(key); }

  Node operator[](const std::string& key) const {
    if (!v_->is_object()) fail("expected an object");
    auto it = v_->find(key);
    if (it == v_->end()) fail("missing key \"" + key + "\"");
    return Node(*doc_, *it, ptr_ + "/" + detail::escape_pointer_token(key));
  }
  std::vector<Node> items() const {
    if (!v_->is_array()) fail("expected an array");
    std::vector<Node> out;
    for (std::size_t i = 0; i < v_->size(); ++i) out.emplace_back(*doc_, (*v_)[i], ptr_ + "/" + std::to_string(i));
    return out;
  }
  std::vector<std::pair<std::string, Node>> members() const {
    if (!v_->is_object()) fail("expected an object");
    std::vector<std::pair<std::string, Node>> out;
    for (auto it = v_->begin(); it != v_->end(); ++it)
      out.emplace_back(it.key(), Node(*doc_, it.value(), ptr_ + "/" + detail::escape_pointer_token(it.key())));
    return out;
  }
  void only_keys(const std::vector<std::string>& allowed) const {
    for (const auto& [k, n] : members())
      if (std::find(allowed.begin(), allowed.end(), k) == allowed.end()) n.fail("unexpected key \"" + k + "\"");
  }

  std::string str() const {
    if (!v_->is_string()) fail("expected a string");
    return v_->get<std::string>();
  }
  std::int64_t integer() const {
    if (!v_->is_number_integer()) fail("expected an integer");
    return v_->get<std::int64_t>();
  }
  std::size_t count(std::size_t max) const {
    const auto v = integer();
    if (v < 0 || static_cast<std::size_t>(v) > max) fail("expected an integer in [0, " + std::to_string(max) + "]");
    return static_cast<std::size_t>(v);
  }
  bool boolean() const {
    if (v_->is_boolean()) return v_->get<bool>();
    if (v_->is_number_integer() && (v_->get<int>() == 0 || v_->get<int>() == 1)) return v_->get<int>() == 1;
    fail("expected true/false or 0/1");
  }
  Rational rational() const {
    if (v_->is_number_integer()) return Rational(v_->get<long>());
    if (!v_->is_string()) fail("expected a rational as \"p/q\" or an integer");
    try {
      return parse_rational(v_->get<std::string>());
    } catch (const InputError& e) {
      fail(e.what());
    }
  }

 private:
  const Document* doc_;
  const json* v_;
  std::string ptr_;
};

// ---------------------------------------------------------------------------
// Posets and subsets

/// A poset together with the element order used in the file, so that
/// integer references can be resolved.
struct PosetInput {
  FinitePoset poset;
  std::vector<std::string> file_order;
};

inline int resolve_element(const Node& n, const FinitePoset& p, const std::vector<std::string>& file_order) {
  if (n.value().is_number_integer()) {
    const auto i = n.integer();
    if (i < 0 || static_cast<std::size_t>(i) >= file_order.size())
      n.fail("element index " + std::to_string(i) + " out of range");
    return p.require_index(file_order[i]);
  }
  const std::string s = n.str();
  if (auto i = p.index_of(s)) return *i;
  n.fail("unknown element \"" + s + "\"");
}

inline PosetInput read_poset_input(const Node& n) {
  n.only_keys({"names", "covers"});
  PosetInput in;
  for (const auto& item : n["names"].items()) in.file_order.push_back(item.str());
  std::vector<std::pair<std::string, std::string>> covers;
  if (n.has("covers")) {
    for (const auto& pair : n["covers"].items()) {
      const auto ends = pair.items();
      if (ends.size() != 2) pair.fail("a cover is a [below, above] pair");
      std::string e[2];
      for (int k = 0; k < 2; ++k) {
        if (ends[k].value().is_number_integer()) {
          const auto i = ends[k].integer();
          if (i < 0 || static_cast<std::size_t>(i) >= in.file_order.size())
            ends[k].fail("element index " + std::to_string(i) + " out of range");
          e[k] = in.file_order[i];
        } else {
          e[k] = ends[k].str();
          if (std::find(in.file_order.begin(), in.file_order.end(), e[k]) == in.file_order.end())
            ends[k].fail("unknown element \"" + e[k] + "\"");
        }
      }
      covers.emplace_back(e[0], e[1]);
    }
  }
  try {
    in.poset = FinitePoset::from_covers(in.file_order, covers);
  } catch (const InputError& e) {
    n.fail(e.what());
  }
  return in;
}

inline FinitePoset read_poset(const Node& n) { return read_poset_input(n).poset; }

inline json poset_to_json(const FinitePoset& p) {
  json covers = json::array();
  for (auto [a, b] : p.cover_pairs()) covers.push_back({p.name(a), p.name(b)});
  return {{"names", p.names()}, {"covers", covers}};
}

/// Sorted name array.
inline json subset_to_json(const FinitePoset& p, SubsetMask s) {
  auto names = subset_names(p, s);
  std::sort(names.begin(), names.end());
  return names;
}

inline SubsetMask read_subset(const Node& n, const FinitePoset& p) {
  Mask m = 0;
  for (const auto& item : n.items()) {
    const int i = resolve_element(item, p, p.names());
    if (has(m, i)) item.fail("element listed twice");
    m |= bit(i);
  }
  return SubsetMask{m};
}

// ---------------------------------------------------------------------------
// Lattices

inline DistLattice read_lattice(const Node& n) {
  if (n.has("birkhoff_base")) {
    n.only_keys({"birkhoff_base"});
    return downset_lattice(read_poset(n["birkhoff_base"]));
  }
  if (!n.has("elements")) n.fail("expected \"birkhoff_base\" or \"elements\" with \"leq_table\"");
  n.only_keys({"elements", "leq_table"});
  LatticeTable t;
  for (const auto& item : n["elements"].items()) t.names.push_back(item.str());
  const auto rows = n["leq_table"].items();
  if (rows.size() != t.names.size())
    n["leq_table"].fail("expected " + std::to_string(t.names.size()) + " rows, got " + std::to_string(rows.size()));
  for (const auto& row : rows) {
    const auto cells = row.items();
    if (cells.size() != t.names.size())
      row.fail("expected " + std::to_string(t.names.size()) + " entries, got " + std::to_string(cells.size()));
    std::vector<char> r;
    for (const auto& c : cells) r.push_back(c.boolean());
    t.leq.push_back(std::move(r));
  }
  try {
    return birkhoff_form(t).lattice;
  } catch (const InputError& e) {
    n["leq_table"].fail(e.what());
  }
}

inline json lattice_to_json(const DistLattice& d) { return {{"birkhoff_base", poset_to_json(d.base())}}; }

/// Homomorphisms and nuclei serialize as element-image arrays.
inline json image_to_json(const std::vector<int>& image) { return image; }

// ---------------------------------------------------------------------------
// Towers

inline Tower read_tower(const Node& n) {
  n.only_keys({"levels", "transitions"});
  std::vector<PosetInput> levels;
  const auto level_nodes = n["levels"].items();
  if (level_nodes.empty()) n["levels"].fail("a tower needs at least one level");
  for (const auto& l : level_nodes) levels.push_back(read_poset_input(l));
  const auto trans = n.has("transitions") ? n["transitions"].items() : std::vector<Node>{};
  if (trans.size() + 1 != levels.size())
    (n.has("transitions") ? n["transitions"] : n)
        .fail("a tower with " + std::to_string(levels.size()) + " levels needs " +
              std::to_string(levels.size() - 1) + " transitions, got " + std::to_string(trans.size()));
  std::vector<std::vector<int>> images;
  for (std::size_t i = 0; i < trans.size(); ++i) {
    const auto& src = levels[i + 1];
    const auto& dst = levels[i];
    const auto entries = trans[i].items();
    if (entries.size() != src.file_order.size())
      trans[i].fail("expected one image per element of level " + std::to_string(i + 1) + " (" +
                    std::to_string(src.file_order.size()) + "), got " + std::to_string(entries.size()));
    std::vector<int> img(src.poset.size());
    for (std::size_t k = 0; k < entries.size(); ++k)
      img[src.poset.require_index(src.file_order[k])] = resolve_element(entries[k], dst.poset, dst.file_order);
    if (!is_monotone(src.poset, dst.poset, img)) trans[i].fail("transition is not monotone");
    images.push_back(std::move(img));
  }
  std::vector<FinitePoset> ps;
  for (auto& l : levels) ps.push_back(std::move(l.poset));
  try {
    return make_tower(std::move(ps), images);
  } catch (const InputError& e) {
    n.fail(e.what());
  }
}

inline json tower_to_json(const Tower& t) {
  json levels = json::array(), trans = json::array();
  for (const auto& l : t.levels) levels.push_back(poset_to_json(l));
  for (const auto& m : t.transitions) trans.push_back(m.image);
  return {{"levels", levels}, {"transitions", trans}};
}

// ---------------------------------------------------------------------------
// Cubes

/// "{}" or "{1,3}" (coordinates 1..n, any order, spaces allowed).
inline Mask parse_cube_vertex(const std::string& s, std::size_t n) {
  std::string t;
  for (char c : s)
    if (!std::isspace(static_cast<unsigned char>(c))) t += c;
  if (t.size() < 2 || t.front() != '{' || t.back() != '}')
    throw InputError("cube vertex \"" + s + "\" is not of the form {i,j,...}");
  const std::string body = t.substr(1, t.size() - 2);
  Mask m = 0;
  if (body.empty()) return m;
  std::stringstream ss(body);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty() || !std::all_of(item.begin(), item.end(), [](char c) { return std::isdigit(static_cast<unsigned char>(c)); }))
      throw InputError("cube vertex \"" + s + "\" has a malformed coordinate");
    const unsigned long i = std::stoul(item);
    if (i < 1 || i > n) throw InputError("coordinate " + item + " is outside 1.." + std::to_string(n));
    if (has(m, i - 1)) throw InputError("coordinate " + item + " repeated in \"" + s + "\"");
    m |= bit(i - 1);
  }
  return m;
}

inline std::pair<Mask, Mask> parse_cube_arrow(const std::string& key, std::size_t n) {
  static const std::string arrows[] = {"→", "->"};
  for (const auto& a : arrows)
    if (auto p = key.find(a); p != std::string::npos)
      return {parse_cube_vertex(key.substr(0, p), n), parse_cube_vertex(key.substr(p + a.size()), n)};
  throw InputError("map key \"" + key + "\" is not of the form A→B");
}

inline QMatrix read_matrix(const Node& n, std::size_t rows, std::size_t cols) {
  const auto rs = n.items();
  if (rs.size() != rows) n.fail("expected " + std::to_string(rows) + " rows, got " + std::to_string(rs.size()));
  QMatrix m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    const auto cs = rs[r].items();
    if (cs.size() != cols) rs[r].fail("expected " + std::to_string(cols) + " entries, got " + std::to_string(cs.size()));
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = cs[c].rational();
  }
  return m;
}

inline CubeDiagram read_cube(const Node& n) {
  n.only_keys({"n", "dims", "maps"});
  const std::size_t dim = n["n"].count(6);
  if (dim == 0) n["n"].fail("a cube needs n >= 1");
  std::vector<std::size_t> dims(bit(dim));
  std::vector<char> seen(bit(dim), 0);
  for (const auto& [key, v] : n["dims"].members()) {
    Mask a = 0;
    try {
      a = parse_cube_vertex(key, dim);
    } catch (const InputError& e) {
      v.fail(e.what());
    }
    if (seen[a]) v.fail("vertex " + cube_vertex_name(a) + " given twice");
    seen[a] = 1;
    dims[a] = v.count(64);
  }
  for (Mask a = 0; a < bit(dim); ++a)
    if (!seen[a]) n["dims"].fail("missing dimension for vertex " + cube_vertex_name(a));
  std::map<std::pair<Mask, Mask>, QMatrix> covers;
  for (const auto& [key, v] : n["maps"].members()) {
    std::pair<Mask, Mask> arrow;
    try {
      arrow = parse_cube_arrow(key, dim);
    } catch (const InputError& e) {
      v.fail(e.what());
    }
    const Mask diff = arrow.second & ~arrow.first;
    if ((arrow.first & ~arrow.second) != 0 || popcount(diff) != 1)
      v.fail("map " + cube_vertex_name(arrow.first) + "→" + cube_vertex_name(arrow.second) +
             " is not along an edge of the cube");
    if (covers.count(arrow)) v.fail("map given twice");
    covers.emplace(arrow, read_matrix(v, dims[arrow.second], dims[arrow.first]));
  }
  for (Mask a = 0; a < bit(dim); ++a)
    for (std::size_t i = 0; i < dim; ++i)
      if (!has(a, i) && !covers.count({a, a | bit(i)}))
        n["maps"].fail("missing map " + cube_vertex_name(a) + "→" + cube_vertex_name(a | bit(i)));
  try {
    return CubeDiagram::from_cover_maps(dim, dims, covers);
  } catch (const InputError& e) {
    n["maps"].fail(e.what());
  }
}

inline json matrix_to_json(const QMatrix& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(format_rational(m(r, c)));
    rows.push_back(row);
  }
  return rows;
}

inline json cube_to_json(const CubeDiagram& c) {
  json dims = json::object(), maps = json::object();
  for (Mask a = 0; a < bit(c.n()); ++a) {
    dims[cube_vertex_name(a)] = c.dim(a);
    for (std::size_t i = 0; i < c.n(); ++i)
      if (!has(a, i)) maps[cube_vertex_name(a) + "→" + cube_vertex_name(a | bit(i))] = matrix_to_json(c.map(a, a | bit(i)));
  }
  return {{"n", c.n()}, {"dims", dims}, {"maps", maps}};
}

// ---------------------------------------------------------------------------
// Reports

inline json report_to_json(const SweepReport& r) {
  json j = {{"suite", r.suite}, {"cases", r.cases}, {"failures", r.failures}, {"passed", r.ok()}};
  if (!r.counters.empty()) j["counters"] = r.counters;
  return j;
}

// ---------------------------------------------------------------------------
// Loading helpers

inline FinitePoset load_poset(const std::string& path) {
  const auto d = Document::load(path);
  return read_poset(Node::root(d));
}
inline DistLattice load_lattice(const std::string& path) {
  const auto d = Document::load(path);
  return read_lattice(Node::root(d));
}
inline Tower load_tower(const std::string& path) {
  const auto d = Document::load(path);
  return read_tower(Node::root(d));
}
inline CubeDiagram load_cube(const std::string& path) {
  const auto d = Document::load(path);
  return read_cube(Node::root(d));
}

}  // namespace patchwork::io
