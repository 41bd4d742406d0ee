#pragma once

// Finite posets, subsets as bit-masks, monotone maps, and the standard
// constructions (opposite, product, join, cubes, spine).
//
// Elements are indexed canonically: a topological sort in which ties are
// broken by the lexicographically smallest name. Hence i < j whenever
// element i lies strictly below element j, and every bit-mask below uses
// that index order.

#include <algorithm>
#include <bit>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "patchwork/error.hpp"

namespace patchwork {

using Mask = std::uint64_t;

inline constexpr Mask bit(std::size_t i) { return Mask{1} << i; }
inline constexpr bool has(Mask m, std::size_t i) { return (m >> i) & 1U; }
inline int popcount(Mask m) { return std::popcount(m); }
inline constexpr Mask low_bits(std::size_t n) { return n >= 64 ? ~Mask{0} : bit(n) - 1; }

template <class F>
void for_each_bit(Mask m, F&& f) {
  while (m) {
    const int i = std::countr_zero(m);
    f(i);
    m &= m - 1;
  }
}

inline std::vector<int> bits_of(Mask m) {
  std::vector<int> out;
  for_each_bit(m, [&](int i) { out.push_back(i); });
  return out;
}

/// Subset of a poset's elements, indexed in the poset's canonical order.
struct SubsetMask {
  Mask bits = 0;

  constexpr bool contains(std::size_t i) const { return has(bits, i); }
  int size() const { return popcount(bits); }
  constexpr bool empty() const { return bits == 0; }
  constexpr bool subset_of(SubsetMask o) const { return (bits & ~o.bits) == 0; }

  friend constexpr SubsetMask operator|(SubsetMask a, SubsetMask b) { return {a.bits | b.bits}; }
  friend constexpr SubsetMask operator&(SubsetMask a, SubsetMask b) { return {a.bits & b.bits}; }
  friend constexpr auto operator<=>(SubsetMask, SubsetMask) = default;
};

class FinitePoset {
 public:
  static constexpr std::size_t max_elements = 64;

  FinitePoset() = default;

  /// Builds a poset from a "below" relation: `below[i]` has bit j set iff
  /// j <= i, with indices referring to `names`. Validates reflexivity,
  /// antisymmetry and transitivity, then re-indexes canonically.
  static FinitePoset from_relation(std::vector<std::string> names, std::vector<Mask> below) {
    const std::size_t n = names.size();
    if (n > max_elements)
      throw InputError("poset has " + std::to_string(n) + " elements; the bound is " +
                       std::to_string(max_elements));
    if (below.size() != n) throw InputError("relation size does not match name count");
    check_names(names);
    const Mask universe = low_bits(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (below[i] & ~universe) throw InputError("relation references an element out of range");
      if (!has(below[i], i)) throw InputError("relation is not reflexive at '" + names[i] + "'");
    }
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i != j && has(below[i], j) && has(below[j], i))
          throw InputError("relation is not antisymmetric: '" + names[i] + "' and '" + names[j] +
                           "' are mutually below each other");
      }
      Mask closure = below[i];
      for_each_bit(below[i], [&](int j) { closure |= below[j]; });
      if (closure != below[i]) throw InputError("relation is not transitive at '" + names[i] + "'");
    }
    return canonicalize(std::move(names), std::move(below));
  }

  /// Reflexive-transitive closure of the given cover pairs (below, above).
  static FinitePoset from_covers(std::vector<std::string> names,
                                 const std::vector<std::pair<std::string, std::string>>& covers) {
    const std::size_t n = names.size();
    if (n > max_elements)
      throw InputError("poset has " + std::to_string(n) + " elements; the bound is " +
                       std::to_string(max_elements));
    check_names(names);
    std::map<std::string, int, std::less<>> index;
    for (std::size_t i = 0; i < n; ++i) index.emplace(names[i], static_cast<int>(i));
    auto lookup = [&](const std::string& s) {
      auto it = index.find(s);
      if (it == index.end()) throw InputError("cover references unknown element '" + s + "'");
      return it->second;
    };
    std::vector<Mask> below(n);
    std::vector<std::vector<int>> succ(n);
    for (std::size_t i = 0; i < n; ++i) below[i] = bit(i);
    for (const auto& [lo, hi] : covers) {
      const int a = lookup(lo), b = lookup(hi);
      below[b] |= bit(a);
      succ[a].push_back(b);
    }
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t i = 0; i < n; ++i)
        if (has(below[i], k)) below[i] |= below[k];
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        if (i != j && has(below[i], j) && has(below[j], i)) {
          const auto cycle = find_cycle(succ, static_cast<int>(i));
          std::string msg = "cover relation has a cycle: ";
          for (int c : cycle) msg += names[c] + " < ";
          msg += names[cycle.front()];
          throw InputError(msg);
        }
      }
    }
    return canonicalize(std::move(names), std::move(below));
  }

  std::size_t size() const { return names_.size(); }
  Mask all() const { return low_bits(size()); }
  const std::vector<std::string>& names() const { return names_; }
  const std::string& name(std::size_t i) const { return names_[i]; }

  std::optional<int> index_of(std::string_view name) const {
    auto it = index_.find(name);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }
  int require_index(std::string_view name) const {
    if (auto i = index_of(name)) return *i;
    throw InputError("unknown element '" + std::string(name) + "'");
  }

  bool leq(std::size_t a, std::size_t b) const { return has(down_[b], a); }
  Mask down(std::size_t i) const { return down_[i]; }
  Mask up(std::size_t i) const { return up_[i]; }
  const std::vector<Mask>& down_sets() const { return down_; }

  /// Elements directly covered by i.
  Mask lower_covers(std::size_t i) const {
    Mask strict = down_[i] & ~bit(i);
    Mask covers = strict;
    for_each_bit(strict, [&](int j) { covers &= ~(down_[j] & ~bit(j)); });
    return covers;
  }
  std::vector<std::pair<int, int>> cover_pairs() const {
    std::vector<std::pair<int, int>> out;
    for (std::size_t i = 0; i < size(); ++i)
      for_each_bit(lower_covers(i), [&](int j) { out.emplace_back(j, static_cast<int>(i)); });
    std::sort(out.begin(), out.end());
    return out;
  }
  Mask minimal() const {
    Mask m = 0;
    for (std::size_t i = 0; i < size(); ++i)
      if (down_[i] == bit(i)) m |= bit(i);
    return m;
  }
  Mask maximal() const {
    Mask m = 0;
    for (std::size_t i = 0; i < size(); ++i)
      if (up_[i] == bit(i)) m |= bit(i);
    return m;
  }
  /// Length of the longest chain ending at each element (minimal elements: 0).
  std::vector<int> heights() const {
    std::vector<int> h(size(), 0);
    for (std::size_t i = 0; i < size(); ++i)
      for_each_bit(down_[i] & ~bit(i), [&](int j) { h[i] = std::max(h[i], h[j] + 1); });
    return h;
  }

  friend bool operator==(const FinitePoset& a, const FinitePoset& b) {
    return a.names_ == b.names_ && a.down_ == b.down_;
  }

 private:
  static void check_names(const std::vector<std::string>& names) {
    std::set<std::string_view> seen;
    for (const auto& s : names) {
      if (s.empty()) throw InputError("element names must be nonempty");
      if (!seen.insert(s).second) throw InputError("duplicate element name '" + s + "'");
    }
  }

  static std::vector<int> find_cycle(const std::vector<std::vector<int>>& succ, int start) {
    // Depth-first search for a path from start back to itself.
    std::vector<int> path{start};
    std::vector<char> seen(succ.size(), 0);
    std::function<bool(int)> dfs = [&](int v) -> bool {
      for (int w : succ[v]) {
        if (w == start) return true;
        if (seen[w]) continue;
        seen[w] = 1;
        path.push_back(w);
        if (dfs(w)) return true;
        path.pop_back();
      }
      return false;
    };
    dfs(start);
    return path;
  }

  static FinitePoset canonicalize(std::vector<std::string> names, std::vector<Mask> below) {
    const std::size_t n = names.size();
    std::vector<int> order;
    order.reserve(n);
    Mask placed = 0;
    std::set<std::pair<std::string_view, int>> ready;
    for (std::size_t i = 0; i < n; ++i)
      if (below[i] == bit(i)) ready.emplace(names[i], static_cast<int>(i));
    while (!ready.empty()) {
      const int v = ready.begin()->second;
      ready.erase(ready.begin());
      order.push_back(v);
      placed |= bit(v);
      for (std::size_t w = 0; w < n; ++w)
        if (!has(placed, w) && has(below[w], v) && (below[w] & ~bit(w) & ~placed) == 0)
          ready.emplace(names[w], static_cast<int>(w));
    }
    std::vector<int> position(n);
    for (std::size_t k = 0; k < n; ++k) position[order[k]] = static_cast<int>(k);

    FinitePoset p;
    p.names_.resize(n);
    p.down_.assign(n, 0);
    p.up_.assign(n, 0);
    for (std::size_t k = 0; k < n; ++k) {
      const int old = order[k];
      p.names_[k] = std::move(names[old]);
      for_each_bit(below[old], [&](int j) { p.down_[k] |= bit(position[j]); });
    }
    for (std::size_t i = 0; i < n; ++i)
      for_each_bit(p.down_[i], [&](int j) { p.up_[j] |= bit(i); });
    for (std::size_t i = 0; i < n; ++i) p.index_.emplace(p.names_[i], static_cast<int>(i));
    return p;
  }

  std::vector<std::string> names_;
  std::vector<Mask> down_;
  std::vector<Mask> up_;
  std::map<std::string, int, std::less<>> index_;
};

// ---------------------------------------------------------------------------
// Subsets

inline bool valid_subset(const FinitePoset& p, SubsetMask s) { return (s.bits & ~p.all()) == 0; }

inline void require_subset(const FinitePoset& p, SubsetMask s) {
  if (!valid_subset(p, s)) throw InputError("subset references elements outside the poset");
}

inline SubsetMask down_closure(const FinitePoset& p, SubsetMask s) {
  Mask m = 0;
  for_each_bit(s.bits, [&](int i) { m |= p.down(i); });
  return {m};
}

inline SubsetMask up_closure(const FinitePoset& p, SubsetMask s) {
  Mask m = 0;
  for_each_bit(s.bits, [&](int i) { m |= p.up(i); });
  return {m};
}

inline SubsetMask complement(const FinitePoset& p, SubsetMask s) { return {p.all() & ~s.bits}; }

inline bool is_downset(const FinitePoset& p, SubsetMask s) { return down_closure(p, s) == s; }
inline bool is_upset(const FinitePoset& p, SubsetMask s) { return up_closure(p, s) == s; }

/// Largest downset contained in s.
inline SubsetMask interior(const FinitePoset& p, SubsetMask s) {
  Mask m = 0;
  for (std::size_t i = 0; i < p.size(); ++i)
    if ((p.down(i) & ~s.bits) == 0) m |= bit(i);
  return {m};
}

inline std::size_t default_enumeration_limit() { return std::size_t{1} << 22; }

/// All downsets, in the order produced by deciding elements 0, 1, ... in turn
/// (excluded before included).
inline std::vector<SubsetMask> downsets(const FinitePoset& p,
                                        std::size_t limit = default_enumeration_limit()) {
  std::vector<SubsetMask> out;
  const std::size_t n = p.size();
  std::function<void(std::size_t, Mask)> rec = [&](std::size_t i, Mask chosen) {
    if (i == n) {
      if (out.size() >= limit)
        throw InputError("downset enumeration exceeds the limit of " + std::to_string(limit));
      out.push_back({chosen});
      return;
    }
    rec(i + 1, chosen);
    if ((p.down(i) & ~bit(i) & ~chosen) == 0) rec(i + 1, chosen | bit(i));
  };
  rec(0, 0);
  std::sort(out.begin(), out.end(), [](SubsetMask a, SubsetMask b) {
    const int ca = a.size(), cb = b.size();
    return ca != cb ? ca < cb : a.bits < b.bits;
  });
  return out;
}

inline std::vector<SubsetMask> upsets(const FinitePoset& p,
                                      std::size_t limit = default_enumeration_limit()) {
  auto d = downsets(p, limit);
  std::vector<SubsetMask> out;
  out.reserve(d.size());
  for (auto s : d) out.push_back(complement(p, s));
  std::sort(out.begin(), out.end(), [](SubsetMask a, SubsetMask b) {
    const int ca = a.size(), cb = b.size();
    return ca != cb ? ca < cb : a.bits < b.bits;
  });
  return out;
}

inline std::vector<std::string> subset_names(const FinitePoset& p, SubsetMask s) {
  std::vector<std::string> out;
  for_each_bit(s.bits, [&](int i) { out.push_back(p.name(i)); });
  std::sort(out.begin(), out.end());
  return out;
}

inline std::string format_subset(const FinitePoset& p, SubsetMask s) {
  std::string out = "{";
  bool first = true;
  for (const auto& n : subset_names(p, s)) {
    if (!first) out += ",";
    out += n;
    first = false;
  }
  return out + "}";
}

/// Elements and covers, e.g. "[a,b,c; a<c, b<c]".
inline std::string format_poset(const FinitePoset& p) {
  std::string out = "[";
  for (std::size_t i = 0; i < p.size(); ++i) out += (i ? "," : "") + p.name(i);
  std::string covers;
  for (std::size_t i = 0; i < p.size(); ++i)
    for_each_bit(p.lower_covers(i), [&](int j) { covers += (covers.empty() ? "" : ", ") + p.name(j) + "<" + p.name(i); });
  if (!covers.empty()) out += "; " + covers;
  return out + "]";
}

inline SubsetMask subset_from_names(const FinitePoset& p, const std::vector<std::string>& names) {
  SubsetMask s;
  for (const auto& n : names) s.bits |= bit(p.require_index(n));
  return s;
}

/// Re-expresses a subset of `from` as a subset of `to`, matching by name.
inline SubsetMask transport(const FinitePoset& from, const FinitePoset& to, SubsetMask s) {
  SubsetMask out;
  for_each_bit(s.bits, [&](int i) { out.bits |= bit(to.require_index(from.name(i))); });
  return out;
}

// ---------------------------------------------------------------------------
// Constructions

inline FinitePoset chain(std::size_t n) {
  std::vector<std::string> names;
  std::vector<Mask> below;
  for (std::size_t i = 0; i < n; ++i) {
    names.push_back(std::to_string(i));
    below.push_back(low_bits(i + 1));
  }
  return FinitePoset::from_relation(std::move(names), std::move(below));
}

inline FinitePoset antichain(const std::vector<std::string>& names) {
  std::vector<Mask> below;
  for (std::size_t i = 0; i < names.size(); ++i) below.push_back(bit(i));
  return FinitePoset::from_relation(names, std::move(below));
}

inline FinitePoset antichain(std::size_t n) {
  std::vector<std::string> names;
  for (std::size_t i = 0; i < n; ++i) names.push_back(std::to_string(i));
  return antichain(names);
}

inline FinitePoset point() { return chain(1); }

inline FinitePoset opposite(const FinitePoset& p) {
  std::vector<Mask> below;
  for (std::size_t i = 0; i < p.size(); ++i) below.push_back(p.up(i));
  return FinitePoset::from_relation(p.names(), std::move(below));
}

/// Same elements, no relations.
inline FinitePoset discretization(const FinitePoset& p) { return antichain(p.names()); }

/// Subposet on the elements of s with the induced order.
inline FinitePoset induced(const FinitePoset& p, SubsetMask s) {
  require_subset(p, s);
  const auto idx = bits_of(s.bits);
  std::vector<std::string> names;
  std::vector<Mask> below(idx.size(), 0);
  for (std::size_t a = 0; a < idx.size(); ++a) {
    names.push_back(p.name(idx[a]));
    for (std::size_t b = 0; b < idx.size(); ++b)
      if (p.leq(idx[b], idx[a])) below[a] |= bit(b);
  }
  return FinitePoset::from_relation(std::move(names), std::move(below));
}

inline FinitePoset product(const FinitePoset& p, const FinitePoset& q) {
  const std::size_t n = p.size() * q.size();
  if (n > FinitePoset::max_elements) throw InputError("product exceeds the element bound");
  std::vector<std::string> names;
  std::vector<Mask> below(n, 0);
  for (std::size_t a = 0; a < p.size(); ++a)
    for (std::size_t b = 0; b < q.size(); ++b)
      names.push_back("(" + p.name(a) + "," + q.name(b) + ")");
  for (std::size_t a = 0; a < p.size(); ++a)
    for (std::size_t b = 0; b < q.size(); ++b)
      for (std::size_t c = 0; c < p.size(); ++c)
        for (std::size_t d = 0; d < q.size(); ++d)
          if (p.leq(c, a) && q.leq(d, b)) below[a * q.size() + b] |= bit(c * q.size() + d);
  return FinitePoset::from_relation(std::move(names), std::move(below));
}

/// Disjoint union with every element of p below every element of q. Names
/// are kept when the two name sets are disjoint, otherwise prefixed "0:"/"1:".
inline FinitePoset join(const FinitePoset& p, const FinitePoset& q) {
  const std::size_t n = p.size() + q.size();
  if (n > FinitePoset::max_elements) throw InputError("join exceeds the element bound");
  bool clash = false;
  for (const auto& s : q.names()) clash = clash || p.index_of(s).has_value();
  std::vector<std::string> names;
  for (const auto& s : p.names()) names.push_back(clash ? "0:" + s : s);
  for (const auto& s : q.names()) names.push_back(clash ? "1:" + s : s);
  std::vector<Mask> below(n, 0);
  for (std::size_t i = 0; i < p.size(); ++i) below[i] = p.down(i);
  for (std::size_t i = 0; i < q.size(); ++i) below[p.size() + i] = (q.down(i) << p.size()) | p.all();
  return FinitePoset::from_relation(std::move(names), std::move(below));
}

/// Name of the cube vertex for a subset of {1..n}, e.g. "{}" or "{1,3}".
inline std::string cube_vertex_name(Mask subset) {
  std::string out = "{";
  bool first = true;
  for_each_bit(subset, [&](int i) {
    if (!first) out += ",";
    out += std::to_string(i + 1);
    first = false;
  });
  return out + "}";
}

namespace detail {
inline FinitePoset cube_impl(std::size_t n, bool drop_bottom) {
  if (n > 6) throw InputError("cube dimension " + std::to_string(n) + " exceeds the bound 6");
  std::vector<std::string> names;
  std::vector<Mask> subsets;
  for (Mask a = drop_bottom ? 1 : 0; a < bit(n); ++a) {
    names.push_back(cube_vertex_name(a));
    subsets.push_back(a);
  }
  std::vector<Mask> below(subsets.size(), 0);
  for (std::size_t i = 0; i < subsets.size(); ++i)
    for (std::size_t j = 0; j < subsets.size(); ++j)
      if ((subsets[j] & ~subsets[i]) == 0) below[i] |= bit(j);
  return FinitePoset::from_relation(std::move(names), std::move(below));
}
}  // namespace detail

/// Power set of {1..n} ordered by inclusion.
inline FinitePoset cube(std::size_t n) { return detail::cube_impl(n, false); }
/// Cube with the empty set removed.
inline FinitePoset punctured_cube(std::size_t n) { return detail::cube_impl(n, true); }

/// Index of the cube vertex for a subset of {1..n} (bit i <-> coordinate i+1).
inline int cube_index(const FinitePoset& c, Mask subset) {
  return c.require_index(cube_vertex_name(subset));
}

/// Two copies of [1] glued along the top: a < c, b < c.
inline FinitePoset spine() {
  return FinitePoset::from_covers({"a", "b", "c"}, {{"a", "c"}, {"b", "c"}});
}

// ---------------------------------------------------------------------------
// Monotone maps

/// True iff `image` is an order-preserving map src -> dst. Throws on a
/// length mismatch or an out-of-range index.
inline bool is_monotone(const FinitePoset& src, const FinitePoset& dst,
                        const std::vector<int>& image) {
  if (image.size() != src.size()) throw InputError("map image length does not match its source");
  for (int v : image)
    if (v < 0 || static_cast<std::size_t>(v) >= dst.size())
      throw InputError("map image index " + std::to_string(v) + " out of range");
  for (std::size_t i = 0; i < src.size(); ++i) {
    bool ok = true;
    for_each_bit(src.down(i), [&](int j) { ok = ok && dst.leq(image[j], image[i]); });
    if (!ok) return false;
  }
  return true;
}

struct MonotoneMap {
  FinitePoset src;
  FinitePoset dst;
  std::vector<int> image;

  static MonotoneMap make(FinitePoset src, FinitePoset dst, std::vector<int> image) {
    if (!is_monotone(src, dst, image)) throw InputError("map is not monotone");
    return {std::move(src), std::move(dst), std::move(image)};
  }
  static MonotoneMap identity(const FinitePoset& p) {
    std::vector<int> img(p.size());
    std::iota(img.begin(), img.end(), 0);
    return {p, p, std::move(img)};
  }
  /// Map given by element names: `by_name[src name] = dst name`.
  static MonotoneMap from_names(FinitePoset src, FinitePoset dst,
                                const std::map<std::string, std::string>& by_name) {
    std::vector<int> img(src.size());
    for (std::size_t i = 0; i < src.size(); ++i) {
      auto it = by_name.find(src.name(i));
      if (it == by_name.end()) throw InputError("map has no image for '" + src.name(i) + "'");
      img[i] = dst.require_index(it->second);
    }
    return make(std::move(src), std::move(dst), std::move(img));
  }

  int operator()(std::size_t i) const { return image[i]; }

  SubsetMask preimage(SubsetMask s) const {
    SubsetMask out;
    for (std::size_t i = 0; i < image.size(); ++i)
      if (s.contains(image[i])) out.bits |= bit(i);
    return out;
  }
  SubsetMask direct_image(SubsetMask s) const {
    SubsetMask out;
    for_each_bit(s.bits, [&](int i) { out.bits |= bit(image[i]); });
    return out;
  }
  bool injective() const {
    Mask seen = 0;
    for (int v : image) {
      if (has(seen, v)) return false;
      seen |= bit(v);
    }
    return true;
  }
  bool surjective() const { return direct_image({src.all()}).bits == dst.all(); }
  /// p <= q iff f(p) <= f(q).
  bool order_reflecting() const {
    for (std::size_t i = 0; i < src.size(); ++i)
      for (std::size_t j = 0; j < src.size(); ++j)
        if (dst.leq(image[i], image[j]) && !src.leq(i, j)) return false;
    return true;
  }
};

/// "a->x,b->y" in source order.
/// "[0,2,2,3]": an image array, one entry per source element.
inline std::string format_image(const std::vector<int>& image) {
  std::string s = "[";
  for (std::size_t i = 0; i < image.size(); ++i) s += (i ? "," : "") + std::to_string(image[i]);
  return s + "]";
}

inline std::string format_map(const MonotoneMap& f) {
  std::string out;
  for (std::size_t i = 0; i < f.src.size(); ++i)
    out += (i ? "," : "") + f.src.name(i) + "->" + f.dst.name(f.image[i]);
  return out;
}

/// g after f.
inline MonotoneMap compose(const MonotoneMap& g, const MonotoneMap& f) {
  if (!(f.dst == g.src)) throw InputError("composition of maps with mismatched endpoints");
  std::vector<int> img(f.src.size());
  for (std::size_t i = 0; i < img.size(); ++i) img[i] = g.image[f.image[i]];
  return {f.src, g.dst, std::move(img)};
}

/// p |-> (indicator of q <= p) over q in P, as a map into cube(|P|); bit k of
/// the vertex corresponds to element k of P.
inline MonotoneMap urysohn_cube_embedding(const FinitePoset& p) {
  auto c = cube(p.size());
  std::vector<int> img(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) img[i] = cube_index(c, p.down(i));
  return MonotoneMap::make(p, std::move(c), std::move(img));
}

// ---------------------------------------------------------------------------
// Isomorphism and enumeration up to isomorphism

/// An order isomorphism p -> q as an image array, if one exists.
inline std::optional<std::vector<int>> find_isomorphism(const FinitePoset& p, const FinitePoset& q) {
  const std::size_t n = p.size();
  if (q.size() != n) return std::nullopt;
  auto signature = [](const FinitePoset& x, std::size_t i) {
    return std::pair{popcount(x.down(i)), popcount(x.up(i))};
  };
  {
    std::vector<std::pair<int, int>> sp, sq;
    for (std::size_t i = 0; i < n; ++i) {
      sp.push_back(signature(p, i));
      sq.push_back(signature(q, i));
    }
    std::sort(sp.begin(), sp.end());
    std::sort(sq.begin(), sq.end());
    if (sp != sq) return std::nullopt;
  }
  std::vector<int> image(n, -1);
  Mask used = 0;
  std::function<bool(std::size_t)> rec = [&](std::size_t i) -> bool {
    if (i == n) return true;
    for (std::size_t j = 0; j < n; ++j) {
      if (has(used, j) || signature(p, i) != signature(q, j)) continue;
      bool ok = true;
      for (std::size_t k = 0; k < i && ok; ++k)
        ok = p.leq(k, i) == q.leq(image[k], j) && p.leq(i, k) == q.leq(j, image[k]);
      if (!ok) continue;
      image[i] = static_cast<int>(j);
      used |= bit(j);
      if (rec(i + 1)) return true;
      used &= ~bit(j);
    }
    return false;
  };
  if (!rec(0)) return std::nullopt;
  return image;
}

inline bool isomorphic(const FinitePoset& p, const FinitePoset& q) {
  return find_isomorphism(p, q).has_value();
}

/// Isomorphism-invariant key: the lexicographically least "below" table over
/// all relabelings that sort elements by (|down|, |up|).
inline std::vector<Mask> canonical_key(const FinitePoset& p) {
  const std::size_t n = p.size();
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  auto sig = [&](int i) { return std::pair{popcount(p.down(i)), popcount(p.up(i))}; };
  std::sort(order.begin(), order.end(), [&](int a, int b) { return sig(a) < sig(b); });
  std::vector<Mask> best;
  std::vector<int> position(n, -1), slot(n, -1);
  std::vector<Mask> current(n, 0);
  // Fill positions left to right; position k may hold any unused element
  // whose signature equals that of order[k].
  std::function<void(std::size_t, bool)> rec = [&](std::size_t k, bool tied) {
    if (k == n) {
      if (best.empty() || current < best) best = current;
      return;
    }
    for (std::size_t e = 0; e < n; ++e) {
      if (position[e] != -1 || sig(static_cast<int>(e)) != sig(order[k])) continue;
      position[e] = static_cast<int>(k);
      slot[k] = static_cast<int>(e);
      Mask row = 0;
      for (std::size_t j = 0; j <= k; ++j)
        if (p.leq(slot[j], e)) row |= bit(j);
      current[k] = row;
      bool still_tied = tied;
      bool prune = false;
      if (tied && !best.empty()) {
        if (row > best[k]) prune = true;
        else if (row < best[k]) still_tied = false;
      }
      if (!prune) rec(k + 1, still_tied);
      position[e] = -1;
    }
  };
  rec(0, true);
  return best;
}

/// One representative per isomorphism class of posets with n elements.
/// Representatives are named "0".."n-1".
inline std::vector<FinitePoset> enumerate_posets(std::size_t n) {
  if (n > 7) throw InputError("poset enumeration is limited to 7 elements");
  std::map<std::vector<Mask>, FinitePoset> reps;
  std::vector<Mask> below(n, 0);
  std::vector<std::string> names;
  for (std::size_t i = 0; i < n; ++i) names.push_back(std::to_string(i));
  std::function<void(std::size_t)> rec = [&](std::size_t j) {
    if (j == n) {
      auto p = FinitePoset::from_relation(names, below);
      auto key = canonical_key(p);
      reps.emplace(std::move(key), std::move(p));
      return;
    }
    // Strict down-set of element j: any downset of the elements placed so far.
    std::function<void(std::size_t, Mask)> choose = [&](std::size_t i, Mask d) {
      if (i == j) {
        below[j] = d | bit(j);
        rec(j + 1);
        return;
      }
      choose(i + 1, d);
      if ((below[i] & ~bit(i) & ~d) == 0) choose(i + 1, d | bit(i));
    };
    choose(0, 0);
  };
  rec(0);
  std::vector<FinitePoset> out;
  for (auto& [k, p] : reps) out.push_back(std::move(p));
  return out;
}

/// All posets with at most n elements, up to isomorphism, smallest first.
inline std::vector<FinitePoset> enumerate_posets_up_to(std::size_t n) {
  std::vector<FinitePoset> out;
  for (std::size_t k = 0; k <= n; ++k) {
    auto ps = enumerate_posets(k);
    out.insert(out.end(), ps.begin(), ps.end());
  }
  return out;
}

}  // namespace patchwork
