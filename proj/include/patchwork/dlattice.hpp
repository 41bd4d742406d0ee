#pragma once

// Finite distributive lattices in Birkhoff normal form: every lattice is the
// lattice of downsets of its poset of join-irreducibles, with meet and join
// given by intersection and union of masks.

#include <functional>
#include <optional>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "patchwork/poset.hpp"

namespace patchwork {

class DistLattice {
 public:
  static constexpr std::size_t max_elements = std::size_t{1} << 20;

  DistLattice() = default;

  /// The lattice of all downsets of `base` (the frame of opens of the finite
  /// space `base`).
  static DistLattice of_downsets(FinitePoset base) {
    DistLattice d;
    d.elements_ = downsets(base, max_elements);
    d.base_ = std::move(base);
    d.index_.reserve(d.elements_.size());
    for (std::size_t i = 0; i < d.elements_.size(); ++i)
      d.index_.emplace(d.elements_[i].bits, static_cast<int>(i));
    return d;
  }

  /// Same lattice with caller-supplied element labels (one per element).
  DistLattice with_labels(std::vector<std::string> labels) const {
    if (labels.size() != size()) throw InputError("label count does not match lattice size");
    DistLattice d = *this;
    d.labels_ = std::move(labels);
    return d;
  }

  const FinitePoset& base() const { return base_; }
  std::size_t size() const { return elements_.size(); }
  SubsetMask element(std::size_t i) const { return elements_[i]; }
  const std::vector<SubsetMask>& elements() const { return elements_; }

  std::optional<int> index_of(SubsetMask s) const {
    auto it = index_.find(s.bits);
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }
  int require_index(SubsetMask s) const {
    if (auto i = index_of(s)) return *i;
    throw InputError("mask is not an element of the lattice");
  }

  int bottom() const { return 0; }
  int top() const { return static_cast<int>(size()) - 1; }
  int meet(int a, int b) const { return index_.at(elements_[a].bits & elements_[b].bits); }
  int join(int a, int b) const { return index_.at(elements_[a].bits | elements_[b].bits); }
  bool leq(int a, int b) const { return elements_[a].subset_of(elements_[b]); }

  std::string label(std::size_t i) const {
    return labels_.empty() ? format_subset(base_, elements_[i]) : labels_[i];
  }
  std::vector<std::string> labels() const {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < size(); ++i) out.push_back(label(i));
    return out;
  }

 private:
  FinitePoset base_;
  std::vector<SubsetMask> elements_;
  std::unordered_map<Mask, int> index_;
  std::vector<std::string> labels_;
};

inline DistLattice downset_lattice(const FinitePoset& p) { return DistLattice::of_downsets(p); }

/// The lattice's own order as a poset (labels as names); at most 64 elements.
inline FinitePoset as_poset(const DistLattice& d) {
  if (d.size() > FinitePoset::max_elements)
    throw InputError("lattice with " + std::to_string(d.size()) + " elements is too large to view as a poset");
  std::vector<Mask> below(d.size(), 0);
  for (std::size_t a = 0; a < d.size(); ++a)
    for (std::size_t b = 0; b < d.size(); ++b)
      if (d.leq(static_cast<int>(b), static_cast<int>(a))) below[a] |= bit(b);
  return FinitePoset::from_relation(d.labels(), std::move(below));
}

/// Join-irreducible elements (exactly one lower cover), ordered as in the
/// lattice and named by their labels. Derived from the lattice order alone.
inline FinitePoset join_irreducibles(const DistLattice& d) {
  std::vector<int> ji;
  for (std::size_t a = 0; a < d.size(); ++a) {
    int covers = 0;
    for (std::size_t b = 0; b < d.size() && covers < 2; ++b) {
      if (a == b || !d.leq(static_cast<int>(b), static_cast<int>(a))) continue;
      bool is_cover = true;
      for (std::size_t c = 0; c < d.size() && is_cover; ++c)
        if (c != a && c != b && d.leq(static_cast<int>(b), static_cast<int>(c)) &&
            d.leq(static_cast<int>(c), static_cast<int>(a)))
          is_cover = false;
      if (is_cover) ++covers;
    }
    if (covers == 1) ji.push_back(static_cast<int>(a));
  }
  std::vector<std::string> names;
  std::vector<Mask> below(ji.size(), 0);
  for (std::size_t i = 0; i < ji.size(); ++i) {
    names.push_back(d.label(ji[i]));
    for (std::size_t j = 0; j < ji.size(); ++j)
      if (d.leq(ji[j], ji[i])) below[i] |= bit(j);
  }
  return FinitePoset::from_relation(std::move(names), std::move(below));
}

inline bool isomorphic(const DistLattice& a, const DistLattice& b) {
  return isomorphic(a.base(), b.base());
}

// ---------------------------------------------------------------------------
// Validated input from an explicit order table

struct LatticeTable {
  std::vector<std::string> names;
  std::vector<std::vector<char>> leq;  // leq[a][b] iff a <= b
};

struct BirkhoffForm {
  DistLattice lattice;
  std::vector<int> element_of;  // table index -> lattice index
};

/// Validates a finite order table as a distributive lattice and re-derives
/// its Birkhoff form. Rejects non-lattices and reports a violating triple for
/// non-distributive ones.
inline BirkhoffForm birkhoff_form(const LatticeTable& t) {
  const std::size_t n = t.names.size();
  if (n == 0) throw InputError("a lattice needs at least one element");
  if (n > 512) throw InputError("lattice table is too large");
  if (t.leq.size() != n) throw InputError("leq_table size does not match element count");
  for (const auto& row : t.leq)
    if (row.size() != n) throw InputError("leq_table is not square");
  auto le = [&](std::size_t a, std::size_t b) { return t.leq[a][b] != 0; };
  for (std::size_t a = 0; a < n; ++a) {
    if (!le(a, a)) throw InputError("leq_table is not reflexive at '" + t.names[a] + "'");
    for (std::size_t b = 0; b < n; ++b) {
      if (a != b && le(a, b) && le(b, a))
        throw InputError("leq_table is not antisymmetric at '" + t.names[a] + "', '" + t.names[b] + "'");
      for (std::size_t c = 0; c < n; ++c)
        if (le(a, b) && le(b, c) && !le(a, c))
          throw InputError("leq_table is not transitive at '" + t.names[a] + "' <= '" + t.names[b] +
                           "' <= '" + t.names[c] + "'");
    }
  }
  // Meets and joins: the greatest common lower bound c is the one with as
  // many elements below it as there are common lower bounds.
  std::vector<int> n_below(n, 0), n_above(n, 0);
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      if (le(b, a)) ++n_below[a];
      if (le(a, b)) ++n_above[a];
    }
  std::vector<std::vector<int>> meet(n, std::vector<int>(n, -1)), join(n, std::vector<int>(n, -1));
  for (std::size_t a = 0; a < n; ++a)
    for (std::size_t b = 0; b < n; ++b) {
      int lower = 0, upper = 0;
      for (std::size_t c = 0; c < n; ++c) {
        if (le(c, a) && le(c, b)) ++lower;
        if (le(a, c) && le(b, c)) ++upper;
      }
      for (std::size_t c = 0; c < n; ++c) {
        if (le(c, a) && le(c, b) && n_below[c] == lower) meet[a][b] = static_cast<int>(c);
        if (le(a, c) && le(b, c) && n_above[c] == upper) join[a][b] = static_cast<int>(c);
      }
      if (meet[a][b] < 0 || join[a][b] < 0)
        throw InputError("not a lattice: '" + t.names[a] + "' and '" + t.names[b] +
                         "' lack a " + (meet[a][b] < 0 ? "meet" : "join"));
    }
  for (std::size_t x = 0; x < n; ++x)
    for (std::size_t y = 0; y < n; ++y)
      for (std::size_t z = 0; z < n; ++z)
        if (meet[x][join[y][z]] != join[meet[x][y]][meet[x][z]])
          throw InputError("not distributive: x='" + t.names[x] + "', y='" + t.names[y] + "', z='" +
                           t.names[z] + "' violate x^(y v z) = (x^y) v (x^z)");
  // Join-irreducibles: exactly one lower cover.
  std::vector<int> ji;
  for (std::size_t a = 0; a < n; ++a) {
    int covers = 0;
    for (std::size_t b = 0; b < n; ++b) {
      if (a == b || !le(b, a)) continue;
      bool is_cover = true;
      for (std::size_t c = 0; c < n && is_cover; ++c)
        if (c != a && c != b && le(b, c) && le(c, a)) is_cover = false;
      if (is_cover) ++covers;
    }
    if (covers == 1) ji.push_back(static_cast<int>(a));
  }
  if (ji.size() > FinitePoset::max_elements) throw InputError("too many join-irreducibles");
  std::vector<std::string> jnames;
  std::vector<Mask> below(ji.size(), 0);
  for (std::size_t i = 0; i < ji.size(); ++i) {
    jnames.push_back(t.names[ji[i]]);
    for (std::size_t j = 0; j < ji.size(); ++j)
      if (le(ji[j], ji[i])) below[i] |= bit(j);
  }
  auto base = FinitePoset::from_relation(jnames, below);
  auto lattice = DistLattice::of_downsets(base);
  if (lattice.size() != n)
    throw InternalError("Birkhoff representation has the wrong size");
  std::vector<int> element_of(n);
  std::vector<std::string> labels(n);
  for (std::size_t a = 0; a < n; ++a) {
    SubsetMask m;
    for (std::size_t i = 0; i < ji.size(); ++i)
      if (le(ji[i], a)) m.bits |= bit(base.require_index(t.names[ji[i]]));
    const int idx = lattice.require_index(m);
    element_of[a] = idx;
    labels[idx] = t.names[a];
  }
  return {lattice.with_labels(std::move(labels)), std::move(element_of)};
}

inline FinitePoset join_irreducibles(const LatticeTable& t) { return birkhoff_form(t).lattice.base(); }

// ---------------------------------------------------------------------------
// Constructions

struct BooleanizedLattice {
  DistLattice lattice;
  std::vector<int> embedding;  // element of D -> element of Bool(D)
};

/// The Boolean lattice on all subsets of the join-irreducibles, with the
/// canonical embedding of D.
inline BooleanizedLattice booleanize(const DistLattice& d) {
  auto b = DistLattice::of_downsets(discretization(d.base()));
  std::vector<int> emb(d.size());
  for (std::size_t i = 0; i < d.size(); ++i)
    emb[i] = b.require_index(transport(d.base(), b.base(), d.element(i)));
  return {std::move(b), std::move(emb)};
}

struct DualLattice {
  DistLattice lattice;
  std::vector<int> correspondence;  // order-reversing bijection D -> D^op
};

/// D^op in Birkhoff form: base is the opposite poset, masks complemented.
inline DualLattice hochster_dual(const DistLattice& d) {
  auto op = DistLattice::of_downsets(opposite(d.base()));
  std::vector<int> corr(d.size());
  for (std::size_t i = 0; i < d.size(); ++i)
    corr[i] = op.require_index(transport(d.base(), op.base(), complement(d.base(), d.element(i))));
  return {std::move(op), std::move(corr)};
}

/// Free bounded distributive lattice on n generators, as downsets of cube(n).
inline DistLattice free_bounded_dlattice(std::size_t n) {
  if (n > 4) throw InputError("free distributive lattice limited to 4 generators");
  return DistLattice::of_downsets(cube(n));
}

// ---------------------------------------------------------------------------
// Homomorphisms

enum class HomFlavor { bounded, lower_bounded };

struct LatticeHom {
  DistLattice src;
  DistLattice dst;
  std::vector<int> image;
  HomFlavor flavor = HomFlavor::bounded;
};

struct HomCheck {
  bool ok = true;
  std::string violation;
  std::optional<std::pair<int, int>> pair;  // violating source elements
  explicit operator bool() const { return ok; }
};

inline HomCheck hom_check(const LatticeHom& h) {
  if (h.image.size() != h.src.size()) throw InputError("hom image length does not match source");
  for (int v : h.image)
    if (v < 0 || static_cast<std::size_t>(v) >= h.dst.size()) throw InputError("hom image out of range");
  const auto& s = h.src;
  const auto& t = h.dst;
  if (h.image[s.bottom()] != t.bottom()) return {false, "bottom not preserved", std::pair{s.bottom(), s.bottom()}};
  if (h.flavor == HomFlavor::bounded && h.image[s.top()] != t.top())
    return {false, "top not preserved", std::pair{s.top(), s.top()}};
  for (int a = 0; a < static_cast<int>(s.size()); ++a)
    for (int b = a + 1; b < static_cast<int>(s.size()); ++b) {
      if (h.image[s.meet(a, b)] != t.meet(h.image[a], h.image[b])) return {false, "meet not preserved", std::pair{a, b}};
      if (h.image[s.join(a, b)] != t.join(h.image[a], h.image[b])) return {false, "join not preserved", std::pair{a, b}};
    }
  return {};
}

/// Downset-preimage hom O(Q) -> O(P) of a monotone map P -> Q.
inline LatticeHom stone_of_monotone(const MonotoneMap& f) {
  auto src = DistLattice::of_downsets(f.dst);
  auto dst = DistLattice::of_downsets(f.src);
  std::vector<int> img(src.size());
  for (std::size_t i = 0; i < src.size(); ++i) img[i] = dst.require_index(f.preimage(src.element(i)));
  return {std::move(src), std::move(dst), std::move(img), HomFlavor::bounded};
}

/// All homs of the given flavor, by backtracking in element order.
inline std::vector<std::vector<int>> enumerate_homs(const DistLattice& s, const DistLattice& t, HomFlavor flavor) {
  const int n = static_cast<int>(s.size());
  std::vector<std::vector<std::pair<int, int>>> joins_to(n);
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) joins_to[s.join(a, b)].emplace_back(a, b);
  std::vector<std::vector<int>> out;
  std::vector<int> img(n, -1);
  std::function<void(int)> rec = [&](int k) {
    if (k == n) {
      out.push_back(img);
      return;
    }
    for (int v = 0; v < static_cast<int>(t.size()); ++v) {
      if (k == s.bottom() && v != t.bottom()) continue;
      if (k == s.top() && flavor == HomFlavor::bounded && v != t.top()) continue;
      img[k] = v;
      bool ok = true;
      for (int a = 0; a < k && ok; ++a) {
        const int m = s.meet(a, k);
        if (img[m] != t.meet(img[a], v)) ok = false;
      }
      for (auto [a, b] : joins_to[k])
        if (ok && t.join(img[a], img[b]) != v) ok = false;
      if (ok) rec(k + 1);
    }
    img[k] = -1;
  };
  rec(0);
  return out;
}

/// All monotone maps p -> q, as image arrays.
inline std::vector<std::vector<int>> enumerate_monotone_maps(const FinitePoset& p, const FinitePoset& q) {
  std::vector<std::vector<int>> out;
  std::vector<int> img(p.size(), 0);
  std::function<void(std::size_t)> rec = [&](std::size_t i) {
    if (i == p.size()) {
      out.push_back(img);
      return;
    }
    for (std::size_t v = 0; v < q.size(); ++v) {
      bool ok = true;
      for_each_bit(p.down(i) & ~bit(i), [&](int j) { ok = ok && q.leq(img[j], v); });
      if (!ok) continue;
      img[i] = static_cast<int>(v);
      rec(i + 1);
    }
  };
  rec(0);
  return out;
}

}  // namespace patchwork
