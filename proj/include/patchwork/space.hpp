#pragma once

// Finite T0 spaces. Opens are the downward closed sets, closed sets the
// upward closed ones, and saturated compacts again the downsets.

#include <algorithm>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "patchwork/dlattice.hpp"
#include "patchwork/frame.hpp"
#include "patchwork/vsheaf.hpp"

namespace patchwork {

using FiniteSpace = FinitePoset;

inline std::vector<SubsetMask> opens(const FiniteSpace& x) { return downsets(x); }
inline std::vector<SubsetMask> closed_sets(const FiniteSpace& x) { return upsets(x); }
/// Every subset of a finite space is compact, and the saturated ones are the
/// intersections of opens, i.e. the downsets.
inline std::vector<SubsetMask> saturated_compacts(const FiniteSpace& x) { return downsets(x); }

// ---------------------------------------------------------------------------
// Scott open filters and Hofmann-Mislove

/// A filter of opens, as a list of opens sorted by mask.
struct ScottFilter {
  std::vector<SubsetMask> members;
  void normalize() {
    std::sort(members.begin(), members.end(), [](SubsetMask a, SubsetMask b) { return a.bits < b.bits; });
  }
  friend bool operator==(const ScottFilter&, const ScottFilter&) = default;
};

/// Nonempty, upward closed, meet-closed families of opens. Scott openness is
/// automatic for a finite frame.
inline std::vector<ScottFilter> scott_open_filters(const FiniteSpace& x) {
  if (x.size() > 5) throw InputError("Scott filter enumeration is limited to 5 points");
  const auto f = downset_lattice(x);
  const int n = static_cast<int>(f.size());
  std::vector<ScottFilter> out;
  std::vector<char> in(n, 0);
  // Frame elements are indexed so that a < b implies index(a) < index(b);
  // deciding from the top down, an element may join only if everything
  // above it already has.
  std::function<void(int)> rec = [&](int e) {
    if (e < 0) {
      std::vector<int> members;
      for (int a = 0; a < n; ++a)
        if (in[a]) members.push_back(a);
      if (members.empty()) return;
      for (int a : members)
        for (int b : members)
          if (!in[f.meet(a, b)]) return;
      ScottFilter s;
      for (int a : members) s.members.push_back(f.element(a));
      s.normalize();
      out.push_back(std::move(s));
      return;
    }
    rec(e - 1);
    bool allowed = true;
    for (int a = e + 1; a < n && allowed; ++a)
      if (f.leq(e, a) && !in[a]) allowed = false;
    if (allowed) {
      in[e] = 1;
      rec(e - 1);
      in[e] = 0;
    }
  };
  rec(n - 1);
  return out;
}

/// The filter of opens containing K.
inline ScottFilter neighbourhood_filter(const FiniteSpace& x, SubsetMask k) {
  ScottFilter s;
  for (SubsetMask u : opens(x))
    if (k.subset_of(u)) s.members.push_back(u);
  s.normalize();
  return s;
}

struct HofmannMisloveReport {
  bool ok = true;
  std::size_t compacts = 0;
  std::size_t filters = 0;
  std::string failure;
  explicit operator bool() const { return ok; }
};

/// K |-> {opens containing K} is an order isomorphism Q(X)^op -> OFilt(O(X)).
inline HofmannMisloveReport hofmann_mislove_check(const FiniteSpace& x) {
  HofmannMisloveReport r;
  const auto qs = saturated_compacts(x);
  const auto filters = scott_open_filters(x);
  r.compacts = qs.size();
  r.filters = filters.size();
  if (qs.size() != filters.size()) {
    r.ok = false;
    r.failure = "counts differ";
    return r;
  }
  std::vector<ScottFilter> images;
  for (SubsetMask k : qs) {
    images.push_back(neighbourhood_filter(x, k));
    if (std::find(filters.begin(), filters.end(), images.back()) == filters.end()) {
      r.ok = false;
      r.failure = "filter of " + format_subset(x, k) + " is not among the enumerated filters";
      return r;
    }
  }
  auto contains = [](const ScottFilter& a, const ScottFilter& b) {
    return std::includes(a.members.begin(), a.members.end(), b.members.begin(), b.members.end(),
                         [](SubsetMask p, SubsetMask q) { return p.bits < q.bits; });
  };
  for (std::size_t a = 0; a < qs.size(); ++a)
    for (std::size_t b = 0; b < qs.size(); ++b) {
      if (a != b && images[a] == images[b]) {
        r.ok = false;
        r.failure = "two compacts share a filter";
        return r;
      }
      if (qs[a].subset_of(qs[b]) != contains(images[a], images[b])) {
        r.ok = false;
        r.failure = "order not reversed between " + format_subset(x, qs[a]) + " and " + format_subset(x, qs[b]);
        return r;
      }
    }
  return r;
}

// ---------------------------------------------------------------------------
// Elementary compacts and the patch topology

/// All unions of a closed set and a saturated compact set.
inline std::vector<SubsetMask> elementary_compacts(const FiniteSpace& x) {
  std::vector<Mask> all;
  const auto ups = closed_sets(x);
  const auto downs = saturated_compacts(x);
  for (SubsetMask c : ups)
    for (SubsetMask s : downs) all.push_back(c.bits | s.bits);
  std::sort(all.begin(), all.end(), [](Mask a, Mask b) {
    return popcount(a) != popcount(b) ? popcount(a) < popcount(b) : a < b;
  });
  all.erase(std::unique(all.begin(), all.end()), all.end());
  std::vector<SubsetMask> out;
  for (Mask m : all) out.push_back(SubsetMask{m});
  for (SubsetMask a : out)
    for (SubsetMask b : out)
      if (!std::binary_search(all.begin(), all.end(), a.bits | b.bits, [](Mask p, Mask q) {
            return popcount(p) != popcount(q) ? popcount(p) < popcount(q) : p < q;
          }))
        throw InternalError("elementary compacts not closed under unions");
  return out;
}

/// Largest closed (upward closed) subset of s.
inline SubsetMask closed_part(const FiniteSpace& x, SubsetMask s) {
  return SubsetMask{s.bits & ~down_closure(x, complement(x, s)).bits};
}

/// Largest saturated compact (downward closed) subset of s.
inline SubsetMask compact_part(const FiniteSpace& x, SubsetMask s) {
  return SubsetMask{s.bits & ~up_closure(x, complement(x, s)).bits};
}

inline bool is_elementary(const FiniteSpace& x, SubsetMask s) {
  return (closed_part(x, s).bits | compact_part(x, s).bits) == s.bits;
}

struct PatchWitness {
  SubsetMask subset;
  std::vector<SubsetMask> family;  // elementary compacts whose intersection is subset
};

struct PatchGeneration {
  bool ok = true;
  std::vector<PatchWitness> witnesses;  // one per subset, in mask order
  std::optional<SubsetMask> failure;
  explicit operator bool() const { return ok; }
};

/// Every subset is an intersection of elementary compacts. For each point
/// outside the subset the witness holds the first elementary compact that
/// contains the subset and misses the point.
inline PatchGeneration patch_generation_check(const FiniteSpace& x) {
  if (x.size() > 6) throw InputError("patch generation check is limited to 6 points");
  const auto elem = elementary_compacts(x);
  PatchGeneration r;
  for (Mask s = 0; s <= x.all(); ++s) {
    PatchWitness w{SubsetMask{s}, {}};
    Mask meet = x.all();
    for (int p : bits_of(x.all() & ~s)) {
      if (!has(meet, p)) continue;
      for (SubsetMask e : elem)
        if ((e.bits & s) == s && !has(e.bits, p)) {
          w.family.push_back(e);
          meet &= e.bits;
          break;
        }
    }
    if (w.family.empty()) w.family.push_back(SubsetMask{x.all()});
    if (meet != s && r.ok) {
      r.ok = false;
      r.failure = SubsetMask{s};
    }
    r.witnesses.push_back(std::move(w));
    if (x.all() == s) break;
  }
  return r;
}

/// The patch space: same points, discrete order, with the identity
/// point bijection (x index -> patch index).
struct PatchSpace {
  FiniteSpace space;
  std::vector<int> point_map;
};

inline PatchSpace patch(const FiniteSpace& x) {
  PatchSpace p{discretization(x), {}};
  for (std::size_t i = 0; i < x.size(); ++i) p.point_map.push_back(p.space.require_index(x.name(i)));
  return p;
}

// ---------------------------------------------------------------------------
// One-point compactification and de Groot duality

struct OnePoint {
  FiniteSpace space;
  MonotoneMap inclusion;  // open inclusion X -> X+
  int top = -1;           // the added point
};

inline std::string fresh_name(const FinitePoset& x, const std::string& base) {
  std::string name = base;
  for (int k = 1; x.index_of(name); ++k) name = base + std::to_string(k);
  return name;
}

/// X+ : a new point above everything. Checks O(X+) = O(X) + new top and
/// Q(X+) = Q(X) + new bottom (Q ordered by reverse inclusion).
inline OnePoint one_point(const FiniteSpace& x) {
  if (x.size() + 1 > FinitePoset::max_elements) throw InputError("one-point space exceeds the element bound");
  const std::string t = fresh_name(x, "inf");
  auto names = x.names();
  names.push_back(t);
  std::vector<Mask> below(names.size());
  for (std::size_t i = 0; i < x.size(); ++i) below[i] = x.down(i);
  below[x.size()] = low_bits(names.size());
  auto plus = FinitePoset::from_relation(std::move(names), std::move(below));
  std::vector<int> img;
  for (std::size_t i = 0; i < x.size(); ++i) img.push_back(plus.require_index(x.name(i)));
  OnePoint op{plus, MonotoneMap::make(x, plus, std::move(img)), plus.require_index(t)};

  std::vector<Mask> expected;
  for (SubsetMask u : opens(x)) expected.push_back(op.inclusion.direct_image(u).bits);
  expected.push_back(plus.all());
  std::vector<Mask> got;
  for (SubsetMask u : opens(plus)) got.push_back(u.bits);
  std::sort(expected.begin(), expected.end());
  std::sort(got.begin(), got.end());
  if (expected != got) throw InternalError("opens of X+ are not the opens of X plus a top");
  // The whole space is the only new saturated compact, below all others in
  // the reverse inclusion order; the rest are the saturated compacts of X.
  for (SubsetMask k : saturated_compacts(plus))
    if (k.bits != plus.all() && has(k.bits, op.top)) throw InternalError("new saturated compact besides X+");
  return op;
}

/// Opposite order: opens of the dual are the complements of saturated
/// compacts of X.
inline FiniteSpace de_groot_dual(const FiniteSpace& x) { return opposite(x); }

/// Sorted masks of a family transported to another poset on the same names.
inline std::vector<Mask> transport_family(const FinitePoset& from, const FinitePoset& to,
                                          const std::vector<SubsetMask>& fam) {
  std::vector<Mask> out;
  for (SubsetMask s : fam) out.push_back(transport(from, to, s).bits);
  std::sort(out.begin(), out.end());
  return out;
}

struct DualityReport {
  bool involution = false;
  bool swaps_families = false;
  bool commutes_with_patch = false;
  explicit operator bool() const { return involution && swaps_families && commutes_with_patch; }
};

inline DualityReport de_groot_check(const FiniteSpace& x) {
  const auto d = de_groot_dual(x);
  DualityReport r;
  r.involution = de_groot_dual(d) == x;
  auto sorted = [](const std::vector<SubsetMask>& fam) {
    std::vector<Mask> out;
    for (SubsetMask s : fam) out.push_back(s.bits);
    std::sort(out.begin(), out.end());
    return out;
  };
  r.swaps_families = transport_family(d, x, closed_sets(d)) == sorted(saturated_compacts(x)) &&
                     transport_family(d, x, saturated_compacts(d)) == sorted(closed_sets(x));
  r.commutes_with_patch = patch(d).space == patch(x).space;
  return r;
}

// ---------------------------------------------------------------------------
// Subspaces

/// A monotone injection S -> X is a perfect subspace when the opens of S are
/// exactly the traces of opens of X.
inline bool perfect_subspace_check(const MonotoneMap& i) {
  if (!i.injective()) return false;
  std::vector<Mask> traces;
  for (SubsetMask u : opens(i.dst)) traces.push_back(i.preimage(u).bits);
  std::sort(traces.begin(), traces.end());
  traces.erase(std::unique(traces.begin(), traces.end()), traces.end());
  std::vector<Mask> own;
  for (SubsetMask u : opens(i.src)) own.push_back(u.bits);
  std::sort(own.begin(), own.end());
  return traces == own;
}

/// Induced nucleus of the subspace S on O(X): U |-> interior(U + (X - S)).
inline Nucleus subspace_nucleus(const FramePtr& frame, SubsetMask s) {
  const auto& x = frame->base();
  require_subset(x, s);
  std::vector<int> t(frame->size());
  for (int u = 0; u < static_cast<int>(frame->size()); ++u)
    t[u] = frame->require_index(interior(x, SubsetMask{frame->element(u).bits | (x.all() & ~s.bits)}));
  return Nucleus::make(frame, std::move(t));
}

// ---------------------------------------------------------------------------
// Reports

struct SpaceReport {
  std::size_t points = 0;
  std::size_t opens = 0;
  std::size_t closed = 0;
  std::size_t saturated_compact = 0;
  std::size_t elementary = 0;
  std::size_t patch_closed = 0;
  std::size_t scott_filters = 0;  // 0 when the space is too large to enumerate
  bool hofmann_mislove = false;
  bool patch_generation = false;
};

inline SpaceReport space_report(const FiniteSpace& x) {
  SpaceReport r;
  r.points = x.size();
  r.opens = opens(x).size();
  r.closed = closed_sets(x).size();
  r.saturated_compact = saturated_compacts(x).size();
  r.elementary = elementary_compacts(x).size();
  const auto p = patch(x).space;
  r.patch_closed = closed_sets(p).size();
  if (x.size() <= 5) {
    r.scott_filters = scott_open_filters(x).size();
    r.hofmann_mislove = static_cast<bool>(hofmann_mislove_check(x));
  }
  if (x.size() <= 6) r.patch_generation = static_cast<bool>(patch_generation_check(x));
  return r;
}

// ---------------------------------------------------------------------------
// K-sheaf values

struct KSheafTable {
  std::vector<SubsetMask> compacts;
  std::vector<std::size_t> dims;
};

/// K |-> dim of sections over the saturated compact (hence open) K, with the
/// K-sheaf axioms checked: value 0 on the empty set and the union square
/// F(K u L) -> F(K), F(L) -> F(K n L) a pullback.
inline KSheafTable ksheaf_value_table(const VecSheaf& f) {
  const auto& x = f.space();
  KSheafTable t;
  t.compacts = saturated_compacts(x);
  for (SubsetMask k : t.compacts) t.dims.push_back(sections(f, k).dim());
  if (t.dims.front() != 0) throw InputError("K-sheaf value on the empty set is nonzero");
  for (SubsetMask k : t.compacts)
    for (SubsetMask l : t.compacts) {
      if (l.bits <= k.bits) continue;
      const SubsetMask un{k.bits | l.bits}, in{k.bits & l.bits};
      const auto r = bicartesian_square_check(restrict_sections(f, un, k), restrict_sections(f, un, l),
                                              restrict_sections(f, k, in), restrict_sections(f, l, in));
      if (!r.pullback)
        throw InputError("union square over " + format_subset(x, k) + ", " + format_subset(x, l) +
                         " is not a pullback");
    }
  return t;
}

}  // namespace patchwork
