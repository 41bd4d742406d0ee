#pragma once

// Finite frames (finite distributive lattices viewed as frames): Heyting
// implication, nuclei and the sublocales they encode, frame congruences,
// and the open-complement isomorphism for S and S v C.

#include <algorithm>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "patchwork/dlattice.hpp"

namespace patchwork {

using Frame = DistLattice;
using FramePtr = std::shared_ptr<const Frame>;

inline FramePtr share(Frame f) { return std::make_shared<const Frame>(std::move(f)); }

/// Largest W with W ^ U <= V: the interior of (complement U) u V.
inline int heyting(const Frame& f, int u, int v) {
  const auto& b = f.base();
  const SubsetMask s{(b.all() & ~f.element(u).bits) | f.element(v).bits};
  return f.require_index(interior(b, s));
}

struct NucleusLaws {
  bool inflationary = true;
  bool idempotent = true;
  bool meet_preserving = true;
  std::string violation;
  explicit operator bool() const { return inflationary && idempotent && meet_preserving; }
};

inline NucleusLaws check_nucleus_laws(const Frame& f, const std::vector<int>& table) {
  NucleusLaws laws;
  const int n = static_cast<int>(f.size());
  if (static_cast<int>(table.size()) != n) throw InputError("nucleus table length does not match the frame");
  for (int v : table)
    if (v < 0 || v >= n) throw InputError("nucleus table entry out of range");
  for (int u = 0; u < n && laws; ++u) {
    if (!f.leq(u, table[u])) {
      laws.inflationary = false;
      laws.violation = "not inflationary at " + f.label(u);
    } else if (table[table[u]] != table[u]) {
      laws.idempotent = false;
      laws.violation = "not idempotent at " + f.label(u);
    }
  }
  for (int u = 0; u < n && laws; ++u)
    for (int v = u + 1; v < n && laws; ++v)
      if (table[f.meet(u, v)] != f.meet(table[u], table[v])) {
        laws.meet_preserving = false;
        laws.violation = "meet not preserved at " + f.label(u) + ", " + f.label(v);
      }
  return laws;
}

/// Inflationary, idempotent, meet-preserving endomap of a finite frame.
class Nucleus {
 public:
  static Nucleus make(FramePtr frame, std::vector<int> table) {
    if (auto laws = check_nucleus_laws(*frame, table); !laws)
      throw InputError("not a nucleus: " + laws.violation);
    return Nucleus(std::move(frame), std::move(table));
  }

  const Frame& frame() const { return *frame_; }
  const FramePtr& frame_ptr() const { return frame_; }
  const std::vector<int>& table() const { return table_; }
  int operator()(int u) const { return table_[u]; }

  bool is_fixed(int u) const { return table_[u] == u; }
  std::vector<int> fixed_points() const {
    std::vector<int> out;
    for (int u = 0; u < static_cast<int>(table_.size()); ++u)
      if (is_fixed(u)) out.push_back(u);
    return out;
  }

  friend bool operator==(const Nucleus& a, const Nucleus& b) { return a.table_ == b.table_; }
  /// Pointwise order.
  bool leq(const Nucleus& o) const {
    for (std::size_t u = 0; u < table_.size(); ++u)
      if (!frame_->leq(table_[u], o.table_[u])) return false;
    return true;
  }

 private:
  Nucleus(FramePtr frame, std::vector<int> table) : frame_(std::move(frame)), table_(std::move(table)) {}

  FramePtr frame_;
  std::vector<int> table_;
};

inline Nucleus identity_nucleus(const FramePtr& f) {
  std::vector<int> t(f->size());
  for (std::size_t i = 0; i < t.size(); ++i) t[i] = static_cast<int>(i);
  return Nucleus::make(f, std::move(t));
}

/// The empty sublocale.
inline Nucleus top_nucleus(const FramePtr& f) {
  return Nucleus::make(f, std::vector<int>(f->size(), f->top()));
}

/// Open sublocale of u: V |-> (u -> V).
inline Nucleus open_nucleus(const FramePtr& f, int u) {
  std::vector<int> t(f->size());
  for (std::size_t v = 0; v < t.size(); ++v) t[v] = heyting(*f, u, static_cast<int>(v));
  return Nucleus::make(f, std::move(t));
}

/// Closed sublocale complementary to u: V |-> u v V.
inline Nucleus closed_nucleus(const FramePtr& f, int u) {
  std::vector<int> t(f->size());
  for (std::size_t v = 0; v < t.size(); ++v) t[v] = f->join(u, static_cast<int>(v));
  return Nucleus::make(f, std::move(t));
}

inline constexpr std::size_t max_nucleus_enumeration = 32;

/// All nuclei, by backtracking over elements in increasing order with
/// inflationary, monotone, idempotence and meet-law pruning.
inline std::vector<Nucleus> enumerate_nuclei(const FramePtr& fp) {
  const Frame& f = *fp;
  const int n = static_cast<int>(f.size());
  if (f.size() > max_nucleus_enumeration)
    throw InputError("nucleus enumeration is limited to frames with " +
                     std::to_string(max_nucleus_enumeration) + " elements");
  std::vector<int> table(n, -1);
  std::vector<int> forced_fixed(n, 0);  // how many chosen values point here
  std::vector<Nucleus> out;
  std::function<void(int)> rec = [&](int u) {
    if (u == n) {
      out.push_back(Nucleus::make(fp, table));
      return;
    }
    for (int w = u; w < n; ++w) {
      if (!f.leq(u, w)) continue;
      if (forced_fixed[u] > 0 && w != u) continue;
      bool ok = true;
      for (int v = 0; v < u && ok; ++v) {
        // meet(u, v) has index <= u, so it is assigned (or is u itself).
        const int m = f.meet(u, v);
        const int tm = (m == u) ? w : table[m];
        if (tm != f.meet(w, table[v])) ok = false;
      }
      if (!ok) continue;
      table[u] = w;
      if (w != u) ++forced_fixed[w];
      rec(u + 1);
      if (w != u) --forced_fixed[w];
      table[u] = -1;
    }
  };
  rec(0);
  return out;
}

// ---------------------------------------------------------------------------
// The lattice of nuclei (pointwise order)

struct NucleusLattice {
  std::vector<Nucleus> nuclei;
  std::vector<std::vector<char>> leq;
  std::vector<std::vector<int>> meet;
  std::vector<std::vector<int>> join;

  static NucleusLattice of(std::vector<Nucleus> ns) {
    NucleusLattice l;
    const std::size_t n = ns.size();
    l.leq.assign(n, std::vector<char>(n, 0));
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b) l.leq[a][b] = ns[a].leq(ns[b]);
    auto bound = [&](std::size_t a, std::size_t b, bool lower) {
      int best = -1;
      for (std::size_t c = 0; c < n; ++c) {
        const bool is_bound = lower ? (l.leq[c][a] && l.leq[c][b]) : (l.leq[a][c] && l.leq[b][c]);
        if (!is_bound) continue;
        if (best < 0 || (lower ? l.leq[best][c] : l.leq[c][best])) best = static_cast<int>(c);
      }
      // The candidate must dominate every other bound.
      for (std::size_t c = 0; c < n && best >= 0; ++c) {
        const bool is_bound = lower ? (l.leq[c][a] && l.leq[c][b]) : (l.leq[a][c] && l.leq[b][c]);
        if (is_bound && !(lower ? l.leq[c][best] : l.leq[best][c])) best = -1;
      }
      if (best < 0) throw InternalError("nuclei do not form a lattice");
      return best;
    };
    l.meet.assign(n, std::vector<int>(n, -1));
    l.join.assign(n, std::vector<int>(n, -1));
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b) {
        l.meet[a][b] = bound(a, b, true);
        l.join[a][b] = bound(a, b, false);
      }
    l.nuclei = std::move(ns);
    return l;
  }

  std::size_t size() const { return nuclei.size(); }

  bool is_distributive() const {
    const std::size_t n = size();
    for (std::size_t a = 0; a < n; ++a)
      for (std::size_t b = 0; b < n; ++b)
        for (std::size_t c = 0; c < n; ++c)
          if (meet[a][join[b][c]] != join[meet[a][b]][meet[a][c]]) return false;
    return true;
  }
};

/// Pointwise meet of two nuclei (again a nucleus).
inline Nucleus pointwise_meet(const Nucleus& a, const Nucleus& b) {
  std::vector<int> t(a.table().size());
  for (std::size_t u = 0; u < t.size(); ++u) t[u] = a.frame().meet(a(u), b(u));
  return Nucleus::make(a.frame_ptr(), std::move(t));
}

// ---------------------------------------------------------------------------
// Sublocales as subsets of the frame

/// Nucleus of a subset S closed under all meets and under (U -> s) for s in S:
/// N(U) = meet of {s in S : U <= s}. Rejects subsets failing either closure.
inline Nucleus nucleus_from_sublocale_set(const FramePtr& fp, const std::vector<int>& members) {
  const Frame& f = *fp;
  std::vector<char> in(f.size(), 0);
  for (int s : members) in.at(s) = 1;
  if (!in[f.top()]) throw InputError("sublocale set must contain the top element");
  for (int a : members)
    for (int b : members)
      if (!in[f.meet(a, b)]) throw InputError("sublocale set not closed under meets");
  for (int s : members)
    for (int u = 0; u < static_cast<int>(f.size()); ++u)
      if (!in[heyting(f, u, s)]) throw InputError("sublocale set not closed under Heyting implication");
  std::vector<int> t(f.size());
  for (int u = 0; u < static_cast<int>(f.size()); ++u) {
    int m = f.top();
    for (int s : members)
      if (f.leq(u, s)) m = f.meet(m, s);
    t[u] = m;
  }
  return Nucleus::make(fp, std::move(t));
}

// ---------------------------------------------------------------------------
// Fixed frame, congruence and pushforward

struct FixedFrame {
  Frame lattice;               // Birkhoff form, labelled by the frame's labels
  std::vector<int> nu;         // frame element -> fixed-frame element
  std::vector<int> inclusion;  // fixed-frame element -> frame element
};

inline FixedFrame fixed_frame(const Nucleus& n) {
  const Frame& f = n.frame();
  const auto fixed = n.fixed_points();
  LatticeTable t;
  for (int u : fixed) t.names.push_back(f.label(u));
  t.leq.assign(fixed.size(), std::vector<char>(fixed.size(), 0));
  for (std::size_t a = 0; a < fixed.size(); ++a)
    for (std::size_t b = 0; b < fixed.size(); ++b) t.leq[a][b] = f.leq(fixed[a], fixed[b]);
  auto bf = birkhoff_form(t);
  FixedFrame out{std::move(bf.lattice), std::vector<int>(f.size()), std::vector<int>(fixed.size())};
  for (std::size_t a = 0; a < fixed.size(); ++a) out.inclusion[bf.element_of[a]] = fixed[a];
  std::vector<int> pos(f.size(), -1);
  for (std::size_t a = 0; a < fixed.size(); ++a) pos[fixed[a]] = static_cast<int>(a);
  for (std::size_t u = 0; u < f.size(); ++u) out.nu[u] = bf.element_of[pos[n(static_cast<int>(u))]];
  return out;
}

/// Frame congruence {(U, V) : N(U) = N(V)} together with the pushforward
/// p_*(U, V) = (U ^ N(V), V ^ N(U)), the right adjoint of its inclusion
/// into F x F.
struct Congruence {
  Nucleus nucleus;
  std::vector<int> class_of;                 // frame element -> class id
  std::vector<std::vector<int>> classes;     // partition of the frame
  std::vector<std::pair<int, int>> relation;  // all related pairs

  std::pair<int, int> pushforward(int u, int v) const {
    const Frame& f = nucleus.frame();
    return {f.meet(u, nucleus(v)), f.meet(v, nucleus(u))};
  }
  bool related(int u, int v) const { return class_of[u] == class_of[v]; }
};

inline Congruence congruence_quotient(const Nucleus& n) {
  const Frame& f = n.frame();
  const int size = static_cast<int>(f.size());
  Congruence c{n, std::vector<int>(size, -1), {}, {}};
  std::vector<int> class_of_value(size, -1);
  for (int u = 0; u < size; ++u) {
    int& cls = class_of_value[n(u)];
    if (cls < 0) {
      cls = static_cast<int>(c.classes.size());
      c.classes.emplace_back();
    }
    c.class_of[u] = cls;
    c.classes[cls].push_back(u);
  }
  for (int u = 0; u < size; ++u)
    for (int v = 0; v < size; ++v)
      if (c.related(u, v)) c.relation.emplace_back(u, v);

  // Sub-lattice of F x F containing the diagonal.
  for (int u = 0; u < size; ++u)
    if (!c.related(u, u)) throw InternalError("congruence misses the diagonal");
  for (auto [a, b] : c.relation)
    for (auto [x, y] : c.relation)
      if (!c.related(f.meet(a, x), f.meet(b, y)) || !c.related(f.join(a, x), f.join(b, y)))
        throw InternalError("congruence is not a sub-lattice of F x F");
  // Inclusion -| p_*: t <= (A, B) iff t <= p_*(A, B), for t related and any (A, B).
  for (auto [t1, t2] : c.relation)
    for (int a = 0; a < size; ++a)
      for (int b = 0; b < size; ++b) {
        const auto [p1, p2] = c.pushforward(a, b);
        const bool lhs = f.leq(t1, a) && f.leq(t2, b);
        const bool rhs = f.leq(t1, p1) && f.leq(t2, p2);
        if (lhs != rhs) throw InternalError("pushforward fails the adjunction check");
      }
  return c;
}

/// Nucleus of S v C for the closed sublocale C complementary to u:
/// V |-> N(V) ^ (V v u).
inline Nucleus sublocale_join_closed(const Nucleus& n, int u) {
  const Frame& f = n.frame();
  std::vector<int> t(f.size());
  for (int v = 0; v < static_cast<int>(f.size()); ++v) t[v] = f.meet(n(v), f.join(v, u));
  return Nucleus::make(n.frame_ptr(), std::move(t));
}

struct SecondIsoReport {
  bool ok = true;
  std::vector<std::pair<int, int>> iso;  // (V fixed by N with V <= N(u), V ^ u)
  std::optional<std::pair<int, int>> counterexample;
  std::string reason;
  explicit operator bool() const { return ok; }
};

/// Open complement of S ^ C inside S (elements V = N(V) <= N(u)) against the
/// open complement of C inside S v C (elements W = M(W) <= u): checks that
/// (- ^ u) and N are mutually inverse between them.
inline SecondIsoReport second_iso_check(const Nucleus& n, int u) {
  const Frame& f = n.frame();
  const Nucleus m = sublocale_join_closed(n, u);
  const int size = static_cast<int>(f.size());
  std::vector<int> lhs, rhs;
  for (int v = 0; v < size; ++v) {
    if (n.is_fixed(v) && f.leq(v, n(u))) lhs.push_back(v);
    if (m.is_fixed(v) && f.leq(v, u)) rhs.push_back(v);
  }
  SecondIsoReport r;
  auto in = [](const std::vector<int>& xs, int x) { return std::find(xs.begin(), xs.end(), x) != xs.end(); };
  for (int v : lhs) {
    const int w = f.meet(v, u);
    if (!in(rhs, w)) return {false, {}, std::pair{v, w}, "V ^ u leaves the open complement in S v C"};
    if (n(w) != v) return {false, {}, std::pair{v, w}, "N(V ^ u) != V"};
    r.iso.emplace_back(v, w);
  }
  for (int w : rhs) {
    const int v = n(w);
    if (!in(lhs, v)) return {false, {}, std::pair{v, w}, "N(W) leaves the open complement in S"};
    if (f.meet(v, u) != w) return {false, {}, std::pair{v, w}, "N(W) ^ u != W"};
  }
  return r;
}

/// Every element has a complement.
inline bool is_boolean(const Frame& f) {
  for (int a = 0; a < static_cast<int>(f.size()); ++a) {
    bool found = false;
    for (int b = 0; b < static_cast<int>(f.size()) && !found; ++b)
      found = f.meet(a, b) == f.bottom() && f.join(a, b) == f.top();
    if (!found) return false;
  }
  return true;
}

}  // namespace patchwork
