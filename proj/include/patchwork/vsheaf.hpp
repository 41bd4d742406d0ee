#pragma once

// Sheaves of finite-dimensional rational vector spaces on finite posets
// (functors on the opposite poset), limits and colimits of small diagrams,
// the open-closed recollement, bicartesian squares and cube criteria.

#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "patchwork/linalg.hpp"
#include "patchwork/poset.hpp"

namespace patchwork {

// ---------------------------------------------------------------------------
// Diagrams

/// A functor from a finite poset-like shape to Q-vector spaces. Objects are
/// 0..n-1 and there is one arrow x -> y for each y in reach(x); reach is
/// irreflexive and transitive. map(x, y) is a dim(y) x dim(x) matrix.
class Diagram {
 public:
  Diagram() = default;
  Diagram(std::vector<Mask> reach, std::vector<std::size_t> dims)
      : reach_(std::move(reach)), dims_(std::move(dims)), maps_(reach_.size() * reach_.size()) {
    if (reach_.size() != dims_.size()) throw InputError("diagram reach and dims differ in length");
    for (std::size_t x = 0; x < size(); ++x)
      for_each_bit(reach_[x], [&](int y) { maps_[x * size() + y] = QMatrix(dims_[y], dims_[x]); });
  }

  std::size_t size() const { return dims_.size(); }
  Mask reach(std::size_t x) const { return reach_[x]; }
  std::size_t dim(std::size_t x) const { return dims_[x]; }
  const std::vector<std::size_t>& dims() const { return dims_; }
  bool has_arrow(std::size_t x, std::size_t y) const { return has(reach_[x], y); }

  const QMatrix& map(std::size_t x, std::size_t y) const {
    if (!has_arrow(x, y)) throw InputError("no arrow " + std::to_string(x) + " -> " + std::to_string(y));
    return maps_[x * size() + y];
  }
  void set_map(std::size_t x, std::size_t y, QMatrix m) {
    if (!has_arrow(x, y)) throw InputError("no arrow " + std::to_string(x) + " -> " + std::to_string(y));
    if (m.rows() != dims_[y] || m.cols() != dims_[x])
      throw InputError("map " + std::to_string(x) + " -> " + std::to_string(y) + " has shape " + m.shape() +
                       ", expected " + std::to_string(dims_[y]) + "x" + std::to_string(dims_[x]));
    maps_[x * size() + y] = std::move(m);
  }

  /// Arrows x -> y with x, y in s that do not factor through a third member of s.
  std::vector<std::pair<int, int>> covers_within(Mask s) const {
    std::vector<std::pair<int, int>> out;
    for_each_bit(s, [&](int x) {
      const Mask targets = reach_[x] & s;
      for_each_bit(targets, [&](int y) {
        bool cover = true;
        for_each_bit(targets & ~bit(y), [&](int z) { cover = cover && !has(reach_[z], y); });
        if (cover) out.emplace_back(x, y);
      });
    });
    return out;
  }

  /// First composable pair x -> y -> z with map(x,z) != map(y,z) map(x,y).
  std::optional<std::tuple<int, int, int>> non_commuting_triple() const {
    for (std::size_t x = 0; x < size(); ++x)
      for (int y : bits_of(reach_[x]))
        for (int z : bits_of(reach_[y]))
          if (map(y, z) * map(x, y) != map(x, z)) return std::tuple{static_cast<int>(x), y, z};
    return std::nullopt;
  }

  /// Fills every arrow from the given generating arrows by composition and
  /// rejects data whose composites disagree.
  static Diagram compose_from(std::vector<Mask> reach, std::vector<std::size_t> dims,
                              const std::map<std::pair<int, int>, QMatrix>& generators,
                              const std::function<std::string(int)>& name = {}) {
    auto label = [&](int x) { return name ? name(x) : std::to_string(x); };
    Diagram d(std::move(reach), std::move(dims));
    const std::size_t n = d.size();
    std::vector<char> known(n * n, 0);
    for (const auto& [arrow, m] : generators) {
      d.set_map(arrow.first, arrow.second, m);
      known[arrow.first * n + arrow.second] = 1;
    }
    // Longer arrows are composites of shorter ones; settle them by path length.
    bool progress = true;
    while (progress) {
      progress = false;
      for (std::size_t x = 0; x < n; ++x)
        for (int y : bits_of(d.reach_[x])) {
          if (known[x * n + y]) continue;
          for (int z : bits_of(d.reach_[x])) {
            if (!has(d.reach_[z], y) || !known[x * n + z] || !known[z * n + y]) continue;
            d.maps_[x * n + y] = d.map(z, y) * d.map(x, z);
            known[x * n + y] = 1;
            progress = true;
            break;
          }
        }
    }
    for (std::size_t x = 0; x < n; ++x)
      for (int y : bits_of(d.reach_[x]))
        if (!known[x * n + y])
          throw InputError("no map given or composable for arrow " + label(x) + " -> " + label(y));
    if (auto t = d.non_commuting_triple())
      throw InputError("maps do not commute along " + label(std::get<0>(*t)) + " -> " + label(std::get<1>(*t)) +
                       " -> " + label(std::get<2>(*t)));
    return d;
  }

 private:
  std::vector<Mask> reach_;
  std::vector<std::size_t> dims_;
  std::vector<QMatrix> maps_;
};

/// Vectors in the direct sum over a set of objects, with block offsets.
struct BlockLayout {
  std::vector<int> objects;
  std::vector<std::size_t> offset;  // per position, plus the total at the end

  static BlockLayout of(const Diagram& d, Mask s) {
    BlockLayout b;
    b.objects = bits_of(s);
    std::size_t total = 0;
    for (int x : b.objects) {
      b.offset.push_back(total);
      total += d.dim(x);
    }
    b.offset.push_back(total);
    return b;
  }
  std::size_t total() const { return offset.back(); }
  int position(int x) const {
    for (std::size_t i = 0; i < objects.size(); ++i)
      if (objects[i] == x) return static_cast<int>(i);
    throw InputError("object " + std::to_string(x) + " is not in the block layout");
  }
  std::size_t offset_of(int x) const { return offset[position(x)]; }
};

/// Limit over a set of objects: the subspace of compatible families.
struct Limit {
  BlockLayout layout;
  QMatrix basis;  // total x dim; columns span the limit
  std::size_t dim() const { return basis.cols(); }
  /// Cone map from the limit to object x (dim(x) x dim()).
  QMatrix projection(const Diagram& d, int x) const { return basis.block(layout.offset_of(x), 0, d.dim(x), dim()); }
};

/// Colimit over a set of objects: the quotient of the direct sum.
struct Colimit {
  BlockLayout layout;
  QMatrix quotient;  // dim x total
  std::size_t dim() const { return quotient.rows(); }
  /// Cocone map from object x to the colimit (dim() x dim(x)).
  QMatrix injection(const Diagram& d, int x) const { return quotient.block(0, layout.offset_of(x), dim(), d.dim(x)); }
};

/// Row vectors whose kernel is exactly the column span of m.
inline QMatrix cokernel_projection(const QMatrix& m) { return m.transpose().kernel().transpose(); }

inline Limit limit(const Diagram& d, Mask s) {
  Limit l{BlockLayout::of(d, s), {}};
  const auto arrows = d.covers_within(s);
  std::size_t rows = 0;
  for (auto [x, y] : arrows) rows += d.dim(y);
  QMatrix sys(rows, l.layout.total());
  std::size_t r = 0;
  for (auto [x, y] : arrows) {
    // F(x -> y) v_x - v_y = 0
    sys.set_block(r, l.layout.offset_of(x), d.map(x, y));
    sys.set_block(r, l.layout.offset_of(y), -QMatrix::identity(d.dim(y)));
    r += d.dim(y);
  }
  l.basis = sys.kernel();
  return l;
}

inline Colimit colimit(const Diagram& d, Mask s) {
  Colimit c{BlockLayout::of(d, s), {}};
  const auto arrows = d.covers_within(s);
  std::size_t cols = 0;
  for (auto [x, y] : arrows) cols += d.dim(x);
  QMatrix rel(c.layout.total(), cols);
  std::size_t col = 0;
  for (auto [x, y] : arrows) {
    // v in F(x) is identified with its image in F(y).
    rel.set_block(c.layout.offset_of(y), col, d.map(x, y));
    rel.set_block(c.layout.offset_of(x), col, -QMatrix::identity(d.dim(x)));
    col += d.dim(x);
  }
  c.quotient = cokernel_projection(rel);
  return c;
}

/// Restriction of a limit to a limit over a subset of its objects, in the
/// two bases (small.dim() x big.dim()).
inline QMatrix restrict_limit(const Diagram& d, const Limit& big, const Limit& small) {
  QMatrix coords(small.layout.total(), big.dim());
  for (int x : small.layout.objects) coords.set_block(small.layout.offset_of(x), 0, big.projection(d, x));
  auto sol = small.basis.solve(coords);
  if (!sol) throw InternalError("restricted family is not compatible");
  return *sol;
}

/// Random functor, functorial by construction: each object gets a random
/// map into the limit of its arrow targets.
template <class Rng>
Diagram random_diagram(std::vector<Mask> reach, std::vector<std::size_t> dims, Rng& rng) {
  Diagram d(std::move(reach), std::move(dims));
  const std::size_t n = d.size();
  Mask done = 0;
  while (done != low_bits(n)) {
    bool progress = false;
    for (std::size_t x = 0; x < n; ++x) {
      if (has(done, x) || (d.reach(x) & ~done) != 0) continue;
      const Limit l = limit(d, d.reach(x));
      const QMatrix phi = l.basis * QMatrix::random(l.dim(), d.dim(x), rng);
      for (int y : l.layout.objects) d.set_map(x, y, phi.block(l.layout.offset_of(y), 0, d.dim(y), d.dim(x)));
      done |= bit(x);
      progress = true;
    }
    if (!progress) throw InputError("diagram shape has a cycle");
  }
  return d;
}

template <class Rng>
std::vector<std::size_t> random_dims(std::size_t n, std::size_t max_dim, Rng& rng) {
  std::uniform_int_distribution<std::size_t> dist(0, max_dim);
  std::vector<std::size_t> dims(n);
  for (auto& x : dims) x = dist(rng);
  return dims;
}

// ---------------------------------------------------------------------------
// Sheaves on finite posets

inline std::vector<Mask> strict_downsets(const FinitePoset& p) {
  std::vector<Mask> r(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) r[i] = p.down(i) & ~bit(i);
  return r;
}

/// A functor P^op -> Vect_Q: a space F(p) per point and restrictions
/// F(p) -> F(q) for q <= p.
class VecSheaf {
 public:
  static VecSheaf make(FinitePoset p, Diagram d) {
    if (d.size() != p.size()) throw InputError("sheaf data does not match the poset size");
    for (std::size_t i = 0; i < p.size(); ++i)
      if (d.reach(i) != (p.down(i) & ~bit(i))) throw InputError("sheaf arrows must be exactly the strict order");
    if (auto t = d.non_commuting_triple())
      throw InputError("restriction maps do not compose at " + p.name(std::get<0>(*t)) + " > " +
                       p.name(std::get<1>(*t)) + " > " + p.name(std::get<2>(*t)));
    return VecSheaf(std::move(p), std::move(d));
  }

  /// Restrictions given along covers (p, q) with q a lower cover of p.
  static VecSheaf from_cover_maps(FinitePoset p, std::vector<std::size_t> dims,
                                  const std::map<std::pair<int, int>, QMatrix>& covers) {
    for (const auto& [arrow, m] : covers)
      if (!has(p.lower_covers(arrow.first), arrow.second))
        throw InputError("restriction " + p.name(arrow.first) + " -> " + p.name(arrow.second) + " is not along a cover");
    auto d = Diagram::compose_from(strict_downsets(p), std::move(dims), covers);
    return make(std::move(p), std::move(d));
  }

  static VecSheaf constant(const FinitePoset& p, std::size_t dim) {
    Diagram d(strict_downsets(p), std::vector<std::size_t>(p.size(), dim));
    for (std::size_t i = 0; i < p.size(); ++i)
      for (int j : bits_of(d.reach(i))) d.set_map(i, j, QMatrix::identity(dim));
    return make(p, std::move(d));
  }

  static VecSheaf zero(const FinitePoset& p) { return constant(p, 0); }

  /// Zero maps everywhere; a valid sheaf whatever the dimensions.
  static VecSheaf with_zero_maps(const FinitePoset& p, std::vector<std::size_t> dims) {
    return make(p, Diagram(strict_downsets(p), std::move(dims)));
  }

  template <class Rng>
  static VecSheaf random(const FinitePoset& p, Rng& rng, std::size_t max_dim = 3) {
    return make(p, random_diagram(strict_downsets(p), random_dims(p.size(), max_dim, rng), rng));
  }

  const FinitePoset& space() const { return space_; }
  const Diagram& diagram() const { return diagram_; }
  std::size_t dim(std::size_t p) const { return diagram_.dim(p); }

  /// Restriction F(p) -> F(q) for q <= p (the identity when q == p).
  QMatrix map(std::size_t p, std::size_t q) const {
    if (p == q) return QMatrix::identity(dim(p));
    if (!space_.leq(q, p)) throw InputError("no restriction " + space_.name(p) + " -> " + space_.name(q));
    return diagram_.map(p, q);
  }

 private:
  VecSheaf(FinitePoset p, Diagram d) : space_(std::move(p)), diagram_(std::move(d)) {}

  FinitePoset space_;
  Diagram diagram_;
};

/// Sections over an open (downset) U: the limit of F over U.
inline Limit sections(const VecSheaf& f, SubsetMask u) {
  require_subset(f.space(), u);
  if (!is_downset(f.space(), u)) throw InputError("sections need an open (downward closed) set");
  return limit(f.diagram(), u.bits);
}

/// Restriction of sections from U to a smaller open V.
inline QMatrix restrict_sections(const VecSheaf& f, SubsetMask u, SubsetMask v) {
  if (!v.subset_of(u)) throw InputError("restriction needs V contained in U");
  return restrict_limit(f.diagram(), sections(f, u), sections(f, v));
}

namespace detail {
/// Index of each point of p in q (matched by name), or -1.
inline std::vector<int> index_map(const FinitePoset& p, const FinitePoset& q) {
  std::vector<int> m(p.size(), -1);
  for (std::size_t i = 0; i < p.size(); ++i)
    if (auto j = q.index_of(p.name(i))) m[i] = *j;
  return m;
}

inline VecSheaf restrict_to(const VecSheaf& f, SubsetMask s) {
  auto sub = induced(f.space(), s);
  const auto back = index_map(sub, f.space());
  std::vector<std::size_t> dims(sub.size());
  for (std::size_t i = 0; i < sub.size(); ++i) dims[i] = f.dim(back[i]);
  Diagram d(strict_downsets(sub), dims);
  for (std::size_t i = 0; i < sub.size(); ++i)
    for (int j : bits_of(d.reach(i))) d.set_map(i, j, f.map(back[i], back[j]));
  return VecSheaf::make(std::move(sub), std::move(d));
}
}  // namespace detail

/// j^*: restriction to an open U.
inline VecSheaf restrict_open(const VecSheaf& f, SubsetMask u) {
  require_subset(f.space(), u);
  if (!is_downset(f.space(), u)) throw InputError("restrict_open needs a downward closed set");
  return detail::restrict_to(f, u);
}

/// i^*: restriction to a closed C.
inline VecSheaf restrict_closed(const VecSheaf& f, SubsetMask c) {
  require_subset(f.space(), c);
  if (!is_upset(f.space(), c)) throw InputError("restrict_closed needs an upward closed set");
  return detail::restrict_to(f, c);
}

/// j_!: extension by zero from an open U of x (g lives on the induced poset).
inline VecSheaf extend_zero(const VecSheaf& g, const FinitePoset& x, SubsetMask u) {
  require_subset(x, u);
  if (!is_downset(x, u)) throw InputError("extend_zero needs a downward closed set");
  const auto to_g = detail::index_map(x, g.space());
  std::vector<std::size_t> dims(x.size(), 0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (has(u.bits, i) != (to_g[i] >= 0)) throw InputError("sheaf is not defined exactly on U");
    if (to_g[i] >= 0) dims[i] = g.dim(to_g[i]);
  }
  Diagram d(strict_downsets(x), dims);
  for (std::size_t i = 0; i < x.size(); ++i)
    for (int j : bits_of(d.reach(i)))
      if (to_g[i] >= 0 && to_g[j] >= 0) d.set_map(i, j, g.map(to_g[i], to_g[j]));
  return VecSheaf::make(x, std::move(d));
}

/// Pushforward along a monotone map f: X -> Y, (f_* G)(y) = G(f^{-1}(down y)),
/// computed slice by slice as limits.
inline VecSheaf pushforward(const MonotoneMap& f, const VecSheaf& g) {
  if (!(g.space() == f.src)) throw InputError("sheaf does not live on the source of the map");
  const auto& y = f.dst;
  std::vector<Limit> slices;
  std::vector<std::size_t> dims;
  for (std::size_t q = 0; q < y.size(); ++q) {
    slices.push_back(limit(g.diagram(), f.preimage(SubsetMask{y.down(q)}).bits));
    dims.push_back(slices.back().dim());
  }
  Diagram d(strict_downsets(y), dims);
  for (std::size_t p = 0; p < y.size(); ++p)
    for (int q : bits_of(d.reach(p))) d.set_map(p, q, restrict_limit(g.diagram(), slices[p], slices[q]));
  return VecSheaf::make(y, std::move(d));
}

/// The inclusion of a subset as a monotone map into x.
inline MonotoneMap subset_inclusion(const FinitePoset& x, SubsetMask s) {
  auto sub = induced(x, s);
  auto img = detail::index_map(sub, x);
  return MonotoneMap::make(std::move(sub), x, std::move(img));
}

/// i_*: pushforward from a closed C of x (h lives on the induced poset).
inline VecSheaf pushforward_closed(const VecSheaf& h, const FinitePoset& x, SubsetMask c) {
  require_subset(x, c);
  if (!is_upset(x, c)) throw InputError("pushforward_closed needs an upward closed set");
  auto inc = subset_inclusion(x, c);
  if (!(inc.src == h.space())) throw InputError("sheaf is not defined exactly on C");
  return pushforward(inc, h);
}

/// f^*: precomposition with a monotone map f: X -> Y.
inline VecSheaf pullback_sheaf(const MonotoneMap& f, const VecSheaf& g) {
  if (!(g.space() == f.dst)) throw InputError("sheaf does not live on the target of the map");
  std::vector<std::size_t> dims(f.src.size());
  for (std::size_t i = 0; i < dims.size(); ++i) dims[i] = g.dim(f(i));
  Diagram d(strict_downsets(f.src), dims);
  for (std::size_t p = 0; p < f.src.size(); ++p)
    for (int q : bits_of(d.reach(p))) d.set_map(p, q, g.map(f(p), f(q)));
  return VecSheaf::make(f.src, std::move(d));
}

/// A map of sheaves on the same poset: one matrix per point.
using SheafMorphism = std::vector<QMatrix>;

inline bool is_natural(const VecSheaf& a, const VecSheaf& b, const SheafMorphism& m) {
  for (std::size_t p = 0; p < a.space().size(); ++p)
    for (int q : bits_of(a.diagram().reach(p)))
      if (b.map(p, q) * m[p] != m[q] * a.map(p, q)) return false;
  return true;
}

/// Counit j_! j^* F -> F: identity on U, zero elsewhere.
inline SheafMorphism counit_open(const VecSheaf& f, SubsetMask u) {
  SheafMorphism m;
  for (std::size_t p = 0; p < f.space().size(); ++p)
    m.push_back(has(u.bits, p) ? QMatrix::identity(f.dim(p)) : QMatrix(f.dim(p), 0));
  return m;
}

/// Unit F -> i_* i^* F: restriction of F(p) into the limit over down(p) in C,
/// in the same coordinates as pushforward_closed(restrict_closed(F, C)).
inline SheafMorphism unit_closed(const VecSheaf& f, SubsetMask c) {
  const auto& x = f.space();
  const auto h = restrict_closed(f, c);
  const auto inc = subset_inclusion(x, c);
  SheafMorphism m;
  for (std::size_t p = 0; p < x.size(); ++p) {
    const Limit l = limit(h.diagram(), inc.preimage(SubsetMask{x.down(p)}).bits);
    QMatrix coords(l.layout.total(), f.dim(p));
    for (int q : l.layout.objects) coords.set_block(l.layout.offset_of(q), 0, f.map(p, inc(q)));
    auto sol = l.basis.solve(coords);
    if (!sol) throw InternalError("restriction family is not compatible");
    m.push_back(*sol);
  }
  return m;
}

/// Counit i^* i_* H -> H for H on a closed C: projection of the limit over
/// down(c) in C (which has top c) onto H(c).
inline SheafMorphism counit_closed(const VecSheaf& h, const FinitePoset& x, SubsetMask c) {
  auto inc = subset_inclusion(x, c);
  SheafMorphism m;
  for (std::size_t i = 0; i < h.space().size(); ++i) {
    const Limit l = limit(h.diagram(), inc.preimage(SubsetMask{x.down(inc(i))}).bits);
    m.push_back(l.projection(h.diagram(), static_cast<int>(i)));
  }
  return m;
}

struct RecollementReport {
  bool exact = true;
  std::string failure;
  explicit operator bool() const { return exact; }
};

/// Pointwise exactness of 0 -> j_! j^* F -> F -> i_* i^* F -> 0.
inline RecollementReport recollement_exactness_check(const VecSheaf& f, SubsetMask u) {
  const auto& x = f.space();
  if (!is_downset(x, u)) throw InputError("recollement needs an open set");
  const SubsetMask c = complement(x, u);
  const auto left = extend_zero(restrict_open(f, u), x, u);
  const auto right = pushforward_closed(restrict_closed(f, c), x, c);
  const auto alpha = counit_open(f, u);
  const auto beta = unit_closed(f, c);
  if (!is_natural(left, f, alpha)) return {false, "j_! j^* F -> F is not natural"};
  if (!is_natural(f, right, beta)) return {false, "F -> i_* i^* F is not natural"};
  for (std::size_t p = 0; p < x.size(); ++p) {
    const auto& a = alpha[p];
    const auto& b = beta[p];
    if (a.rows() != f.dim(p) || a.cols() != left.dim(p) || b.rows() != right.dim(p))
      return {false, "shape mismatch at " + x.name(p)};
    if (!(b * a).is_zero()) return {false, "composite is nonzero at " + x.name(p)};
    if (a.rank() != left.dim(p)) return {false, "left map not injective at " + x.name(p)};
    if (b.rank() != right.dim(p)) return {false, "right map not surjective at " + x.name(p)};
    if (a.rank() + b.rank() != f.dim(p)) return {false, "not exact in the middle at " + x.name(p)};
  }
  return {};
}

// ---------------------------------------------------------------------------
// Squares

/// Commuting square
///     A --f--> B
///     |g       |h
///     C --k--> D
struct SquareReport {
  bool pullback = false;
  bool pushout = false;
  bool kernels_iso = false;          // ker f -> ker k induced by g
  bool cokernels_iso = false;        // coker f -> coker k induced by h
  bool kernel_map_surjective = false;
  bool cokernel_map_injective = false;
  bool bicartesian() const { return pullback && pushout; }
};

inline SquareReport bicartesian_square_check(const QMatrix& f, const QMatrix& g, const QMatrix& h, const QMatrix& k) {
  if (g.cols() != f.cols() || h.cols() != f.rows() || k.cols() != g.rows() || k.rows() != h.rows())
    throw InputError("square shapes do not fit together");
  if (h * f != k * g) throw InputError("square does not commute");
  const std::size_t a = f.cols(), b = f.rows(), c = g.rows(), d = h.rows();
  SquareReport r;

  // Pullback: A -> B x_D C is an isomorphism.
  const QMatrix fg = QMatrix::vstack(f, g);
  const std::size_t fiber_dim = (b + c) - QMatrix::hstack(h, -k).rank();
  r.pullback = fg.rank() == a && a == fiber_dim;
  // Pushout: B +_A C -> D is an isomorphism.
  const QMatrix hk = QMatrix::hstack(h, k);
  const std::size_t cofiber_dim = (b + c) - QMatrix::vstack(f, -g).rank();
  r.pushout = hk.rank() == d && d == cofiber_dim;

  // Induced map on kernels.
  const QMatrix kf = f.kernel(), kk = k.kernel();
  auto kmap = kk.solve(g * kf);
  if (!kmap) throw InternalError("g does not carry ker f into ker k");
  const std::size_t krank = kmap->rank();
  r.kernels_iso = kf.cols() == kk.cols() && krank == kf.cols();
  r.kernel_map_surjective = krank == kk.cols();

  // Induced map on cokernels: Y with Y qf = qk h.
  const QMatrix qf = cokernel_projection(f), qk = cokernel_projection(k);
  auto ymap_t = qf.transpose().solve((qk * h).transpose());
  if (!ymap_t) throw InternalError("h does not descend to cokernels");
  const QMatrix ymap = ymap_t->transpose();
  const std::size_t crank = ymap.rank();
  r.cokernels_iso = qf.rows() == qk.rows() && crank == qf.rows();
  r.cokernel_map_injective = crank == qf.rows();

  if (r.pullback != (r.kernels_iso && r.cokernel_map_injective) ||
      r.pushout != (r.cokernels_iso && r.kernel_map_surjective) ||
      (r.kernels_iso && r.cokernels_iso) != r.bicartesian())
    throw InternalError("square characterization violated");
  return r;
}

// ---------------------------------------------------------------------------
// Cubes

inline std::vector<Mask> strict_upsets(const FinitePoset& p) {
  std::vector<Mask> r(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) r[i] = p.up(i) & ~bit(i);
  return r;
}

/// A covariant functor on the subsets of {1..n}: F(A) -> F(B) for A in B.
class CubeDiagram {
 public:
  static CubeDiagram make(std::size_t n, Diagram d) {
    auto shape = cube(n);
    if (d.size() != shape.size()) throw InputError("cube data has the wrong number of vertices");
    for (std::size_t i = 0; i < shape.size(); ++i)
      if (d.reach(i) != (shape.up(i) & ~bit(i))) throw InputError("cube arrows must be exactly the inclusions");
    if (auto t = d.non_commuting_triple())
      throw InputError("cube faces do not commute along " + shape.name(std::get<0>(*t)) + " -> " +
                       shape.name(std::get<1>(*t)) + " -> " + shape.name(std::get<2>(*t)));
    return CubeDiagram(n, std::move(shape), std::move(d));
  }

  /// Maps given along covers A -> A + {i}, others composed.
  static CubeDiagram from_cover_maps(std::size_t n, const std::vector<std::size_t>& dims_by_subset,
                                     const std::map<std::pair<Mask, Mask>, QMatrix>& covers) {
    auto shape = cube(n);
    std::vector<std::size_t> dims(shape.size());
    for (Mask a = 0; a < bit(n); ++a) dims[cube_index(shape, a)] = dims_by_subset.at(a);
    std::map<std::pair<int, int>, QMatrix> gens;
    for (const auto& [arrow, m] : covers) {
      const Mask diff = arrow.second & ~arrow.first;
      if ((arrow.first & ~arrow.second) != 0 || popcount(diff) != 1)
        throw InputError("cube map " + cube_vertex_name(arrow.first) + " -> " + cube_vertex_name(arrow.second) +
                         " is not along a cover");
      gens.emplace(std::pair{cube_index(shape, arrow.first), cube_index(shape, arrow.second)}, m);
    }
    return make(n, Diagram::compose_from(strict_upsets(shape), std::move(dims), gens,
                                         [&](int x) { return shape.name(x); }));
  }

  std::size_t n() const { return n_; }
  const FinitePoset& shape() const { return shape_; }
  const Diagram& diagram() const { return diagram_; }
  int vertex(Mask a) const { return index_[a]; }
  Mask subset(int v) const { return subset_[v]; }
  std::size_t dim(Mask a) const { return diagram_.dim(vertex(a)); }
  const QMatrix& map(Mask a, Mask b) const { return diagram_.map(vertex(a), vertex(b)); }

  Mask vertices_where(const std::function<bool(Mask)>& pred) const {
    Mask s = 0;
    for (Mask a = 0; a < bit(n_); ++a)
      if (pred(a)) s |= bit(vertex(a));
    return s;
  }

 private:
  CubeDiagram(std::size_t n, FinitePoset shape, Diagram d)
      : n_(n), shape_(std::move(shape)), diagram_(std::move(d)), index_(bit(n)), subset_(bit(n)) {
    for (Mask a = 0; a < bit(n); ++a) {
      index_[a] = cube_index(shape_, a);
      subset_[index_[a]] = a;
    }
  }

  std::size_t n_ = 0;
  FinitePoset shape_;
  Diagram diagram_;
  std::vector<int> index_;
  std::vector<Mask> subset_;
};

template <class Rng>
CubeDiagram random_cube(std::size_t n, Rng& rng, std::size_t max_dim = 4) {
  auto shape = cube(n);
  return CubeDiagram::make(n, random_diagram(strict_upsets(shape), random_dims(shape.size(), max_dim, rng), rng));
}

/// Random punctured cube completed by its limit at the empty vertex.
template <class Rng>
CubeDiagram limit_cube(std::size_t n, Rng& rng, std::size_t max_dim = 4) {
  auto shape = cube(n);
  const int bottom = cube_index(shape, 0);
  auto dims = random_dims(shape.size(), max_dim, rng);
  dims[bottom] = 0;
  auto reach = strict_upsets(shape);
  auto punctured_reach = reach;
  punctured_reach[bottom] = 0;
  Diagram top = random_diagram(punctured_reach, dims, rng);
  const Limit l = limit(top, reach[bottom]);
  dims[bottom] = l.dim();
  Diagram d(reach, dims);
  for (std::size_t x = 0; x < shape.size(); ++x)
    for (int y : bits_of(reach[x]))
      d.set_map(x, y, static_cast<int>(x) == bottom ? l.projection(top, y) : top.map(x, y));
  return CubeDiagram::make(n, std::move(d));
}

/// Same cube with F(empty) replaced by F(empty) + Q, the new coordinate
/// mapping to zero.
inline CubeDiagram enlarge_bottom(const CubeDiagram& c) {
  const auto& old = c.diagram();
  auto dims = old.dims();
  const int bottom = c.vertex(0);
  dims[bottom] += 1;
  std::vector<Mask> reach(old.size());
  for (std::size_t x = 0; x < old.size(); ++x) reach[x] = old.reach(x);
  Diagram d(reach, dims);
  for (std::size_t x = 0; x < old.size(); ++x)
    for (int y : bits_of(reach[x])) {
      if (static_cast<int>(x) == bottom) {
        QMatrix m(dims[y], dims[x]);
        m.set_block(0, 0, old.map(x, y));
        d.set_map(x, y, std::move(m));
      } else {
        d.set_map(x, y, old.map(x, y));
      }
    }
  return CubeDiagram::make(c.n(), std::move(d));
}

/// Coordinates of a cone from object `src` into a limit (l.dim() x dim(src)).
inline QMatrix cone_into(const Diagram& d, int src, const Limit& l) {
  QMatrix coords(l.layout.total(), d.dim(src));
  for (int y : l.layout.objects) coords.set_block(l.layout.offset_of(y), 0, d.map(src, y));
  auto sol = l.basis.solve(coords);
  if (!sol) throw InternalError("cone does not land in the limit");
  return *sol;
}

/// F(empty) -> lim over the punctured cube is an isomorphism.
inline bool cube_cartesian_direct(const CubeDiagram& c) {
  const auto& d = c.diagram();
  const int bottom = c.vertex(0);
  const Limit l = limit(d, d.reach(bottom));
  const QMatrix m = cone_into(d, bottom, l);
  return m.rows() == m.cols() && m.rank() == m.cols();
}

/// colim over the cube without its full vertex -> F(full) is an isomorphism.
inline bool cube_cocartesian_direct(const CubeDiagram& c) {
  const auto& d = c.diagram();
  const int full = c.vertex(low_bits(c.n()));
  const Colimit q = colimit(d, low_bits(d.size()) & ~bit(full));
  QMatrix cocone(d.dim(full), q.layout.total());
  for (int x : q.layout.objects) cocone.set_block(0, q.layout.offset_of(x), d.map(x, full));
  auto phi = q.quotient.transpose().solve(cocone.transpose());
  if (!phi) throw InternalError("cocone does not factor through the colimit");
  return phi->rows() == phi->cols() && phi->rank() == phi->cols();
}

/// The square F(empty) -> F({i}) over lim C0 -> lim C1 is a pullback, where
/// C0 holds the nonempty sets without i and C1 the sets with i other than {i}.
inline bool cube_cartesian_recursive(const CubeDiagram& c, std::size_t axis) {
  if (axis >= c.n()) throw InputError("axis " + std::to_string(axis + 1) + " is not in the index set");
  const auto& d = c.diagram();
  const Mask i = bit(axis);
  const Mask c0 = c.vertices_where([&](Mask a) { return a != 0 && !(a & i); });
  const Mask c1 = c.vertices_where([&](Mask a) { return (a & i) && a != i; });
  const Limit l0 = limit(d, c0), l1 = limit(d, c1);

  const QMatrix f = d.map(c.vertex(0), c.vertex(i));  // F(empty) -> F({i})
  const QMatrix g = cone_into(d, c.vertex(0), l0);   // F(empty) -> lim C0
  const QMatrix h = cone_into(d, c.vertex(i), l1);   // F({i}) -> lim C1
  // lim C0 -> lim C1: the B-component is F(B - i -> B) applied to the (B - i)-component.
  QMatrix coords(l1.layout.total(), l0.dim());
  for (int b : l1.layout.objects) {
    const int src = c.vertex(c.subset(b) & ~i);
    coords.set_block(l1.layout.offset_of(b), 0, d.map(src, b) * l0.projection(d, src));
  }
  auto k = l1.basis.solve(coords);
  if (!k) throw InternalError("lim C0 -> lim C1 does not land in the limit");
  return bicartesian_square_check(f, g, h, *k).pullback;
}

}  // namespace patchwork
