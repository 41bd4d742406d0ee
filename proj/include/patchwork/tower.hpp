#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "patchwork/linalg.hpp"
#include "patchwork/space.hpp"

namespace patchwork {

/// A finite sequential tower X_0 <- X_1 <- ... <- X_depth of posets.
/// transitions[i] maps level i+1 to level i.
struct Tower {
  std::vector<FinitePoset> levels;
  std::vector<MonotoneMap> transitions;

  std::size_t depth() const { return levels.size() - 1; }
  const FinitePoset& level(std::size_t i) const { return levels.at(i); }

  /// Image of an element of level j at level i <= j.
  int project(std::size_t j, int x, std::size_t i) const {
    for (std::size_t k = j; k > i; --k) x = transitions[k - 1](x);
    return x;
  }

  Tower truncate(std::size_t d) const {
    if (d > depth()) throw InputError("truncation depth " + std::to_string(d) + " exceeds tower depth");
    return {{levels.begin(), levels.begin() + d + 1}, {transitions.begin(), transitions.begin() + d}};
  }

  friend bool operator==(const Tower& a, const Tower& b) {
    if (a.levels != b.levels || a.transitions.size() != b.transitions.size()) return false;
    for (std::size_t i = 0; i < a.transitions.size(); ++i)
      if (a.transitions[i].image != b.transitions[i].image) return false;
    return true;
  }
};

/// images[i] lists, for each element of level i+1 in canonical order, its
/// index at level i.
inline Tower make_tower(std::vector<FinitePoset> levels, const std::vector<std::vector<int>>& images) {
  if (levels.empty()) throw InputError("a tower needs at least one level");
  if (images.size() + 1 != levels.size())
    throw InputError("tower with " + std::to_string(levels.size()) + " levels needs " +
                     std::to_string(levels.size() - 1) + " transitions, got " + std::to_string(images.size()));
  Tower t;
  for (std::size_t i = 0; i + 1 < levels.size(); ++i) {
    if (images[i].size() != levels[i + 1].size())
      throw InputError("transition " + std::to_string(i) + " has " + std::to_string(images[i].size()) +
                       " entries for a level of size " + std::to_string(levels[i + 1].size()));
    try {
      t.transitions.push_back(MonotoneMap::make(levels[i + 1], levels[i], images[i]));
    } catch (const InputError& e) {
      throw InputError("transition " + std::to_string(i) + ": " + e.what());
    }
  }
  t.levels = std::move(levels);
  return t;
}

/// Level n is the discrete space of bit strings of length n ("*" at level 0);
/// a string maps to its prefix.
inline Tower cantor_tower(std::size_t d) {
  if (d > 6) throw InputError("cantor tower depth is limited to 6");
  std::vector<FinitePoset> levels;
  for (std::size_t n = 0; n <= d; ++n) {
    std::vector<std::string> names;
    for (Mask k = 0; k < bit(n); ++k) {
      std::string s;
      for (std::size_t b = n; b-- > 0;) s += ((k >> b) & 1) ? '1' : '0';
      names.push_back(n == 0 ? "*" : s);
    }
    levels.push_back(antichain(names));
  }
  std::vector<std::vector<int>> images;
  for (std::size_t n = 1; n <= d; ++n) {
    std::vector<int> img(levels[n].size());
    for (std::size_t i = 0; i < levels[n].size(); ++i) {
      const std::string& s = levels[n].name(i);
      img[i] = levels[n - 1].require_index(n == 1 ? "*" : s.substr(0, n - 1));
    }
    images.push_back(std::move(img));
  }
  return make_tower(std::move(levels), images);
}

inline std::string dyadic_name(Mask k, std::size_t n) {
  Mask den = bit(n);
  while (den > 1 && k % 2 == 0) {
    k /= 2;
    den /= 2;
  }
  if (den == 1) return std::to_string(k);
  return std::to_string(k) + "/" + std::to_string(den);
}

/// Level n is the chain 0 < 1/2^n < ... < 1 with 2^n + 1 elements; k/2^(n+1)
/// maps to floor(k/2)/2^n.
inline Tower dyadic_chain_tower(std::size_t d) {
  if (d > 5) throw InputError("dyadic tower depth is limited to 5");
  std::vector<FinitePoset> levels;
  for (std::size_t n = 0; n <= d; ++n) {
    std::vector<std::string> names;
    std::vector<std::pair<std::string, std::string>> covers;
    for (Mask k = 0; k <= bit(n); ++k) {
      names.push_back(dyadic_name(k, n));
      if (k > 0) covers.emplace_back(names[k - 1], names[k]);
    }
    levels.push_back(FinitePoset::from_covers(names, covers));
  }
  std::vector<std::vector<int>> images;
  for (std::size_t n = 1; n <= d; ++n) {
    std::vector<int> img(levels[n].size());
    for (Mask k = 0; k <= bit(n); ++k)
      img[levels[n].require_index(dyadic_name(k, n))] = levels[n - 1].require_index(dyadic_name(k / 2, n - 1));
    images.push_back(std::move(img));
  }
  return make_tower(std::move(levels), images);
}

inline Tower constant_tower(const FinitePoset& p, std::size_t d) {
  std::vector<int> id(p.size());
  for (std::size_t i = 0; i < p.size(); ++i) id[i] = static_cast<int>(i);
  return make_tower(std::vector<FinitePoset>(d + 1, p), std::vector<std::vector<int>>(d, id));
}

// ---------------------------------------------------------------------------
// Threads

struct ThreadSet {
  std::size_t depth = 0;
  std::vector<std::vector<int>> threads;  // (p_0, ..., p_depth), lexicographic
  std::size_t size() const { return threads.size(); }
};

/// Compatible tuples, grown from level 0 through the fibres of each
/// transition.
inline ThreadSet threads(const Tower& t, std::size_t d) {
  if (d > t.depth()) throw InputError("thread depth " + std::to_string(d) + " exceeds tower depth");
  ThreadSet s{d, {}};
  std::vector<std::vector<std::vector<int>>> fibres(d);
  for (std::size_t i = 0; i < d; ++i) {
    fibres[i].resize(t.levels[i].size());
    for (std::size_t x = 0; x < t.levels[i + 1].size(); ++x) fibres[i][t.transitions[i](x)].push_back(static_cast<int>(x));
  }
  std::vector<int> cur;
  std::function<void(std::size_t, int)> grow = [&](std::size_t i, int x) {
    cur.push_back(x);
    if (i == d)
      s.threads.push_back(cur);
    else
      for (int y : fibres[i][x]) grow(i + 1, y);
    cur.pop_back();
  };
  for (std::size_t x = 0; x < t.levels[0].size(); ++x) grow(0, static_cast<int>(x));
  return s;
}

// ---------------------------------------------------------------------------
// Levelwise constructions

/// Apply a construction to every level. `build` returns the new level and the
/// new index of each old element; `extra` maps the added elements of level
/// i+1 (those outside the image of the old ones) to level i.
inline Tower levelwise(const Tower& t, const std::function<std::pair<FinitePoset, std::vector<int>>(const FinitePoset&)>& build,
                       const std::function<int(std::size_t, const FinitePoset&, const FinitePoset&, int)>& extra = {}) {
  std::vector<FinitePoset> levels;
  std::vector<std::vector<int>> where;
  for (const auto& l : t.levels) {
    auto [p, w] = build(l);
    levels.push_back(std::move(p));
    where.push_back(std::move(w));
  }
  std::vector<std::vector<int>> images;
  for (std::size_t i = 0; i < t.transitions.size(); ++i) {
    std::vector<int> img(levels[i + 1].size(), -1);
    for (std::size_t x = 0; x < t.levels[i + 1].size(); ++x) img[where[i + 1][x]] = where[i][t.transitions[i](x)];
    for (std::size_t y = 0; y < img.size(); ++y)
      if (img[y] < 0) {
        if (!extra) throw InternalError("levelwise construction added elements without a rule for them");
        img[y] = extra(i, levels[i + 1], levels[i], static_cast<int>(y));
      }
    images.push_back(std::move(img));
  }
  try {
    return make_tower(std::move(levels), images);
  } catch (const InputError& e) {
    throw InternalError(std::string("levelwise construction broke monotonicity: ") + e.what());
  }
}

inline std::vector<int> index_by_name(const FinitePoset& from, const FinitePoset& to) {
  std::vector<int> w(from.size());
  for (std::size_t i = 0; i < from.size(); ++i) w[i] = to.require_index(from.name(i));
  return w;
}

inline Tower patch_tower(const Tower& t) {
  return levelwise(t, [](const FinitePoset& l) {
    auto p = patch(l);
    return std::pair{p.space, p.point_map};
  });
}

inline Tower dual_tower(const Tower& t) {
  return levelwise(t, [](const FinitePoset& l) {
    auto d = de_groot_dual(l);
    return std::pair{d, index_by_name(l, d)};
  });
}

/// The added top of each level maps to the added top of the level below.
inline Tower onepoint_tower(const Tower& t) {
  std::vector<int> tops;
  for (const auto& l : t.levels) tops.push_back(one_point(l).top);
  return levelwise(
      t,
      [](const FinitePoset& l) {
        auto op = one_point(l);
        return std::pair{op.space, op.inclusion.image};
      },
      [&](std::size_t i, const FinitePoset&, const FinitePoset&, int) { return tops[i]; });
}

// ---------------------------------------------------------------------------
// Locally constant functions

/// An element of colim_i Z^{level i}: a function on the elements of one level.
struct ColimClass {
  std::size_t level = 0;
  std::vector<std::int64_t> values;
};

inline std::vector<std::int64_t> pullback_class(const Tower& t, const ColimClass& c, std::size_t j) {
  if (c.level > t.depth() || c.values.size() != t.levels[c.level].size())
    throw InputError("class does not match its level");
  if (j < c.level || j > t.depth()) throw InputError("pullback level out of range");
  std::vector<std::int64_t> out(t.levels[j].size());
  for (std::size_t x = 0; x < out.size(); ++x) out[x] = c.values[t.project(j, static_cast<int>(x), c.level)];
  return out;
}

/// Decided at the deeper of the two levels, where it is exact.
inline bool classes_equal(const Tower& t, const ColimClass& a, const ColimClass& b) {
  const std::size_t j = std::max(a.level, b.level);
  return pullback_class(t, a, j) == pullback_class(t, b, j);
}

/// colim_{i <= d} Z^{level i}: free on the elements of level d, with the
/// pullback embedding of every shallower level as a 0/1 matrix
/// (rows: level d, columns: level i).
struct ClopenGroup {
  std::size_t depth = 0;
  std::size_t rank = 0;
  std::vector<std::string> basis;
  std::vector<QMatrix> embeddings;
};

inline ClopenGroup clopen_function_group(const Tower& t, std::size_t d) {
  if (d > t.depth()) throw InputError("depth " + std::to_string(d) + " exceeds tower depth");
  ClopenGroup g;
  g.depth = d;
  g.rank = t.levels[d].size();
  g.basis = t.levels[d].names();
  for (std::size_t i = 0; i <= d; ++i) {
    QMatrix e(g.rank, t.levels[i].size());
    for (std::size_t x = 0; x < g.rank; ++x) e(x, t.project(d, static_cast<int>(x), i)) = 1;
    g.embeddings.push_back(std::move(e));
  }
  return g;
}

}  // namespace patchwork
