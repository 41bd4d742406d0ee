#pragma once

// Named verification suites. Each sweeps a family of finite instances and
// returns a SweepReport whose failures carry the first counterexamples.

#include <cstdint>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "patchwork/dlattice.hpp"
#include "patchwork/frame.hpp"
#include "patchwork/kzero.hpp"
#include "patchwork/space.hpp"
#include "patchwork/tower.hpp"
#include "patchwork/vsheaf.hpp"

namespace patchwork {

inline constexpr std::uint64_t default_seed = 20240229;

namespace detail {

/// Keeps reports readable when a property fails everywhere.
inline constexpr std::size_t max_reported_failures = 20;

inline void record(SweepReport& r, bool ok, const std::function<std::string()>& what) {
  ++r.cases;
  if (ok) return;
  if (r.failures.size() < max_reported_failures)
    r.fail(what());
  else
    ++r.counters["unreported_failures"];
}

inline std::vector<Mask> sorted_masks(const std::vector<SubsetMask>& fam) {
  std::vector<Mask> out;
  for (SubsetMask s : fam) out.push_back(s.bits);
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace detail

inline SweepReport birkhoff_suite(std::size_t max_size) {
  SweepReport r{"birkhoff", 0, {}, {}};
  for (const auto& p : enumerate_posets_up_to(max_size))
    detail::record(r, isomorphic(join_irreducibles(downset_lattice(p)), p), [&] { return format_poset(p); });
  return r;
}

inline SweepReport booleanize_suite(std::size_t max_size) {
  SweepReport r{"booleanize", 0, {}, {}};
  for (const auto& p : enumerate_posets_up_to(max_size)) {
    const auto b = booleanize(downset_lattice(p));
    detail::record(r, isomorphic(b.lattice, downset_lattice(patch(p).space)), [&] { return format_poset(p); });
  }
  r.counters["free_bounded_3"] = free_bounded_dlattice(3).size();
  return r;
}

inline SweepReport hofmann_mislove_suite(std::size_t max_size) {
  SweepReport r{"hofmann-mislove", 0, {}, {}};
  for (const auto& x : enumerate_posets_up_to(max_size)) {
    const auto h = hofmann_mislove_check(x);
    detail::record(r, h.ok, [&] { return h.failure + " on " + format_poset(x); });
  }
  return r;
}

/// Every subset with its witness family, each member re-checked to be
/// elementary and the family re-intersected.
inline SweepReport patch_generation_suite(std::size_t max_size) {
  SweepReport r{"patch-generation", 0, {}, {}};
  for (const auto& x : enumerate_posets_up_to(max_size)) {
    const auto g = patch_generation_check(x);
    for (const auto& w : g.witnesses) {
      Mask meet = x.all();
      bool all_elementary = true;
      for (SubsetMask e : w.family) {
        meet &= e.bits;
        all_elementary = all_elementary && is_elementary(x, e);
      }
      r.counters["witness_sets"] += w.family.size();
      detail::record(r, g.ok && all_elementary && meet == w.subset.bits,
                     [&] { return format_subset(x, w.subset) + " on " + format_poset(x); });
    }
  }
  return r;
}

/// Every (nucleus, open) pair over the open-set frames of the posets.
inline SweepReport second_iso_suite(std::size_t max_size) {
  SweepReport r{"second-iso", 0, {}, {}};
  for (const auto& p : enumerate_posets_up_to(max_size)) {
    const auto f = share(downset_lattice(p));
    const auto ns = enumerate_nuclei(f);
    r.counters["nuclei"] += ns.size();
    for (const auto& n : ns)
      for (int u = 0; u < static_cast<int>(f->size()); ++u) {
        const auto s = second_iso_check(n, u);
        detail::record(r, s.ok, [&] {
          return s.reason + " for nucleus " + format_image(n.table()) + " and u=" + f->label(u) + " on " +
                 format_poset(p);
        });
      }
  }
  return r;
}

/// O(X+) = O(X) + top and Q(X+) = Q(X) + the whole space; de Groot duality.
inline SweepReport onepoint_suite(std::size_t max_size) {
  SweepReport r{"onepoint", 0, {}, {}};
  for (const auto& x : enumerate_posets_up_to(max_size)) {
    const auto op = one_point(x);
    auto lifted = [&](const std::vector<SubsetMask>& fam) {
      std::vector<Mask> out;
      for (SubsetMask s : fam) out.push_back(op.inclusion.direct_image(s).bits);
      out.push_back(op.space.all());
      std::sort(out.begin(), out.end());
      return out;
    };
    detail::record(r, detail::sorted_masks(opens(op.space)) == lifted(opens(x)),
                   [&] { return "opens of X+ on " + format_poset(x); });
    detail::record(r, detail::sorted_masks(saturated_compacts(op.space)) == lifted(saturated_compacts(x)),
                   [&] { return "saturated compacts of X+ on " + format_poset(x); });
    const auto d = de_groot_check(x);
    detail::record(r, d.involution, [&] { return "dual is not an involution on " + format_poset(x); });
    detail::record(r, d.swaps_families, [&] { return "dual does not swap families on " + format_poset(x); });
    detail::record(r, d.commutes_with_patch, [&] { return "dual does not commute with patch on " + format_poset(x); });
  }
  return r;
}

/// Random, limit and rank-perturbed cubes for n = 2..4.
inline SweepReport cube_suite(std::uint64_t seed, std::size_t per_n = 200, std::size_t max_dim = 4) {
  SweepReport r{"cube", 0, {}, {}};
  std::mt19937_64 rng(seed);
  for (std::size_t n = 2; n <= 4; ++n)
    for (std::size_t trial = 0; trial < per_n; ++trial) {
      const auto rc = random_cube(n, rng, max_dim);
      const bool direct = cube_cartesian_direct(rc);
      ++r.counters[direct ? "random_cartesian" : "random_not_cartesian"];
      for (std::size_t i = 0; i < n; ++i)
        detail::record(r, cube_cartesian_recursive(rc, i) == direct, [&] {
          return "direct and recursive criteria disagree on axis " + std::to_string(i + 1) + " of a random " +
                 std::to_string(n) + "-cube, trial " + std::to_string(trial);
        });
      const auto lc = limit_cube(n, rng, max_dim);
      const auto bad = enlarge_bottom(lc);
      detail::record(r, cube_cartesian_direct(lc), [&] { return "limit cube rejected, n=" + std::to_string(n); });
      detail::record(r, !cube_cartesian_direct(bad), [&] { return "perturbed cube accepted, n=" + std::to_string(n); });
      for (std::size_t i = 0; i < n; ++i) {
        detail::record(r, cube_cartesian_recursive(lc, i), [&] {
          return "limit cube rejected on axis " + std::to_string(i + 1) + ", n=" + std::to_string(n);
        });
        detail::record(r, !cube_cartesian_recursive(bad, i), [&] {
          return "perturbed cube accepted on axis " + std::to_string(i + 1) + ", n=" + std::to_string(n);
        });
      }
    }
  return r;
}

/// Random sheaves on every poset, every open set.
inline SweepReport recollement_suite(std::size_t max_size, std::uint64_t seed, std::size_t per_poset = 100) {
  SweepReport r{"recollement", 0, {}, {}};
  std::mt19937_64 rng(seed);
  for (const auto& p : enumerate_posets_up_to(max_size)) {
    const auto us = downsets(p);
    for (std::size_t trial = 0; trial < per_poset; ++trial) {
      const auto f = VecSheaf::random(p, rng);
      ++r.counters["sheaves"];
      for (SubsetMask u : us) {
        const auto rep = recollement_exactness_check(f, u);
        detail::record(r, rep.exact,
                       [&] { return rep.failure + " for U=" + format_subset(p, u) + " on " + format_poset(p); });
      }
    }
  }
  return r;
}

inline SweepReport cosheaf_suite(std::size_t max_size) {
  SweepReport r{"cosheaf", 0, {}, {}};
  for (const auto& x : enumerate_posets_up_to(max_size)) {
    const auto c = cosheaf_extension_check(x, free_datum());
    r.counters["subsets"] += c.subsets;
    detail::record(r, c.ok, [&] {
      std::string where = c.failing_subset ? " at " + format_subset(x, SubsetMask{*c.failing_subset}) : "";
      return "Lan differs from Z^K" + where + " on " + format_poset(x);
    });
  }
  return r;
}

inline void record_main_theorem(SweepReport& r, const std::string& name, const Tower& t, std::size_t d) {
  const auto m = main_theorem_check(t, d, true);
  r.counters["descent_cases"] += m.descent_cases;
  if (m.onepoint_checked) ++r.counters["onepoint_variants"];
  detail::record(r, m.verdict, [&] { return name + " at depth " + std::to_string(d) + ": " + m.failure; });
}

/// Constant towers on every poset up to max_size, and the Cantor and dyadic
/// towers at every depth up to `depth`.
inline SweepReport main_theorem_suite(std::size_t max_size, std::size_t depth) {
  SweepReport r{"main-theorem", 0, {}, {}};
  for (const auto& p : enumerate_posets_up_to(max_size))
    record_main_theorem(r, "constant tower on " + format_poset(p), constant_tower(p, depth), depth);
  for (std::size_t d = 0; d <= depth; ++d) {
    record_main_theorem(r, "cantor tower", cantor_tower(d), d);
    record_main_theorem(r, "dyadic tower", dyadic_chain_tower(d), d);
  }
  return r;
}

inline SweepReport main_theorem_suite(const Tower& t, std::size_t depth) {
  SweepReport r{"main-theorem", 0, {}, {}};
  record_main_theorem(r, "tower", t, depth);
  return r;
}

inline SweepReport verdier_suite(std::size_t max_size, std::uint64_t seed) {
  SweepReport r{"verdier", 0, {}, {}};
  for (const auto& x : enumerate_posets_up_to(max_size)) {
    const auto v = verdier_k0_check(x, seed);
    r.cases += v.instances;
    r.counters["skipped_not_flasque"] += v.skipped;
    for (const auto& f : v.failures)
      if (r.failures.size() < detail::max_reported_failures) r.fail(f + " on " + format_poset(x));
  }
  return r;
}

inline SweepReport sierpinski_suite(std::size_t max_rank = 3) {
  SweepReport r{"sierpinski", 0, {}, {}};
  const auto s = sierpinski_additivity_check(max_rank);
  r.cases = s.cases;
  if (!s.ok) r.fail(s.failure);
  const bool realizes = s.matrix == QMatrix::from_ints(2, 2, {1, 1, 1, 0});
  detail::record(r, realizes, [] { return "K0 square does not realize (m, n) -> (m + n, m)"; });
  detail::record(r, abs(s.determinant) == 1, [] { return "K0 square is not invertible over Z"; });
  return r;
}

}  // namespace patchwork
