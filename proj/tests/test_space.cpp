#include <catch_amalgamated.hpp>

#include <random>
#include <set>

#include "patchwork/space.hpp"

using namespace patchwork;

namespace {

std::vector<Mask> masks(const std::vector<SubsetMask>& fam) {
  std::vector<Mask> out;
  for (SubsetMask s : fam) out.push_back(s.bits);
  std::sort(out.begin(), out.end());
  return out;
}

// Filters found by scanning every family of opens.
std::size_t brute_filter_count(const FiniteSpace& x) {
  const auto os = masks(opens(x));
  const std::size_t n = os.size();
  std::size_t count = 0;
  for (std::uint64_t fam = 1; fam < (std::uint64_t{1} << n); ++fam) {
    auto in = [&](Mask m) {
      for (std::size_t i = 0; i < n; ++i)
        if (os[i] == m) return ((fam >> i) & 1) != 0;
      return false;
    };
    bool ok = true;
    for (std::size_t i = 0; i < n && ok; ++i) {
      if (!((fam >> i) & 1)) continue;
      for (std::size_t j = 0; j < n && ok; ++j) {
        if ((os[i] & os[j]) == os[i] && !((fam >> j) & 1)) ok = false;
        if (((fam >> j) & 1) && !in(os[i] & os[j])) ok = false;
      }
    }
    if (ok) ++count;
  }
  return count;
}

// Unions of an upset and a downset, straight from the definition.
std::set<Mask> brute_elementary(const FiniteSpace& x) {
  std::set<Mask> out;
  for (SubsetMask c : closed_sets(x))
    for (SubsetMask k : saturated_compacts(x)) out.insert(c.bits | k.bits);
  return out;
}

}  // namespace

TEST_CASE("opens, closed sets and saturated compacts", "[space]") {
  auto c2 = chain(2);
  CHECK(masks(opens(c2)) == std::vector<Mask>{0, 1, 3});
  CHECK(masks(closed_sets(c2)) == std::vector<Mask>{0, 2, 3});
  CHECK(masks(saturated_compacts(c2)) == std::vector<Mask>{0, 1, 3});
  auto a2 = antichain(2);
  for (const auto& fam : {opens(a2), closed_sets(a2), saturated_compacts(a2)})
    CHECK(masks(fam) == std::vector<Mask>{0, 1, 2, 3});
  CHECK(masks(opens(point())) == std::vector<Mask>{0, 1});
  for (const auto& p : enumerate_posets_up_to(4)) {
    std::set<Mask> cl;
    for (SubsetMask u : opens(p)) cl.insert(p.all() & ~u.bits);
    CHECK(std::vector<Mask>(cl.begin(), cl.end()) == masks(closed_sets(p)));
  }
}

TEST_CASE("Scott open filters", "[space]") {
  CHECK(scott_open_filters(chain(2)).size() == 3);
  CHECK(scott_open_filters(antichain(2)).size() == 4);
  CHECK(scott_open_filters(point()).size() == 2);
  for (const auto& p : enumerate_posets_up_to(4)) CHECK(scott_open_filters(p).size() == brute_filter_count(p));
  CHECK_THROWS_AS(scott_open_filters(antichain(6)), InputError);
}

TEST_CASE("Hofmann-Mislove for every space with at most 5 points", "[space][property]") {
  for (const auto& p : enumerate_posets_up_to(5)) {
    auto r = hofmann_mislove_check(p);
    CHECK(r);
    CHECK(r.compacts == r.filters);
  }
}

TEST_CASE("elementary compacts", "[space]") {
  auto c3 = chain(3);
  CHECK_FALSE(is_elementary(c3, SubsetMask{bit(1)}));
  for (SubsetMask e : elementary_compacts(c3))
    if (has(e.bits, 1)) CHECK((has(e.bits, 0) || has(e.bits, 2)));
  CHECK(elementary_compacts(chain(2)).size() == 4);
  for (const auto& p : enumerate_posets_up_to(5)) {
    const auto elem = masks(elementary_compacts(p));
    const auto brute = brute_elementary(p);
    CHECK(elem == std::vector<Mask>(brute.begin(), brute.end()));
    CHECK(brute.count(0) == 1);
    CHECK(brute.count(p.all()) == 1);
    for (Mask a : elem)
      for (Mask b : elem) CHECK(brute.count(a | b) == 1);
  }
}

TEST_CASE("patch generation", "[space]") {
  auto c3 = chain(3);
  auto r = patch_generation_check(c3);
  REQUIRE(r);
  const auto& w = r.witnesses[bit(1)];
  CHECK(w.subset.bits == bit(1));
  Mask meet = c3.all();
  for (SubsetMask e : w.family) {
    CHECK(is_elementary(c3, e));
    meet &= e.bits;
  }
  CHECK(meet == bit(1));

  auto d = antichain(3);
  auto rd = patch_generation_check(d);
  for (Mask s = 0; s <= d.all(); ++s) {
    Mask m = d.all();
    for (SubsetMask e : rd.witnesses[s].family) m &= e.bits;
    CHECK(m == s);
  }
  for (const auto& p : enumerate_posets_up_to(5)) {
    auto g = patch_generation_check(p);
    CHECK(g);
    CHECK(g.witnesses.size() == (std::size_t{1} << p.size()));
  }
  CHECK_THROWS_AS(patch_generation_check(antichain(7)), InputError);
}

TEST_CASE("patch space", "[space]") {
  auto p = patch(chain(2));
  CHECK(p.space == discretization(chain(2)));
  CHECK(p.space.leq(0, 1) == false);
  CHECK(patch(antichain(3)).space == antichain(3));
  auto c3 = patch(chain(3));
  CHECK(closed_sets(c3.space).size() == 8);
  for (std::size_t i = 0; i < 3; ++i) CHECK(c3.space.name(c3.point_map[i]) == chain(3).name(i));
}

TEST_CASE("one-point compactification", "[space]") {
  auto v = one_point(antichain(2));
  CHECK(v.space.size() == 3);
  CHECK(opens(v.space).size() == 5);
  CHECK(v.space.name(v.top) == "inf");
  CHECK(one_point(FinitePoset::from_covers({}, {})).space.size() == 1);
  auto c = one_point(chain(2));
  CHECK(isomorphic(c.space, chain(3)));
  CHECK(saturated_compacts(c.space).size() == 4);
  auto named = FinitePoset::from_covers({"inf"}, {});
  CHECK(one_point(named).space.name(one_point(named).top) == "inf1");
  for (const auto& p : enumerate_posets_up_to(5)) {
    auto op = one_point(p);
    CHECK(opens(op.space).size() == opens(p).size() + 1);
    CHECK(saturated_compacts(op.space).size() == saturated_compacts(p).size() + 1);
    CHECK(op.inclusion.injective());
    CHECK(op.inclusion.order_reflecting());
    CHECK(is_downset(op.space, op.inclusion.direct_image(SubsetMask{p.all()})));
  }
}

TEST_CASE("de Groot duality", "[space]") {
  auto c2 = chain(2);
  auto d = de_groot_dual(c2);
  CHECK(d.leq(d.require_index(c2.name(1)), d.require_index(c2.name(0))));
  CHECK(transport_family(d, c2, saturated_compacts(d)) == masks(closed_sets(c2)));
  CHECK(de_groot_dual(antichain(3)) == antichain(3));
  for (const auto& p : enumerate_posets_up_to(5)) CHECK(de_groot_check(p));
}

TEST_CASE("every subset is a perfect subspace", "[space][property]") {
  for (const auto& p : enumerate_posets_up_to(5))
    for (Mask s = 0; s <= p.all(); ++s) CHECK(perfect_subspace_check(subset_inclusion(p, SubsetMask{s})));
  // A bijection onto a strictly finer order is not a subspace.
  auto m = MonotoneMap::make(antichain(2), chain(2), {0, 1});
  CHECK_FALSE(perfect_subspace_check(m));
}

TEST_CASE("nuclei of the open-set frame correspond to subsets", "[space][property]") {
  for (const auto& p : enumerate_posets_up_to(4)) {
    auto f = share(downset_lattice(p));
    std::set<std::vector<int>> from_subsets;
    for (Mask s = 0; s <= p.all(); ++s) {
      auto n = subspace_nucleus(f, SubsetMask{s});
      // Opens of the subspace are the fixed points, one per trace.
      std::set<Mask> traces;
      for (SubsetMask u : opens(p)) traces.insert(u.bits & s);
      CHECK(n.fixed_points().size() == traces.size());
      from_subsets.insert(n.table());
    }
    CHECK(from_subsets.size() == (std::size_t{1} << p.size()));
    std::set<std::vector<int>> all;
    for (const auto& n : enumerate_nuclei(f)) all.insert(n.table());
    CHECK(all == from_subsets);
  }
}

TEST_CASE("space report", "[space]") {
  auto r = space_report(chain(3));
  CHECK(r.points == 3);
  CHECK(r.opens == 4);
  CHECK(r.closed == 4);
  CHECK(r.saturated_compact == 4);
  CHECK(r.patch_closed == 8);
  CHECK(r.scott_filters == 4);
  CHECK(r.hofmann_mislove);
  CHECK(r.patch_generation);
}

TEST_CASE("K-sheaf value tables", "[space]") {
  auto a2 = antichain(2);
  auto t = ksheaf_value_table(VecSheaf::constant(a2, 1));
  CHECK(masks(t.compacts) == std::vector<Mask>{0, 1, 2, 3});
  CHECK(t.dims == std::vector<std::size_t>{0, 1, 1, 2});
  auto z = ksheaf_value_table(VecSheaf::zero(chain(3)));
  for (auto d : z.dims) CHECK(d == 0);
  auto sky = ksheaf_value_table(VecSheaf::from_cover_maps(chain(2), {0, 1}, {{{1, 0}, QMatrix(0, 1)}}));
  CHECK(sky.dims == std::vector<std::size_t>{0, 0, 1});
  std::mt19937_64 rng(41);
  for (const auto& p : enumerate_posets_up_to(4)) CHECK_NOTHROW(ksheaf_value_table(VecSheaf::random(p, rng)));
}
