#include <catch_amalgamated.hpp>

#include "patchwork/poset.hpp"

using namespace patchwork;

namespace {

FinitePoset vee() { return FinitePoset::from_covers({"a", "b", "c"}, {{"a", "c"}, {"b", "c"}}); }
FinitePoset wedge() { return FinitePoset::from_covers({"a", "b", "c"}, {{"c", "a"}, {"c", "b"}}); }

// Brute-force order check straight from the relation.
bool is_partial_order(const FinitePoset& p) {
  const std::size_t n = p.size();
  for (std::size_t a = 0; a < n; ++a) {
    if (!p.leq(a, a)) return false;
    for (std::size_t b = 0; b < n; ++b) {
      if (a != b && p.leq(a, b) && p.leq(b, a)) return false;
      for (std::size_t c = 0; c < n; ++c)
        if (p.leq(a, b) && p.leq(b, c) && !p.leq(a, c)) return false;
    }
  }
  return true;
}

}  // namespace

TEST_CASE("from_covers builds chains, antichains and rejects cycles", "[poset]") {
  auto c2 = FinitePoset::from_covers({"0", "1"}, {{"0", "1"}});
  REQUIRE(c2.size() == 2);
  CHECK(c2.leq(c2.require_index("0"), c2.require_index("1")));
  CHECK_FALSE(c2.leq(c2.require_index("1"), c2.require_index("0")));

  auto a2 = FinitePoset::from_covers({"x", "y"}, {});
  CHECK_FALSE(a2.leq(0, 1));
  CHECK_FALSE(a2.leq(1, 0));

  CHECK_THROWS_AS(FinitePoset::from_covers({"a", "b"}, {{"a", "b"}, {"b", "a"}}), InputError);
  CHECK_THROWS_AS(FinitePoset::from_covers({"a", "b"}, {{"a", "zz"}}), InputError);
  CHECK_THROWS_AS(FinitePoset::from_covers({"a", "a"}, {}), InputError);
}

TEST_CASE("canonical indexing is a linear extension refined by name", "[poset]") {
  auto p = FinitePoset::from_covers({"z", "m", "a"}, {{"z", "a"}});
  // z must come before a; m is free and sorts between.
  CHECK(p.names() == std::vector<std::string>{"m", "z", "a"});
  for (auto [lo, hi] : p.cover_pairs()) CHECK(lo < hi);
}

TEST_CASE("closures on small examples", "[poset]") {
  auto c3 = chain(3);
  CHECK(down_closure(c3, SubsetMask{bit(1)}).bits == 0b011);
  CHECK(up_closure(c3, SubsetMask{bit(1)}).bits == 0b110);
  CHECK(down_closure(c3, SubsetMask{0}).bits == 0);
  auto a2 = antichain(2);
  CHECK(down_closure(a2, SubsetMask{bit(0)}).bits == bit(0));
}

TEST_CASE("opposite reverses the relation", "[poset]") {
  auto c2 = chain(2);
  auto o = opposite(c2);
  CHECK(o.leq(o.require_index("1"), o.require_index("0")));
  CHECK(opposite(opposite(vee())) == vee());
  CHECK(isomorphic(opposite(vee()), wedge()));
  CHECK(opposite(antichain(2)) == antichain(2));
}

TEST_CASE("product and join", "[poset]") {
  auto grid = product(chain(2), chain(2));
  CHECK(grid.size() == 4);
  CHECK(isomorphic(grid, cube(2)));
  CHECK(isomorphic(join(point(), point()), chain(2)));

  auto j = join(spine(), punctured_cube(2));
  REQUIRE(j.size() == 6);
  const auto s = spine();
  const auto pc = punctured_cube(2);
  for (const auto& lo : s.names())
    for (const auto& hi : pc.names()) {
      // Names only get prefixed on clashes; these sets are disjoint.
      CHECK(j.leq(j.require_index(lo), j.require_index(hi)));
      CHECK_FALSE(j.leq(j.require_index(hi), j.require_index(lo)));
    }
}

TEST_CASE("cubes and spine", "[poset]") {
  CHECK(cube(0).size() == 1);
  CHECK(cube(3).size() == 8);
  CHECK(punctured_cube(3).size() == 7);
  for (std::size_t n = 0; n <= 5; ++n) {
    auto c = cube(n);
    CHECK(c.size() == (std::size_t{1} << n));
    auto pc = punctured_cube(n);
    CHECK(pc.size() + 1 == c.size());
    if (n > 0) {
      const int bottom = cube_index(c, 0);
      CHECK(pc == induced(c, complement(c, SubsetMask{bit(bottom)})));
    }
  }
  auto sp = spine();
  CHECK(sp.cover_pairs().size() == 2);
  CHECK(sp.leq(sp.require_index("a"), sp.require_index("c")));
  CHECK(sp.leq(sp.require_index("b"), sp.require_index("c")));
  CHECK_FALSE(sp.leq(sp.require_index("a"), sp.require_index("b")));
  CHECK_THROWS_AS(cube(7), InputError);
}

TEST_CASE("is_monotone", "[poset]") {
  auto c2 = chain(2);
  CHECK(is_monotone(c2, c2, {0, 1}));
  CHECK_FALSE(is_monotone(c2, c2, {1, 0}));
  CHECK(is_monotone(c2, point(), {0, 0}));
  CHECK_THROWS_AS(is_monotone(c2, c2, {0, 2}), InputError);
  CHECK_THROWS_AS(is_monotone(c2, c2, {0}), InputError);
}

TEST_CASE("Urysohn cube embedding examples", "[poset]") {
  auto e = urysohn_cube_embedding(chain(2));
  CHECK(e.dst.name(e(0)) == "{1}");
  CHECK(e.dst.name(e(1)) == "{1,2}");
  auto a = urysohn_cube_embedding(antichain(2));
  CHECK(a.dst.name(a(0)) == "{1}");
  CHECK(a.dst.name(a(1)) == "{2}");
  auto p = urysohn_cube_embedding(point());
  CHECK(p.dst.name(p(0)) == "{1}");
}

TEST_CASE("posets up to five elements: counts match the known sequence", "[poset][enumeration]") {
  // Unlabelled posets: 1, 1, 2, 5, 16, 63 (OEIS A000112).
  const std::vector<std::size_t> expected{1, 1, 2, 5, 16, 63};
  for (std::size_t n = 0; n <= 5; ++n) CHECK(enumerate_posets(n).size() == expected[n]);
}

TEST_CASE("properties over all posets with at most five elements", "[poset][property]") {
  for (const auto& p : enumerate_posets_up_to(5)) {
    CHECK(is_partial_order(p));
    CHECK(opposite(opposite(p)) == p);

    const Mask all = p.all();
    std::vector<Mask> downs;
    for (Mask s = 0; s <= all; ++s) {
      const SubsetMask m{s};
      const auto d = down_closure(p, m);
      CHECK(m.subset_of(d));
      CHECK(down_closure(p, d) == d);
      for (Mask t = 0; t <= all; ++t)
        if ((t & s) == s) CHECK(d.subset_of(down_closure(p, SubsetMask{t})));
      if (is_downset(p, m)) downs.push_back(s);
      CHECK(is_downset(p, m) == is_upset(p, complement(p, m)));
    }
    CHECK(downs.size() == downsets(p).size());

    auto e = urysohn_cube_embedding(p);
    CHECK(e.injective());
    CHECK(e.order_reflecting());
    for (std::size_t a = 0; a < p.size(); ++a)
      for (std::size_t b = 0; b < p.size(); ++b) CHECK(p.leq(a, b) == e.dst.leq(e(a), e(b)));
  }
}

TEST_CASE("isomorphism search agrees with relabelling", "[poset]") {
  auto p = FinitePoset::from_covers({"p", "q", "r", "s"}, {{"p", "q"}, {"p", "r"}, {"r", "s"}});
  auto q = FinitePoset::from_covers({"1", "2", "3", "4"}, {{"4", "3"}, {"4", "1"}, {"1", "2"}});
  CHECK(isomorphic(p, q));
  CHECK(canonical_key(p) == canonical_key(q));
  CHECK_FALSE(isomorphic(p, chain(4)));
}

TEST_CASE("monotone map composition and preimages", "[poset]") {
  auto c3 = chain(3);
  auto f = MonotoneMap::make(c3, chain(2), {0, 0, 1});
  auto g = MonotoneMap::make(chain(2), point(), {0, 0});
  auto h = compose(g, f);
  CHECK(h.image == std::vector<int>{0, 0, 0});
  CHECK(f.preimage(SubsetMask{bit(0)}).bits == 0b011);
  CHECK(f.surjective());
  CHECK_FALSE(f.injective());
  CHECK_THROWS_AS(MonotoneMap::make(c3, chain(2), {1, 0, 1}), InputError);
}
