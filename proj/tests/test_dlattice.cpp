#include <catch_amalgamated.hpp>

#include <set>

#include "patchwork/dlattice.hpp"

using namespace patchwork;

namespace {

FinitePoset vee() { return FinitePoset::from_covers({"a", "b", "c"}, {{"a", "c"}, {"b", "c"}}); }
FinitePoset wedge() { return FinitePoset::from_covers({"a", "b", "c"}, {{"c", "a"}, {"c", "b"}}); }

// Independent count of downsets: scan every subset.
std::size_t brute_downset_count(const FinitePoset& p) {
  std::size_t count = 0;
  for (Mask s = 0; s <= p.all(); ++s) {
    bool closed = true;
    for (std::size_t i = 0; i < p.size() && closed; ++i)
      if (has(s, i))
        for (std::size_t j = 0; j < p.size(); ++j)
          if (p.leq(j, i) && !has(s, j)) closed = false;
    if (closed) ++count;
    if (p.size() == 0) break;
  }
  return count;
}

LatticeTable table_of(const DistLattice& d) {
  LatticeTable t;
  t.names = d.labels();
  t.leq.assign(d.size(), std::vector<char>(d.size(), 0));
  for (std::size_t a = 0; a < d.size(); ++a)
    for (std::size_t b = 0; b < d.size(); ++b) t.leq[a][b] = d.leq(static_cast<int>(a), static_cast<int>(b));
  return t;
}

}  // namespace

TEST_CASE("downset lattices of small posets", "[dlattice]") {
  auto c = downset_lattice(chain(2));
  REQUIRE(c.size() == 3);
  CHECK(c.label(0) == "{}");
  CHECK(c.label(1) == "{0}");
  CHECK(c.label(2) == "{0,1}");
  CHECK(downset_lattice(antichain(2)).size() == 4);
  CHECK(downset_lattice(antichain(std::size_t{0})).size() == 1);
}

TEST_CASE("join-irreducibles recover the base", "[dlattice]") {
  CHECK(isomorphic(join_irreducibles(downset_lattice(chain(2))), chain(2)));
  CHECK(isomorphic(join_irreducibles(downset_lattice(antichain(2))), antichain(2)));
  CHECK(join_irreducibles(downset_lattice(antichain(std::size_t{0}))).size() == 0);
}

TEST_CASE("validated order tables", "[dlattice]") {
  // Pentagon N5: 0 < a < b < 1, 0 < c < 1.
  LatticeTable n5;
  n5.names = {"0", "a", "b", "c", "1"};
  auto le = [&](int x, int y) { n5.leq[x][y] = 1; };
  n5.leq.assign(5, std::vector<char>(5, 0));
  for (int i = 0; i < 5; ++i) {
    le(0, i);
    le(i, 4);
    le(i, i);
  }
  le(1, 2);
  CHECK_THROWS_AS(birkhoff_form(n5), InputError);

  // Diamond M3 is not distributive either.
  LatticeTable m3;
  m3.names = {"0", "x", "y", "z", "1"};
  m3.leq.assign(5, std::vector<char>(5, 0));
  for (int i = 0; i < 5; ++i) {
    m3.leq[0][i] = m3.leq[i][4] = m3.leq[i][i] = 1;
  }
  CHECK_THROWS_AS(birkhoff_form(m3), InputError);

  // Not a lattice at all: two maximal elements.
  LatticeTable two_tops;
  two_tops.names = {"0", "p", "q"};
  two_tops.leq = {{1, 1, 1}, {0, 1, 0}, {0, 0, 1}};
  CHECK_THROWS_AS(birkhoff_form(two_tops), InputError);

  auto d = downset_lattice(vee());
  auto bf = birkhoff_form(table_of(d));
  CHECK(isomorphic(bf.lattice, d));
  for (std::size_t a = 0; a < d.size(); ++a)
    for (std::size_t b = 0; b < d.size(); ++b)
      CHECK(d.leq(static_cast<int>(a), static_cast<int>(b)) == bf.lattice.leq(bf.element_of[a], bf.element_of[b]));
}

TEST_CASE("Booleanization", "[dlattice]") {
  auto b = booleanize(downset_lattice(chain(2)));
  CHECK(b.lattice.size() == 4);
  CHECK(isomorphic(b.lattice, downset_lattice(antichain(2))));
  auto bb = booleanize(downset_lattice(antichain(2)));
  CHECK(isomorphic(bb.lattice, downset_lattice(antichain(2))));
  auto f2 = booleanize(free_bounded_dlattice(2));
  CHECK(f2.lattice.size() == 16);
  CHECK(join_irreducibles(free_bounded_dlattice(2)).size() == 4);
  // The embedding is an injective bounded lattice hom.
  auto d = downset_lattice(vee());
  auto e = booleanize(d);
  LatticeHom h{d, e.lattice, e.embedding, HomFlavor::bounded};
  CHECK(hom_check(h));
}

TEST_CASE("Hochster dual", "[dlattice]") {
  auto c3 = downset_lattice(chain(2));
  CHECK(isomorphic(hochster_dual(c3).lattice, c3));
  CHECK(isomorphic(hochster_dual(downset_lattice(vee())).lattice, downset_lattice(wedge())));
  auto b4 = downset_lattice(antichain(2));
  CHECK(isomorphic(hochster_dual(b4).lattice, b4));
  // The correspondence reverses order.
  auto d = downset_lattice(vee());
  auto h = hochster_dual(d);
  for (int a = 0; a < static_cast<int>(d.size()); ++a)
    for (int b = 0; b < static_cast<int>(d.size()); ++b)
      CHECK(d.leq(a, b) == h.lattice.leq(h.correspondence[b], h.correspondence[a]));
}

TEST_CASE("free bounded distributive lattices", "[dlattice]") {
  CHECK(free_bounded_dlattice(1).size() == 3);
  CHECK(free_bounded_dlattice(2).size() == 6);
  CHECK(free_bounded_dlattice(3).size() == 20);
  CHECK(brute_downset_count(cube(3)) == 20);
  CHECK(free_bounded_dlattice(4).size() == 168);
  CHECK_THROWS_AS(free_bounded_dlattice(5), InputError);
}

TEST_CASE("hom_check flavors", "[dlattice]") {
  auto d = downset_lattice(chain(2));
  std::vector<int> id{0, 1, 2};
  CHECK(hom_check({d, d, id, HomFlavor::bounded}));
  std::vector<int> bot{0, 0, 0};
  CHECK(hom_check({d, d, bot, HomFlavor::lower_bounded}));
  auto r = hom_check({d, d, bot, HomFlavor::bounded});
  CHECK_FALSE(r);
  CHECK(r.pair.has_value());
  CHECK_FALSE(hom_check({d, d, {0, 2, 1}, HomFlavor::bounded}));
}

TEST_CASE("stone_of_monotone examples", "[dlattice]") {
  auto c2 = chain(2);
  auto h = stone_of_monotone(MonotoneMap::identity(c2));
  CHECK(h.image == std::vector<int>{0, 1, 2});
  auto to_point = stone_of_monotone(MonotoneMap::make(c2, point(), {0, 0}));
  CHECK(to_point.image == std::vector<int>{0, 2});
  CHECK(hom_check(to_point));
  // Inclusion of {0} into the 2-chain.
  auto inc = stone_of_monotone(MonotoneMap::make(point(), c2, {0}));
  REQUIRE(inc.src.size() == 3);
  REQUIRE(inc.dst.size() == 2);
  CHECK(inc.image == std::vector<int>{0, 1, 1});
}

TEST_CASE("Birkhoff round trip and duality invariants for |P| <= 5", "[dlattice][property]") {
  for (const auto& p : enumerate_posets_up_to(5)) {
    auto d = downset_lattice(p);
    CHECK(d.size() == brute_downset_count(p));
    CHECK(isomorphic(join_irreducibles(d), p));
    CHECK(isomorphic(downset_lattice(join_irreducibles(d)), d));
    CHECK(isomorphic(booleanize(d).lattice, downset_lattice(discretization(join_irreducibles(d)))));
    CHECK(isomorphic(hochster_dual(hochster_dual(d).lattice).lattice, d));
  }
}

TEST_CASE("stone_of_monotone is a bijection onto bounded homs for |P|,|Q| <= 3", "[dlattice][property]") {
  for (const auto& p : enumerate_posets_up_to(3))
    for (const auto& q : enumerate_posets_up_to(3)) {
      const auto maps = enumerate_monotone_maps(p, q);
      const auto homs = enumerate_homs(downset_lattice(q), downset_lattice(p), HomFlavor::bounded);
      CHECK(maps.size() == homs.size());
      std::set<std::vector<int>> seen;
      for (const auto& m : maps) {
        auto h = stone_of_monotone(MonotoneMap::make(p, q, m));
        CHECK(hom_check(h));
        seen.insert(h.image);
      }
      CHECK(seen.size() == maps.size());
      for (const auto& h : homs) CHECK(seen.count(h) == 1);
      // Functoriality against maps into a third poset.
      for (const auto& m : maps)
        for (const auto& g : enumerate_monotone_maps(q, chain(2))) {
          auto f = MonotoneMap::make(p, q, m);
          auto gg = MonotoneMap::make(q, chain(2), g);
          auto lhs = stone_of_monotone(compose(gg, f));
          auto sf = stone_of_monotone(f);
          auto sg = stone_of_monotone(gg);
          std::vector<int> rhs(sg.image.size());
          for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] = sf.image[sg.image[i]];
          CHECK(lhs.image == rhs);
        }
    }
}
