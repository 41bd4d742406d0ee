#include <catch_amalgamated.hpp>

#include <random>
#include <set>

#include "patchwork/dlattice.hpp"
#include "patchwork/tower.hpp"

using namespace patchwork;

namespace {

// Every tuple in the product of the levels, kept when compatible.
std::set<std::vector<int>> brute_threads(const Tower& t, std::size_t d) {
  std::set<std::vector<int>> out;
  std::vector<int> cur(d + 1, 0);
  while (true) {
    bool ok = true;
    for (std::size_t i = 0; i < d; ++i) ok = ok && t.transitions[i](cur[i + 1]) == cur[i];
    if (ok) out.insert(cur);
    std::size_t i = 0;
    while (i <= d && ++cur[i] == static_cast<int>(t.levels[i].size())) cur[i++] = 0;
    if (i > d) break;
  }
  return out;
}

Tower random_tower(std::mt19937_64& rng, std::size_t levels) {
  const auto ps = enumerate_posets_up_to(4);
  std::uniform_int_distribution<std::size_t> pick(1, ps.size() - 1);
  std::vector<FinitePoset> ls;
  for (std::size_t i = 0; i < levels; ++i) ls.push_back(ps[pick(rng)]);
  std::vector<std::vector<int>> images;
  for (std::size_t i = 0; i + 1 < levels; ++i) {
    const auto maps = enumerate_monotone_maps(ls[i + 1], ls[i]);
    images.push_back(maps[std::uniform_int_distribution<std::size_t>(0, maps.size() - 1)(rng)]);
  }
  return make_tower(ls, images);
}

}  // namespace

TEST_CASE("tower constructors", "[tower]") {
  auto c = cantor_tower(2);
  REQUIRE(c.depth() == 2);
  CHECK(c.level(0).size() == 1);
  CHECK(c.level(1).size() == 2);
  CHECK(c.level(2).size() == 4);
  CHECK(c.level(0).name(0) == "*");
  CHECK(c.transitions[1](c.level(2).require_index("10")) == c.level(1).require_index("1"));

  auto s = constant_tower(chain(2), 3);
  CHECK(s.depth() == 3);
  for (const auto& m : s.transitions) CHECK(m.image == std::vector<int>{0, 1});

  auto d = dyadic_chain_tower(2);
  CHECK(d.level(0).size() == 2);
  CHECK(d.level(1).size() == 3);
  CHECK(d.level(2).size() == 5);
  for (const auto& m : d.transitions) {
    CHECK(m.surjective());
    CHECK(is_monotone(m.src, m.dst, m.image));
  }
  CHECK(d.transitions[1](d.level(2).require_index("3/4")) == d.level(1).require_index("1/2"));
  CHECK(d.transitions[1](d.level(2).require_index("1")) == d.level(1).require_index("1"));
}

TEST_CASE("make_tower validation", "[tower]") {
  CHECK_THROWS_AS(make_tower({chain(2), chain(2)}, {{1, 0}}), InputError);
  CHECK_THROWS_AS(make_tower({chain(2), chain(2)}, {{0}}), InputError);
  CHECK_THROWS_AS(make_tower({chain(2), chain(2)}, {}), InputError);
  CHECK_THROWS_AS(make_tower({}, {}), InputError);
  CHECK_NOTHROW(make_tower({chain(2), antichain(3)}, {{0, 1, 1}}));
}

TEST_CASE("threads", "[tower]") {
  CHECK(threads(cantor_tower(3), 3).size() == 8);
  CHECK(threads(constant_tower(chain(3), 2), 2).size() == 3);
  auto t = make_tower({point(), antichain(3)}, {{0, 0, 0}});
  CHECK(threads(t, 1).size() == 3);
  CHECK(threads(t, 0).size() == 1);
  CHECK_THROWS_AS(threads(t, 2), InputError);
}

TEST_CASE("threads agree with the product enumeration", "[tower][property]") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 60; ++trial) {
    auto t = random_tower(rng, 1 + trial % 4);
    for (std::size_t d = 0; d <= t.depth(); ++d) {
      const auto ts = threads(t, d);
      const auto brute = brute_threads(t, d);
      CHECK(std::set<std::vector<int>>(ts.threads.begin(), ts.threads.end()) == brute);
      CHECK(ts.size() == brute.size());
      // Threads are addressed by their deepest element.
      std::set<int> ends;
      for (const auto& th : ts.threads) ends.insert(th.back());
      CHECK(ends.size() == ts.size());
    }
  }
}

TEST_CASE("levelwise constructions", "[tower]") {
  auto s = constant_tower(chain(2), 3);
  CHECK(patch_tower(s) == constant_tower(antichain(2), 3));
  for (auto t : {cantor_tower(3), dyadic_chain_tower(3), s}) {
    CHECK(dual_tower(dual_tower(t)) == t);
    CHECK(patch_tower(dual_tower(t)) == patch_tower(t));
    for (std::size_t d = 0; d <= t.depth(); ++d) {
      CHECK(patch_tower(t).truncate(d) == patch_tower(t.truncate(d)));
      CHECK(dual_tower(t).truncate(d) == dual_tower(t.truncate(d)));
      CHECK(onepoint_tower(t).truncate(d) == onepoint_tower(t.truncate(d)));
    }
  }
  auto o = onepoint_tower(cantor_tower(2));
  CHECK(o.level(0).size() == 2);
  CHECK(o.level(1).size() == 3);
  CHECK(o.level(2).size() == 5);
  for (std::size_t i = 0; i < 2; ++i)
    CHECK(o.transitions[i](o.level(i + 1).require_index("inf")) == o.level(i).require_index("inf"));
}

TEST_CASE("levelwise constructions preserve validity on random towers", "[tower][property]") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 40; ++trial) {
    auto t = random_tower(rng, 1 + trial % 4);
    CHECK_NOTHROW(patch_tower(t));
    CHECK(dual_tower(dual_tower(t)) == t);
    CHECK(patch_tower(dual_tower(t)) == patch_tower(t));
    auto o = onepoint_tower(t);
    for (std::size_t i = 0; i < t.depth(); ++i) CHECK(o.transitions[i](one_point(t.level(i + 1)).top) == one_point(t.level(i)).top);
  }
}

TEST_CASE("colimit classes", "[tower]") {
  auto c = cantor_tower(2);
  ColimClass one{0, {1}};
  CHECK(pullback_class(c, one, 2) == std::vector<std::int64_t>{1, 1, 1, 1});
  ColimClass ind{1, {0, 0}};
  ind.values[c.level(1).require_index("1")] = 1;
  auto up = pullback_class(c, ind, 2);
  for (std::size_t x = 0; x < 4; ++x) CHECK(up[x] == (c.level(2).name(x)[0] == '1' ? 1 : 0));
  ColimClass same{2, up};
  CHECK(classes_equal(c, ind, same));
  same.values[0] += 1;
  CHECK_FALSE(classes_equal(c, ind, same));
  CHECK_THROWS_AS(pullback_class(c, ind, 0), InputError);
}

TEST_CASE("pullback to the deepest level is injective on surjective towers", "[tower][property]") {
  for (auto t : {cantor_tower(3), dyadic_chain_tower(3)})
    for (std::size_t i = 0; i <= t.depth(); ++i) {
      std::set<std::vector<std::int64_t>> seen;
      const std::size_t n = t.level(i).size();
      for (std::size_t v = 0; v < (std::size_t{1} << n) && v < 512; ++v) {
        ColimClass c{i, std::vector<std::int64_t>(n)};
        for (std::size_t x = 0; x < n; ++x) c.values[x] = (v >> x) & 1;
        CHECK(seen.insert(pullback_class(t, c, t.depth())).second);
      }
    }
}

TEST_CASE("clopen function groups", "[tower]") {
  CHECK(clopen_function_group(constant_tower(chain(3), 2), 2).rank == 3);
  for (std::size_t d = 0; d <= 4; ++d) {
    CHECK(clopen_function_group(cantor_tower(4), d).rank == (std::size_t{1} << d));
    CHECK(clopen_function_group(dyadic_chain_tower(4), d).rank == (std::size_t{1} << d) + 1);
  }
  auto g = clopen_function_group(cantor_tower(3), 3);
  REQUIRE(g.embeddings.size() == 4);
  for (const auto& e : g.embeddings) {
    CHECK(e.rank() == e.cols());
    for (std::size_t r = 0; r < e.rows(); ++r) {
      Rational s = 0;
      for (std::size_t c = 0; c < e.cols(); ++c) s += e(r, c);
      CHECK(s == 1);
    }
  }
}
