#include <catch_amalgamated.hpp>

#include <set>

#include "patchwork/frame.hpp"

using namespace patchwork;

namespace {

FramePtr chain_frame(std::size_t n) { return share(downset_lattice(chain(n))); }

// Heyting implication by scanning every W.
int brute_heyting(const Frame& f, int u, int v) {
  int best = -1;
  for (int w = 0; w < static_cast<int>(f.size()); ++w)
    if (f.leq(f.meet(w, u), v) && (best < 0 || f.leq(best, w))) best = w;
  return best;
}

// Sublocale sets: subsets closed under all meets (with top) and under U -> s.
std::set<std::vector<int>> brute_sublocale_sets(const Frame& f) {
  const int n = static_cast<int>(f.size());
  std::set<std::vector<int>> out;
  for (Mask s = 0; s < bit(n); ++s) {
    if (!has(s, f.top())) continue;
    bool ok = true;
    for (int a = 0; a < n && ok; ++a) {
      if (!has(s, a)) continue;
      for (int b = 0; b < n && ok; ++b) {
        if (has(s, b) && !has(s, f.meet(a, b))) ok = false;
        if (!has(s, heyting(f, b, a))) ok = false;
      }
    }
    if (ok) out.insert(bits_of(s));
  }
  return out;
}

// Every self-map of a tiny frame, filtered by the three laws.
std::size_t brute_nucleus_count(const Frame& f) {
  const int n = static_cast<int>(f.size());
  std::vector<int> t(n, 0);
  std::size_t count = 0;
  while (true) {
    if (check_nucleus_laws(f, t)) ++count;
    int i = 0;
    while (i < n && ++t[i] == n) t[i++] = 0;
    if (i == n) break;
  }
  return count;
}

std::vector<FramePtr> frames_up_to(std::size_t max_frame_size, std::size_t max_base) {
  std::vector<FramePtr> out;
  for (const auto& p : enumerate_posets_up_to(max_base)) {
    auto d = downset_lattice(p);
    if (d.size() <= max_frame_size) out.push_back(share(std::move(d)));
  }
  return out;
}

}  // namespace

TEST_CASE("heyting implication", "[frame]") {
  auto f = chain_frame(2);  // bottom < u < top
  for (int u = 0; u < 3; ++u) CHECK(heyting(*f, u, u) == f->top());
  CHECK(heyting(*f, 1, 0) == 0);
  for (int v = 0; v < 3; ++v) CHECK(heyting(*f, 0, v) == f->top());
  for (const auto& fp : frames_up_to(20, 4))
    for (int u = 0; u < static_cast<int>(fp->size()); ++u)
      for (int v = 0; v < static_cast<int>(fp->size()); ++v) CHECK(heyting(*fp, u, v) == brute_heyting(*fp, u, v));
}

TEST_CASE("nucleus counts on small frames", "[frame]") {
  CHECK(enumerate_nuclei(chain_frame(2)).size() == 4);
  CHECK(enumerate_nuclei(chain_frame(1)).size() == 2);
  CHECK(enumerate_nuclei(share(downset_lattice(antichain(2)))).size() == 4);
  CHECK(brute_nucleus_count(*chain_frame(2)) == 4);
  CHECK(brute_nucleus_count(*share(downset_lattice(antichain(2)))) == 4);
  CHECK_THROWS_AS(enumerate_nuclei(share(downset_lattice(antichain(6)))), InputError);
}

TEST_CASE("nuclei of the 3-chain are identity, open, closed and top", "[frame]") {
  auto f = chain_frame(2);
  auto ns = enumerate_nuclei(f);
  std::set<std::vector<int>> tables;
  for (const auto& n : ns) tables.insert(n.table());
  CHECK(tables.count(identity_nucleus(f).table()));
  CHECK(tables.count(open_nucleus(f, 1).table()));
  CHECK(tables.count(closed_nucleus(f, 1).table()));
  CHECK(tables.count(top_nucleus(f).table()));
}

TEST_CASE("enumeration agrees with brute force and with sublocale sets", "[frame][property]") {
  for (const auto& f : frames_up_to(10, 5)) {
    const auto ns = enumerate_nuclei(f);
    std::set<std::vector<int>> tables;
    for (const auto& n : ns) tables.insert(n.table());
    CHECK(tables.size() == ns.size());
    if (f->size() <= 6) CHECK(brute_nucleus_count(*f) == ns.size());

    const auto sets = brute_sublocale_sets(*f);
    CHECK(sets.size() == ns.size());
    for (const auto& s : sets) CHECK(tables.count(nucleus_from_sublocale_set(f, s).table()) == 1);
    for (const auto& n : ns) CHECK(sets.count(n.fixed_points()) == 1);
  }
}

TEST_CASE("open and closed nuclei", "[frame]") {
  auto f = chain_frame(2);
  CHECK(closed_nucleus(f, f->bottom()) == identity_nucleus(f));
  CHECK(open_nucleus(f, f->top()) == identity_nucleus(f));
  CHECK(closed_nucleus(f, 1).table() == std::vector<int>{1, 1, 2});
  for (const auto& fp : frames_up_to(20, 4))
    for (int u = 0; u < static_cast<int>(fp->size()); ++u) {
      CHECK(check_nucleus_laws(*fp, open_nucleus(fp, u).table()));
      CHECK(check_nucleus_laws(*fp, closed_nucleus(fp, u).table()));
    }
}

TEST_CASE("nucleus validator rejects broken tables", "[frame]") {
  auto f = chain_frame(2);
  CHECK_THROWS_AS(Nucleus::make(f, {1, 0, 2}), InputError);  // not inflationary
  CHECK_THROWS_AS(Nucleus::make(f, {1, 2, 2}), InputError);  // not idempotent
  CHECK_THROWS_AS(Nucleus::make(f, {0, 1}), InputError);
  auto b = share(downset_lattice(antichain(2)));
  // Elements {} < {0},{1} < top. Adding the point 0 everywhere is a nucleus;
  // sending {0} alone to the top breaks meets.
  std::vector<int> t{1, 1, 3, 3};
  CHECK(check_nucleus_laws(*b, t));
  std::vector<int> bad{0, 3, 2, 3};
  CHECK_FALSE(check_nucleus_laws(*b, bad).meet_preserving);
}

TEST_CASE("fixed frames", "[frame]") {
  auto f = chain_frame(2);
  CHECK(fixed_frame(identity_nucleus(f)).lattice.size() == 3);
  auto cl = fixed_frame(closed_nucleus(f, 1));
  CHECK(cl.lattice.size() == 2);
  CHECK(cl.inclusion.size() == 2);
  CHECK(std::set<int>(cl.inclusion.begin(), cl.inclusion.end()) == std::set<int>{1, 2});
  CHECK(fixed_frame(top_nucleus(f)).lattice.size() == 1);
}

TEST_CASE("fixed frame reflection preserves meets and joins", "[frame][property]") {
  for (const auto& f : frames_up_to(10, 4))
    for (const auto& n : enumerate_nuclei(f)) {
      const auto ff = fixed_frame(n);
      const auto& q = ff.lattice;
      for (int a = 0; a < static_cast<int>(f->size()); ++a) {
        CHECK(ff.inclusion[ff.nu[a]] == n(a));
        for (int b = 0; b < static_cast<int>(f->size()); ++b) {
          CHECK(ff.nu[f->meet(a, b)] == q.meet(ff.nu[a], ff.nu[b]));
          CHECK(ff.nu[f->join(a, b)] == q.join(ff.nu[a], ff.nu[b]));
        }
      }
      // Reflection: nu(U) <= W iff U <= inclusion(W).
      for (int a = 0; a < static_cast<int>(f->size()); ++a)
        for (int w = 0; w < static_cast<int>(q.size()); ++w)
          CHECK(q.leq(ff.nu[a], w) == f->leq(a, ff.inclusion[w]));
    }
}

TEST_CASE("congruence quotients", "[frame]") {
  auto f = chain_frame(2);
  auto id = congruence_quotient(identity_nucleus(f));
  CHECK(id.classes.size() == 3);
  for (int u = 0; u < 3; ++u)
    for (int v = 0; v < 3; ++v) CHECK(id.pushforward(u, v) == std::pair{f->meet(u, v), f->meet(u, v)});
  auto cl = congruence_quotient(closed_nucleus(f, 1));
  CHECK(cl.pushforward(0, 1) == std::pair{0, 1});
  CHECK(congruence_quotient(top_nucleus(f)).classes.size() == 1);
  // The adjunction is verified inside congruence_quotient; sweep it.
  for (const auto& fp : frames_up_to(10, 4))
    for (const auto& n : enumerate_nuclei(fp)) CHECK_NOTHROW(congruence_quotient(n));
}

TEST_CASE("sublocale_join_closed", "[frame]") {
  auto f = chain_frame(2);
  // The empty sublocale joined with C is C; S joined with the whole space is everything.
  CHECK(sublocale_join_closed(top_nucleus(f), 1) == closed_nucleus(f, 1));
  CHECK(sublocale_join_closed(identity_nucleus(f), 1) == identity_nucleus(f));
  for (const auto& n : enumerate_nuclei(f)) {
    CHECK(sublocale_join_closed(n, f->top()) == n);
    CHECK(sublocale_join_closed(n, f->bottom()) == identity_nucleus(f));
  }
  // An open sublocale joined with its closed complement is everything.
  auto m = sublocale_join_closed(open_nucleus(f, 1), 1);
  CHECK(m == identity_nucleus(f));
}

TEST_CASE("second isomorphism check on the 3-chain and the Boolean square", "[frame]") {
  for (auto f : {chain_frame(2), share(downset_lattice(antichain(2)))}) {
    std::size_t cases = 0;
    for (const auto& n : enumerate_nuclei(f))
      for (int u = 0; u < static_cast<int>(f->size()); ++u) {
        CHECK(second_iso_check(n, u));
        ++cases;
      }
    CHECK(cases == 4 * f->size());
  }
  auto f = chain_frame(3);
  for (int u = 0; u < static_cast<int>(f->size()); ++u) {
    auto r = second_iso_check(identity_nucleus(f), u);
    CHECK(r);
    CHECK(r.iso.size() == static_cast<std::size_t>(u + 1));
  }
}

TEST_CASE("second isomorphism check for every frame with at most 10 elements", "[frame][property]") {
  for (const auto& f : frames_up_to(10, 5))
    for (const auto& n : enumerate_nuclei(f))
      for (int u = 0; u < static_cast<int>(f->size()); ++u) CHECK(second_iso_check(n, u));
}

TEST_CASE("nuclei form a distributive lattice under the pointwise order", "[frame][property]") {
  for (const auto& f : frames_up_to(10, 5)) {
    auto l = NucleusLattice::of(enumerate_nuclei(f));
    CHECK(l.is_distributive());
    for (std::size_t a = 0; a < l.size(); ++a)
      for (std::size_t b = 0; b < l.size(); ++b)
        CHECK(l.nuclei[l.meet[a][b]] == pointwise_meet(l.nuclei[a], l.nuclei[b]));
  }
}

TEST_CASE("Boolean frames", "[frame]") {
  CHECK(is_boolean(downset_lattice(antichain(3))));
  CHECK_FALSE(is_boolean(downset_lattice(chain(2))));
  CHECK(is_boolean(downset_lattice(chain(1))));
  auto f = chain_frame(2);
  CHECK(is_boolean(fixed_frame(closed_nucleus(f, 1)).lattice));
}
