#include <catch_amalgamated.hpp>

#include <regex>
#include <set>

#include "patchwork/dot.hpp"

using namespace patchwork;

TEST_CASE("DOT for small orders", "[dot]") {
  const auto two = render_dot(chain(2));
  CHECK(count_dot(two).nodes == 2);
  CHECK(count_dot(two).edges == 1);
  CHECK(count_dot(render_dot(free_bounded_dlattice(3))).nodes == 20);
  const auto nuc = NucleusLattice::of(enumerate_nuclei(share(downset_lattice(chain(2)))));
  CHECK(count_dot(render_dot(nuc)).nodes == 4);
}

TEST_CASE("DOT text is fixed", "[dot]") {
  const auto v = FinitePoset::from_covers({"a", "b", "c"}, {{"a", "c"}, {"b", "c"}});
  CHECK(render_dot(v) ==
        "digraph \"poset\" {\n"
        "  rankdir=BT;\n"
        "  node [shape=plaintext];\n"
        "  n0 [label=\"a\"];\n"
        "  n1 [label=\"b\"];\n"
        "  n2 [label=\"c\"];\n"
        "  { rank=same; n0; n1; }\n"
        "  { rank=same; n2; }\n"
        "  n0 -> n2;\n"
        "  n1 -> n2;\n"
        "}\n");
}

TEST_CASE("labels are quoted", "[dot]") {
  const auto p = FinitePoset::from_covers({"x->y", "say \"hi\""}, {});
  const auto dot = render_dot(p);
  CHECK(count_dot(dot).edges == 0);
  CHECK(dot.find(R"(label="say \"hi\"")") != std::string::npos);
}

TEST_CASE("edges are exactly the covers", "[dot][property]") {
  const std::regex edge(R"(n(\d+) -> n(\d+);)");
  for (const auto& p : enumerate_posets_up_to(5)) {
    const auto dot = render_dot(p);
    std::set<std::pair<int, int>> drawn;
    for (std::sregex_iterator it(dot.begin(), dot.end(), edge), end; it != end; ++it)
      drawn.emplace(std::stoi((*it)[1]), std::stoi((*it)[2]));
    std::set<std::pair<int, int>> covers;
    for (int a = 0; a < static_cast<int>(p.size()); ++a)
      for (int b = 0; b < static_cast<int>(p.size()); ++b) {
        if (a == b || !p.leq(a, b)) continue;
        bool between = false;
        for (int c = 0; c < static_cast<int>(p.size()); ++c)
          between = between || (c != a && c != b && p.leq(a, c) && p.leq(c, b));
        if (!between) covers.emplace(a, b);
      }
    CHECK(drawn == covers);
    CHECK(count_dot(dot).nodes == p.size());
    CHECK(render_dot(p) == dot);
  }
}
