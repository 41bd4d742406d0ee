#pragma once

// Graphviz output for Hasse diagrams.

#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "patchwork/dlattice.hpp"
#include "patchwork/frame.hpp"

namespace patchwork {

namespace detail {

inline std::string dot_quote(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

}  // namespace detail

/// Hasse diagram of an order on n nodes given by leq, drawn bottom to top
/// with one rank per height. Nodes keep their index order.
inline std::string render_dot(const std::vector<std::string>& labels, const std::function<bool(int, int)>& leq,
                              const std::string& graph_name = "hasse") {
  const int n = static_cast<int>(labels.size());
  auto below = [&](int a, int b) { return a != b && leq(a, b); };
  std::vector<std::pair<int, int>> covers;
  for (int b = 0; b < n; ++b)
    for (int a = 0; a < n; ++a) {
      if (!below(a, b)) continue;
      bool cover = true;
      for (int c = 0; c < n && cover; ++c) cover = !(below(a, c) && below(c, b));
      if (cover) covers.emplace_back(a, b);
    }
  std::vector<int> height(n, 0);
  for (bool changed = true; changed;) {
    changed = false;
    for (auto [a, b] : covers)
      if (height[b] < height[a] + 1) {
        height[b] = height[a] + 1;
        changed = true;
      }
  }
  std::map<int, std::vector<int>> ranks;
  for (int i = 0; i < n; ++i) ranks[height[i]].push_back(i);

  std::ostringstream out;
  out << "digraph " << detail::dot_quote(graph_name) << " {\n";
  out << "  rankdir=BT;\n";
  out << "  node [shape=plaintext];\n";
  for (int i = 0; i < n; ++i) out << "  n" << i << " [label=" << detail::dot_quote(labels[i]) << "];\n";
  for (const auto& [h, nodes] : ranks) {
    out << "  { rank=same;";
    for (int i : nodes) out << " n" << i << ";";
    out << " }\n";
  }
  for (auto [a, b] : covers) out << "  n" << a << " -> n" << b << ";\n";
  out << "}\n";
  return out.str();
}

inline std::string render_dot(const FinitePoset& p, const std::string& graph_name = "poset") {
  return render_dot(p.names(), [&](int a, int b) { return p.leq(a, b); }, graph_name);
}

inline std::string render_dot(const DistLattice& d, const std::string& graph_name = "lattice") {
  return render_dot(d.labels(), [&](int a, int b) { return d.leq(a, b); }, graph_name);
}

inline std::string render_dot(const NucleusLattice& l, const std::string& graph_name = "nuclei") {
  std::vector<std::string> labels;
  for (const auto& n : l.nuclei) labels.push_back(format_image(n.table()));
  return render_dot(labels, [&](int a, int b) { return l.leq[a][b] != 0; }, graph_name);
}

/// Node and edge counts of emitted DOT text.
struct DotCounts {
  std::size_t nodes = 0;
  std::size_t edges = 0;
};

inline DotCounts count_dot(const std::string& dot) {
  DotCounts c;
  std::istringstream in(dot);
  std::string line;
  while (std::getline(in, line)) {
    if (line.find("[label=") != std::string::npos)
      ++c.nodes;
    else if (line.find(" -> ") != std::string::npos)
      ++c.edges;
  }
  return c;
}

}  // namespace patchwork
