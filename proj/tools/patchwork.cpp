#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "patchwork/dot.hpp"
#include "patchwork/io.hpp"
#include "patchwork/suites.hpp"

using namespace patchwork;
using io::json;

namespace {

constexpr int exit_pass = 0;
constexpr int exit_failure = 1;
constexpr int exit_input = 2;

struct Flags {
  bool json = false;
  std::uint64_t seed = default_seed;
  std::size_t max_size = 5;
  std::size_t depth = 3;
  bool depth_given = false;
  bool upset_opens = false;
};

// ---------------------------------------------------------------------------
// Output helpers

class Table {
 public:
  void row(std::string key, std::string value) { rows_.emplace_back(std::move(key), std::move(value)); }
  void row(std::string key, std::size_t value) { row(std::move(key), std::to_string(value)); }
  void flag(std::string key, bool value) { row(std::move(key), value ? "yes" : "no"); }
  std::string str() const {
    std::size_t w = 0;
    for (const auto& [k, v] : rows_) w = std::max(w, k.size());
    std::ostringstream out;
    for (const auto& [k, v] : rows_) out << k << std::string(w - k.size() + 2, ' ') << v << "\n";
    return out.str();
  }

 private:
  std::vector<std::pair<std::string, std::string>> rows_;
};

std::string names_list(const std::vector<std::string>& names) {
  std::string s;
  for (const auto& n : names) s += (s.empty() ? "" : " ") + n;
  return s.empty() ? "-" : s;
}

std::string poset_line(const FinitePoset& p) { return format_poset(p); }

// ---------------------------------------------------------------------------
// Convention boundary: with --upset-opens a file poset is read as its
// opposite, and posets are turned back before they are printed.

FinitePoset in_poset(const Flags& f, const FinitePoset& p) { return f.upset_opens ? opposite(p) : p; }
FinitePoset out_poset(const Flags& f, const FinitePoset& p) { return f.upset_opens ? opposite(p) : p; }

Tower in_tower(const Flags& f, const Tower& t) {
  if (!f.upset_opens) return t;
  std::vector<FinitePoset> levels;
  std::vector<std::vector<int>> images;
  for (const auto& l : t.levels) levels.push_back(opposite(l));
  for (const auto& m : t.transitions) {
    std::vector<int> img(m.src.size());
    const auto& src = levels[images.size() + 1];
    const auto& dst = levels[images.size()];
    for (std::size_t x = 0; x < m.src.size(); ++x)
      img[src.require_index(m.src.name(x))] = dst.require_index(m.dst.name(m(static_cast<int>(x))));
    images.push_back(std::move(img));
  }
  return make_tower(std::move(levels), images);
}
Tower out_tower(const Flags& f, const Tower& t) { return in_tower(f, t); }

FinitePoset load_poset(const Flags& f, const std::string& path) { return in_poset(f, io::load_poset(path)); }
Tower load_tower(const Flags& f, const std::string& path) { return in_tower(f, io::load_tower(path)); }

std::size_t tower_depth(const Flags& f, const Tower& t) {
  if (!f.depth_given) return std::min(f.depth, t.depth());
  if (f.depth > t.depth())
    throw InputError("--depth " + std::to_string(f.depth) + " exceeds the tower depth " + std::to_string(t.depth()));
  return f.depth;
}

int emit(const Flags& f, const json& j, const std::string& text) {
  if (f.json)
    std::cout << j.dump(2) << "\n";
  else
    std::cout << text;
  return exit_pass;
}

int emit_report(const Flags& f, const SweepReport& r, json details = json::object()) {
  json j = io::report_to_json(r);
  if (!details.empty()) j["details"] = std::move(details);
  if (f.json) {
    std::cout << j.dump(2) << "\n";
  } else {
    Table t;
    t.row("suite", r.suite);
    t.row("cases", r.cases);
    t.row("failures", r.failures.size());
    for (const auto& [k, v] : r.counters) t.row(k, v);
    for (auto it = j["details"].begin(); j.contains("details") && it != j["details"].end(); ++it)
      t.row(it.key(), it->is_string() ? it->get<std::string>() : it->dump());
    t.row("result", r.ok() ? "PASS" : "FAIL");
    std::cout << t.str();
    if (!r.ok()) std::cout << "first counterexample: " << r.failures.front() << "\n";
  }
  return r.ok() ? exit_pass : exit_failure;
}

// ---------------------------------------------------------------------------
// poset

int poset_show(const Flags& f, const std::string& path) {
  const auto p = load_poset(f, path);
  const auto shown = out_poset(f, p);
  const auto h = p.heights();
  const std::size_t height = h.empty() ? 0 : static_cast<std::size_t>(*std::max_element(h.begin(), h.end()) + 1);
  json j = {{"poset", io::poset_to_json(shown)},
            {"size", p.size()},
            {"opens", opens(p).size()},
            {"closed", closed_sets(p).size()},
            {"minimal", io::subset_to_json(shown, transport(p, shown, SubsetMask{p.minimal()}))},
            {"maximal", io::subset_to_json(shown, transport(p, shown, SubsetMask{p.maximal()}))},
            {"height", height}};
  Table t;
  t.row("poset", poset_line(shown));
  t.row("elements", p.size());
  t.row("covers", p.cover_pairs().size());
  t.row("opens", opens(p).size());
  t.row("closed sets", closed_sets(p).size());
  t.row("minimal", names_list(j["minimal"].get<std::vector<std::string>>()));
  t.row("maximal", names_list(j["maximal"].get<std::vector<std::string>>()));
  t.row("longest chain", height);
  return emit(f, j, t.str());
}

int poset_enumerate(const Flags& f) {
  json counts = json::array();
  Table t;
  for (std::size_t n = 0; n <= f.max_size; ++n) {
    const auto c = enumerate_posets(n).size();
    counts.push_back({{"size", n}, {"posets", c}});
    t.row("size " + std::to_string(n), c);
  }
  return emit(f, {{"counts", counts}}, t.str());
}

// ---------------------------------------------------------------------------
// lattice

json lattice_summary(const DistLattice& d) {
  json elements = json::array();
  for (std::size_t i = 0; i < d.size(); ++i) elements.push_back(d.label(i));
  return {{"size", d.size()},
          {"elements", elements},
          {"join_irreducibles", io::poset_to_json(join_irreducibles(d))},
          {"boolean", is_boolean(d)},
          {"lattice", io::lattice_to_json(d)}};
}

std::string lattice_text(const DistLattice& d) {
  Table t;
  t.row("elements", d.size());
  t.row("join-irreducibles", poset_line(join_irreducibles(d)));
  t.flag("boolean", is_boolean(d));
  std::string s = t.str();
  for (std::size_t i = 0; i < d.size(); ++i) s += "  " + std::to_string(i) + "  " + d.label(i) + "\n";
  return s;
}

int lattice_show(const Flags& f, const std::string& path) {
  const auto d = io::load_lattice(path);
  return emit(f, lattice_summary(d), lattice_text(d));
}

int lattice_booleanize(const Flags& f, const std::string& path) {
  const auto d = io::load_lattice(path);
  const auto b = booleanize(d);
  json j = lattice_summary(b.lattice);
  j["embedding"] = io::image_to_json(b.embedding);
  return emit(f, j, lattice_text(b.lattice) + "embedding  " + format_image(b.embedding) + "\n");
}

int lattice_dual(const Flags& f, const std::string& path) {
  const auto d = io::load_lattice(path);
  const auto h = hochster_dual(d);
  json j = lattice_summary(h.lattice);
  j["correspondence"] = io::image_to_json(h.correspondence);
  return emit(f, j, lattice_text(h.lattice) + "correspondence  " + format_image(h.correspondence) + "\n");
}

int lattice_free(const Flags& f, std::size_t n) {
  const auto d = free_bounded_dlattice(n);
  return emit(f, lattice_summary(d), lattice_text(d));
}

// ---------------------------------------------------------------------------
// frame

struct NucleusMarks {
  std::optional<int> open_of;
  std::optional<int> closed_of;
  bool boolean = false;
};

NucleusMarks marks(const FramePtr& fp, const Nucleus& n) {
  NucleusMarks m;
  for (int u = 0; u < static_cast<int>(fp->size()); ++u) {
    if (!m.open_of && open_nucleus(fp, u) == n) m.open_of = u;
    if (!m.closed_of && closed_nucleus(fp, u) == n) m.closed_of = u;
  }
  m.boolean = is_boolean(fixed_frame(n).lattice);
  return m;
}

int frame_nuclei(const Flags& f, const std::string& path) {
  const auto fp = share(io::load_lattice(path));
  const auto lat = NucleusLattice::of(enumerate_nuclei(fp));
  json list = json::array();
  std::ostringstream text;
  text << "frame with " << fp->size() << " elements has " << lat.size() << " nuclei\n";
  for (std::size_t i = 0; i < lat.size(); ++i) {
    const auto& n = lat.nuclei[i];
    const auto m = marks(fp, n);
    json e = {{"index", i}, {"image", io::image_to_json(n.table())}, {"fixed_points", n.fixed_points().size()},
              {"boolean", m.boolean}};
    e["open"] = m.open_of ? json(fp->label(*m.open_of)) : json(nullptr);
    e["closed"] = m.closed_of ? json(fp->label(*m.closed_of)) : json(nullptr);
    list.push_back(e);
    text << "  " << i << "  " << format_image(n.table()) << "  fixed " << n.fixed_points().size();
    if (m.open_of) text << "  open(" << fp->label(*m.open_of) << ")";
    if (m.closed_of) text << "  closed(" << fp->label(*m.closed_of) << ")";
    if (m.boolean) text << "  boolean";
    text << "\n";
  }
  json order = json::array();
  for (std::size_t a = 0; a < lat.size(); ++a)
    for (std::size_t b = 0; b < lat.size(); ++b)
      if (a != b && lat.leq[a][b]) order.push_back({a, b});
  text << "distributive  " << (lat.is_distributive() ? "yes" : "no") << "\n";
  return emit(f, {{"nuclei", list}, {"order", order}, {"distributive", lat.is_distributive()}}, text.str());
}

// ---------------------------------------------------------------------------
// space

int space_patch(const Flags& f, const std::string& path) {
  const auto x = load_poset(f, path);
  const auto p = out_poset(f, patch(x).space);
  return emit(f, io::poset_to_json(p), poset_line(p) + "\n");
}

int space_dual(const Flags& f, const std::string& path) {
  const auto x = load_poset(f, path);
  const auto d = out_poset(f, de_groot_dual(x));
  return emit(f, io::poset_to_json(d), poset_line(d) + "\n");
}

int space_onepoint(const Flags& f, const std::string& path) {
  const auto x = load_poset(f, path);
  const auto op = one_point(x);
  const auto p = out_poset(f, op.space);
  json j = {{"space", io::poset_to_json(p)}, {"added_point", op.space.name(op.top)}};
  return emit(f, j, poset_line(p) + "\nadded point  " + op.space.name(op.top) + "\n");
}

int space_report_cmd(const Flags& f, const std::string& path) {
  const auto x = load_poset(f, path);
  const auto r = space_report(x);
  const auto p = out_poset(f, patch(x).space);
  const bool discrete = p.cover_pairs().empty();
  json j = {{"points", r.points},
            {"opens", r.opens},
            {"closed", r.closed},
            {"saturated_compact", r.saturated_compact},
            {"elementary", r.elementary},
            {"patch_closed", r.patch_closed},
            {"scott_filters", r.scott_filters},
            {"hofmann_mislove", r.hofmann_mislove},
            {"patch_generation", r.patch_generation},
            {"patch", io::poset_to_json(p)},
            {"patch_discrete", discrete}};
  Table t;
  t.row("points", r.points);
  t.row("opens", r.opens);
  t.row("closed", r.closed);
  t.row("saturated compact", r.saturated_compact);
  t.row("elementary", r.elementary);
  t.row("patch-closed", r.patch_closed);
  t.row("scott open filters", r.scott_filters);
  t.flag("hofmann-mislove", r.hofmann_mislove);
  t.flag("patch generation", r.patch_generation);
  t.row("patch", (discrete ? "discrete " + std::to_string(p.size()) : poset_line(p)));
  return emit(f, j, t.str());
}

// ---------------------------------------------------------------------------
// tower

int tower_threads(const Flags& f, const std::string& path) {
  const auto t = load_tower(f, path);
  const std::size_t d = tower_depth(f, t);
  const auto ts = threads(t, d);
  json list = json::array();
  std::ostringstream text;
  text << ts.size() << " threads at depth " << d << "\n";
  for (const auto& th : ts.threads) {
    std::vector<std::string> names;
    for (std::size_t i = 0; i < th.size(); ++i) names.push_back(t.level(i).name(th[i]));
    list.push_back(names);
    text << "  " << names_list(names) << "\n";
  }
  return emit(f, {{"depth", d}, {"count", ts.size()}, {"threads", list}}, text.str());
}

int tower_map(const Flags& f, const std::string& path, bool dual) {
  const auto t = load_tower(f, path);
  const std::size_t d = tower_depth(f, t);
  const auto out = out_tower(f, dual ? dual_tower(t.truncate(d)) : patch_tower(t.truncate(d)));
  std::ostringstream text;
  for (std::size_t i = 0; i <= out.depth(); ++i) {
    text << "level " << i << "  " << poset_line(out.level(i)) << "\n";
    if (i > 0) text << "  to level " << i - 1 << "  " << format_map(out.transitions[i - 1]) << "\n";
  }
  return emit(f, io::tower_to_json(out), text.str());
}

int tower_generate(const Flags& f, const std::string& kind) {
  Tower t;
  if (kind == "cantor")
    t = cantor_tower(f.depth);
  else if (kind == "dyadic")
    t = dyadic_chain_tower(f.depth);
  else
    throw InputError("unknown tower kind '" + kind + "' (expected cantor or dyadic)");
  std::cout << io::tower_to_json(out_tower(f, t)).dump(2) << "\n";
  return exit_pass;
}

// ---------------------------------------------------------------------------
// cube

int cube_check(const Flags& f, const std::string& path, const std::string& expect) {
  const auto c = io::load_cube(path);
  SweepReport r{"cube-check", 0, {}, {}};
  const bool direct = cube_cartesian_direct(c);
  if (!expect.empty()) {
    ++r.cases;
    if (direct != (expect == "cartesian"))
      r.fail(std::string("expected a ") + (direct ? "non-cartesian" : "cartesian") + " cube, but the direct criterion says " +
             (direct ? "cartesian" : "not cartesian"));
  }
  json recursive = json::array();
  for (std::size_t i = 0; i < c.n(); ++i) {
    const bool rec = cube_cartesian_recursive(c, i);
    recursive.push_back(rec);
    ++r.cases;
    if (rec != direct) r.fail("axis " + std::to_string(i + 1) + ": recursive criterion disagrees with the direct one");
  }
  return emit_report(f, r, {{"n", c.n()}, {"cartesian", direct}, {"recursive", recursive}});
}

int cube_random(const Flags& f, std::size_t n, const std::string& kind) {
  std::mt19937_64 rng(f.seed);
  auto make = [&]() -> CubeDiagram {
    if (kind == "random") return random_cube(n, rng);
    if (kind == "limit") return limit_cube(n, rng);
    if (kind == "perturbed") return enlarge_bottom(limit_cube(n, rng));
    throw InputError("unknown cube kind '" + kind + "' (expected random, limit or perturbed)");
  };
  const CubeDiagram c = make();
  std::cout << io::cube_to_json(c).dump(2) << "\n";
  return exit_pass;
}

// ---------------------------------------------------------------------------
// verify

const std::vector<std::string> suite_names = {
    "birkhoff", "booleanize", "hofmann-mislove", "patch-generation", "second-iso", "onepoint", "cube",
    "recollement", "k0-descent", "cosheaf", "main-theorem", "verdier", "nisnevich", "sierpinski"};

SweepReport run_suite(const Flags& f, const std::string& name, const std::optional<std::string>& tower_path,
                      json& details) {
  details = {{"max_size", f.max_size}, {"depth", f.depth}, {"seed", f.seed}};
  if (name == "birkhoff") return birkhoff_suite(f.max_size);
  if (name == "booleanize") return booleanize_suite(f.max_size);
  if (name == "hofmann-mislove") return hofmann_mislove_suite(f.max_size);
  if (name == "patch-generation") return patch_generation_suite(f.max_size);
  if (name == "second-iso") return second_iso_suite(f.max_size);
  if (name == "onepoint") return onepoint_suite(f.max_size);
  if (name == "cube") return cube_suite(f.seed);
  if (name == "recollement") return recollement_suite(f.max_size, f.seed);
  if (name == "k0-descent") return descent_sweep(f.max_size);
  if (name == "cosheaf") return cosheaf_suite(f.max_size);
  if (name == "verdier") return verdier_suite(f.max_size, f.seed);
  if (name == "nisnevich") return nisnevich_sweep(std::min<std::size_t>(f.max_size, 4));
  if (name == "sierpinski") return sierpinski_suite();
  if (name == "main-theorem") {
    if (!tower_path) return main_theorem_suite(f.max_size, f.depth);
    const auto t = load_tower(f, *tower_path);
    const std::size_t d = tower_depth(f, t);
    const auto m = main_theorem_check(t, d, true);
    SweepReport r{"main-theorem", 1, {}, {}};
    if (!m.verdict) r.fail(m.failure);
    details["depth"] = d;
    details["k0_rank"] = m.k0_rank;
    details["h0_rank"] = m.h0_rank;
    details["torsion_free"] = m.k0_torsion_free;
    details["descent_cases"] = m.descent_cases;
    details["onepoint_iso"] = m.onepoint_iso;
    return r;
  }
  throw InputError("unknown suite '" + name + "'");
}

int verify(const Flags& f, const std::string& name, const std::optional<std::string>& tower_path) {
  if (tower_path && name != "main-theorem") throw InputError("only main-theorem takes a tower file");
  if (name == "all") {
    json reports = json::array();
    bool ok = true;
    Table t;
    for (const auto& s : suite_names) {
      json details;
      const auto r = run_suite(f, s, std::nullopt, details);
      json j = io::report_to_json(r);
      j["details"] = details;
      reports.push_back(j);
      ok = ok && r.ok();
      t.row(s, std::to_string(r.cases) + " cases, " + std::to_string(r.failures.size()) + " failures");
      if (!r.ok() && !f.json) t.row("  first counterexample", r.failures.front());
    }
    t.row("result", ok ? "PASS" : "FAIL");
    emit(f, {{"suites", reports}, {"passed", ok}}, t.str());
    return ok ? exit_pass : exit_failure;
  }
  json details;
  const auto r = run_suite(f, name, tower_path, details);
  return emit_report(f, r, details);
}

// ---------------------------------------------------------------------------
// render

int render(const Flags& f, const std::string& what, const std::string& arg) {
  if (what == "poset") {
    std::cout << render_dot(out_poset(f, load_poset(f, arg)));
  } else if (what == "lattice") {
    std::cout << render_dot(io::load_lattice(arg));
  } else if (what == "nuclei") {
    std::cout << render_dot(NucleusLattice::of(enumerate_nuclei(share(io::load_lattice(arg)))));
  } else if (what == "free") {
    std::size_t n = 0;
    try {
      n = std::stoul(arg);
    } catch (const std::exception&) {
      throw InputError("render free expects a generator count, got '" + arg + "'");
    }
    std::cout << render_dot(free_bounded_dlattice(n), "free" + std::to_string(n));
  } else {
    throw InputError("unknown render target '" + what + "'");
  }
  return exit_pass;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Finite posets, frames, patch spaces and K0 descent checks"};
  app.require_subcommand(1);
  Flags flags;
  app.add_flag("--json", flags.json, "Print JSON instead of a table");
  app.add_option("--seed", flags.seed, "Seed for randomized suites")->capture_default_str();
  app.add_option("--max-size", flags.max_size, "Largest poset size in sweeps")
      ->check(CLI::Range(0, 6))
      ->capture_default_str();
  auto* depth_opt =
      app.add_option("--depth", flags.depth, "Tower depth")->check(CLI::Range(0, 6))->capture_default_str();
  app.add_flag("--upset-opens", flags.upset_opens, "Read posets with upward closed opens");

  std::function<int()> action;
  std::string file, kind;
  std::size_t count = 0;
  std::optional<std::string> tower_file;

  auto sub = [&](CLI::App* parent, const std::string& name, const std::string& desc) {
    auto* s = parent->add_subcommand(name, desc);
    s->fallthrough();
    return s;
  };
  auto with_file = [&](CLI::App* s, const std::string& what) {
    s->add_option("file", file, what)->required();
    return s;
  };

  auto* poset = sub(&app, "poset", "Poset summaries");
  poset->require_subcommand(1);
  with_file(sub(poset, "show", "Summarize a poset file"), "poset JSON")->callback([&] {
    action = [&] { return poset_show(flags, file); };
  });
  sub(poset, "enumerate", "Count posets up to isomorphism")->callback([&] {
    action = [&] { return poset_enumerate(flags); };
  });

  auto* lattice = sub(&app, "lattice", "Finite distributive lattices");
  lattice->require_subcommand(1);
  with_file(sub(lattice, "show", "Summarize a lattice file"), "lattice JSON")->callback([&] {
    action = [&] { return lattice_show(flags, file); };
  });
  with_file(sub(lattice, "booleanize", "Boolean envelope"), "lattice JSON")->callback([&] {
    action = [&] { return lattice_booleanize(flags, file); };
  });
  with_file(sub(lattice, "dual", "Order dual in Birkhoff form"), "lattice JSON")->callback([&] {
    action = [&] { return lattice_dual(flags, file); };
  });
  auto* free = sub(lattice, "free", "Free bounded distributive lattice");
  free->add_option("generators", count, "Number of generators")->required()->check(CLI::Range(0, 4));
  free->callback([&] { action = [&] { return lattice_free(flags, count); }; });

  auto* frame = sub(&app, "frame", "Frames and nuclei");
  frame->require_subcommand(1);
  with_file(sub(frame, "nuclei", "List the nucleus lattice"), "lattice JSON")->callback([&] {
    action = [&] { return frame_nuclei(flags, file); };
  });

  auto* space = sub(&app, "space", "Finite spaces");
  space->require_subcommand(1);
  with_file(sub(space, "patch", "Patch topology"), "poset JSON")->callback([&] {
    action = [&] { return space_patch(flags, file); };
  });
  with_file(sub(space, "dual", "de Groot dual"), "poset JSON")->callback([&] {
    action = [&] { return space_dual(flags, file); };
  });
  with_file(sub(space, "onepoint", "One-point compactification"), "poset JSON")->callback([&] {
    action = [&] { return space_onepoint(flags, file); };
  });
  with_file(sub(space, "report", "Closed, compact, elementary and patch counts"), "poset JSON")->callback([&] {
    action = [&] { return space_report_cmd(flags, file); };
  });

  auto* tower = sub(&app, "tower", "Towers of finite posets");
  tower->require_subcommand(1);
  with_file(sub(tower, "threads", "Compatible threads"), "tower JSON")->callback([&] {
    action = [&] { return tower_threads(flags, file); };
  });
  with_file(sub(tower, "patch", "Levelwise patch"), "tower JSON")->callback([&] {
    action = [&] { return tower_map(flags, file, false); };
  });
  with_file(sub(tower, "dual", "Levelwise de Groot dual"), "tower JSON")->callback([&] {
    action = [&] { return tower_map(flags, file, true); };
  });
  auto* gen = sub(tower, "generate", "Print a standard tower");
  gen->add_option("kind", kind, "cantor or dyadic")->required();
  gen->callback([&] { action = [&] { return tower_generate(flags, kind); }; });

  auto* cube = sub(&app, "cube", "Cubical diagrams of vector spaces");
  cube->require_subcommand(1);
  std::string expect;
  auto* check = with_file(sub(cube, "check", "Compare the cartesian criteria"), "cube JSON");
  check->add_option("--expect", expect, "Fail unless the cube is cartesian or not-cartesian")
      ->check(CLI::IsMember({"cartesian", "not-cartesian"}));
  check->callback([&] { action = [&] { return cube_check(flags, file, expect); }; });
  auto* rnd = sub(cube, "random", "Print a random cube");
  rnd->add_option("n", count, "Cube dimension")->required()->check(CLI::Range(1, 4));
  kind = "random";
  rnd->add_option("--kind", kind, "random, limit or perturbed");
  rnd->callback([&] { action = [&] { return cube_random(flags, count, kind); }; });

  auto* ver = sub(&app, "verify", "Run a verification suite");
  std::string suite;
  std::vector<std::string> choices = suite_names;
  choices.push_back("all");
  ver->add_option("suite", suite, "Suite name")->required()->check(CLI::IsMember(choices));
  ver->add_option("tower", tower_file, "Tower JSON (main-theorem only)");
  ver->callback([&] { action = [&] { return verify(flags, suite, tower_file); }; });

  auto* ren = sub(&app, "render", "Hasse diagram as DOT");
  std::string target;
  ren->add_option("target", target, "poset, lattice, nuclei or free")
      ->required()
      ->check(CLI::IsMember({"poset", "lattice", "nuclei", "free"}));
  ren->add_option("input", file, "Input file, or the generator count for free")->required();
  ren->callback([&] { action = [&] { return render(flags, target, file); }; });

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return exit_input;
  }
  flags.depth_given = depth_opt->count() > 0;
  try {
    return action();
  } catch (const InputError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_input;
  } catch (const InternalError& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return exit_failure;
  }
}
