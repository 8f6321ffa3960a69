#include <doctest.h>

#include <set>

#include "forest.hpp"

using namespace tl;

namespace {

// Union-find-free acyclicity/degree sanity used as an independent check.
void check_invariants(const Forest& f) {
  std::set<std::pair<int, int>> seen;
  for (int e = 0; e < f.m(); ++e) {
    auto [u, v] = f.edge(e);
    CHECK(u != v);
    CHECK(f.id(u) < f.id(v));
    CHECK(seen.insert({u, v}).second);
  }
  for (int v = 0; v < f.n(); ++v) CHECK(f.degree(v) <= f.max_degree());
  // Acyclic: every component has |E| = |V| - 1.
  std::vector<int> comp(f.n(), -1);
  int ncomp = 0;
  for (int s = 0; s < f.n(); ++s) {
    if (comp[s] >= 0) continue;
    std::vector<int> stack{s};
    comp[s] = ncomp;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (int u : f.adj(v))
        if (comp[u] < 0) {
          comp[u] = ncomp;
          stack.push_back(u);
        }
    }
    ++ncomp;
  }
  std::vector<int> nodes(ncomp, 0), edges(ncomp, 0);
  for (int v = 0; v < f.n(); ++v) ++nodes[comp[v]];
  for (int e = 0; e < f.m(); ++e) ++edges[comp[f.edge(e).first]];
  for (int c = 0; c < ncomp; ++c) CHECK(edges[c] == nodes[c] - 1);
}

}  // namespace

TEST_CASE("generators produce the declared shapes") {
  Forest path = generate_forest("path", 8, 2, 0);
  CHECK(path.n() == 8);
  CHECK(path.m() == 7);
  for (int v = 0; v < 8; ++v)
    CHECK(path.degree(v) == ((path.id(v) == 1 || path.id(v) == 8) ? 1 : 2));
  check_invariants(path);

  Forest star = generate_forest("star", 4, 3, 0);
  CHECK(star.m() == 3);
  CHECK(star.degree(star.index_of(1)) == 3);
  for (int id : {2, 3, 4}) CHECK(star.degree(star.index_of(id)) == 1);
  check_invariants(star);
  CHECK_THROWS_AS(generate_forest("star", 6, 3, 0), InvalidInput);
  CHECK_THROWS_AS(generate_forest("nope", 4, 3, 0), InvalidInput);

  for (auto kind : {"balanced", "caterpillar", "random-tree", "forest"}) {
    for (std::uint64_t seed : {0ull, 7ull, 99ull}) {
      Forest f = generate_forest(kind, 41, 3, seed);
      CHECK(f.n() == 41);
      check_invariants(f);
    }
  }
  // random-tree is connected.
  Forest rt = generate_forest("random-tree", 100, 3, 7);
  CHECK(rt.m() == 99);
  check_invariants(rt);
}

TEST_CASE("generation is deterministic in (kind, n, degree, seed)") {
  for (std::uint64_t seed : {1ull, 2ull, 3ull}) {
    Forest a = generate_forest("random-tree", 64, 3, seed);
    Forest b = generate_forest("random-tree", 64, 3, seed);
    CHECK(serialize_tree(a, nullptr) == serialize_tree(b, nullptr));
  }
}

TEST_CASE("tree format parses and round-trips") {
  TreeFile t = parse_tree("TREE v1\nn 2\nedge 1 2\n");
  CHECK(t.forest.n() == 2);
  CHECK(t.forest.m() == 1);
  CHECK(serialize_tree(t.forest, nullptr) == "TREE v1\nn 2\nedge 1 2\n");

  TreeFile lab = parse_tree(
      "TREE v1\nn 2\nedge 1 2\ninlabel 1 2 A\ninlabel 2 1 A\n");
  int e = lab.forest.edge_index(0, 1);
  CHECK(lab.in_labels.label[lab.forest.half_edge(0, e)] == "A");
  CHECK(lab.in_labels.label[lab.forest.half_edge(1, e)] == "A");
  CHECK(serialize_tree(lab.forest, &lab.in_labels) ==
        "TREE v1\nn 2\nedge 1 2\ninlabel 1 2 A\ninlabel 2 1 A\n");

  CHECK_THROWS_AS(parse_tree("TREE v1\nn 3\nedge 1 2\nedge 1 2\n"),
                  InvalidInput);
  CHECK_THROWS_AS(parse_tree("TREE v1\nn 3\nedge 1 2\nedge 2 3\nedge 1 3\n"),
                  InvalidInput);
  CHECK_THROWS_AS(parse_tree("n 2\n"), ParseError);
  CHECK_THROWS_AS(parse_tree("TREE v1\nedge 1 2\n"), ParseError);
  CHECK_THROWS_AS(parse_tree("TREE v1\nn 2\nedge 1 1\n"), ParseError);
  CHECK_THROWS_AS(parse_tree("TREE v1\nn 2\nwat 1\n"), ParseError);

  // Comments and blank lines are ignored.
  TreeFile c = parse_tree("# hi\nTREE v1\n\nn 1\n# done\n");
  CHECK(c.forest.n() == 1);
  CHECK(c.forest.m() == 0);
}

TEST_CASE("round-trip identity over a seeded corpus") {
  for (std::uint64_t seed = 0; seed < 50; ++seed) {
    Forest f = generate_forest("random-tree", 30 + static_cast<int>(seed), 3,
                               seed);
    std::string text = serialize_tree(f, nullptr);
    TreeFile back = parse_tree(text);
    CHECK(serialize_tree(back.forest, nullptr) == text);
  }
}

TEST_CASE("half-edge indexing") {
  Forest one = generate_forest("path", 1, 2, 0);
  CHECK(one.m() == 0);

  Forest p3 = generate_forest("path", 3, 2, 0);
  CHECK(2 * p3.m() == 4);
  for (int e = 0; e < p3.m(); ++e) {
    auto [u, v] = p3.edge(e);
    CHECK(p3.half_edge_node(p3.half_edge(u, e)) == u);
    CHECK(p3.half_edge_other(p3.half_edge(u, e)) == v);
    CHECK(p3.half_edge(u, e) / 2 == e);
  }

  Forest t = generate_forest("random-tree", 20, 3, 5);
  CHECK(2 * t.m() == 38);
  CHECK(t.edge_index(t.index_of(1), t.index_of(2)) ==
        t.edge_index(t.index_of(2), t.index_of(1)));
}
