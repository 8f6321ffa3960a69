#include <doctest.h>

#include <algorithm>
#include <functional>

#include "oracle.hpp"

using namespace tl;

namespace {

// Straight BFS rooting at the smallest-ID node per component; test-local
// stand-in for the distributed rooting.
std::vector<int> bfs_parents(const Forest& f) {
  std::vector<int> parent(f.n(), -2);
  for (int s = 0; s < f.n(); ++s) {
    if (parent[s] != -2) continue;
    parent[s] = -1;
    std::vector<int> queue{s};
    for (std::size_t q = 0; q < queue.size(); ++q) {
      int v = queue[q];
      for (int u : f.adj(v))
        if (parent[u] == -2) {
          parent[u] = v;
          queue.push_back(u);
        }
    }
  }
  return parent;
}

// Enumerates labelings of the subtree below child edge (c, parent(c)),
// including the parent's half of that edge, with no constraint at the
// parent; returns the set of feasible parent-half labels.
LabelSet brute_down(const CompatTree& ct, int c) {
  std::vector<int> nodes;
  std::vector<int> stack{c};
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    nodes.push_back(v);
    for (int u : ct.children[v]) stack.push_back(u);
  }
  LabelSet result = 0;
  for (int parent_half = 0; parent_half < ct.K; ++parent_half) {
    // Assign tuples to all subtree nodes consistently.
    std::vector<int> choice(nodes.size(), 0);
    std::function<bool(std::size_t)> rec = [&](std::size_t i) -> bool {
      if (i == nodes.size()) return true;
      int v = nodes[i];
      for (std::size_t t = 0; t < ct.tuples[v].size(); ++t) {
        choice[i] = static_cast<int>(t);
        // Check edge constraints to already-assigned ancestors inside the
        // subtree, and to the parent half when v == c.
        auto slots = ct.alive_slots(v);
        const auto& tup = ct.tuples[v][choice[i]];
        bool ok = true;
        int own_parent_label = -1;
        for (std::size_t s = 0; s < slots.size(); ++s)
          if (slots[s] == ct.parent_slot[v]) own_parent_label = tup[s];
        if (v == c) {
          ok = (ct.edge_pairs[c] >> (own_parent_label * ct.K + parent_half) &
                1) != 0;
        } else {
          int p = ct.parent[v];
          auto it = std::find(nodes.begin(), nodes.begin() + i, p);
          std::size_t pi = it - nodes.begin();
          const auto& ptup = ct.tuples[p][choice[pi]];
          auto pslots = ct.alive_slots(p);
          int ps = ct.slot_of_neighbor(p, v);
          int plabel = -1;
          for (std::size_t s = 0; s < pslots.size(); ++s)
            if (pslots[s] == ps) plabel = ptup[s];
          ok = (ct.edge_pairs[v] >> (own_parent_label * ct.K + plabel) & 1) !=
               0;
        }
        if (ok && rec(i + 1)) return true;
      }
      return false;
    };
    if (rec(0)) result |= LabelSet{1} << parent_half;
  }
  return result;
}

}  // namespace

TEST_CASE("brute force on two-node instances") {
  Forest f = parse_tree("TREE v1\nn 2\nedge 1 2\n").forest;
  HalfEdgeLabeling in = uniform_input(f, "_");

  OracleVerdict two = brute_solve(f, builtin_lcl("two-coloring", 3), in);
  CHECK(two.solvable);
  CHECK(two.witness->label[0] != two.witness->label[1]);
  // Lexicographically smallest witness: half-edge of node 1 first.
  CHECK(two.witness->label[0] == "0");
  CHECK(two.witness->label[1] == "1");

  CHECK(!brute_solve(f, builtin_lcl("unsatisfiable-edge", 3), in).solvable);
}

TEST_CASE("brute force agrees with bipartiteness and budget") {
  for (std::uint64_t seed = 0; seed < 8; ++seed) {
    Forest f = generate_forest("random-tree", 6, 3, seed);
    HalfEdgeLabeling in = uniform_input(f, "_");
    CHECK(brute_solve(f, builtin_lcl("three-coloring", 3), in).solvable);
    CHECK(brute_solve(f, builtin_lcl("two-coloring", 3), in).solvable);
    auto w = brute_solve(f, builtin_lcl("free", 3), in);
    CHECK(w.solvable);
    for (const auto& s : w.witness->label) CHECK(s == "0");
  }
  Forest big = generate_forest("random-tree", 40, 3, 1);
  CHECK_THROWS_AS(
      brute_solve(big, builtin_lcl("three-coloring", 3),
                  uniform_input(big, "_")),
      BudgetExceeded);
}

TEST_CASE("downward sets match brute enumeration") {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    Forest f = generate_forest("random-tree", 7, 3, seed);
    auto parent = bfs_parents(f);
    for (auto name : {"three-coloring", "two-coloring", "unsatisfiable-edge",
                      "free"}) {
      NodeEdgeLcl lcl = builtin_lcl(name, 3);
      CompatTree ct = build_g0(f, parent, lcl, uniform_input(f, "_"));
      CompletabilityDp dp = completability_dp(ct);
      for (int c = 0; c < f.n(); ++c) {
        if (ct.parent[c] < 0) continue;
        CHECK(dp.down[c] == brute_down(ct, c));
      }
    }
  }
}

TEST_CASE("downward set for a leaf under three-coloring") {
  Forest f = parse_tree("TREE v1\nn 2\nedge 1 2\n").forest;
  std::vector<int> parent{1, -1};
  CompatTree ct =
      build_g0(f, parent, builtin_lcl("three-coloring", 3),
               uniform_input(f, "_"));
  CompletabilityDp dp = completability_dp(ct);
  CHECK(dp.down[0] == 0b111);  // every color differs from some leaf color

  CompatTree bad = build_g0(f, parent, builtin_lcl("unsatisfiable-edge", 3),
                            uniform_input(f, "_"));
  CHECK(completability_dp(bad).down[0] == 0);
}

TEST_CASE("pair composition through a 2-node") {
  // Path u - v - w rooted at w; both edges carry {(0,1),(1,2)}; v allows
  // exactly the distinct ordered pairs.
  CompatTree ct;
  ct.K = 3;
  ct.root = 2;
  ct.alive = {1, 1, 1};
  ct.parent = {1, 2, -1};
  ct.parent_slot = {0, 1, -1};
  ct.children = {{}, {0}, {1}};
  ct.slot_neighbor = {{1}, {0, 2}, {1}};
  ct.slot_alive = {{1}, {1, 1}, {1}};
  auto pairset = [&](std::initializer_list<std::pair<int, int>> ps) {
    PairSet s = 0;
    for (auto [a, b] : ps) s |= PairSet{1} << (a * 3 + b);
    return s;
  };
  ct.edge_pairs = {pairset({{0, 1}, {1, 2}}), pairset({{0, 1}, {1, 2}}), 0};
  ct.tuples = {{{0}, {1}, {2}},
               {{0, 1}, {0, 2}, {1, 0}, {1, 2}, {2, 0}, {2, 1}},
               {{0}, {1}, {2}}};
  CompletabilityDp dp = completability_dp(ct);
  CHECK(dp.pair_set(ct, 0, 1) == pairset({{0, 1}, {1, 2}}));
  CHECK(dp.pair_set(ct, 0, 2) == pairset({{0, 1}, {1, 1}, {1, 2}}));
}
