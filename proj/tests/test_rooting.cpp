#include <doctest.h>

#include <cmath>

#include "rooting.hpp"

using namespace tl;

namespace {

// Small instances need roomier local capacity: with n^delta tiny, the
// default budget cannot even hold a degree-3 node's records plus traffic.
mpc::Config small_cfg() {
  mpc::Config cfg;
  cfg.c_local = 64;
  return cfg;
}

Orientation rooted(const Forest& f, RootingStats* stats = nullptr,
                   mpc::Config cfg = small_cfg()) {
  Orientation o = root_forest(f, cfg, stats);
  std::string why;
  CHECK_MESSAGE(check_orientation(f, o, &why), why);
  return o;
}

}  // namespace

TEST_CASE("path exponentiation step counts") {
  CHECK(exponentiate_path(1).steps == 0);
  CHECK(exponentiate_path(2).steps == 0);
  CHECK(exponentiate_path(3).steps == 1);
  CHECK(exponentiate_path(8).steps == 3);
  for (int len = 2; len <= 220; ++len) {
    PathExpStats s = exponentiate_path(len);
    int bound =
        static_cast<int>(std::ceil(std::log(len - 1.0) / std::log(1.5))) + 2;
    CHECK(s.steps <= bound);
    CHECK(s.max_stored_edges <= 2);
  }
}

TEST_CASE("rooting on the documented small shapes") {
  // Single node: it is its own root.
  Forest one({7}, {});
  Orientation o1 = rooted(one);
  CHECK(o1.roots == std::vector<int>{0});

  // Two nodes: the lower ID closes its path, the higher ID becomes root.
  Forest two = parse_tree("TREE v1\nn 2\nedge 1 2\n").forest;
  Orientation o2 = rooted(two);
  CHECK(o2.roots == std::vector<int>{two.index_of(2)});
  CHECK(o2.parent[two.index_of(1)] == two.index_of(2));

  // Star: the center survives every leaf removal.
  Forest star = generate_forest("star", 5, 4, 0);
  Orientation os = rooted(star);
  CHECK(os.roots == std::vector<int>{star.index_of(1)});

  // Forest of two disjoint edges: one root per component, higher ID each.
  Forest pairs({1, 2, 3, 4}, {{1, 2}, {3, 4}});
  Orientation op = rooted(pairs);
  CHECK(op.roots ==
        std::vector<int>{pairs.index_of(2), pairs.index_of(4)});
}

TEST_CASE("rooting paths of every small length") {
  for (int len = 1; len <= 40; ++len) {
    Forest f = generate_forest("path", len, 2, 0);
    RootingStats st;
    rooted(f, &st);
    for (std::size_t i = 1; i < st.residuals.size(); ++i)
      CHECK(9 * st.residuals[i] <= 7 * st.residuals[i - 1]);
    CHECK(st.max_records_per_node <= 2);
  }
}

TEST_CASE("rooting random trees and forests") {
  for (std::uint64_t seed = 0; seed < 12; ++seed)
    for (auto kind : {"random-tree", "caterpillar", "balanced", "forest"}) {
      Forest f = generate_forest(kind, 30 + static_cast<int>(seed) * 9, 3,
                                 seed);
      RootingStats st;
      rooted(f, &st);
      CHECK(st.max_records_per_node <= 3);
    }
}

TEST_CASE("rooting is deterministic under evaluation-order reversal") {
  Forest f = generate_forest("random-tree", 80, 3, 5);
  mpc::Config a = small_cfg();
  mpc::Config b = small_cfg();
  b.reverse_order = true;
  b.nondeterminism_check = true;
  Orientation oa = root_forest(f, a);
  Orientation ob = root_forest(f, b);
  CHECK(oa.parent == ob.parent);
  CHECK(oa.roots == ob.roots);
  CHECK(serialize_orientation(f, oa) == serialize_orientation(f, ob));
}

TEST_CASE("per-component runs match the joint run") {
  // A forest's components cannot influence each other.
  Forest joint = generate_forest("forest", 60, 3, 9);
  Orientation oj = rooted(joint);
  std::vector<int> comp(joint.n(), -1);
  int ncomp = 0;
  for (int s = 0; s < joint.n(); ++s) {
    if (comp[s] != -1) continue;
    comp[s] = ncomp;
    std::vector<int> queue{s};
    for (std::size_t q = 0; q < queue.size(); ++q)
      for (int u : joint.adj(queue[q]))
        if (comp[u] == -1) {
          comp[u] = ncomp;
          queue.push_back(u);
        }
    ++ncomp;
  }
  for (int c = 0; c < ncomp; ++c) {
    std::vector<int> ids;
    std::vector<std::pair<int, int>> edges;
    for (int v = 0; v < joint.n(); ++v)
      if (comp[v] == c) ids.push_back(joint.id(v));
    for (int e = 0; e < joint.m(); ++e) {
      auto [u, v] = joint.edge(e);
      if (comp[u] == c) edges.push_back({joint.id(u), joint.id(v)});
    }
    Forest sub(ids, edges, joint.max_degree());
    Orientation os = rooted(sub);
    for (int v = 0; v < sub.n(); ++v) {
      int jv = joint.index_of(sub.id(v));
      int want = os.parent[v] < 0 ? -1 : joint.index_of(sub.id(os.parent[v]));
      CHECK(oj.parent[jv] == (os.parent[v] < 0 ? -1 : want));
    }
  }
}

TEST_CASE("rooting a thousand-node tree stays within the phase budget") {
  Forest f = generate_forest("random-tree", 1000, 3, 42);
  RootingStats st;
  mpc::Cluster cluster(f.n(), f.n(), f.m(), {});
  Orientation o = root_forest(f, cluster, &st);
  std::string why;
  CHECK_MESSAGE(check_orientation(f, o, &why), why);
  CHECK(st.phases <= 9 * static_cast<long long>(std::log2(1000)) + 40);
  for (std::size_t i = 1; i < st.residuals.size(); ++i)
    CHECK(9 * st.residuals[i] <= 7 * st.residuals[i - 1]);
  CHECK(cluster.peak_local_words() <= cluster.local_capacity());
  CHECK(cluster.peak_global_words() <= cluster.global_capacity());
}

TEST_CASE("orientation serialization round-trips") {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    Forest f = generate_forest("forest", 25, 3, seed);
    Orientation o = rooted(f);
    std::string text = serialize_orientation(f, o);
    Orientation back = parse_orientation(f, text);
    CHECK(back.parent == o.parent);
    CHECK(back.roots == o.roots);
    CHECK(serialize_orientation(f, back) == text);
  }
}

TEST_CASE("orientation parse errors") {
  Forest f = parse_tree("TREE v1\nn 2\nedge 1 2\n").forest;
  CHECK_THROWS_AS(parse_orientation(f, ""), ParseError);
  CHECK_THROWS_AS(parse_orientation(f, "ORIENT v2\nroot 2\nparent 1 2\n"),
                  ParseError);
  CHECK_THROWS_AS(parse_orientation(f, "ORIENT v1\nroot 2\n"), ParseError);
  CHECK_THROWS_AS(
      parse_orientation(f, "ORIENT v1\nroot 2\nroot 2\nparent 1 2\n"),
      ParseError);
  CHECK_THROWS_AS(parse_orientation(f, "ORIENT v1\nroot 3\nparent 1 2\n"),
                  ParseError);
  CHECK_THROWS_AS(parse_orientation(f, "ORIENT v1\nroot 2\nwat 1 2\n"),
                  ParseError);
  Orientation ok =
      parse_orientation(f, "# comment\nORIENT v1\nroot 2\nparent 1 2\n");
  CHECK(ok.roots == std::vector<int>{f.index_of(2)});
}
