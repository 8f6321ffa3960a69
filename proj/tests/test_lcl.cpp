#include <doctest.h>

#include "lcl.hpp"

using namespace tl;

namespace {

// Enumerates all total output labelings and counts the valid ones.
int count_valid(const Forest& f, const NodeEdgeLcl& lcl) {
  int H = 2 * f.m();
  HalfEdgeLabeling in = uniform_input(f, lcl.sigma_in[0]);
  HalfEdgeLabeling out(H);
  int k = static_cast<int>(lcl.sigma_out.size());
  long long total = 1;
  for (int h = 0; h < H; ++h) total *= k;
  int valid = 0;
  for (long long code = 0; code < total; ++code) {
    long long c = code;
    for (int h = 0; h < H; ++h) {
      out.label[h] = lcl.sigma_out[c % k];
      c /= k;
    }
    if (check_solution(f, lcl, in, out).valid()) ++valid;
  }
  return valid;
}

}  // namespace

TEST_CASE("builtin problems have the declared shapes") {
  NodeEdgeLcl three = builtin_lcl("three-coloring", 3);
  CHECK(three.sigma_out == std::vector<std::string>{"0", "1", "2"});
  CHECK(three.edge_constraint.size() == 3);
  for (int d = 1; d <= 3; ++d)
    CHECK(three.node_constraints[d - 1].size() == 3);

  NodeEdgeLcl two = builtin_lcl("two-coloring", 3);
  CHECK(two.sigma_out.size() == 2);
  CHECK(two.edge_constraint == std::vector<std::pair<int, int>>{{0, 1}});

  NodeEdgeLcl bad = builtin_lcl("unsatisfiable-edge", 3);
  CHECK(bad.edge_constraint.empty());

  CHECK_THROWS_AS(builtin_lcl("seventeen-coloring", 3), InvalidInput);
}

TEST_CASE("check_solution enforces all three conditions") {
  Forest f = parse_tree("TREE v1\nn 2\nedge 1 2\n").forest;
  NodeEdgeLcl lcl = builtin_lcl("three-coloring", 3);
  HalfEdgeLabeling in = uniform_input(f, "_");

  HalfEdgeLabeling out(2);
  out.label = {"0", "1"};
  CHECK(check_solution(f, lcl, in, out).valid());

  out.label = {"0", "0"};
  Verdict v = check_solution(f, lcl, in, out);
  CHECK(!v.valid());
  CHECK(v.violations.size() == 1);
  CHECK(v.violations[0].kind == Violation::EdgePair);

  out.label = {"0", "9"};
  v = check_solution(f, lcl, in, out);
  CHECK(!v.valid());
  CHECK(v.violations[0].kind == Violation::Alphabet);

  // A degree-2 node replicating its color vs mixing colors.
  Forest p3 = generate_forest("path", 3, 2, 0);
  NodeEdgeLcl lcl2 = builtin_lcl("three-coloring", 2);
  HalfEdgeLabeling in3 = uniform_input(p3, "_");
  HalfEdgeLabeling out3(4);
  // Edges are {1,2},{2,3}; half-edges (1),(2),(2),(3).
  out3.label = {"0", "1", "1", "2"};
  CHECK(check_solution(p3, lcl2, in3, out3).valid());
  out3.label = {"0", "1", "2", "0"};
  v = check_solution(p3, lcl2, in3, out3);
  CHECK(!v.valid());
  CHECK(v.violations[0].kind == Violation::NodeMultiset);
}

TEST_CASE("input map is enforced per half-edge") {
  Forest f = parse_tree("TREE v1\nn 2\nedge 1 2\n").forest;
  NodeEdgeLcl lcl = builtin_lcl("two-coloring", 3);
  lcl.sigma_in = {"a", "b"};
  lcl.input_map = {{0}, {1}};  // a forces 0, b forces 1
  lcl.validate();
  HalfEdgeLabeling in(2), out(2);
  in.label = {"a", "b"};
  out.label = {"0", "1"};
  CHECK(check_solution(f, lcl, in, out).valid());
  out.label = {"1", "0"};
  Verdict v = check_solution(f, lcl, in, out);
  CHECK(v.violations.size() == 2);
  CHECK(v.violations[0].kind == Violation::InputMap);
}

TEST_CASE("free accepts everything; unsatisfiable-edge accepts nothing") {
  for (int n = 2; n <= 4; ++n) {
    for (auto kind : {"path", "star"}) {
      if (std::string(kind) == "star" && n < 3) continue;
      Forest f = generate_forest(kind, n, 3, 0);
      int H = 2 * f.m();
      int k = 2;
      int total = 1;
      for (int h = 0; h < H; ++h) total *= k;
      CHECK(count_valid(f, builtin_lcl("free", 3)) == total);
      CHECK(count_valid(f, builtin_lcl("unsatisfiable-edge", 3)) == 0);
    }
  }
}

TEST_CASE("LCL format round-trips and validates cardinality") {
  for (auto name : {"three-coloring", "two-coloring", "unsatisfiable-edge",
                    "free"}) {
    NodeEdgeLcl lcl = builtin_lcl(name, 3);
    std::string text = serialize_lcl(lcl);
    NodeEdgeLcl back = parse_lcl(text);
    CHECK(serialize_lcl(back) == text);
    CHECK(back.sigma_out == lcl.sigma_out);
    CHECK(back.edge_constraint == lcl.edge_constraint);
    CHECK(back.node_constraints == lcl.node_constraints);
    CHECK(back.input_map == lcl.input_map);
  }

  CHECK_THROWS_AS(
      parse_lcl("LCL v1\nsigma_in: _\nsigma_out: 0 1\n"
                "node 1: {0}\nnode 2: {0 0 1}\nedge: {0 1}\ng: _ -> 0 1\n"),
      std::runtime_error);
  CHECK_THROWS_AS(parse_lcl("LCL v1\nsigma_in: _\nsigma_out: 0\n"
                            "node 1: {0}\nedge: {0 0}\ng: x -> 0\n"),
                  ParseError);
  CHECK_THROWS_AS(parse_lcl("nope\n"), ParseError);
}
