#pragma once

#include <string>
#include <vector>

#include "forest.hpp"

namespace tl {

// Node-edge-checkable LCL problem. Output symbols are kept in a fixed total
// order (their index); all tie-breaks downstream use that order. Multisets
// are stored as sorted vectors of symbol indices.
struct NodeEdgeLcl {
  std::vector<std::string> sigma_in;
  std::vector<std::string> sigma_out;
  int max_degree = 0;
  // node_constraints[d-1]: allowed multisets of cardinality d, sorted.
  std::vector<std::vector<std::vector<int>>> node_constraints;
  // Allowed cardinality-2 multisets {a,b} with a <= b, sorted.
  std::vector<std::pair<int, int>> edge_constraint;
  // input_map[i]: sorted allowed output indices for input symbol i.
  std::vector<std::vector<int>> input_map;

  int in_index(const std::string& sym) const;   // -1 when absent
  int out_index(const std::string& sym) const;  // -1 when absent
  void validate() const;                        // throws InvalidInput
};

// name: three-coloring | two-coloring | unsatisfiable-edge | free.
NodeEdgeLcl builtin_lcl(const std::string& name, int max_degree);

NodeEdgeLcl parse_lcl(const std::string& text);
std::string serialize_lcl(const NodeEdgeLcl& lcl);

struct Violation {
  enum Kind { NodeMultiset, EdgePair, InputMap, Alphabet } kind;
  std::string where;  // human-readable location
};

struct Verdict {
  std::vector<Violation> violations;
  bool valid() const { return violations.empty(); }
};

// Checks Def-style conditions: node multiset membership, edge pair
// membership, and g_out(h) in g(g_in(h)) per half-edge. Both labelings must
// be total on the half-edges of f. Degree-0 nodes are vacuously valid.
Verdict check_solution(const Forest& f, const NodeEdgeLcl& lcl,
                       const HalfEdgeLabeling& g_in,
                       const HalfEdgeLabeling& g_out);

// Fills every half-edge with sym; the conventional "no input" labeling.
HalfEdgeLabeling uniform_input(const Forest& f, const std::string& sym);

// The input labeling actually used by solvers: the provided one, with empty
// slots defaulted to the first input symbol when the LCL has a single
// input symbol.
HalfEdgeLabeling effective_input(const Forest& f, const NodeEdgeLcl& lcl,
                                 const HalfEdgeLabeling& provided);

}  // namespace tl
