#pragma once

#include <map>
#include <optional>

#include "compat.hpp"
#include "forest.hpp"
#include "lcl.hpp"

namespace tl {

struct BudgetExceeded : std::runtime_error {
  BudgetExceeded() : std::runtime_error("enumeration budget exceeded") {}
};

struct OracleVerdict {
  bool solvable = false;
  std::optional<HalfEdgeLabeling> witness;  // lexicographically smallest
};

// Exhaustive search over all total output labelings, enumerated over
// half-edges sorted by (node ID, neighbor ID) with labels in sigma_out
// order. Throws BudgetExceeded past `budget` assignments.
OracleVerdict brute_solve(const Forest& f, const NodeEdgeLcl& lcl,
                          const HalfEdgeLabeling& g_in,
                          long long budget = 10'000'000);

// Reference semantics for the solver's memo entries and link pair sets,
// computed by an independent bottom-up DP over the compatibility tree.
struct CompletabilityDp {
  // For edge (c, parent(c)): labels at the parent half extendable to a
  // correct solution of the subtree hanging below the edge (the child side
  // constrained, the parent side not).
  std::vector<LabelSet> down;  // keyed by child node; 0 where undefined

  // Pair set for a descendant/ancestor pair (u, v): pairs (label at u's
  // parent-edge child half, label at v's half of the edge entering v from
  // u's direction) extendable to a correct solution of everything strictly
  // between, with u and v themselves unconstrained.
  PairSet pair_set(const CompatTree& ct, int u, int v) const;
};

CompletabilityDp completability_dp(const CompatTree& ct);

}  // namespace tl
