#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "forest.hpp"
#include "lcl.hpp"

namespace tl {

// Label sets are bitmasks over output-symbol indices; pair sets use bit
// a*K + b for the ordered pair (a, b) with a the child half. K is capped so
// a pair set fits one word.
using LabelSet = std::uint32_t;
using PairSet = std::uint64_t;
constexpr int kMaxOut = 8;

// Rooted tree whose edges carry allowed label-pair sets and whose nodes
// carry allowed tuple sets. Nodes address half-edges through slots: slot s
// of node v is v's s-th incident edge of the original forest, and keeps its
// identity when reductions replace the edge it lies on.
struct CompatTree {
  int K = 0;  // |Sigma_out|
  int root = -1;
  std::vector<char> alive;
  std::vector<int> parent;       // -1 for the root
  std::vector<int> parent_slot;  // slot of the edge toward the parent
  std::vector<std::vector<int>> children;  // sorted by node index

  std::vector<std::vector<int>> slot_neighbor;  // -1 once the slot is gone
  std::vector<std::vector<char>> slot_alive;

  // Pair set of the edge (child, parent), keyed by the child node.
  std::vector<PairSet> edge_pairs;
  // Allowed tuples per node, entries ordered by slot index over alive
  // slots; each tuple's length equals the node's current degree.
  std::vector<std::vector<std::vector<int>>> tuples;

  int node_count() const;
  int degree(int v) const;
  bool is_root(int v) const { return parent[v] < 0; }
  std::vector<int> roots() const;
  // Alive slot indices of v in slot order.
  std::vector<int> alive_slots(int v) const;
  // Position of slot s among v's alive slots (tuple entry index).
  int tuple_pos(int v, int s) const;
  int slot_of_neighbor(int v, int u) const;
};

// Half-edge labels per (node, slot); -1 means unset.
using SlotLabeling = std::vector<std::vector<int>>;

// Orientation: parent[v] per node index, -1 for roots.
CompatTree build_g0(const Forest& f, const std::vector<int>& parent,
                    const NodeEdgeLcl& lcl, const HalfEdgeLabeling& g_in);

// Checks the two compatibility conditions on alive nodes/edges.
bool check_compat_solution(const CompatTree& ct, const SlotLabeling& lab);

// Replay record for one reduction step, enough to lift a solution back.
struct ContractionRecord {
  int v, child, par;
  int v_child_slot, v_parent_slot;  // slots at v
  int child_slot, par_slot;         // slot at child toward v; slot at par
  PairSet s_child_v;   // pairs of the old edge (child, v)
  PairSet s_v_parent;  // pairs of the old edge (v, parent)
  std::vector<std::vector<int>> v_tuples;
};
struct LeafPruneRecord {
  int parent;
  std::vector<int> leaves;        // removed children, in slot order at parent
  std::vector<int> leaf_slots;    // the single alive slot at each leaf
  std::vector<int> parent_slots;  // parent slot per removed leaf
  std::vector<PairSet> leaf_pairs;           // edge pairs per removed leaf
  std::vector<LabelSet> leaf_allowed;        // allowed labels at each leaf
  std::vector<std::vector<int>> old_tuples;  // parent tuples before pruning
  std::vector<int> old_alive_slots;          // parent slot order before
};
struct ReduceRecord {
  std::vector<ContractionRecord> contractions;
  std::vector<LeafPruneRecord> prunes;
};

// One reduction step: contract an MIS of non-root degree-2 nodes, then
// remove all non-root leaves, filtering parent tuple sets.
ReduceRecord reduce_step(CompatTree& ct);

// Applies reduce_step t times (t = max(1, floor(2*log2 log2 n)) when t < 0).
std::vector<ReduceRecord> shrink(CompatTree& ct, int t = -1);

// Extends a solution of the reduced tree to the nodes removed by rec,
// choosing lexicographically smallest labels. Returns false if no
// consistent extension exists (unsolvable instance).
bool lift_back(int K, const ReduceRecord& rec, SlotLabeling& lab);

}  // namespace tl
