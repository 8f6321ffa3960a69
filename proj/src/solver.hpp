#pragma once

#include <memory>
#include <string>
#include <vector>

#include "compat.hpp"
#include "forest.hpp"
#include "lcl.hpp"
#include "mpc.hpp"

namespace tl {

// Ancestor link: completability summary for the path from u up to its
// strict ancestor v, including the subtrees hanging from that path. The
// first edge of the path is u's parent edge; the last edge is identified by
// its child endpoint.
struct SolverLink {
  int u = -1;
  int v = -1;
  PairSet pairs = 0;       // (label at u's half of first, label at v's half
                           // of last) completable in between
  int pred = -1;           // node that joined the two halves; -1 for edges
  int last_child = -1;     // child endpoint of the last edge
  LabelSet start_allowed = 0;  // allowed labels at u when u is a leaf
  bool start_is_leaf = false;
  bool active = true;
};

// Post-run snapshot for differential tests: the reduced compatibility tree,
// every link ever created (one copy each, creation order), and the final
// per-slot memo sets (-1 where still undecided).
struct SolveDebug {
  CompatTree reduced;
  std::vector<SolverLink> links;
  std::vector<std::vector<long long>> memo;
};

struct SolveStats {
  bool want_debug = false;  // set before the call to fill `debug`

  int reduce_steps = 0;
  std::vector<int> nodes_after_reduce;  // residual node counts, one per step
  long long phase1_iterations = 0;      // max over components
  long long phase2_iterations = 0;
  long long total_links = 0;       // |links| at the end (single copies)
  long long max_stored_links = 0;  // peak both-endpoint copies, all machines
  // Potential per upward-pass iteration (index 0 = before iteration 1),
  // summed over components: leaf count, chain weight, and their sum.
  std::vector<double> phi_prime, phi_dblprime, phi;
  long long supersteps = 0;  // cluster rounds consumed (0 in direct mode)
  std::shared_ptr<SolveDebug> debug;

  // CSV: iteration,phase,phi_prime,phi_dblprime,phi,active_links,total_links
  std::string trace_csv() const;
  std::vector<std::string> trace_rows;  // body rows, filled during the run
};

struct SolveResult {
  bool solved = false;
  HalfEdgeLabeling g_out;
};

// Solves any node-edge-checkable problem on a bounded-degree forest:
// orients each component, folds it into a reduced compatibility tree,
// computes completability links leaves-to-root, fixes labels root-to-leaves
// (lexicographically smallest at every choice point), and lifts the
// solution back through the reduction replay. Returns solved=false when the
// instance admits no correct labeling.
//
// The first overload runs every protocol step inside `cluster` (one machine
// per node); the second runs the same code path with direct message
// delivery and no memory ledger.
SolveResult solve(const Forest& f, const NodeEdgeLcl& lcl,
                  const HalfEdgeLabeling& g_in, mpc::Cluster& cluster,
                  SolveStats* stats = nullptr);
SolveResult solve(const Forest& f, const NodeEdgeLcl& lcl,
                  const HalfEdgeLabeling& g_in, SolveStats* stats = nullptr);

std::string serialize_solution(const Forest& f, const NodeEdgeLcl& lcl,
                               const SolveResult& r);

}  // namespace tl
