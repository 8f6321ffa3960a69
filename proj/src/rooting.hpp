#pragma once

#include <string>
#include <vector>

#include "forest.hpp"
#include "mpc.hpp"

namespace tl {

// Child-to-parent orientation per node index; -1 marks a component root.
struct Orientation {
  std::vector<int> parent;
  std::vector<int> roots;  // node indices, ascending
};

struct PathExpStats {
  int steps = 0;             // exponentiation steps until the endpoints meet
  int max_stored_edges = 0;  // peak virtual edges held by any single node
};

// Sequential reference simulation of path exponentiation on a path with
// `length` nodes; endpoints are the two ends, everyone else is internal.
PathExpStats exponentiate_path(int length);

struct RootingStats {
  long long phases = 0;
  long long post_steps = 0;
  // Residual size of the unfinished part of the virtual graph, recorded
  // once per phase after removals; shrinks by a factor >= 2/9 per phase.
  std::vector<long long> residuals;
  long long set_aside_paths = 0;
  int max_records_per_node = 0;
};

// Computes a rooted orientation of every component by leaf removal and
// repeated path exponentiation, entirely in supersteps of `cluster` (one
// machine per node). Throws std::runtime_error if a phase removes less than
// 2/9 of the residual or a protocol invariant breaks.
Orientation root_forest(const Forest& f, mpc::Cluster& cluster,
                        RootingStats* stats = nullptr);
Orientation root_forest(const Forest& f, mpc::Config cfg = {},
                        RootingStats* stats = nullptr);

// One root per component, every parent an input neighbor, every node's
// parent chain reaching its component's root.
bool check_orientation(const Forest& f, const Orientation& o,
                       std::string* why = nullptr);

std::string serialize_orientation(const Forest& f, const Orientation& o);
Orientation parse_orientation(const Forest& f, const std::string& text);

}  // namespace tl
