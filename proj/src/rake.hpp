#pragma once

#include <string>
#include <vector>

#include "forest.hpp"
#include "mpc.hpp"

namespace tl {

// Layer decomposition built by iterated leaf removal (rake) and removal of
// the interiors of long degree-2 runs (compress), followed by a promotion
// pass that caps every same-layer path component at a constant length.
struct Decomposition {
  std::vector<int> layer_of;  // per node index, values in 1..L
  int L = 0;                  // layer count
  int l = 4;                  // compress threshold; path components span [l, 2l]
};

struct DecomposeOptions {
  int l = 4;
  double delta = 0.5;
  // Peel applications per phase are 2c with c the smallest count of tag
  // iterations that provably shrinks the residual below a 1/max_degree
  // fraction; a positive override replaces the derived c (used by tests to
  // force the exponentiation machinery to engage).
  int c_override = 0;
};

struct DecomposeStats {
  long long phases = 0;
  long long step1_phases = 0;  // prefix of phases that end in exponentiation
  long long iterations = 0;    // total tag iterations performed
  std::vector<long long> residual_after_phase;
  long long max_ball_nodes = 0;  // peak stored vision-ball size
  int repetitions = 0;           // peel applications per phase (2c)
  int vision_radius = 0;         // final exponentiated vision radius
};

// Sequential reference: tag iterations on the whole forest until every node
// is removed, then the promotion pass. Throws std::runtime_error when an
// iteration removes less than 1/(2(l+1)) of the residual. removed_per_iter,
// when given, receives the per-iteration removal counts.
Decomposition decompose_local(const Forest& f, int l = 4,
                              std::vector<long long>* removed_per_iter = nullptr);

// Same layer assignment computed in supersteps of `cluster` (one machine
// per node): phases of peel applications with exponentiated vision balls,
// then a distributed promotion pass. Output is identical to
// decompose_local(f, opt.l).
Decomposition decompose(const Forest& f, mpc::Cluster& cluster,
                        DecomposeOptions opt = {},
                        DecomposeStats* stats = nullptr);
Decomposition decompose(const Forest& f, DecomposeOptions opt = {},
                        mpc::Config cfg = {}, DecomposeStats* stats = nullptr);

// Validity: layers partition V into 1..L; at most 2 same-or-higher-layer
// neighbors per node; every same-layer component with more than one node is
// a path of [l, 2l] nodes whose members all have exactly 2 same-or-higher
// neighbors; the top layer induces no edges.
bool check_decomposition(const Forest& f, const Decomposition& d,
                         std::string* why = nullptr);

std::string serialize_decomposition(const Forest& f, const Decomposition& d);
Decomposition parse_decomposition(const Forest& f, const std::string& text);

}  // namespace tl
