#include "oracle.hpp"

#include <algorithm>

namespace tl {

OracleVerdict brute_solve(const Forest& f, const NodeEdgeLcl& lcl,
                          const HalfEdgeLabeling& g_in, long long budget) {
  int H = 2 * f.m();
  int K = static_cast<int>(lcl.sigma_out.size());
  // Enumeration positions: half-edges by (node ID, neighbor ID).
  std::vector<int> order(H);
  for (int h = 0; h < H; ++h) order[h] = h;
  std::sort(order.begin(), order.end(), [&](int a, int b) {
    auto key = [&](int h) {
      return std::make_pair(f.id(f.half_edge_node(h)),
                            f.id(f.half_edge_other(h)));
    };
    return key(a) < key(b);
  });
  double combos = 1;
  for (int h = 0; h < H; ++h) {
    combos *= K;
    if (combos > static_cast<double>(budget)) throw BudgetExceeded();
  }
  HalfEdgeLabeling out(H);
  std::vector<int> digit(H, 0);
  OracleVerdict verdict;
  while (true) {
    for (int pos = 0; pos < H; ++pos)
      out.label[order[pos]] = lcl.sigma_out[digit[pos]];
    if (H == 0 || check_solution(f, lcl, g_in, out).valid()) {
      verdict.solvable = true;
      verdict.witness = out;
      return verdict;
    }
    int pos = H - 1;
    while (pos >= 0 && digit[pos] == K - 1) digit[pos--] = 0;
    if (pos < 0) break;
    ++digit[pos];
  }
  return verdict;
}

CompletabilityDp completability_dp(const CompatTree& ct) {
  CompletabilityDp dp;
  int n = static_cast<int>(ct.alive.size());
  dp.down.assign(n, 0);
  // Bottom-up by depth: process children before parents.
  std::vector<int> topo;
  {
    std::vector<int> stack = ct.roots();
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      topo.push_back(v);
      for (int c : ct.children[v]) stack.push_back(c);
    }
    std::reverse(topo.begin(), topo.end());
  }
  int K = ct.K;
  for (int c : topo) {
    if (ct.parent[c] < 0) continue;
    auto slots = ct.alive_slots(c);
    LabelSet set = 0;
    for (const auto& t : ct.tuples[c]) {
      bool ok = true;
      int own = -1;
      for (std::size_t i = 0; i < slots.size() && ok; ++i) {
        int s = slots[i];
        if (s == ct.parent_slot[c]) {
          own = t[i];
          continue;
        }
        ok = (dp.down[ct.slot_neighbor[c][s]] >> t[i] & 1) != 0;
      }
      if (!ok) continue;
      for (int b = 0; b < K; ++b)
        if (ct.edge_pairs[c] >> (own * K + b) & 1) set |= LabelSet{1} << b;
    }
    dp.down[c] = set;
  }
  return dp;
}

PairSet CompletabilityDp::pair_set(const CompatTree& ct, int u, int v) const {
  // Path u = x0, x1, ..., xk = v upward.
  std::vector<int> path{u};
  int cur = u;
  while (cur != v) {
    cur = ct.parent[cur];
    if (cur < 0) throw InvalidInput("pair_set: v is not an ancestor of u");
    path.push_back(cur);
  }
  if (path.size() < 2) throw InvalidInput("pair_set: u equals v");
  int K = ct.K;
  // R holds pairs (label at (u, parent edge of u), label at (x_j, entering
  // edge)); start with the first edge's pair set.
  PairSet R = ct.edge_pairs[u];
  for (std::size_t j = 1; j + 1 < path.size(); ++j) {
    int x = path[j];
    auto slots = ct.alive_slots(x);
    int in_slot = ct.slot_of_neighbor(x, path[j - 1]);
    int out_slot = ct.parent_slot[x];
    PairSet next = 0;
    for (const auto& t : ct.tuples[x]) {
      bool ok = true;
      int in_label = -1, out_label = -1;
      for (std::size_t i = 0; i < slots.size() && ok; ++i) {
        int s = slots[i];
        if (s == in_slot) {
          in_label = t[i];
        } else if (s == out_slot) {
          out_label = t[i];
        } else {
          ok = (down[ct.slot_neighbor[x][s]] >> t[i] & 1) != 0;
        }
      }
      if (!ok) continue;
      for (int a = 0; a < K; ++a) {
        if (!(R >> (a * K + in_label) & 1)) continue;
        for (int b = 0; b < K; ++b)
          if (ct.edge_pairs[x] >> (out_label * K + b) & 1)
            next |= PairSet{1} << (a * K + b);
      }
    }
    R = next;
  }
  return R;
}

}  // namespace tl
