#include "compat.hpp"

#include <algorithm>
#include <cmath>

#include "paths.hpp"

namespace tl {

int CompatTree::node_count() const {
  int c = 0;
  for (char a : alive) c += a != 0;
  return c;
}

int CompatTree::degree(int v) const {
  return static_cast<int>(children[v].size()) + (parent[v] >= 0 ? 1 : 0);
}

std::vector<int> CompatTree::roots() const {
  std::vector<int> out;
  for (std::size_t v = 0; v < alive.size(); ++v)
    if (alive[v] && parent[v] < 0) out.push_back(static_cast<int>(v));
  return out;
}

std::vector<int> CompatTree::alive_slots(int v) const {
  std::vector<int> out;
  for (std::size_t s = 0; s < slot_alive[v].size(); ++s)
    if (slot_alive[v][s]) out.push_back(static_cast<int>(s));
  return out;
}

int CompatTree::tuple_pos(int v, int s) const {
  int pos = 0;
  for (int t = 0; t < s; ++t)
    if (slot_alive[v][t]) ++pos;
  return pos;
}

int CompatTree::slot_of_neighbor(int v, int u) const {
  for (std::size_t s = 0; s < slot_neighbor[v].size(); ++s)
    if (slot_alive[v][s] && slot_neighbor[v][s] == u)
      return static_cast<int>(s);
  return -1;
}

CompatTree build_g0(const Forest& f, const std::vector<int>& parent,
                    const NodeEdgeLcl& lcl, const HalfEdgeLabeling& g_in) {
  int K = static_cast<int>(lcl.sigma_out.size());
  if (K > kMaxOut)
    throw InvalidInput("output alphabet too large for the solver (max " +
                       std::to_string(kMaxOut) + ")");
  CompatTree ct;
  ct.K = K;
  ct.alive.assign(f.n(), 1);
  ct.parent = parent;
  ct.parent_slot.assign(f.n(), -1);
  ct.children.assign(f.n(), {});
  ct.slot_neighbor.assign(f.n(), {});
  ct.slot_alive.assign(f.n(), {});
  ct.edge_pairs.assign(f.n(), 0);
  ct.tuples.assign(f.n(), {});
  for (int v = 0; v < f.n(); ++v)
    if (parent[v] >= 0) ct.children[parent[v]].push_back(v);
  for (int v = 0; v < f.n(); ++v) {
    ct.slot_neighbor[v] = f.adj(v);
    ct.slot_alive[v].assign(f.degree(v), 1);
    for (int s = 0; s < f.degree(v); ++s)
      if (f.adj(v)[s] == parent[v]) ct.parent_slot[v] = s;
    std::sort(ct.children[v].begin(), ct.children[v].end());
    if (parent[v] < 0) ct.root = v;  // last root wins; see roots()
  }

  // Per-half-edge admissible labels from the input map.
  auto allowed = [&](int v, int e) -> LabelSet {
    int in = lcl.in_index(g_in.label[f.half_edge(v, e)]);
    if (in < 0) throw InvalidInput("input label outside sigma_in");
    LabelSet set = 0;
    for (int l : lcl.input_map[in]) set |= LabelSet{1} << l;
    return set;
  };
  for (int v = 0; v < f.n(); ++v) {
    int p = parent[v];
    if (p < 0) continue;
    int e = f.edge_index(v, p);
    LabelSet child_ok = allowed(v, e), parent_ok = allowed(p, e);
    PairSet pairs = 0;
    for (auto [a, b] : lcl.edge_constraint)
      for (auto [x, y] : {std::pair{a, b}, std::pair{b, a}})
        if ((child_ok >> x & 1) && (parent_ok >> y & 1))
          pairs |= PairSet{1} << (x * K + y);
    ct.edge_pairs[v] = pairs;
  }
  for (int v = 0; v < f.n(); ++v) {
    int d = f.degree(v);
    if (d == 0) {
      ct.tuples[v] = {{}};
      continue;
    }
    if (d > lcl.max_degree)
      throw InvalidInput("node degree exceeds the problem's max degree");
    const auto& allowed_ms = lcl.node_constraints[d - 1];
    std::vector<int> tup(d, 0);
    while (true) {
      std::vector<int> ms = tup;
      std::sort(ms.begin(), ms.end());
      if (std::find(allowed_ms.begin(), allowed_ms.end(), ms) !=
          allowed_ms.end())
        ct.tuples[v].push_back(tup);
      int i = d - 1;
      while (i >= 0 && tup[i] == K - 1) tup[i--] = 0;
      if (i < 0) break;
      ++tup[i];
    }
  }
  return ct;
}

bool check_compat_solution(const CompatTree& ct, const SlotLabeling& lab) {
  int n = static_cast<int>(ct.alive.size());
  for (int v = 0; v < n; ++v) {
    if (!ct.alive[v]) continue;
    auto slots = ct.alive_slots(v);
    std::vector<int> assigned;
    for (int s : slots) {
      int l = lab[v][s];
      if (l < 0 || l >= ct.K) return false;
      assigned.push_back(l);
    }
    bool matched = false;
    for (const auto& t : ct.tuples[v])
      if (t == assigned) {
        matched = true;
        break;
      }
    if (!matched) return false;
    if (ct.parent[v] >= 0) {
      int p = ct.parent[v];
      int ps = ct.slot_of_neighbor(p, v);
      int a = lab[v][ct.parent_slot[v]];
      int b = lab[p][ps];
      if (!(ct.edge_pairs[v] >> (a * ct.K + b) & 1)) return false;
    }
  }
  return true;
}

ReduceRecord reduce_step(CompatTree& ct) {
  ReduceRecord rec;
  int n = static_cast<int>(ct.alive.size());
  // Step 1: MIS over maximal runs of non-root degree-2 nodes, contracted.
  std::vector<char> deg2(n, 0);
  for (int v = 0; v < n; ++v)
    deg2[v] = ct.alive[v] && ct.parent[v] >= 0 && ct.degree(v) == 2;
  std::vector<char> seen(n, 0);
  std::vector<int> mis;
  for (int v = 0; v < n; ++v) {
    if (!deg2[v] || seen[v]) continue;
    // Walk to the top end of this run (all runs are chains child->parent).
    int top = v;
    while (ct.parent[top] >= 0 && deg2[ct.parent[top]]) top = ct.parent[top];
    std::vector<int> run{top};
    seen[top] = 1;
    while (true) {
      int cur = run.back();
      int next = -1;
      for (int c : ct.children[cur])
        if (deg2[c]) next = c;
      if (next < 0) break;
      run.push_back(next);
      seen[next] = 1;
    }
    std::vector<int> ids;
    for (int u : run) ids.push_back(u + 1);
    // Fixed coloring schedule keyed to the node-index space so that any
    // executor coloring the same runs reproduces the same set.
    for (int pos : max_independent_set_path(ids, n)) mis.push_back(run[pos]);
  }
  std::sort(mis.begin(), mis.end());
  for (int v : mis) {
    int child = ct.children[v][0];
    int par = ct.parent[v];
    ContractionRecord cr;
    cr.v = v;
    cr.child = child;
    cr.par = par;
    cr.v_child_slot = ct.slot_of_neighbor(v, child);
    cr.v_parent_slot = ct.parent_slot[v];
    cr.child_slot = ct.parent_slot[child];
    cr.par_slot = ct.slot_of_neighbor(par, v);
    cr.s_child_v = ct.edge_pairs[child];
    cr.s_v_parent = ct.edge_pairs[v];
    cr.v_tuples = ct.tuples[v];
    // Composed pair set for the new edge (child, par).
    int K = ct.K;
    int cpos = ct.tuple_pos(v, cr.v_child_slot);
    int ppos = ct.tuple_pos(v, cr.v_parent_slot);
    PairSet composed = 0;
    for (int a = 0; a < K; ++a)
      for (int b = 0; b < K; ++b) {
        bool ok = false;
        for (const auto& t : ct.tuples[v]) {
          int l1 = t[cpos], l2 = t[ppos];
          if ((cr.s_child_v >> (a * K + l1) & 1) &&
              (cr.s_v_parent >> (l2 * K + b) & 1)) {
            ok = true;
            break;
          }
        }
        if (ok) composed |= PairSet{1} << (a * K + b);
      }
    // Rewire.
    ct.alive[v] = 0;
    ct.parent[child] = par;
    ct.slot_neighbor[child][cr.child_slot] = par;
    ct.slot_neighbor[par][cr.par_slot] = child;
    ct.edge_pairs[child] = composed;
    auto& pc = ct.children[par];
    *std::find(pc.begin(), pc.end(), v) = child;
    std::sort(pc.begin(), pc.end());
    ct.children[v].clear();
    ct.slot_alive[v].assign(ct.slot_alive[v].size(), 0);
    rec.contractions.push_back(cr);
  }
  // Step 2: remove all non-root leaves, filtering parent tuples.
  std::vector<int> leaves;
  for (int v = 0; v < n; ++v)
    if (ct.alive[v] && ct.parent[v] >= 0 && ct.children[v].empty())
      leaves.push_back(v);
  std::vector<std::vector<int>> by_parent(n);
  for (int x : leaves) by_parent[ct.parent[x]].push_back(x);
  for (int y = 0; y < n; ++y) {
    if (by_parent[y].empty()) continue;
    LeafPruneRecord pr;
    pr.parent = y;
    pr.old_tuples = ct.tuples[y];
    pr.old_alive_slots = ct.alive_slots(y);
    // Removed leaves ordered by their slot at the parent.
    std::vector<std::pair<int, int>> ordered;
    for (int x : by_parent[y]) ordered.push_back({ct.slot_of_neighbor(y, x), x});
    std::sort(ordered.begin(), ordered.end());
    std::vector<char> removed_slot(ct.slot_alive[y].size(), 0);
    for (auto [slot, x] : ordered) {
      pr.leaves.push_back(x);
      pr.parent_slots.push_back(slot);
      pr.leaf_slots.push_back(ct.alive_slots(x).at(0));
      pr.leaf_pairs.push_back(ct.edge_pairs[x]);
      LabelSet allowed = 0;
      for (const auto& t : ct.tuples[x]) allowed |= LabelSet{1} << t[0];
      pr.leaf_allowed.push_back(allowed);
      removed_slot[slot] = 1;
    }
    // Filter and project tuples.
    int K = ct.K;
    std::vector<std::vector<int>> kept;
    for (const auto& t : pr.old_tuples) {
      bool ok = true;
      std::vector<int> proj;
      for (std::size_t i = 0; i < pr.old_alive_slots.size() && ok; ++i) {
        int slot = pr.old_alive_slots[i];
        if (!removed_slot[slot]) {
          proj.push_back(t[i]);
          continue;
        }
        // Which removed leaf sits on this slot?
        std::size_t j = 0;
        while (pr.parent_slots[j] != slot) ++j;
        bool witness = false;
        for (int l = 0; l < K && !witness; ++l)
          witness = (pr.leaf_allowed[j] >> l & 1) &&
                    (pr.leaf_pairs[j] >> (l * K + t[i]) & 1);
        ok = witness;
      }
      if (ok) kept.push_back(proj);
    }
    std::sort(kept.begin(), kept.end());
    kept.erase(std::unique(kept.begin(), kept.end()), kept.end());
    ct.tuples[y] = kept;
    for (auto [slot, x] : ordered) {
      ct.alive[x] = 0;
      ct.slot_alive[x].assign(ct.slot_alive[x].size(), 0);
      ct.slot_alive[y][slot] = 0;
      ct.slot_neighbor[y][slot] = -1;
      auto& yc = ct.children[y];
      yc.erase(std::find(yc.begin(), yc.end(), x));
    }
    rec.prunes.push_back(pr);
  }
  return rec;
}

std::vector<ReduceRecord> shrink(CompatTree& ct, int t) {
  if (t < 0) {
    int n = ct.node_count();
    double ll = std::log2(std::max(2.0, std::log2(std::max(2, n))));
    t = std::max(1, static_cast<int>(std::floor(2.0 * ll)));
  }
  std::vector<ReduceRecord> stack;
  for (int i = 0; i < t; ++i) stack.push_back(reduce_step(ct));
  return stack;
}

bool lift_back(int K, const ReduceRecord& rec, SlotLabeling& lab) {
  // Leaves were removed after contractions, so they come back first.
  for (auto it = rec.prunes.rbegin(); it != rec.prunes.rend(); ++it) {
    const auto& pr = *it;
    std::vector<char> removed_slot;
    {
      int max_slot = 0;
      for (int s : pr.old_alive_slots) max_slot = std::max(max_slot, s);
      removed_slot.assign(max_slot + 1, 0);
      for (int s : pr.parent_slots) removed_slot[s] = 1;
    }
    bool found = false;
    for (const auto& t : pr.old_tuples) {  // already in lexicographic order
      bool ok = true;
      for (std::size_t i = 0; i < pr.old_alive_slots.size() && ok; ++i) {
        int slot = pr.old_alive_slots[i];
        if (removed_slot[slot]) {
          std::size_t j = 0;
          while (pr.parent_slots[j] != slot) ++j;
          bool witness = false;
          for (int l = 0; l < K && !witness; ++l)
            witness = (pr.leaf_allowed[j] >> l & 1) &&
                      (pr.leaf_pairs[j] >> (l * K + t[i]) & 1);
          ok = witness;
        } else {
          ok = lab[pr.parent][slot] == t[i];
        }
      }
      if (!ok) continue;
      found = true;
      for (std::size_t i = 0; i < pr.old_alive_slots.size(); ++i) {
        int slot = pr.old_alive_slots[i];
        if (!removed_slot[slot]) continue;
        lab[pr.parent][slot] = t[i];
        std::size_t j = 0;
        while (pr.parent_slots[j] != slot) ++j;
        for (int l = 0; l < K; ++l)
          if ((pr.leaf_allowed[j] >> l & 1) &&
              (pr.leaf_pairs[j] >> (l * K + t[i]) & 1)) {
            lab[pr.leaves[j]][pr.leaf_slots[j]] = l;
            break;
          }
      }
      break;
    }
    if (!found) return false;
  }
  for (auto it = rec.contractions.rbegin(); it != rec.contractions.rend();
       ++it) {
    const auto& cr = *it;
    int a = lab[cr.child][cr.child_slot];
    int b = lab[cr.par][cr.par_slot];
    if (a < 0 || b < 0) return false;
    int cpos = cr.v_child_slot < cr.v_parent_slot ? 0 : 1;
    int ppos = 1 - cpos;
    bool found = false;
    for (const auto& t : cr.v_tuples) {
      int l1 = t[cpos], l2 = t[ppos];
      if ((cr.s_child_v >> (a * K + l1) & 1) &&
          (cr.s_v_parent >> (l2 * K + b) & 1)) {
        lab[cr.v][cr.v_child_slot] = l1;
        lab[cr.v][cr.v_parent_slot] = l2;
        found = true;
        break;
      }
    }
    if (!found) return false;
  }
  return true;
}

}  // namespace tl
