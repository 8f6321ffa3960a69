#include "solver.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "paths.hpp"
#include "rooting.hpp"

namespace tl {

namespace {

using mpc::Word;

constexpr long long kLinkBudgetPerNode = 16;

enum Tag : Word {
  kAllowed = 1,   // parent half's admissible labels for the edge to a child
  kDeg,           // degree/rootness exchange before a reduction step
  kColor,         // chain color to the chain child
  kShave,         // chain color to both chain neighbors
  kPick,          // chain selection flag to both chain neighbors
  kNeed,          // contracted node asks its child for the edge pair set
  kChildInfo,     // child replies with its edge pair set
  kRewireChild,   // contracted node rewires its child to the grandparent
  kRewireParent,  // contracted node tells the parent to adopt the child
  kLeaf,          // leaf hands its constraints to the parent and retires
  kLinkCopy,      // initial parent-edge link copy sent to the parent
  kNewLink,       // joined link copy sent to both endpoints
  kDeact,         // your outgoing link left the active set
  kLeafAssign,    // label fixed at the ancestor end of a leaf link
  kWork,          // both end labels of a settled link, sent to its joiner
  kLiftLeaf,      // label for a pruned leaf during lift-back
  kLiftChild,     // child's label for a contracted node during lift-back
  kLiftParent,    // parent's label for a contracted node during lift-back
};

// Replay records for lift-back; one reduction step = one level.
struct ContrRec {
  int level, child, par, v_child_slot, v_parent_slot;
  PairSet s_child_v, s_v_parent;
};
struct ChildRewireRec {
  int level, old_parent;
};
struct ParRewireRec {
  int level, slot, v;
};
struct PruneRec {
  int level;
  std::vector<int> leaves, parent_slots;  // in slot order at the parent
  std::vector<PairSet> leaf_pairs;
  std::vector<LabelSet> leaf_allowed;
  std::vector<std::vector<int>> old_tuples;
  std::vector<int> old_alive_slots;
};

struct Queued {
  int to;
  std::vector<Word> words;
};

struct SNode {
  char alive = 1;
  int parent = -1;
  int pslot = -1;
  std::vector<int> nbr;
  std::vector<char> salive;
  std::vector<std::vector<int>> tuples;
  char tuples_modified = 0;  // diverged from the canonical constraint table
  PairSet epairs = 0;        // parent-edge pair set, own half first

  // Reduction scratch.
  char deg2 = 0, par_deg2 = 0, child_deg2 = 0, picked = 0, par_picked = 0;
  long long color = 0;
  PairSet pend_pairs = 0;
  int pend_child = -1;

  // Replay for lift-back.
  std::vector<ContrRec> contr;
  std::vector<ChildRewireRec> crw;
  std::vector<ParRewireRec> prw;
  std::vector<PruneRec> prune;

  // Upward pass.
  std::vector<long long> memo;  // per slot, -1 undecided, else a LabelSet
  std::vector<SolverLink> links;
  int out_link = -1;
  std::vector<SolverLink> clog;  // links created here (instrumentation only)

  // Downward pass and lift.
  std::vector<int> lab;
  std::vector<Queued> outbox;
  char got_work = 0;
  char failed = 0;

  int deg() const {
    int d = 0;
    for (char a : salive) d += a != 0;
    return d;
  }
  bool leafish() const { return alive && parent >= 0 && deg() == 1; }
  std::vector<int> alive_slots() const {
    std::vector<int> out;
    for (std::size_t s = 0; s < salive.size(); ++s)
      if (salive[s]) out.push_back(static_cast<int>(s));
    return out;
  }
  int tuple_pos(int slot) const {
    int pos = 0;
    for (int s = 0; s < slot; ++s) pos += salive[s] != 0;
    return pos;
  }
  int slot_of(int u) const {
    for (std::size_t s = 0; s < nbr.size(); ++s)
      if (salive[s] && nbr[s] == u) return static_cast<int>(s);
    return -1;
  }
  LabelSet leaf_allowed_set() const {
    LabelSet set = 0;
    for (const auto& t : tuples)
      if (!t.empty()) set |= LabelSet{1} << t[0];
    return set;
  }
  bool out_active() const { return out_link >= 0 && links[out_link].active; }

  long long resident() const {
    long long w = 6 + 2 * static_cast<long long>(nbr.size());
    w += tuples_modified ? static_cast<long long>(tuples.size()) +
                               (tuples.empty()
                                    ? 0
                                    : static_cast<long long>(tuples[0].size()))
                         : 1;
    w += 3 * static_cast<long long>(links.size());
    for (const auto& q : outbox) w += 1 + static_cast<long long>(q.words.size());
    w += 7 * static_cast<long long>(contr.size());
    w += 2 * static_cast<long long>(crw.size());
    w += 3 * static_cast<long long>(prw.size());
    for (const auto& p : prune) {
      w += 2 + 3 * static_cast<long long>(p.leaves.size()) +
           static_cast<long long>(p.old_alive_slots.size());
      w += static_cast<long long>(p.old_tuples.size()) *
           (1 + (p.old_tuples.empty()
                     ? 0
                     : static_cast<long long>(p.old_tuples[0].size())));
    }
    return w;
  }
};

// Runs supersteps either on a cluster or with direct delivery. Both paths
// share the emit/apply closures, so the two executors compute identical
// results by construction; the direct path just skips the memory ledger.
struct Bus {
  mpc::Cluster* cl = nullptr;
  int n = 0;

  void step(const mpc::Cluster::Emit& emit, const mpc::Cluster::Apply& apply,
            const mpc::Cluster::Resident& resident) {
    if (cl) {
      cl->superstep(emit, apply, resident);
      return;
    }
    std::vector<std::vector<mpc::Message>> inbox(n);
    for (int i = 0; i < n; ++i)
      emit(i, [&](int to, std::vector<Word> words) {
        inbox[to].push_back({i, to, std::move(words)});
      });
    for (int i = 0; i < n; ++i) apply(i, inbox[i]);
  }

  bool all_done(const std::vector<char>& flags,
                const mpc::Cluster::Resident& resident) {
    if (cl) return cl->all_done(flags, resident);
    for (char f : flags)
      if (!f) return false;
    return true;
  }

  long long sum(const std::vector<Word>& values,
                const mpc::Cluster::Resident& resident) {
    if (cl)
      return cl->convergecast(
          values, [](Word a, Word b) { return a + b; }, resident);
    long long s = 0;
    for (Word v : values) s += v;
    return s;
  }
};

// Exact dyadic potential bookkeeping: chain weights live in halves of
// halves, so the value for iteration i is kept scaled by 2^i, which stays
// integral; the 7/8 drop condition becomes 2*S[i] <= 7*S[i-2].
using Scaled = __int128;

struct CompPot {
  std::vector<Scaled> s;     // scaled potential per iteration index
  long long done_iter = -1;  // first iteration end with no active links
};

std::vector<Word> enc_link(Tag tag, const SolverLink& l) {
  return {tag,
          l.u,
          l.v,
          static_cast<Word>(l.pairs),
          l.pred,
          l.last_child,
          static_cast<Word>(l.start_allowed),
          l.start_is_leaf ? 1 : 0};
}

SolverLink dec_link(const std::vector<Word>& w) {
  SolverLink l;
  l.u = static_cast<int>(w[1]);
  l.v = static_cast<int>(w[2]);
  l.pairs = static_cast<PairSet>(w[3]);
  l.pred = static_cast<int>(w[4]);
  l.last_child = static_cast<int>(w[5]);
  l.start_allowed = static_cast<LabelSet>(w[6]);
  l.start_is_leaf = w[7] != 0;
  l.active = true;
  return l;
}

struct Solver {
  const Forest& f;
  const NodeEdgeLcl& lcl;
  HalfEdgeLabeling gin;
  Bus bus;
  SolveStats own_stats;  // used when the caller passes no stats
  SolveStats& st;
  int n, K;
  std::vector<SNode> nd;
  std::vector<int> comp;        // component root per node
  std::vector<int> comp_roots;  // distinct roots, ascending
  std::vector<int> prev_block;  // block id per node in the last iteration
  std::map<int, Scaled> prev_k;
  std::map<int, CompPot> pot;
  bool p2_kick = false;

  Solver(const Forest& f_, const NodeEdgeLcl& lcl_, const HalfEdgeLabeling& gi,
         mpc::Cluster* cl, SolveStats* stats)
      : f(f_),
        lcl(lcl_),
        gin(effective_input(f_, lcl_, gi)),
        st(stats ? *stats : own_stats) {
    n = f.n();
    K = static_cast<int>(lcl.sigma_out.size());
    bus.cl = cl;
    bus.n = n;
  }

  mpc::Cluster::Resident res() {
    return [this](int i) { return nd[i].resident(); };
  }

  // ---------------------------------------------------------------- setup

  void init_from_orientation(const Orientation& o) {
    nd.assign(n, {});
    for (int v = 0; v < n; ++v) {
      SNode& x = nd[v];
      x.parent = o.parent[v];
      x.nbr = f.adj(v);
      x.salive.assign(f.degree(v), 1);
      for (int s = 0; s < f.degree(v); ++s)
        if (x.nbr[s] == x.parent) x.pslot = s;
      x.memo.assign(f.degree(v), -1);
      x.lab.assign(f.degree(v), -1);
      int d = f.degree(v);
      if (d == 0) {
        x.tuples = {{}};
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
          x.tuples.push_back(tup);
        int i = d - 1;
        while (i >= 0 && tup[i] == K - 1) tup[i--] = 0;
        if (i < 0) break;
        ++tup[i];
      }
    }
    comp.assign(n, -1);
    comp_roots = o.roots;
    std::vector<std::vector<int>> kids(n);
    for (int v = 0; v < n; ++v)
      if (nd[v].parent >= 0) kids[nd[v].parent].push_back(v);
    std::vector<int> stack;
    for (int r : comp_roots) {
      comp[r] = r;
      stack.push_back(r);
    }
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (int c : kids[v]) {
        comp[c] = comp[v];
        stack.push_back(c);
      }
    }
  }

  LabelSet allowed(int v, int slot) const {
    int e = f.edge_index(v, f.adj(v)[slot]);
    int in = lcl.in_index(gin.label[f.half_edge(v, e)]);
    if (in < 0) throw InvalidInput("input label outside sigma_in");
    LabelSet set = 0;
    for (int l : lcl.input_map[in]) set |= LabelSet{1} << l;
    return set;
  }

  void build_edge_pairs() {
    bus.step(
        [this](int v, const mpc::Cluster::Send& send) {
          for (std::size_t s = 0; s < nd[v].nbr.size(); ++s)
            if (nd[v].nbr[s] != nd[v].parent)
              send(nd[v].nbr[s], {kAllowed, static_cast<Word>(allowed(
                                                v, static_cast<int>(s)))});
        },
        [this](int v, const std::vector<mpc::Message>& in) {
          SNode& x = nd[v];
          if (x.parent < 0) return;
          LabelSet parent_ok = 0;
          for (const auto& m : in)
            if (m.words[0] == kAllowed && m.from == x.parent)
              parent_ok = static_cast<LabelSet>(m.words[1]);
          LabelSet child_ok = allowed(v, x.pslot);
          PairSet pairs = 0;
          for (auto [a, b] : lcl.edge_constraint)
            for (auto [p, q] : {std::pair{a, b}, std::pair{b, a}})
              if ((child_ok >> p & 1) && (parent_ok >> q & 1))
                pairs |= PairSet{1} << (p * K + q);
          x.epairs = pairs;
        },
        res());
  }

  // ------------------------------------------------------- reduction step

  void reduce_once(int level) {
    // Degree/rootness exchange; afterwards every node knows which of its
    // neighbors are contractible chain nodes.
    bus.step(
        [this](int v, const mpc::Cluster::Send& send) {
          const SNode& x = nd[v];
          if (!x.alive) return;
          Word d = x.deg(), root = x.parent < 0;
          for (int s : x.alive_slots()) send(x.nbr[s], {kDeg, d, root});
        },
        [this](int v, const std::vector<mpc::Message>& in) {
          SNode& x = nd[v];
          // Scratch resets cover dead nodes too: a pruned node must not act
          // on flags left over from the level it died in.
          x.deg2 = x.alive && x.parent >= 0 && x.deg() == 2;
          x.par_deg2 = x.child_deg2 = x.picked = x.par_picked = 0;
          x.pend_child = -1;
          x.color = v + 1;
          if (!x.alive) return;
          for (const auto& m : in) {
            if (m.words[0] != kDeg) continue;
            bool d2 = m.words[1] == 2 && m.words[2] == 0;
            if (m.from == x.parent)
              x.par_deg2 = d2;
            else if (d2)
              x.child_deg2 = 1;  // a chain node has exactly one child
          }
        },
        res());

    // Fixed-schedule color reduction down each chain (the chain top uses a
    // virtual predecessor), then three shave rounds and three selection
    // rounds. The schedule depends only on n, so each chain reproduces the
    // reference single-machine computation exactly.
    int rounds = color_reduction_rounds(n);
    for (int r = 0; r < rounds; ++r) {
      bus.step(
          [this](int v, const mpc::Cluster::Send& send) {
            const SNode& x = nd[v];
            if (!x.alive || !x.deg2 || !x.child_deg2) return;
            for (int s : x.alive_slots())
              if (x.nbr[s] != x.parent) send(x.nbr[s], {kColor, x.color});
          },
          [this](int v, const std::vector<mpc::Message>& in) {
            SNode& x = nd[v];
            if (!x.alive || !x.deg2) return;
            long long pred = x.color == 0 ? 1 : 0;
            for (const auto& m : in)
              if (m.words[0] == kColor) pred = m.words[1];
            x.color = reduce_color(x.color, pred);
          },
          res());
    }
    for (long long shave = 5; shave >= 3; --shave) {
      bus.step(
          [this](int v, const mpc::Cluster::Send& send) {
            const SNode& x = nd[v];
            if (!x.alive || !x.deg2) return;
            for (int s : x.alive_slots()) {
              bool chain =
                  x.nbr[s] == x.parent ? x.par_deg2 != 0 : x.child_deg2 != 0;
              if (chain) send(x.nbr[s], {kShave, x.color});
            }
          },
          [this, shave](int v, const std::vector<mpc::Message>& in) {
            SNode& x = nd[v];
            if (!x.alive || !x.deg2 || x.color != shave) return;
            long long left = -1, right = -1;
            for (const auto& m : in)
              if (m.words[0] == kShave)
                (m.from == x.parent ? left : right) = m.words[1];
            for (long long c = 0; c < 3; ++c)
              if (c != left && c != right) {
                x.color = c;
                break;
              }
          },
          res());
    }
    for (long long cls = 0; cls < 3; ++cls) {
      bus.step(
          [this](int v, const mpc::Cluster::Send& send) {
            const SNode& x = nd[v];
            if (!x.alive || !x.deg2) return;
            for (int s : x.alive_slots()) {
              bool chain =
                  x.nbr[s] == x.parent ? x.par_deg2 != 0 : x.child_deg2 != 0;
              if (chain) send(x.nbr[s], {kPick, x.picked});
            }
          },
          [this, cls](int v, const std::vector<mpc::Message>& in) {
            SNode& x = nd[v];
            if (!x.alive || !x.deg2 || x.color != cls || x.picked) return;
            for (const auto& m : in)
              if (m.words[0] == kPick && m.words[1]) return;
            x.picked = 1;
          },
          res());
    }

    // Contraction handshake: the selected chain node asks its child for the
    // lower edge's pair set, composes both edges through its own tuples,
    // and rewires child and parent to each other.
    bus.step(
        [this](int v, const mpc::Cluster::Send& send) {
          const SNode& x = nd[v];
          if (!x.alive || !x.picked) return;
          for (int s : x.alive_slots())
            if (x.nbr[s] != x.parent) send(x.nbr[s], {kNeed});
        },
        [this](int v, const std::vector<mpc::Message>& in) {
          SNode& x = nd[v];
          for (const auto& m : in)
            if (m.words[0] == kNeed && m.from == x.parent) x.par_picked = 1;
        },
        res());
    bus.step(
        [this](int v, const mpc::Cluster::Send& send) {
          const SNode& x = nd[v];
          if (x.alive && x.par_picked)
            send(x.parent, {kChildInfo, static_cast<Word>(x.epairs)});
        },
        [this](int v, const std::vector<mpc::Message>& in) {
          SNode& x = nd[v];
          for (const auto& m : in)
            if (m.words[0] == kChildInfo) {
              x.pend_child = m.from;
              x.pend_pairs = static_cast<PairSet>(m.words[1]);
            }
        },
        res());
    bus.step(
        [this](int v, const mpc::Cluster::Send& send) {
          const SNode& x = nd[v];
          if (!x.alive || !x.picked) return;
          PairSet composed = compose_through(x);
          send(x.pend_child,
               {kRewireChild, x.parent, static_cast<Word>(composed)});
          send(x.parent, {kRewireParent, x.pend_child});
        },
        [this, level](int v, const std::vector<mpc::Message>& in) {
          SNode& x = nd[v];
          if (x.alive && x.picked) {
            ContrRec cr;
            cr.level = level;
            cr.child = x.pend_child;
            cr.par = x.parent;
            cr.v_child_slot = x.slot_of(x.pend_child);
            cr.v_parent_slot = x.pslot;
            cr.s_child_v = x.pend_pairs;
            cr.s_v_parent = x.epairs;
            x.contr.push_back(cr);
            x.alive = 0;
            x.salive.assign(x.salive.size(), 0);
          }
          for (const auto& m : in) {
            if (m.words[0] == kRewireChild) {
              x.crw.push_back({level, x.parent});
              x.parent = static_cast<int>(m.words[1]);
              x.nbr[x.pslot] = x.parent;
              x.epairs = static_cast<PairSet>(m.words[2]);
            } else if (m.words[0] == kRewireParent) {
              int slot = x.slot_of(m.from);
              x.prw.push_back({level, slot, m.from});
              x.nbr[slot] = static_cast<int>(m.words[1]);
            }
          }
        },
        res());

    // Leaf pruning: every non-root leaf hands its constraints to its parent
    // and retires; the parent filters and projects its tuple set.
    bus.step(
        [this](int v, const mpc::Cluster::Send& send) {
          const SNode& x = nd[v];
          if (!x.leafish()) return;
          send(x.parent, {kLeaf, static_cast<Word>(x.epairs),
                          static_cast<Word>(x.leaf_allowed_set())});
        },
        [this, level](int v, const std::vector<mpc::Message>& in) {
          SNode& x = nd[v];
          if (x.leafish()) {
            x.alive = 0;
            x.salive[x.pslot] = 0;
            return;
          }
          std::vector<std::pair<int, const mpc::Message*>> ordered;
          for (const auto& m : in)
            if (m.words[0] == kLeaf) ordered.push_back({x.slot_of(m.from), &m});
          if (ordered.empty()) return;
          std::sort(ordered.begin(), ordered.end());
          PruneRec pr;
          pr.level = level;
          pr.old_tuples = x.tuples;
          pr.old_alive_slots = x.alive_slots();
          std::vector<char> removed(x.salive.size(), 0);
          for (auto [slot, m] : ordered) {
            pr.leaves.push_back(m->from);
            pr.parent_slots.push_back(slot);
            pr.leaf_pairs.push_back(static_cast<PairSet>(m->words[1]));
            pr.leaf_allowed.push_back(static_cast<LabelSet>(m->words[2]));
            removed[slot] = 1;
          }
          std::vector<std::vector<int>> kept;
          for (const auto& t : pr.old_tuples) {
            bool ok = true;
            std::vector<int> proj;
            for (std::size_t i = 0; i < pr.old_alive_slots.size() && ok; ++i) {
              int slot = pr.old_alive_slots[i];
              if (!removed[slot]) {
                proj.push_back(t[i]);
                continue;
              }
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
          x.tuples = kept;
          x.tuples_modified = 1;
          for (std::size_t j = 0; j < pr.parent_slots.size(); ++j) {
            x.salive[pr.parent_slots[j]] = 0;
            x.nbr[pr.parent_slots[j]] = -1;
          }
          x.prune.push_back(std::move(pr));
        },
        res());
  }

  PairSet compose_through(const SNode& x) const {
    int cslot = x.slot_of(x.pend_child);
    if (cslot < 0 || x.pend_child < 0)
      throw std::logic_error("contraction without a child reply");
    int cpos = x.tuple_pos(cslot), ppos = x.tuple_pos(x.pslot);
    PairSet composed = 0;
    for (int a = 0; a < K; ++a)
      for (int b = 0; b < K; ++b) {
        bool ok = false;
        for (const auto& t : x.tuples) {
          if ((x.pend_pairs >> (a * K + t[cpos]) & 1) &&
              (x.epairs >> (t[ppos] * K + b) & 1)) {
            ok = true;
            break;
          }
        }
        if (ok) composed |= PairSet{1} << (a * K + b);
      }
    return composed;
  }

  long long alive_count() {
    std::vector<Word> flags(n);
    for (int v = 0; v < n; ++v) flags[v] = nd[v].alive ? 1 : 0;
    return bus.sum(flags, res());
  }

  CompatTree snapshot() const {
    CompatTree ct;
    ct.K = K;
    ct.alive.assign(n, 0);
    ct.parent.assign(n, -1);
    ct.parent_slot.assign(n, -1);
    ct.children.assign(n, {});
    ct.slot_neighbor.assign(n, {});
    ct.slot_alive.assign(n, {});
    ct.edge_pairs.assign(n, 0);
    ct.tuples.assign(n, {});
    for (int v = 0; v < n; ++v) {
      const SNode& x = nd[v];
      ct.alive[v] = x.alive;
      ct.parent[v] = x.parent;
      ct.parent_slot[v] = x.pslot;
      ct.slot_neighbor[v] = x.nbr;
      ct.slot_alive[v] = x.salive;
      ct.edge_pairs[v] = x.epairs;
      ct.tuples[v] = x.tuples;
      if (x.parent < 0) ct.root = v;
    }
    for (int v = 0; v < n; ++v)
      if (nd[v].alive && nd[v].parent >= 0)
        ct.children[nd[v].parent].push_back(v);
    for (int v = 0; v < n; ++v)
      std::sort(ct.children[v].begin(), ct.children[v].end());
    return ct;
  }

  // ----------------------------------------------------------- upward pass

  SolverLink initial_link(int v) const {
    const SNode& x = nd[v];
    SolverLink l;
    l.u = v;
    l.v = x.parent;
    l.pairs = x.epairs;
    l.pred = -1;
    l.last_child = v;
    l.start_is_leaf = x.deg() == 1;
    l.start_allowed = l.start_is_leaf ? x.leaf_allowed_set() : 0;
    l.active = true;
    return l;
  }

  SolverLink merge_links(const SNode& x, int self, const SolverLink& in,
                         const SolverLink& out) const {
    SolverLink nl;
    nl.u = in.u;
    nl.v = out.v;
    nl.pred = self;
    nl.last_child = out.last_child;
    nl.start_allowed = in.start_allowed;
    nl.start_is_leaf = in.start_is_leaf;
    nl.active = true;
    int s_in = x.slot_of(in.last_child);
    int s_out = x.pslot;
    if (s_in < 0 || s_out < 0 || s_in == s_out)
      throw std::logic_error("joining node lost track of its path slots");
    int pin = x.tuple_pos(s_in), pout = x.tuple_pos(s_out);
    auto slots = x.alive_slots();
    PairSet pairs = 0;
    for (const auto& t : x.tuples) {
      bool ok = true;
      for (std::size_t i = 0; i < slots.size() && ok; ++i) {
        int s = slots[i];
        if (s == s_in || s == s_out) continue;
        if (x.memo[s] < 0)
          throw std::logic_error("undecided side branch at a joining node");
        ok = (x.memo[s] >> t[i] & 1) != 0;
      }
      if (!ok) continue;
      LabelSet aset = 0, bset = 0;
      for (int a = 0; a < K; ++a)
        if (in.pairs >> (a * K + t[pin]) & 1) aset |= LabelSet{1} << a;
      for (int b = 0; b < K; ++b)
        if (out.pairs >> (t[pout] * K + b) & 1) bset |= LabelSet{1} << b;
      for (int a = 0; a < K; ++a)
        if (aset >> a & 1)
          for (int b = 0; b < K; ++b)
            if (bset >> b & 1) pairs |= PairSet{1} << (a * K + b);
    }
    nl.pairs = pairs;
    return nl;
  }

  struct P1Dec {
    bool merged = false;
    std::vector<SolverLink> created;
    std::vector<int> deact_local;                 // indices into links
    std::vector<std::pair<int, long long>> memo;  // (slot, label set)
    std::vector<std::pair<int, int>> notify;      // (start node, last child)
  };

  P1Dec p1_decide(int self) const {
    const SNode& x = nd[self];
    P1Dec d;
    std::vector<int> inc;
    for (std::size_t i = 0; i < x.links.size(); ++i)
      if (x.links[i].active && x.links[i].v == self)
        inc.push_back(static_cast<int>(i));
    if (!x.alive) {
      if (!inc.empty())
        throw std::logic_error("active link ends at a removed node");
      return d;
    }
    bool is_root = x.parent < 0;
    if (inc.empty()) return d;
    if (!is_root && !x.out_active())
      throw std::logic_error("active link ends at an inactive node");
    std::map<int, std::vector<int>> groups;  // last child -> link indices
    for (int i : inc) groups[x.links[i].last_child].push_back(i);
    if (!is_root && groups.size() == 1) {
      // One live branch: extend every incoming link along the outgoing one.
      // The incoming links are consumed; the outgoing link is left alone —
      // its own target decides whether it survives, gets extended, or is
      // resolved away this iteration.
      d.merged = true;
      const SolverLink& out = x.links[x.out_link];
      for (int i : inc) {
        d.created.push_back(merge_links(x, self, x.links[i], out));
        d.deact_local.push_back(i);
      }
      return d;
    }
    // Branching node (or root): a branch resolves once its unique
    // leaf-started link has arrived; a non-root node keeps its smallest-ID
    // branch open so it can later extend upward through it.
    std::vector<std::pair<int, int>> order;  // (child ID, child index)
    for (const auto& [last, g] : groups) order.push_back({f.id(last), last});
    std::sort(order.begin(), order.end());
    std::map<int, bool> yes;
    bool all_yes = true;
    for (const auto& [cid, last] : order) {
      bool y = false;
      for (int i : groups[last]) y = y || x.links[i].start_is_leaf;
      yes[last] = y;
      all_yes = all_yes && y;
    }
    if (!is_root && all_yes) yes[order[0].second] = false;
    for (const auto& [cid, last] : order) {
      if (!yes[last]) continue;
      int star = -1;
      for (int i : groups[last])
        if (x.links[i].start_is_leaf) {
          if (star >= 0)
            throw std::logic_error("two leaf-started links share a branch");
          star = i;
        }
      const SolverLink& p = x.links[star];
      long long mask = 0;
      for (int a = 0; a < K; ++a) {
        if (!(p.start_allowed >> a & 1)) continue;
        for (int b = 0; b < K; ++b)
          if (p.pairs >> (a * K + b) & 1) mask |= 1LL << b;
      }
      int slot = x.slot_of(last);
      if (slot < 0) throw std::logic_error("resolved branch has no slot");
      if (x.memo[slot] != -1) throw std::logic_error("branch resolved twice");
      d.memo.push_back({slot, mask});
      for (int i : groups[last]) {
        d.deact_local.push_back(i);
        d.notify.push_back({x.links[i].u, last});
      }
    }
    return d;
  }

  void phase1() {
    // Every non-root node opens a link along its parent edge; the parent
    // stores the second copy.
    bus.step(
        [this](int v, const mpc::Cluster::Send& send) {
          const SNode& x = nd[v];
          if (x.alive && x.parent >= 0)
            send(x.parent, enc_link(kLinkCopy, initial_link(v)));
        },
        [this](int v, const std::vector<mpc::Message>& in) {
          SNode& x = nd[v];
          if (x.alive && x.parent >= 0) {
            SolverLink l = initial_link(v);
            x.links.push_back(l);
            x.out_link = static_cast<int>(x.links.size()) - 1;
            x.clog.push_back(l);
          }
          for (const auto& m : in)
            if (m.words[0] == kLinkCopy) x.links.push_back(dec_link(m.words));
        },
        res());
    prev_block.assign(n, -1);
    prev_k.clear();
    record_iteration(0);
    long long i = 0;
    std::vector<char> flags(n);
    while (true) {
      for (int v = 0; v < n; ++v)
        flags[v] = !(nd[v].alive && nd[v].out_active());
      if (bus.all_done(flags, res())) break;
      ++i;
      if (i > 4LL * n + 64)
        throw std::logic_error("upward pass failed to terminate");
      bus.step(
          [this](int v, const mpc::Cluster::Send& send) {
            P1Dec d = p1_decide(v);
            for (const auto& l : d.created) {
              send(l.u, enc_link(kNewLink, l));
              send(l.v, enc_link(kNewLink, l));
            }
            for (auto [start, last] : d.notify)
              send(start, {kDeact, v, last});
          },
          [this](int v, const std::vector<mpc::Message>& in) {
            SNode& x = nd[v];
            P1Dec d = p1_decide(v);
            for (int idx : d.deact_local) x.links[idx].active = false;
            for (auto [slot, mask] : d.memo) x.memo[slot] = mask;
            for (const auto& l : d.created) x.clog.push_back(l);
            bool replaced = false, deacted = false;
            for (const auto& m : in) {
              if (m.words[0] == kNewLink) {
                SolverLink nl = dec_link(m.words);
                if (nl.u == v) {
                  if (replaced)
                    throw std::logic_error(
                        "two replacement links for one start");
                  replaced = true;
                  if (x.out_link >= 0) x.links[x.out_link].active = false;
                  x.links.push_back(nl);
                  x.out_link = static_cast<int>(x.links.size()) - 1;
                } else if (nl.v == v) {
                  x.links.push_back(nl);
                } else {
                  throw std::logic_error("link copy reached a non-endpoint");
                }
              } else if (m.words[0] == kDeact) {
                if (d.merged)
                  throw std::logic_error(
                      "extension and branch resolution collided");
                deacted = true;
                if (x.out_link < 0 || !x.links[x.out_link].active ||
                    x.links[x.out_link].v != m.words[1])
                  throw std::logic_error("stale deactivation notice");
                x.links[x.out_link].active = false;
              }
            }
            if (replaced && deacted)
              throw std::logic_error("replacement and deactivation collided");
          },
          res());
      record_iteration(i);
    }
    st.phase1_iterations = i;
  }

  // Driver-side measurement after each upward-pass iteration: potential,
  // link totals, and termination tracking per component.
  void record_iteration(long long i) {
    if (i > 100)
      throw std::overflow_error("potential bookkeeping exceeds 2^100 scaling");
    std::vector<char> act(n, 0);
    for (int v = 0; v < n; ++v)
      act[v] = nd[v].alive && (nd[v].parent < 0 || nd[v].out_active());
    std::vector<int> nact_child(n, 0);
    for (int v = 0; v < n; ++v)
      if (act[v] && nd[v].parent >= 0) {
        if (!act[nd[v].parent])
          throw std::logic_error("active node below an inactive one");
        ++nact_child[nd[v].parent];
      }
    // Chains of nodes with exactly one active child, grouped by topmost
    // member; each chain carries a weight that halves per iteration
    // survived, plus one unit per freshly joined member.
    std::vector<char> blk(n, 0);
    for (int v = 0; v < n; ++v)
      blk[v] = act[v] && nd[v].parent >= 0 && nact_child[v] == 1;
    std::vector<int> rep(n, -1);
    for (int v = 0; v < n; ++v) {
      if (!blk[v]) continue;
      int top = v;
      std::vector<int> walk;
      while (rep[top] < 0 && nd[top].parent >= 0 && blk[nd[top].parent]) {
        walk.push_back(top);
        top = nd[top].parent;
      }
      int r = rep[top] >= 0 ? rep[top] : top;
      rep[top] = r;
      for (int w : walk) rep[w] = r;
    }
    std::map<int, std::vector<int>> members;
    for (int v = 0; v < n; ++v)
      if (blk[v]) members[rep[v]].push_back(v);
    std::map<int, Scaled> new_k;
    std::set<int> consumed;
    for (const auto& [r, ms] : members) {
      std::set<int> prevs;
      long long fresh = 0;
      for (int v : ms) {
        if (prev_block[v] < 0)
          ++fresh;
        else
          prevs.insert(prev_block[v]);
      }
      Scaled k = (Scaled{1} << i) * fresh;
      for (int p : prevs) {
        if (!consumed.insert(p).second)
          throw std::logic_error("a chain split across iterations");
        k += prev_k.at(p);
      }
      new_k[r] = k;
    }
    // Per-component sums and the geometric-drop condition.
    std::map<int, Scaled> sp, spp;
    for (int v = 0; v < n; ++v) {
      if (act[v] && nd[v].parent >= 0 && nact_child[v] == 0)
        sp[comp[v]] += Scaled{1} << i;
      if (blk[v] && rep[v] == v) spp[comp[v]] += new_k[v];
    }
    std::vector<char> comp_live(n, 0);
    long long active_links = 0, copies = 0;
    for (int v = 0; v < n; ++v) {
      if (nd[v].alive && nd[v].out_active()) {
        ++active_links;
        comp_live[comp[v]] = 1;
      }
      copies += static_cast<long long>(nd[v].links.size());
    }
    Scaled gp = 0, gpp = 0;
    for (int r : comp_roots) {
      CompPot& P = pot[r];
      Scaled s = sp[r] + spp[r];
      gp += sp[r];
      gpp += spp[r];
      P.s.push_back(s);
      if (P.done_iter < 0 && !comp_live[r]) P.done_iter = i;
      long long j = static_cast<long long>(P.s.size()) - 1;
      if (j >= 2) {
        bool exempt = P.done_iter >= 0 && P.done_iter <= j;
        if (!exempt && 2 * P.s[j] > 7 * P.s[j - 2])
          throw std::logic_error(
              "potential dropped by less than 7/8 over two iterations");
      }
    }
    st.max_stored_links = std::max(st.max_stored_links, copies);
    if (copies > kLinkBudgetPerNode * n)
      throw std::logic_error("stored link copies exceed the linear budget");
    double dp = std::ldexp(static_cast<double>(gp), static_cast<int>(-i));
    double dpp = std::ldexp(static_cast<double>(gpp), static_cast<int>(-i));
    st.phi_prime.push_back(dp);
    st.phi_dblprime.push_back(dpp);
    st.phi.push_back(dp + dpp);
    std::ostringstream row;
    row << i << ",1," << dp << "," << dpp << "," << (dp + dpp) << ","
        << active_links << "," << copies;
    st.trace_rows.push_back(row.str());
    prev_block.assign(n, -1);
    for (int v = 0; v < n; ++v)
      if (blk[v]) prev_block[v] = rep[v];
    prev_k = std::move(new_k);
  }

  // --------------------------------------------------------- downward pass

  const SolverLink* find_link(const SNode& x, int u, int v) const {
    const SolverLink* hit = nullptr;
    for (const auto& l : x.links)
      if (l.u == u && l.v == v) {
        if (hit) throw std::logic_error("duplicate link between two nodes");
        hit = &l;
      }
    return hit;
  }

  const SolverLink* leaf_link_for(const SNode& x, int self, int last) const {
    const SolverLink* hit = nullptr;
    for (const auto& l : x.links)
      if (l.v == self && l.start_is_leaf && l.last_child == last) {
        if (hit)
          throw std::logic_error("two leaf-started links share a branch");
        hit = &l;
      }
    return hit;
  }

  // Smallest allowed tuple with the two path slots constrained by pair
  // sets and every other slot constrained by its branch summary.
  const std::vector<int>* pick_tuple(const SNode& x, int s_in, PairSet in_pairs,
                                     int l_in, int s_out, PairSet out_pairs,
                                     int l_out) const {
    auto slots = x.alive_slots();
    for (const auto& t : x.tuples) {
      bool ok = true;
      for (std::size_t i = 0; i < slots.size() && ok; ++i) {
        int s = slots[i];
        if (s == s_in) {
          ok = (in_pairs >> (l_in * K + t[i]) & 1) != 0;
        } else if (s == s_out) {
          ok = (out_pairs >> (t[i] * K + l_out) & 1) != 0;
        } else {
          if (x.memo[s] < 0)
            throw std::logic_error("undecided branch at assignment time");
          ok = (x.memo[s] >> t[i] & 1) != 0;
        }
      }
      if (ok) return &t;
    }
    return nullptr;
  }

  void assign_and_spread(SNode& x, int self, const std::vector<int>& t,
                         int s_in, int s_out) {
    auto slots = x.alive_slots();
    for (std::size_t i = 0; i < slots.size(); ++i) {
      int s = slots[i];
      if (x.lab[s] != -1) throw std::logic_error("half-edge labeled twice");
      x.lab[s] = t[i];
      if (s == s_in || s == s_out) continue;
      const SolverLink* l = leaf_link_for(x, self, x.nbr[s]);
      if (!l) throw std::logic_error("resolved branch lost its leaf link");
      x.outbox.push_back({l->u, {kLeafAssign, x.nbr[s], t[i]}});
    }
  }

  void root_assign(int v) {
    SNode& x = nd[v];
    auto slots = x.alive_slots();
    const std::vector<int>* pick = nullptr;
    for (const auto& t : x.tuples) {
      bool ok = true;
      for (std::size_t i = 0; i < slots.size() && ok; ++i) {
        if (x.memo[slots[i]] < 0)
          throw std::logic_error("undecided branch at the root");
        ok = (x.memo[slots[i]] >> t[i] & 1) != 0;
      }
      if (ok) {
        pick = &t;
        break;
      }
    }
    if (!pick) {
      x.failed = 1;
      return;
    }
    assign_and_spread(x, v, *pick, -1, -1);
  }

  void leaf_assign(int v, const mpc::Message& m) {
    SNode& x = nd[v];
    int last = static_cast<int>(m.words[1]);
    int lv = static_cast<int>(m.words[2]);
    const SolverLink* l = find_link(x, v, m.from);
    if (!l || l->last_child != last || !l->start_is_leaf)
      throw std::logic_error("leaf assignment without a matching link");
    if (x.lab[x.pslot] != -1)
      throw std::logic_error("half-edge labeled twice");
    int best = -1;
    for (int a = 0; a < K && best < 0; ++a)
      if ((l->start_allowed >> a & 1) && (l->pairs >> (a * K + lv) & 1))
        best = a;
    if (best < 0) {
      x.failed = 1;
      return;
    }
    x.lab[x.pslot] = best;
    if (l->pred >= 0)
      x.outbox.push_back({l->pred, {kWork, v, l->v, best, lv}});
  }

  void work(int v, const mpc::Message& m) {
    SNode& x = nd[v];
    if (x.got_work)
      throw std::logic_error("a joining node was asked to assign twice");
    x.got_work = 1;
    int u = static_cast<int>(m.words[1]);
    int w = static_cast<int>(m.words[2]);
    int lu = static_cast<int>(m.words[3]);
    int lw = static_cast<int>(m.words[4]);
    const SolverLink* p1 = find_link(x, u, v);
    const SolverLink* p2 = find_link(x, v, w);
    if (!p1 || !p2) throw std::logic_error("joining node lost its half links");
    int s_in = x.slot_of(p1->last_child);
    int s_out = x.pslot;
    if (s_in < 0 || s_out < 0 || s_in == s_out)
      throw std::logic_error("joining node lost track of its path slots");
    const std::vector<int>* t =
        pick_tuple(x, s_in, p1->pairs, lu, s_out, p2->pairs, lw);
    if (!t) {
      x.failed = 1;
      return;
    }
    assign_and_spread(x, v, *t, s_in, s_out);
    int pin = x.tuple_pos(s_in), pout = x.tuple_pos(s_out);
    if (p1->pred >= 0)
      x.outbox.push_back({p1->pred, {kWork, u, v, lu, (*t)[pin]}});
    if (p2->pred >= 0)
      x.outbox.push_back({p2->pred, {kWork, v, w, (*t)[pout], lw}});
  }

  void phase2() {
    auto emit = [this](int v, const mpc::Cluster::Send& send) {
      for (const auto& q : nd[v].outbox) send(q.to, q.words);
    };
    auto apply = [this](int v, const std::vector<mpc::Message>& in) {
      SNode& x = nd[v];
      x.outbox.clear();
      if (p2_kick) {
        if (x.alive && x.parent < 0) root_assign(v);
        return;
      }
      if (x.failed) return;
      for (const auto& m : in) {
        if (m.words[0] == kLeafAssign)
          leaf_assign(v, m);
        else if (m.words[0] == kWork)
          work(v, m);
        if (x.failed) return;
      }
    };
    p2_kick = true;
    bus.step(emit, apply, res());
    p2_kick = false;
    long long s = 1;
    long long copies = 0;
    for (int v = 0; v < n; ++v)
      copies += static_cast<long long>(nd[v].links.size());
    std::vector<char> flags(n);
    while (true) {
      for (int v = 0; v < n; ++v) flags[v] = nd[v].outbox.empty();
      if (bus.all_done(flags, res())) break;
      ++s;
      if (s > 8LL * n + 64)
        throw std::logic_error("downward pass failed to terminate");
      bus.step(emit, apply, res());
      std::ostringstream row;
      row << s << ",2,0,0,0,0," << copies;
      st.trace_rows.push_back(row.str());
    }
    st.phase2_iterations = (s + 1) / 2;
  }

  long long failure_count() {
    std::vector<Word> flags(n);
    for (int v = 0; v < n; ++v) flags[v] = nd[v].failed ? 1 : 0;
    return bus.sum(flags, res());
  }

  // ------------------------------------------------------------- lift-back

  struct PliftDec {
    bool found = false;
    std::vector<int> parent_labels, leaf_labels;  // per removed leaf
  };

  PliftDec plift_decide(const SNode& x, const PruneRec& pr) const {
    PliftDec d;
    std::vector<char> removed;
    {
      int max_slot = 0;
      for (int s : pr.old_alive_slots) max_slot = std::max(max_slot, s);
      removed.assign(max_slot + 1, 0);
      for (int s : pr.parent_slots) removed[s] = 1;
    }
    for (const auto& t : pr.old_tuples) {  // already in lexicographic order
      bool ok = true;
      for (std::size_t i = 0; i < pr.old_alive_slots.size() && ok; ++i) {
        int slot = pr.old_alive_slots[i];
        if (removed[slot]) {
          std::size_t j = 0;
          while (pr.parent_slots[j] != slot) ++j;
          bool witness = false;
          for (int l = 0; l < K && !witness; ++l)
            witness = (pr.leaf_allowed[j] >> l & 1) &&
                      (pr.leaf_pairs[j] >> (l * K + t[i]) & 1);
          ok = witness;
        } else {
          ok = x.lab[slot] == t[i];
        }
      }
      if (!ok) continue;
      d.found = true;
      d.parent_labels.assign(pr.leaves.size(), -1);
      d.leaf_labels.assign(pr.leaves.size(), -1);
      for (std::size_t i = 0; i < pr.old_alive_slots.size(); ++i) {
        int slot = pr.old_alive_slots[i];
        if (!removed[slot]) continue;
        std::size_t j = 0;
        while (pr.parent_slots[j] != slot) ++j;
        d.parent_labels[j] = t[i];
        for (int l = 0; l < K; ++l)
          if ((pr.leaf_allowed[j] >> l & 1) &&
              (pr.leaf_pairs[j] >> (l * K + t[i]) & 1)) {
            d.leaf_labels[j] = l;
            break;
          }
      }
      break;
    }
    return d;
  }

  void lift(int depth) {
    for (int level = depth - 1; level >= 0; --level) {
      // Pruned leaves return first (they were removed last in the step).
      bus.step(
          [this, level](int v, const mpc::Cluster::Send& send) {
            const SNode& x = nd[v];
            for (const auto& pr : x.prune) {
              if (pr.level != level) continue;
              PliftDec d = plift_decide(x, pr);
              if (!d.found) continue;
              for (std::size_t j = 0; j < pr.leaves.size(); ++j)
                send(pr.leaves[j], {kLiftLeaf, d.leaf_labels[j]});
            }
          },
          [this, level](int v, const std::vector<mpc::Message>& in) {
            SNode& x = nd[v];
            for (const auto& pr : x.prune) {
              if (pr.level != level) continue;
              PliftDec d = plift_decide(x, pr);
              if (!d.found) {
                x.failed = 1;
                continue;
              }
              for (std::size_t j = 0; j < pr.leaves.size(); ++j) {
                int slot = pr.parent_slots[j];
                x.salive[slot] = 1;
                x.nbr[slot] = pr.leaves[j];
                x.lab[slot] = d.parent_labels[j];
              }
            }
            for (const auto& m : in)
              if (m.words[0] == kLiftLeaf) {
                x.alive = 1;
                x.salive[x.pslot] = 1;
                x.lab[x.pslot] = static_cast<int>(m.words[1]);
              }
          },
          res());
      // Contracted chain nodes return, rejoining child and parent.
      bus.step(
          [this, level](int v, const mpc::Cluster::Send& send) {
            const SNode& x = nd[v];
            for (const auto& r : x.crw)
              if (r.level == level)
                send(r.old_parent, {kLiftChild, x.lab[x.pslot]});
            for (const auto& r : x.prw)
              if (r.level == level) send(r.v, {kLiftParent, x.lab[r.slot]});
          },
          [this, level](int v, const std::vector<mpc::Message>& in) {
            SNode& x = nd[v];
            for (const auto& cr : x.contr) {
              if (cr.level != level) continue;
              int a = -1, b = -1;
              for (const auto& m : in) {
                if (m.words[0] == kLiftChild) a = static_cast<int>(m.words[1]);
                if (m.words[0] == kLiftParent) b = static_cast<int>(m.words[1]);
              }
              if (a < 0 || b < 0)
                throw std::logic_error("contracted node missing lift labels");
              int cpos = cr.v_child_slot < cr.v_parent_slot ? 0 : 1;
              int ppos = 1 - cpos;
              bool found = false;
              for (const auto& t : x.tuples) {
                if ((cr.s_child_v >> (a * K + t[cpos]) & 1) &&
                    (cr.s_v_parent >> (t[ppos] * K + b) & 1)) {
                  x.alive = 1;
                  x.salive[cr.v_child_slot] = 1;
                  x.salive[cr.v_parent_slot] = 1;
                  x.lab[cr.v_child_slot] = t[cpos];
                  x.lab[cr.v_parent_slot] = t[ppos];
                  found = true;
                  break;
                }
              }
              if (!found) x.failed = 1;
            }
            for (const auto& r : x.crw)
              if (r.level == level) {
                x.parent = r.old_parent;
                x.nbr[x.pslot] = r.old_parent;
              }
            for (const auto& r : x.prw)
              if (r.level == level) x.nbr[r.slot] = r.v;
          },
          res());
    }
  }

  // ------------------------------------------------------------------ run

  SolveResult run() {
    if (K > kMaxOut)
      throw InvalidInput("output alphabet too large for the solver (max " +
                         std::to_string(kMaxOut) + ")");
    SolveResult result;
    if (n == 0) {
      result.solved = true;
      return result;
    }
    long long rounds0 = bus.cl ? bus.cl->rounds() : 0;
    Orientation o;
    if (bus.cl) {
      o = root_forest(f, *bus.cl);
    } else {
      mpc::Config cfg;
      cfg.c_local = 1LL << 32;
      cfg.c_global = 1LL << 32;
      o = root_forest(f, cfg);
    }
    init_from_orientation(o);
    build_edge_pairs();
    int depth;
    {
      double ll = std::log2(std::max(2.0, std::log2(std::max(2, n))));
      depth = std::max(1, static_cast<int>(std::floor(2.0 * ll)));
    }
    st.reduce_steps = depth;
    std::map<int, long long> prev_per_comp;
    for (int v = 0; v < n; ++v) ++prev_per_comp[comp[v]];
    for (int level = 0; level < depth; ++level) {
      reduce_once(level);
      st.nodes_after_reduce.push_back(static_cast<int>(alive_count()));
      // Each component must shed a third of its nodes per step (rounding
      // up); components already down to their root are allowed to stall.
      std::map<int, long long> per_comp;
      for (int v = 0; v < n; ++v)
        if (nd[v].alive) ++per_comp[comp[v]];
      for (auto [r, cnt] : per_comp)
        if (cnt > (2 * prev_per_comp[r] + 2) / 3)
          throw std::logic_error("reduction step removed too few nodes");
      prev_per_comp = std::move(per_comp);
    }
    CompatTree snap = snapshot();
    phase1();
    phase2();
    long long nfail = failure_count();
    if (nfail == 0) {
      SlotLabeling sl(n);
      for (int v = 0; v < n; ++v) sl[v] = nd[v].lab;
      if (!check_compat_solution(snap, sl))
        throw std::logic_error("reduced labeling failed verification");
      lift(depth);
      nfail = failure_count();
    }
    st.supersteps = bus.cl ? bus.cl->rounds() - rounds0 : 0;
    st.total_links = 0;
    for (int v = 0; v < n; ++v)
      st.total_links += static_cast<long long>(nd[v].clog.size());
    if (st.want_debug) {
      st.debug = std::make_shared<SolveDebug>();
      st.debug->reduced = snap;
      for (int v = 0; v < n; ++v)
        for (const auto& l : nd[v].clog) st.debug->links.push_back(l);
      st.debug->memo.resize(n);
      for (int v = 0; v < n; ++v) st.debug->memo[v] = nd[v].memo;
    }
    if (nfail > 0) return result;  // no correct labeling exists
    HalfEdgeLabeling gout(2 * f.m());
    for (int v = 0; v < n; ++v) {
      if (!nd[v].alive)
        throw std::logic_error("a node stayed removed after lift-back");
      for (int s = 0; s < f.degree(v); ++s) {
        int l = nd[v].lab[s];
        if (l < 0 || l >= K)
          throw std::logic_error("incomplete labeling after lift-back");
        int e = f.edge_index(v, f.adj(v)[s]);
        gout.label[f.half_edge(v, e)] = lcl.sigma_out[l];
      }
    }
    if (!check_solution(f, lcl, gin, gout).valid()) return result;
    result.solved = true;
    result.g_out = std::move(gout);
    return result;
  }
};

}  // namespace

std::string SolveStats::trace_csv() const {
  std::ostringstream out;
  out << "iteration,phase,phi_prime,phi_dblprime,phi,active_links,"
         "total_links\n";
  for (const auto& row : trace_rows) out << row << "\n";
  return out.str();
}

SolveResult solve(const Forest& f, const NodeEdgeLcl& lcl,
                  const HalfEdgeLabeling& g_in, mpc::Cluster& cluster,
                  SolveStats* stats) {
  Solver s(f, lcl, g_in, &cluster, stats);
  return s.run();
}

SolveResult solve(const Forest& f, const NodeEdgeLcl& lcl,
                  const HalfEdgeLabeling& g_in, SolveStats* stats) {
  Solver s(f, lcl, g_in, nullptr, stats);
  return s.run();
}

std::string serialize_solution(const Forest& f, const NodeEdgeLcl& lcl,
                               const SolveResult& r) {
  (void)lcl;
  if (!r.solved) return "no solution\n";
  std::ostringstream out;
  out << "OUT v1\n";
  struct Row {
    int vid, uid, v, s;
  };
  std::vector<Row> rows;
  for (int v = 0; v < f.n(); ++v)
    for (int s = 0; s < f.degree(v); ++s)
      rows.push_back({f.id(v), f.id(f.adj(v)[s]), v, s});
  std::sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) {
    return std::tie(a.vid, a.uid) < std::tie(b.vid, b.uid);
  });
  for (const auto& row : rows) {
    int e = f.edge_index(row.v, f.adj(row.v)[row.s]);
    out << "outlabel " << row.vid << " " << row.uid << " "
        << r.g_out.label[f.half_edge(row.v, e)] << "\n";
  }
  return out.str();
}

}  // namespace tl
