#include "rake.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

#include "paths.hpp"

namespace tl {

namespace {

// One tag iteration over an arbitrary graph: `adj` lists local vertex
// indices, `ids` break rake ties, `in_u` marks the residual. Returns per
// vertex 0 (kept), 1 (raked), or 2 (compressed). Compress removes every
// member of a maximal residual degree-2 run of at least l nodes; rake
// removes isolated nodes and leaves whose unique residual neighbor either
// has higher residual degree or is the lower-ID half of a leaf pair.
std::vector<char> tag_once(const std::vector<std::vector<int>>& adj,
                           const std::vector<long long>& ids,
                           const std::vector<char>& in_u, int l) {
  int nn = static_cast<int>(adj.size());
  std::vector<int> deg(nn, 0);
  for (int v = 0; v < nn; ++v) {
    if (!in_u[v]) continue;
    for (int u : adj[v])
      if (in_u[u]) ++deg[v];
  }
  std::vector<char> tag(nn, 0), seen(nn, 0);
  for (int v = 0; v < nn; ++v) {
    if (!in_u[v] || deg[v] != 2 || seen[v]) continue;
    std::vector<int> run{v};
    seen[v] = 1;
    for (std::size_t q = 0; q < run.size(); ++q)
      for (int u : adj[run[q]])
        if (in_u[u] && deg[u] == 2 && !seen[u]) {
          seen[u] = 1;
          run.push_back(u);
        }
    if (static_cast<int>(run.size()) >= l)
      for (int u : run) tag[u] = 2;
  }
  for (int v = 0; v < nn; ++v) {
    if (!in_u[v] || tag[v] != 0 || deg[v] > 1) continue;
    if (deg[v] == 0) {
      tag[v] = 1;
      continue;
    }
    for (int u : adj[v])
      if (in_u[u] && (deg[u] > 1 || (deg[u] == 1 && ids[v] > ids[u])))
        tag[v] = 1;
  }
  return tag;
}

// Chain structure of one same-iteration compress component, ordered from
// its smaller-ID endpoint. kind/iter give every node's tag.
std::vector<int> ordered_chain(const Forest& f, const std::vector<char>& kind,
                               const std::vector<int>& iter, int start,
                               std::vector<char>& seen) {
  auto chain_nbrs = [&](int v) {
    std::vector<int> out;
    for (int u : f.adj(v))
      if (kind[u] == 2 && iter[u] == iter[v]) out.push_back(u);
    if (out.size() > 2)
      throw std::runtime_error(
          "decomposition invariant violated: compress component is not a "
          "path");
    return out;
  };
  // Walk to one end, then traverse; orient from the smaller-ID endpoint.
  int end = start, prev = -1;
  for (;;) {
    seen[end] = 1;
    int next = -1;
    for (int u : chain_nbrs(end))
      if (u != prev) next = u;
    if (next == -1) break;
    prev = end;
    end = next;
  }
  std::vector<int> seq;
  prev = -1;
  int cur = end;
  for (;;) {
    seq.push_back(cur);
    seen[cur] = 1;
    int next = -1;
    for (int u : chain_nbrs(cur))
      if (u != prev) next = u;
    if (next == -1) break;
    prev = cur;
    cur = next;
  }
  if (seq.size() > 1 && f.id(seq.back()) < f.id(seq.front()))
    std::reverse(seq.begin(), seq.end());
  return seq;
}

// Promotion pass over final tags: a raked node adjacent to a same-iteration
// compressed node moves up one layer, and so does every member of the
// independent set that splits each compress chain into [l, 2l] pieces.
std::vector<char> promotions(const Forest& f, const std::vector<char>& kind,
                             const std::vector<int>& iter, int l) {
  std::vector<char> promoted(f.n(), 0);
  for (int e = 0; e < f.m(); ++e) {
    auto [u, v] = f.edge(e);
    if (iter[u] != iter[v]) continue;
    if (kind[u] == 1 && kind[v] == 2) promoted[u] = 1;
    if (kind[v] == 1 && kind[u] == 2) promoted[v] = 1;
  }
  long long bound = 0;
  for (int v = 0; v < f.n(); ++v) bound = std::max<long long>(bound, f.id(v));
  std::vector<char> seen(f.n(), 0);
  for (int v = 0; v < f.n(); ++v) {
    if (kind[v] != 2 || seen[v]) continue;
    std::vector<int> seq = ordered_chain(f, kind, iter, v, seen);
    std::vector<int> ids;
    ids.reserve(seq.size());
    for (int u : seq) ids.push_back(f.id(u));
    for (int p : alpha_beta_independent_set(ids, l, 2 * l, bound))
      promoted[seq[p]] = 1;
  }
  return promoted;
}

Decomposition finish(const std::vector<char>& kind,
                     const std::vector<int>& iter,
                     const std::vector<char>& promoted, int l) {
  Decomposition d;
  d.l = l;
  d.layer_of.resize(kind.size());
  for (std::size_t v = 0; v < kind.size(); ++v) {
    d.layer_of[v] = iter[v] + (promoted[v] ? 1 : 0);
    d.L = std::max(d.L, d.layer_of[v]);
  }
  return d;
}

void validate_l(int l) {
  if (l < 2) throw std::invalid_argument("compress threshold l must be >= 2");
}

}  // namespace

Decomposition decompose_local(const Forest& f, int l,
                              std::vector<long long>* removed_per_iter) {
  validate_l(l);
  int n = f.n();
  std::vector<std::vector<int>> adj(n);
  std::vector<long long> ids(n);
  for (int v = 0; v < n; ++v) {
    adj[v] = f.adj(v);
    ids[v] = f.id(v);
  }
  std::vector<char> in_u(n, 1), kind(n, 0);
  std::vector<int> iter(n, 0);
  long long ucount = n;
  int it = 0;
  while (ucount > 0) {
    ++it;
    std::vector<char> tag = tag_once(adj, ids, in_u, l);
    long long removed = 0;
    for (int v = 0; v < n; ++v) {
      if (!tag[v]) continue;
      ++removed;
      in_u[v] = 0;
      kind[v] = tag[v];
      iter[v] = it;
    }
    if (removed == 0)
      throw std::runtime_error("tag iteration removed nothing from a "
                               "nonempty residual");
    if (removed * 2 * (l + 1) < ucount)
      throw std::runtime_error(
          "tag iteration " + std::to_string(it) + " removed " +
          std::to_string(removed) + " of " + std::to_string(ucount) +
          ", less than the guaranteed 1/(2(l+1)) fraction");
    if (removed_per_iter) removed_per_iter->push_back(removed);
    ucount -= removed;
  }
  return finish(kind, iter, promotions(f, kind, iter, l), l);
}

namespace {

// ---------------------------------------------------------------------------
// Superstep protocol. One machine per node. Peeling runs tag iterations
// either directly (degree exchange, l-1 chain-run probes, removal
// announcements) or batched on stored vision balls when the exponentiated
// radius covers a whole batch; the promotion pass runs probe walks, color
// reduction, and a sweep token along each compress chain so that every
// decision replays the sequential reference bit for bit.

enum WalkTag : int { W_TOKEN = 1, W_REPAIR = 2 };
enum RepairAct : int { A_PICK = 1, A_UNPICK = 2, A_MOVE = 3 };

struct Staged {
  int to;
  std::vector<mpc::Word> words;
};

struct RNode {
  bool in_u = true;
  char kind = 0;
  int iter = 0;
  bool promoted = false;
  // Vision ball: the residual subgraph within the current radius.
  std::vector<int> bnodes;  // node indices including self, sorted
  std::vector<std::pair<int, int>> bedges;  // a < b
  // Direct-iteration scratch; constant-size fields on a constant-degree
  // graph, so they share one resident word.
  std::vector<char> nbr_alive;  // aligned with the input adjacency
  std::vector<int> nbr_deg;
  int side_cnt[2] = {0, 0};  // capped run counts through each residual side
  // Promotion-pass state.
  int chain[2] = {-1, -1};
  int nchain = 0;
  long long porigin[2] = {-1, -1};
  int pvia[2] = {-2, -2};
  int nprobe = 0;
  int up = -1, down = -1;
  long long color = 0;
  long long up_color = -1, down_color = -1;
  std::vector<Staged> staged;
};

struct RProto {
  const Forest& f;
  mpc::Cluster& cl;
  int l;
  std::vector<RNode> st;
  long long iter_base = 0;
  int radius = 1;
  long long peak_ball = 0;

  RProto(const Forest& forest, mpc::Cluster& cluster, int lparam)
      : f(forest), cl(cluster), l(lparam), st(forest.n()) {
    for (int v = 0; v < f.n(); ++v) {
      RNode& nd = st[v];
      nd.bnodes.push_back(v);
      for (int u : f.adj(v)) {
        nd.bnodes.push_back(u);
        nd.bedges.push_back({std::min(u, v), std::max(u, v)});
      }
      std::sort(nd.bnodes.begin(), nd.bnodes.end());
      nd.nbr_alive.assign(f.adj(v).size(), 1);
      nd.nbr_deg.assign(f.adj(v).size(), -1);
      peak_ball = std::max(peak_ball, (long long)nd.bnodes.size());
    }
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw std::runtime_error("decomposition protocol invariant violated: " +
                             what);
  }

  // One packed status word (residual flag, tag kind, iteration, and the
  // constant-size probe/degree scratch of a constant-degree node), the
  // stored ball, and the walk state of compressed nodes.
  long long resident(int v) const {
    const RNode& nd = st[v];
    long long w = 1;
    if (nd.in_u)
      w += static_cast<long long>(nd.bnodes.size()) +
           2 * static_cast<long long>(nd.bedges.size());
    if (nd.kind == 2) w += 8;  // chain, probe, orientation, color words
    w += 3 * static_cast<long long>(nd.staged.size());
    return w;
  }

  std::vector<int> residual_nbrs(int v) const {
    std::vector<int> out;
    const auto& adj = f.adj(v);
    for (std::size_t i = 0; i < adj.size(); ++i)
      if (st[v].nbr_alive[i]) out.push_back(adj[i]);
    return out;
  }

  int adj_pos(int v, int u) const {
    const auto& adj = f.adj(v);
    for (std::size_t i = 0; i < adj.size(); ++i)
      if (adj[i] == u) return static_cast<int>(i);
    fail("message from a non-neighbor");
  }

  bool empty() {
    std::vector<char> flags(f.n());
    for (int v = 0; v < f.n(); ++v) flags[v] = !st[v].in_u;
    return cl.all_done(flags, [&](int v) { return resident(v); });
  }

  // Drop ball members farther than `rad` hops from v or cut off from it.
  void truncate_ball(int v, int rad) {
    RNode& nd = st[v];
    int nn = static_cast<int>(nd.bnodes.size());
    auto idx = [&](int u) {
      auto it = std::lower_bound(nd.bnodes.begin(), nd.bnodes.end(), u);
      return it != nd.bnodes.end() && *it == u
                 ? static_cast<int>(it - nd.bnodes.begin())
                 : -1;
    };
    std::vector<std::vector<int>> la(nn);
    for (auto [a, b] : nd.bedges) {
      int ia = idx(a), ib = idx(b);
      if (ia < 0 || ib < 0) continue;
      la[ia].push_back(ib);
      la[ib].push_back(ia);
    }
    std::vector<int> dist(nn, -1);
    std::vector<int> queue{idx(v)};
    dist[queue[0]] = 0;
    for (std::size_t q = 0; q < queue.size(); ++q)
      for (int u : la[queue[q]])
        if (dist[u] < 0 && dist[queue[q]] < rad) {
          dist[u] = dist[queue[q]] + 1;
          queue.push_back(u);
        }
    std::vector<int> keep;
    for (int i = 0; i < nn; ++i)
      if (dist[i] >= 0) keep.push_back(nd.bnodes[i]);
    std::erase_if(nd.bedges, [&](const std::pair<int, int>& e) {
      return !std::binary_search(keep.begin(), keep.end(), e.first) ||
             !std::binary_search(keep.begin(), keep.end(), e.second);
    });
    nd.bnodes = std::move(keep);
  }

  // ---- peeling ----

  void step_degs() {
    cl.superstep(
        [&](int v, const mpc::Cluster::Send& send) {
          if (!st[v].in_u) return;
          long long deg = static_cast<long long>(residual_nbrs(v).size());
          for (int u : residual_nbrs(v)) send(u, {deg});
        },
        [&](int v, const std::vector<mpc::Message>& inbox) {
          RNode& nd = st[v];
          nd.side_cnt[0] = nd.side_cnt[1] = 0;
          std::fill(nd.nbr_deg.begin(), nd.nbr_deg.end(), -1);
          for (const auto& msg : inbox)
            nd.nbr_deg[adj_pos(v, msg.from)] = static_cast<int>(msg.words[0]);
        },
        [&](int v) { return resident(v); });
  }

  void step_probe() {
    cl.superstep(
        [&](int v, const mpc::Cluster::Send& send) {
          const RNode& nd = st[v];
          if (!nd.in_u) return;
          std::vector<int> r = residual_nbrs(v);
          if (r.size() != 2) return;
          send(r[0], {std::min<long long>(l, 1 + nd.side_cnt[1])});
          send(r[1], {std::min<long long>(l, 1 + nd.side_cnt[0])});
        },
        [&](int v, const std::vector<mpc::Message>& inbox) {
          RNode& nd = st[v];
          if (!nd.in_u) return;
          std::vector<int> r = residual_nbrs(v);
          if (r.size() != 2) return;
          for (const auto& msg : inbox) {
            if (msg.from == r[0]) nd.side_cnt[0] = (int)msg.words[0];
            if (msg.from == r[1]) nd.side_cnt[1] = (int)msg.words[0];
          }
        },
        [&](int v) { return resident(v); });
  }

  // Tag decision for one direct iteration, a pure function of the probe and
  // degree scratch gathered this iteration.
  char direct_tag(int v) const {
    const RNode& nd = st[v];
    if (!nd.in_u) return 0;
    std::vector<int> r = residual_nbrs(v);
    if (r.size() == 2)
      return 1 + nd.side_cnt[0] + nd.side_cnt[1] >= l ? 2 : 0;
    if (r.size() > 2) return 0;
    if (r.empty()) return 1;
    int du = nd.nbr_deg[adj_pos(v, r[0])];
    if (du < 0) fail("missing neighbor degree");
    return du > 1 || (du == 1 && f.id(v) > f.id(r[0])) ? 1 : 0;
  }

  // Simulation outcome of `b` tag iterations as seen from v's ball.
  std::pair<char, int> ball_tag(int v, int b) const {
    const RNode& nd = st[v];
    int nn = static_cast<int>(nd.bnodes.size());
    auto idx = [&](int u) {
      return static_cast<int>(
          std::lower_bound(nd.bnodes.begin(), nd.bnodes.end(), u) -
          nd.bnodes.begin());
    };
    std::vector<std::vector<int>> la(nn);
    for (auto [a, c] : nd.bedges) {
      la[idx(a)].push_back(idx(c));
      la[idx(c)].push_back(idx(a));
    }
    std::vector<long long> ids(nn);
    for (int i = 0; i < nn; ++i) ids[i] = f.id(nd.bnodes[i]);
    std::vector<char> in_u(nn, 1);
    int center = idx(v);
    for (int rel = 1; rel <= b; ++rel) {
      std::vector<char> tag = tag_once(la, ids, in_u, l);
      if (tag[center]) return {tag[center], rel};
      for (int i = 0; i < nn; ++i)
        if (tag[i]) in_u[i] = 0;
    }
    return {0, 0};
  }

  // Decide removals (directly or from balls) and announce them to every
  // ball member so all stored vision stays pruned to the residual.
  void step_remove(int b, bool ball_mode) {
    auto decide = [&](int v) {
      return ball_mode ? ball_tag(v, b) : std::pair(direct_tag(v), 1);
    };
    cl.superstep(
        [&](int v, const mpc::Cluster::Send& send) {
          if (!st[v].in_u) return;
          if (decide(v).first == 0) return;
          for (int u : st[v].bnodes)
            if (u != v) send(u, {1});
        },
        [&](int v, const std::vector<mpc::Message>& inbox) {
          RNode& nd = st[v];
          if (!nd.in_u) return;
          auto [k, rel] = decide(v);
          if (k != 0) {
            nd.in_u = false;
            nd.kind = k;
            nd.iter = static_cast<int>(iter_base) + rel;
            nd.bnodes.clear();
            nd.bedges.clear();
            return;
          }
          if (inbox.empty()) return;
          std::vector<int> gone;
          for (const auto& msg : inbox) gone.push_back(msg.from);
          std::sort(gone.begin(), gone.end());
          std::erase_if(nd.bnodes, [&](int u) {
            return std::binary_search(gone.begin(), gone.end(), u);
          });
          std::erase_if(nd.bedges, [&](const std::pair<int, int>& e) {
            return std::binary_search(gone.begin(), gone.end(), e.first) ||
                   std::binary_search(gone.begin(), gone.end(), e.second);
          });
          const auto& adj = f.adj(v);
          for (std::size_t i = 0; i < adj.size(); ++i)
            if (std::binary_search(gone.begin(), gone.end(), adj[i]))
              nd.nbr_alive[i] = 0;
          truncate_ball(v, radius);
        },
        [&](int v) { return resident(v); });
  }

  // One peel application: exactly r tag iterations, batched on vision balls
  // whenever the radius covers a whole batch of l-hop dependencies.
  void peel(int r, long long* iterations) {
    int done = 0;
    while (done < r) {
      int b = radius / l;
      if (b >= 1) {
        b = std::min(b, r - done);
        step_remove(b, true);
      } else {
        b = 1;
        step_degs();
        for (int t = 0; t < l - 1; ++t) step_probe();
        step_remove(1, false);
      }
      iter_base += b;
      done += b;
      if (iterations) *iterations += b;
    }
  }

  // One graph exponentiation step: everyone hands its ball to every ball
  // member; unions double the vision radius.
  void step_expo() {
    int target = 2 * radius;
    cl.superstep(
        [&](int v, const mpc::Cluster::Send& send) {
          const RNode& nd = st[v];
          if (!nd.in_u) return;
          std::vector<mpc::Word> words;
          words.push_back(static_cast<long long>(nd.bnodes.size()));
          words.push_back(static_cast<long long>(nd.bedges.size()));
          for (int u : nd.bnodes) words.push_back(u);
          for (auto [a, b] : nd.bedges) {
            words.push_back(a);
            words.push_back(b);
          }
          for (int u : nd.bnodes)
            if (u != v) send(u, words);
        },
        [&](int v, const std::vector<mpc::Message>& inbox) {
          RNode& nd = st[v];
          if (!nd.in_u) return;
          std::vector<int> nodes = nd.bnodes;
          std::vector<std::pair<int, int>> edges = nd.bedges;
          for (const auto& msg : inbox) {
            long long nn = msg.words[0], ne = msg.words[1];
            for (long long i = 0; i < nn; ++i)
              nodes.push_back(static_cast<int>(msg.words[2 + i]));
            for (long long i = 0; i < ne; ++i)
              edges.push_back({static_cast<int>(msg.words[2 + nn + 2 * i]),
                               static_cast<int>(msg.words[2 + nn + 2 * i + 1])});
          }
          std::sort(nodes.begin(), nodes.end());
          nodes.erase(std::unique(nodes.begin(), nodes.end()), nodes.end());
          std::sort(edges.begin(), edges.end());
          edges.erase(std::unique(edges.begin(), edges.end()), edges.end());
          nd.bnodes = std::move(nodes);
          nd.bedges = std::move(edges);
          truncate_ball(v, target);
          peak_ball = std::max(peak_ball, (long long)nd.bnodes.size());
        },
        [&](int v) { return resident(v); });
    radius = target;
  }

  // ---- promotion pass ----

  // Tag exchange: raked nodes next to same-iteration compressed neighbors
  // promote; compressed nodes learn their chain neighbors.
  void step_tags() {
    cl.superstep(
        [&](int v, const mpc::Cluster::Send& send) {
          for (int u : f.adj(v))
            send(u, {st[v].kind, st[v].iter});
        },
        [&](int v, const std::vector<mpc::Message>& inbox) {
          RNode& nd = st[v];
          for (const auto& msg : inbox) {
            bool comp = msg.words[0] == 2 && msg.words[1] == nd.iter;
            if (!comp) continue;
            if (nd.kind == 1) nd.promoted = true;
            if (nd.kind == 2) {
              if (nd.nchain >= 2) fail("compress chain with degree above 2");
              nd.chain[nd.nchain++] = msg.from;
            }
          }
        },
        [&](int v) { return resident(v); });
  }

  void run_staged_until_done(const char* what,
                             const std::function<void(int, const mpc::Message&,
                                                      std::vector<Staged>&)>&
                                 handle,
                             const std::function<bool(int)>& settled) {
    long long cap = 4LL * f.n() + 16;
    for (long long round = 0;; ++round) {
      if (round > cap) fail(std::string(what) + " walk did not settle");
      cl.superstep(
          [&](int v, const mpc::Cluster::Send& send) {
            for (const Staged& s : st[v].staged) send(s.to, s.words);
          },
          [&](int v, const std::vector<mpc::Message>& inbox) {
            st[v].staged.clear();
            for (const auto& msg : inbox) handle(v, msg, st[v].staged);
          },
          [&](int v) { return resident(v); });
      std::vector<char> flags(f.n());
      for (int v = 0; v < f.n(); ++v)
        flags[v] = st[v].staged.empty() && settled(v);
      if (cl.all_done(flags, [&](int v) { return resident(v); })) break;
    }
  }

  // Each chain endpoint floods its ID along the chain; afterwards every
  // chain node knows both endpoint IDs and the direction of the smaller.
  void step_probes() {
    for (int v = 0; v < f.n(); ++v) {
      RNode& nd = st[v];
      if (nd.kind != 2 || nd.nchain != 1) continue;
      nd.porigin[nd.nprobe] = f.id(v);
      nd.pvia[nd.nprobe] = -1;
      ++nd.nprobe;
      nd.staged.push_back({nd.chain[0], {f.id(v)}});
    }
    run_staged_until_done(
        "probe",
        [&](int v, const mpc::Message& msg, std::vector<Staged>& out) {
          RNode& nd = st[v];
          long long origin = msg.words[0];
          if (nd.nprobe > 0 && (nd.porigin[0] == origin ||
                                (nd.nprobe > 1 && nd.porigin[1] == origin)))
            return;
          if (nd.nprobe >= 2) fail("third probe on a chain");
          nd.porigin[nd.nprobe] = origin;
          nd.pvia[nd.nprobe] = msg.from;
          ++nd.nprobe;
          if (nd.nchain == 2)
            out.push_back(
                {nd.chain[0] == msg.from ? nd.chain[1] : nd.chain[0],
                 {origin}});
        },
        [&](int v) {
          const RNode& nd = st[v];
          return nd.kind != 2 || nd.nchain == 0 || nd.nprobe == 2;
        });
    for (int v = 0; v < f.n(); ++v) {
      RNode& nd = st[v];
      if (nd.kind != 2 || nd.nchain == 0) continue;
      if (nd.nprobe != 2) fail("chain node missed an endpoint probe");
      int s = nd.porigin[0] < nd.porigin[1] ? 0 : 1;
      nd.up = nd.pvia[s];
      if (nd.nchain == 2)
        nd.down = nd.chain[0] == nd.up ? nd.chain[1] : nd.chain[0];
      else
        nd.down = nd.up == -1 ? nd.chain[0] : -1;
      nd.color = f.id(v);
    }
  }

  bool on_chain(int v) const {
    return st[v].kind == 2 && st[v].nchain > 0;
  }

  // Fixed-schedule color reduction along every chain at once, then the
  // shaves down to three colors, exactly as the sequential routine.
  void step_colors(long long id_bound) {
    int rounds = color_reduction_rounds(id_bound);
    for (int t = 0; t < rounds; ++t) {
      cl.superstep(
          [&](int v, const mpc::Cluster::Send& send) {
            if (on_chain(v) && st[v].down != -1)
              send(st[v].down, {st[v].color});
          },
          [&](int v, const std::vector<mpc::Message>& inbox) {
            RNode& nd = st[v];
            if (!on_chain(v)) return;
            long long pred = nd.color == 0 ? 1 : 0;
            for (const auto& msg : inbox)
              if (msg.from == nd.up) pred = msg.words[0];
            nd.color = reduce_color(nd.color, pred);
          },
          [&](int v) { return resident(v); });
    }
    auto exchange = [&](const std::function<void(RNode&)>& use) {
      cl.superstep(
          [&](int v, const mpc::Cluster::Send& send) {
            if (!on_chain(v)) return;
            if (st[v].up != -1) send(st[v].up, {st[v].color});
            if (st[v].down != -1) send(st[v].down, {st[v].color});
          },
          [&](int v, const std::vector<mpc::Message>& inbox) {
            RNode& nd = st[v];
            if (!on_chain(v)) return;
            nd.up_color = nd.down_color = -1;
            for (const auto& msg : inbox) {
              if (msg.from == nd.up) nd.up_color = msg.words[0];
              if (msg.from == nd.down) nd.down_color = msg.words[0];
            }
            use(nd);
          },
          [&](int v) { return resident(v); });
    };
    for (long long shave = 5; shave >= 3; --shave)
      exchange([&](RNode& nd) {
        if (nd.color != shave) return;
        for (long long col = 0; col < 3; ++col)
          if (col != nd.up_color && col != nd.down_color) {
            nd.color = col;
            break;
          }
      });
    exchange([](RNode&) {});  // record final neighbor colors
  }

  // Sweep token from each chain's smaller-ID endpoint replaying the
  // sequential pick loop, then the tail repairs walking back upstream.
  void step_sweep(int alpha, int beta) {
    for (int v = 0; v < f.n(); ++v)
      if (on_chain(v) && st[v].up == -1)
        st[v].staged.push_back({st[v].down, {W_TOKEN, 0, -1, -1}});
    run_staged_until_done(
        "sweep",
        [&](int v, const mpc::Message& msg, std::vector<Staged>& out) {
          RNode& nd = st[v];
          if (msg.words[0] == W_TOKEN) {
            long long i = msg.words[1] + 1, last = msg.words[2],
                      prev = msg.words[3];
            if (nd.down != -1) {
              long long gap = i - last - 1;
              bool minimum =
                  nd.color < nd.up_color && nd.color < nd.down_color;
              if ((minimum && gap >= alpha && gap <= beta) || gap == beta) {
                nd.promoted = true;
                prev = last;
                last = i;
              }
              out.push_back({nd.down, {W_TOKEN, i, last, prev}});
              return;
            }
            long long len = i + 1;
            if (last == -1) {
              if (len > beta)
                out.push_back({nd.up, {W_REPAIR, A_PICK, alpha}});
              return;
            }
            long long tail = len - 1 - last;
            if (tail < alpha) {
              long long need = alpha - tail, gapb = last - prev - 1;
              if (gapb - need >= alpha)
                out.push_back(
                    {nd.up, {W_REPAIR, A_MOVE, len - 1 - last, need}});
              else
                out.push_back({nd.up, {W_REPAIR, A_UNPICK, len - 1 - last}});
            } else if (tail > beta) {
              out.push_back({nd.up, {W_REPAIR, A_PICK, alpha}});
            }
            return;
          }
          long long act = msg.words[1], hops = msg.words[2] - 1;
          if (hops > 0) {
            std::vector<mpc::Word> fwd{W_REPAIR, act, hops};
            if (act == A_MOVE) fwd.push_back(msg.words[3]);
            out.push_back({nd.up, fwd});
            return;
          }
          if (act == A_PICK) nd.promoted = true;
          if (act == A_UNPICK) nd.promoted = false;
          if (act == A_MOVE) {
            nd.promoted = false;
            out.push_back({nd.up, {W_REPAIR, A_PICK, msg.words[3]}});
          }
        },
        [&](int) { return true; });
  }
};

}  // namespace

Decomposition decompose(const Forest& f, mpc::Cluster& cluster,
                        DecomposeOptions opt, DecomposeStats* stats) {
  validate_l(opt.l);
  if (!(opt.delta > 0.0 && opt.delta <= 1.0))
    throw std::invalid_argument("delta must lie in (0, 1]");
  int n = f.n();
  Decomposition out;
  out.l = opt.l;
  if (n == 0) return out;
  RProto p(f, cluster, opt.l);

  int max_deg = std::max(1, f.max_degree());
  int c = opt.c_override;
  if (c <= 0) {
    double x = 1.0;
    c = 0;
    while (x >= 1.0 / max_deg) {
      x *= 1.0 - 1.0 / (4.0 * opt.l);
      ++c;
    }
  }
  int reps = 2 * c;
  double dlog = opt.delta * std::log2(std::max(1, n));
  int step1 = dlog > 1.0 ? (int)std::ceil(std::log2(dlog)) : 0;

  DecomposeStats local;
  DecomposeStats& s = stats ? *stats : local;
  s = DecomposeStats{};
  s.repetitions = reps;
  auto end_phase = [&] {
    ++s.phases;
    long long left = 0;
    for (int v = 0; v < n; ++v)
      if (p.st[v].in_u) ++left;
    s.residual_after_phase.push_back(left);
  };

  bool done = false;
  for (int i = 1; i <= step1 && !done; ++i) {
    int r = 1 << (i - 1);
    for (int k = 0; k < reps && !done; ++k) {
      p.peel(r, &s.iterations);
      done = p.empty();
    }
    if (!done) {
      p.step_expo();
      ++s.step1_phases;
    }
    end_phase();
  }
  int r2 = std::max(1, (int)std::floor(dlog));
  while (!done) {
    if (s.phases > 4LL * n + 64) p.fail("peel schedule did not terminate");
    p.peel(r2, &s.iterations);
    done = p.empty();
    end_phase();
  }

  long long bound = 0;
  for (int v = 0; v < n; ++v) bound = std::max<long long>(bound, f.id(v));
  p.step_tags();
  p.step_probes();
  p.step_colors(bound);
  p.step_sweep(opt.l, 2 * opt.l);

  s.max_ball_nodes = p.peak_ball;
  s.vision_radius = p.radius;
  out.layer_of.resize(n);
  for (int v = 0; v < n; ++v) {
    if (p.st[v].in_u || p.st[v].kind == 0) p.fail("node left untagged");
    out.layer_of[v] = p.st[v].iter + (p.st[v].promoted ? 1 : 0);
    out.L = std::max(out.L, out.layer_of[v]);
  }
  return out;
}

Decomposition decompose(const Forest& f, DecomposeOptions opt,
                        mpc::Config cfg, DecomposeStats* stats) {
  mpc::Cluster cluster(f.n(), f.n(), f.m(), cfg);
  return decompose(f, cluster, opt, stats);
}

bool check_decomposition(const Forest& f, const Decomposition& d,
                         std::string* why) {
  auto bad = [&](const std::string& what) {
    if (why) *why = what;
    return false;
  };
  int n = f.n();
  if (static_cast<int>(d.layer_of.size()) != n)
    return bad("layer_of size does not match the forest");
  if (n == 0) return d.L == 0 ? true : bad("layer count nonzero on empty forest");
  if (d.l < 2) return bad("invalid l");
  int seen_max = 0;
  for (int v = 0; v < n; ++v) {
    if (d.layer_of[v] < 1 || d.layer_of[v] > d.L)
      return bad("node " + std::to_string(f.id(v)) +
                 " has layer outside 1..L");
    seen_max = std::max(seen_max, d.layer_of[v]);
  }
  if (seen_max != d.L) return bad("no node on the top layer");
  auto high_deg = [&](int v) {
    int cnt = 0;
    for (int u : f.adj(v))
      if (d.layer_of[u] >= d.layer_of[v]) ++cnt;
    return cnt;
  };
  for (int v = 0; v < n; ++v)
    if (high_deg(v) > 2)
      return bad("node " + std::to_string(f.id(v)) +
                 " has more than 2 same-or-higher-layer neighbors");
  std::vector<char> seen(n, 0);
  for (int v = 0; v < n; ++v) {
    if (seen[v]) continue;
    std::vector<int> comp{v};
    seen[v] = 1;
    for (std::size_t q = 0; q < comp.size(); ++q)
      for (int u : f.adj(comp[q]))
        if (!seen[u] && d.layer_of[u] == d.layer_of[v]) {
          seen[u] = 1;
          comp.push_back(u);
        }
    if (comp.size() == 1) continue;
    if (static_cast<int>(comp.size()) < d.l ||
        static_cast<int>(comp.size()) > 2 * d.l)
      return bad("same-layer component around node " +
                 std::to_string(f.id(v)) + " has " +
                 std::to_string(comp.size()) + " nodes, outside [l, 2l]");
    for (int u : comp)
      if (high_deg(u) != 2)
        return bad("path-component node " + std::to_string(f.id(u)) +
                   " lacks exactly 2 same-or-higher-layer neighbors");
  }
  for (int e = 0; e < f.m(); ++e) {
    auto [a, b] = f.edge(e);
    if (d.layer_of[a] == d.L && d.layer_of[b] == d.L)
      return bad("top layer is not isolated: edge " +
                 std::to_string(f.id(a)) + "-" + std::to_string(f.id(b)));
  }
  return true;
}

std::string serialize_decomposition(const Forest& f, const Decomposition& d) {
  std::ostringstream out;
  out << "DECOMP v1\n";
  out << "l " << d.l << "\n";
  std::vector<int> order(f.n());
  for (int v = 0; v < f.n(); ++v) order[v] = v;
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return f.id(a) < f.id(b); });
  for (int v : order) out << "layer " << f.id(v) << " " << d.layer_of[v] << "\n";
  return out.str();
}

Decomposition parse_decomposition(const Forest& f, const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  Decomposition d;
  d.l = 0;
  d.layer_of.assign(f.n(), 0);
  auto err = [&](const std::string& what) {
    throw ParseError("line " + std::to_string(lineno) + ": " + what);
  };
  bool header = false;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string word;
    ls >> word;
    if (!header) {
      std::string version;
      if (word != "DECOMP" || !(ls >> version) || version != "v1")
        err("expected DECOMP v1 header");
      header = true;
      continue;
    }
    if (word == "l") {
      int val;
      if (!(ls >> val) || val < 2) err("malformed l line");
      if (d.l != 0) err("duplicate l line");
      d.l = val;
    } else if (word == "layer") {
      int id, layer;
      if (!(ls >> id >> layer)) err("malformed layer line");
      if (!f.has_id(id)) err("unknown node id " + std::to_string(id));
      int v = f.index_of(id);
      if (d.layer_of[v] != 0) err("node assigned twice");
      if (layer < 1) err("layer must be positive");
      d.layer_of[v] = layer;
      d.L = std::max(d.L, layer);
    } else {
      err("unknown directive '" + word + "'");
    }
  }
  if (!header) throw ParseError("missing DECOMP v1 header");
  if (d.l == 0) throw ParseError("missing l line");
  for (int v = 0; v < f.n(); ++v)
    if (d.layer_of[v] == 0)
      throw ParseError("node " + std::to_string(f.id(v)) +
                       " has no layer line");
  return d;
}

}  // namespace tl
