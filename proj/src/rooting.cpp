#include "rooting.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <sstream>

namespace tl {

namespace {

// Node roles during root finding; TAIL/HEAD replace LEAF/HIGH while the
// set-aside paths are oriented afterwards.
enum Role : int {
  R_UNKNOWN = 0,
  R_LEAF = 1,
  R_HIGH = 2,
  R_MIDPOINT = 3,
  R_INTERNAL = 4,
  R_ROOT = 5,
  R_TAIL = 6,
  R_HEAD = 7,
};

bool acting_endpoint(int role) {
  return role == R_LEAF || role == R_HIGH || role == R_MIDPOINT ||
         role == R_TAIL || role == R_HEAD;
}

// Role after degree changes; INTERNAL and ROOT are absorbing, a degree-2
// node that used to be a (>= 3)-degree endpoint becomes a midpoint.
int next_role(int role, int deg) {
  if (role == R_INTERNAL || role == R_ROOT) return role;
  if (deg == 0) return R_ROOT;
  if (deg == 1) return R_LEAF;
  if (deg >= 3) return R_HIGH;
  if (role == R_HIGH || role == R_MIDPOINT) return R_MIDPOINT;
  return R_INTERNAL;
}

// One stored virtual edge. `via` is the adjacency position of the input
// edge whose side the virtual edge lies on; `token` identifies the side at
// the partner (the partner's input neighbor opening that side), used to
// address endpoints whose tracked partner may lag behind ours.
struct Rec {
  int partner = -1;
  int via = -1;
  int role = R_UNKNOWN;   // last known role of the partner
  bool furthest = false;  // holds the informer flag toward this endpoint
  int token = -1;
  bool pending = false;   // staged removal within the current superstep
};

struct Node {
  bool alive = true;
  bool aside = false;
  int role = R_UNKNOWN;
  bool finished = false;
  std::vector<Rec> recs;
  std::vector<int> frozen;  // path neighbors at set-aside time
  bool tail = false, head = false;
};

enum Tag : int {
  T_SETASIDE = 1,
  T_ROLE = 2,
  T_CONVERT = 3,
  T_NEWPARTNER = 4,
  T_NEWTRACK = 5,
};

// Message header word: tag, a role, and a flag share one word (a word holds
// O(log n) bits; tag, role and flag are constant-size).
long long hdr(int tag, int role = 0, bool furthest = false) {
  return tag * 32 + role * 2 + (furthest ? 1 : 0);
}
int hdr_tag(long long h) { return static_cast<int>(h / 32); }
int hdr_role(long long h) { return static_cast<int>(h / 2 % 16); }
bool hdr_fur(long long h) { return h % 2 != 0; }

struct Proto {
  const Forest& f;
  std::vector<Node> st;
  std::vector<int> parent;

  explicit Proto(const Forest& forest)
      : f(forest), st(forest.n()), parent(forest.n(), -1) {}

  [[noreturn]] void fail(const std::string& what) const {
    throw std::runtime_error("rooting protocol invariant violated: " + what);
  }

  Rec* rec_by_partner(int v, int from) {
    Rec* hit = nullptr;
    for (auto& r : st[v].recs)
      if (r.partner == from) {
        if (hit) fail("duplicate virtual edge");
        hit = &r;
      }
    return hit;
  }

  Rec* rec_by_token(int v, int token) {
    for (auto& r : st[v].recs)
      if (f.adj(v)[r.via] == token) return &r;
    return nullptr;
  }

  // One word of packed role/flags per node; two words per stored virtual
  // edge (partner with packed role/flag/slot bits, plus the partner-side
  // token); one word per frozen path neighbor and per assigned parent.
  long long resident(int v) const {
    const Node& nd = st[v];
    long long words = 1;
    words += 2 * static_cast<long long>(nd.recs.size());
    words += static_cast<long long>(nd.frozen.size());
    if (parent[v] >= 0) words += 1;
    return words;
  }

  // Exponentiation action of a path-internal node: 0 none, else 1 + the
  // number of acting-endpoint partners. Needs both partner roles known.
  int classify(int v) const {
    const Node& nd = st[v];
    if (!nd.alive || nd.finished || nd.recs.size() != 2) return 0;
    if (nd.role != R_INTERNAL) return 0;
    if (nd.recs[0].role == R_UNKNOWN || nd.recs[1].role == R_UNKNOWN) return 0;
    int ends = (acting_endpoint(nd.recs[0].role) ? 1 : 0) +
               (acting_endpoint(nd.recs[1].role) ? 1 : 0);
    return ends + 1;
  }

  void emit_expo(int v, const mpc::Cluster::Send& send) const {
    int type = classify(v);
    if (type == 0) return;
    const Rec& a = st[v].recs[0];
    const Rec& b = st[v].recs[1];
    if (type == 1) {
      send(a.partner, {hdr(T_NEWPARTNER, b.role), b.partner, b.token});
      send(b.partner, {hdr(T_NEWPARTNER, a.role), a.partner, a.token});
    } else if (type == 2) {
      const Rec& e = acting_endpoint(a.role) ? a : b;
      const Rec& i = acting_endpoint(a.role) ? b : a;
      send(i.partner,
           {hdr(T_NEWPARTNER, e.role, e.furthest), e.partner, e.token});
      // The endpoint and this node sit on the same side of i, so i's side
      // token seen from here also addresses i from the endpoint.
      if (e.furthest)
        send(e.partner, {hdr(T_NEWTRACK, i.role), e.token, i.partner, i.token});
    } else {
      if (a.furthest)
        send(a.partner, {hdr(T_NEWTRACK, b.role), a.token, b.partner, b.token});
      if (b.furthest)
        send(b.partner, {hdr(T_NEWTRACK, a.role), b.token, a.partner, a.token});
    }
  }

  void apply_expo(int v, const std::vector<mpc::Message>& msgs) {
    Node& nd = st[v];
    int type = classify(v);
    if (type == 1) {
      nd.recs[0].pending = nd.recs[1].pending = true;
    } else if (type == 2) {
      Rec& e = acting_endpoint(nd.recs[0].role) ? nd.recs[0] : nd.recs[1];
      Rec& i = acting_endpoint(nd.recs[0].role) ? nd.recs[1] : nd.recs[0];
      i.pending = true;
      e.furthest = false;  // the flag moves to the connected internal node
    } else if (type == 3) {
      nd.finished = true;
      nd.recs[0].furthest = nd.recs[1].furthest = false;
    }
    for (const auto& m : msgs) {
      if (hdr_tag(m.words[0]) == T_NEWPARTNER) {
        Rec* r = rec_by_partner(v, m.from);
        if (!r) fail("edge replacement for an unknown virtual edge");
        r->partner = static_cast<int>(m.words[1]);
        r->role = hdr_role(m.words[0]);
        r->furthest = hdr_fur(m.words[0]);
        r->token = static_cast<int>(m.words[2]);
        r->pending = false;
      } else if (hdr_tag(m.words[0]) == T_NEWTRACK) {
        if (!acting_endpoint(nd.role)) fail("track update at a non-endpoint");
        Rec* r = rec_by_token(v, static_cast<int>(m.words[1]));
        if (!r) fail("track update for an unknown side");
        r->partner = static_cast<int>(m.words[2]);
        r->role = hdr_role(m.words[0]);
        r->token = static_cast<int>(m.words[3]);
      } else {
        fail("unexpected message in an exponentiation step");
      }
    }
    std::erase_if(nd.recs, [](const Rec& r) { return r.pending; });
  }
};

// Residual size of the unfinished virtual graph: every alive node that is
// neither path-internal nor already a root counts one; every maximal run of
// alive internal nodes counts its flank-to-flank virtual distance minus one.
struct ResidualScratch {
  std::vector<int> mark, dist;
  std::vector<std::vector<int>> vadj;
  int epoch = 0;
  explicit ResidualScratch(int n) : mark(n, 0), dist(n, 0), vadj(n) {}
};

long long residual_measure(const Proto& p, ResidualScratch& sc) {
  const Forest& f = p.f;
  long long total = 0;
  std::vector<char> seen(f.n(), 0);
  auto internal_node = [&](int v) {
    return p.st[v].alive && p.st[v].role == R_INTERNAL;
  };
  for (int v = 0; v < f.n(); ++v) {
    if (!p.st[v].alive || p.st[v].role == R_ROOT) continue;
    if (!internal_node(v)) {
      ++total;
      continue;
    }
    if (seen[v]) continue;
    std::vector<int> run{v};
    seen[v] = 1;
    std::vector<int> flanks;
    for (std::size_t i = 0; i < run.size(); ++i)
      for (int u : f.adj(run[i])) {
        if (!p.st[u].alive) continue;
        if (internal_node(u)) {
          if (!seen[u]) {
            seen[u] = 1;
            run.push_back(u);
          }
        } else {
          flanks.push_back(u);
        }
      }
    if (flanks.size() != 2) p.fail("internal run without two flanks");
    // Shortest virtual flank-to-flank path whose interior stays in the run.
    ++sc.epoch;
    std::vector<int> members = run;
    members.push_back(flanks[0]);
    members.push_back(flanks[1]);
    for (int u : members) {
      sc.mark[u] = sc.epoch;
      sc.vadj[u].clear();
    }
    for (int u : members)
      for (const auto& r : p.st[u].recs)
        if (sc.mark[r.partner] == sc.epoch) {
          sc.vadj[u].push_back(r.partner);
          sc.vadj[r.partner].push_back(u);
        }
    std::deque<int> queue{flanks[0]};
    sc.dist[flanks[0]] = 0;
    sc.mark[flanks[0]] = -sc.epoch;  // negative marks visited
    long long d = -1;
    while (!queue.empty()) {
      int x = queue.front();
      queue.pop_front();
      if (x == flanks[1]) {
        d = sc.dist[x];
        break;
      }
      if (x == flanks[0] || internal_node(x))
        for (int y : sc.vadj[x])
          if (sc.mark[y] == sc.epoch) {
            sc.mark[y] = -sc.epoch;
            sc.dist[y] = sc.dist[x] + 1;
            queue.push_back(y);
          }
    }
    if (d < 0) p.fail("virtual run disconnected");
    total += d - 1;
  }
  return total;
}

}  // namespace

PathExpStats exponentiate_path(int length) {
  if (length < 1) throw InvalidInput("exponentiate_path: empty path");
  PathExpStats out;
  out.max_stored_edges = length >= 2 ? 1 : 0;
  if (length <= 2) return out;
  int s = 0, t = length - 1;
  struct E {
    int partner;
    bool furthest;
  };
  std::vector<std::vector<E>> recs(length);
  for (int v = 0; v < length; ++v) {
    if (v > 0) recs[v].push_back({v - 1, v - 1 == s});
    if (v < length - 1) recs[v].push_back({v + 1, v + 1 == t});
  }
  auto endpoint = [&](int v) { return v == s || v == t; };
  std::vector<char> finished(length, 0);
  auto done = [&] {
    if (recs[s].size() != 1 || recs[s][0].partner != t) return false;
    if (recs[t].size() != 1 || recs[t][0].partner != s) return false;
    for (int v = s + 1; v < t; ++v)
      for (const auto& e : recs[v])
        if (!endpoint(e.partner)) return false;
    return true;
  };
  while (!done()) {
    struct Update {
      int at, replaced, with;
      bool furthest;
    };
    std::vector<Update> ups;
    std::vector<std::pair<int, int>> tracks;  // (endpoint, new partner)
    auto next = recs;
    for (int v = s + 1; v < t; ++v) {
      if (finished[v] || recs[v].size() != 2) continue;
      E a = recs[v][0], b = recs[v][1];
      int ends = (endpoint(a.partner) ? 1 : 0) + (endpoint(b.partner) ? 1 : 0);
      if (ends == 0) {
        ups.push_back({a.partner, v, b.partner, false});
        ups.push_back({b.partner, v, a.partner, false});
        next[v].clear();
      } else if (ends == 1) {
        E e = endpoint(a.partner) ? a : b;
        E i = endpoint(a.partner) ? b : a;
        ups.push_back({i.partner, v, e.partner, e.furthest});
        if (e.furthest) tracks.push_back({e.partner, i.partner});
        next[v] = {{e.partner, false}};
      } else {
        if (a.furthest) tracks.push_back({a.partner, b.partner});
        if (b.furthest) tracks.push_back({b.partner, a.partner});
        finished[v] = 1;
      }
    }
    for (const auto& u : ups) {
      bool found = false;
      for (auto& e : next[u.at])
        if (e.partner == u.replaced) {
          e = {u.with, u.furthest};
          found = true;
        }
      if (!found) next[u.at].push_back({u.with, u.furthest});
    }
    for (auto [e, pnew] : tracks) next[e] = {{pnew, false}};
    recs = std::move(next);
    ++out.steps;
    for (int v = 0; v < length; ++v)
      out.max_stored_edges =
          std::max(out.max_stored_edges, static_cast<int>(recs[v].size()));
    if (out.steps > 4 * length + 8)
      throw std::runtime_error("path exponentiation failed to terminate");
  }
  return out;
}

Orientation root_forest(const Forest& f, mpc::Cluster& cluster,
                        RootingStats* stats) {
  if (cluster.machines() != f.n())
    throw InvalidInput("root_forest: cluster size mismatch");
  Proto p(f);
  RootingStats local;
  RootingStats& stat = stats ? *stats : local;
  ResidualScratch scratch(f.n());

  for (int v = 0; v < f.n(); ++v) {
    Node& nd = p.st[v];
    nd.role = next_role(R_UNKNOWN, f.degree(v));
    for (int j = 0; j < f.degree(v); ++j)
      nd.recs.push_back({f.adj(v)[j], j, R_UNKNOWN, true, v, false});
  }

  auto resident = [&](int v) { return p.resident(v); };
  auto note_records = [&] {
    for (int v = 0; v < f.n(); ++v)
      stat.max_records_per_node = std::max(
          stat.max_records_per_node, static_cast<int>(p.st[v].recs.size()));
  };

  struct PathRecord {
    std::vector<int> seq;  // from the closing leaf s toward t, excluding t
    int t;
  };
  std::vector<PathRecord> paths;

  long long prev_measure = -1;
  long long phase_limit =
      9 * static_cast<long long>(std::log2(std::max(2, f.n()))) + 40;
  while (true) {
    ++stat.phases;
    if (stat.phases > phase_limit)
      throw std::runtime_error("root finding failed to terminate");

    // Local role refresh from the surviving degrees.
    for (int v = 0; v < f.n(); ++v)
      if (p.st[v].alive)
        p.st[v].role =
            next_role(p.st[v].role, static_cast<int>(p.st[v].recs.size()));

    // Role exchange along tracked and mutual virtual edges. Running it
    // before set-aside signaling matters: an endpoint notice delivered by a
    // finishing path node can carry a role that is one phase behind, and a
    // leaf acting on it could close a path whose far end closes too. After
    // this step a leaf's record reflects the role its partner sent this
    // phase. A report that matches no stored edge is fine at an endpoint
    // whose tracked partner lags behind the sender's (the two ends of a
    // path can learn of each other in different phases); it is dropped, the
    // own informer will deliver fresh data.
    cluster.superstep(
        [&](int v, const mpc::Cluster::Send& send) {
          const Node& nd = p.st[v];
          if (!nd.alive || nd.role == R_ROOT || nd.finished) return;
          for (const auto& r : nd.recs) {
            bool to_endpoint = acting_endpoint(r.role);
            if (acting_endpoint(nd.role) || !to_endpoint || r.furthest)
              send(r.partner, {hdr(T_ROLE, nd.role), r.token});
          }
        },
        [&](int v, const std::vector<mpc::Message>& msgs) {
          for (const auto& m : msgs) {
            if (hdr_tag(m.words[0]) != T_ROLE) p.fail("unexpected role tag");
            int role = hdr_role(m.words[0]);
            Rec* r = p.rec_by_partner(v, m.from);
            if (r) {
              r->role = role;
            } else if (!(acting_endpoint(p.st[v].role) &&
                         acting_endpoint(role) &&
                         p.rec_by_token(v, static_cast<int>(m.words[1])))) {
              p.fail("role report from a stranger");
            }
          }
        },
        resident);

    // Set-aside signaling: a leaf connected to the other endpoint of its
    // path (of any kind: leaf, branching node, or midpoint) closes the
    // path. Between two leaves only the lower ID closes, which makes the
    // higher ID the root; the exchange step above guarantees both ends see
    // fresh roles in that case.
    std::vector<std::pair<int, int>> events;  // (s, t)
    cluster.superstep(
        [&](int v, const mpc::Cluster::Send& send) {
          const Node& nd = p.st[v];
          if (!nd.alive || nd.role != R_LEAF || nd.recs.size() != 1) return;
          const Rec& r = nd.recs[0];
          bool close = r.role == R_HIGH || r.role == R_MIDPOINT ||
                       (r.role == R_LEAF && f.id(r.partner) > f.id(v));
          if (close) send(r.partner, {hdr(T_SETASIDE), r.token});
        },
        [&](int v, const std::vector<mpc::Message>& msgs) {
          for (const auto& m : msgs) {
            if (hdr_tag(m.words[0]) != T_SETASIDE)
              p.fail("unexpected set-aside tag");
            Rec* r = p.rec_by_token(v, static_cast<int>(m.words[1]));
            if (!r) p.fail("set-aside for an unknown side");
            p.st[v].recs.erase(p.st[v].recs.begin() +
                               (r - p.st[v].recs.data()));
            events.push_back({m.from, v});
          }
        },
        resident);
    std::sort(events.begin(), events.end());
    for (auto [s, t] : events) {
      PathRecord path;
      path.t = t;
      int prev = -1, cur = s;
      while (true) {
        if (!p.st[cur].alive) p.fail("set-aside path hits a removed node");
        path.seq.push_back(cur);
        p.st[cur].alive = false;
        p.st[cur].aside = true;
        p.st[cur].recs.clear();
        int next = -1;
        for (int u : f.adj(cur))
          if (p.st[u].alive && u != prev) {
            if (next >= 0) p.fail("set-aside path is not a path");
            next = u;
          }
        if (next < 0) p.fail("set-aside path misses its endpoint");
        if (next == t) break;
        prev = cur;
        cur = next;
      }
      for (std::size_t i = 0; i < path.seq.size(); ++i) {
        Node& nd = p.st[path.seq[i]];
        if (i > 0) nd.frozen.push_back(path.seq[i - 1]);
        if (i + 1 < path.seq.size()) nd.frozen.push_back(path.seq[i + 1]);
      }
      p.st[path.seq.front()].tail = true;
      p.st[path.seq.back()].head = true;
      p.parent[path.seq.back()] = t;
      if (path.seq.size() >= 2) p.parent[path.seq.front()] = path.seq[1];
      paths.push_back(std::move(path));
      ++stat.set_aside_paths;
    }

    // Midpoint conversion: a midpoint between two acting endpoints joins
    // the merged path as an internal node and takes both informer flags.
    cluster.superstep(
        [&](int v, const mpc::Cluster::Send& send) {
          const Node& nd = p.st[v];
          if (!nd.alive || nd.role != R_MIDPOINT || nd.recs.size() != 2)
            return;
          if (acting_endpoint(nd.recs[0].role) &&
              acting_endpoint(nd.recs[1].role)) {
            send(nd.recs[0].partner, {hdr(T_CONVERT), nd.recs[0].token});
            send(nd.recs[1].partner, {hdr(T_CONVERT), nd.recs[1].token});
          }
        },
        [&](int v, const std::vector<mpc::Message>& msgs) {
          Node& nd = p.st[v];
          if (nd.alive && nd.role == R_MIDPOINT && nd.recs.size() == 2 &&
              acting_endpoint(nd.recs[0].role) &&
              acting_endpoint(nd.recs[1].role)) {
            nd.role = R_INTERNAL;
            nd.recs[0].furthest = nd.recs[1].furthest = true;
          }
          for (const auto& m : msgs) {
            if (hdr_tag(m.words[0]) != T_CONVERT)
              p.fail("unexpected convert tag");
            Rec* r = p.rec_by_partner(v, m.from);
            if (r) {
              r->role = R_INTERNAL;
              r->furthest = false;
            } else if (!(acting_endpoint(nd.role) &&
                         p.rec_by_token(v, static_cast<int>(m.words[1])))) {
              p.fail("conversion notice from a stranger");
            }
          }
        },
        resident);

    // One exponentiation step on every current path.
    cluster.superstep(
        [&](int v, const mpc::Cluster::Send& send) { p.emit_expo(v, send); },
        [&](int v, const std::vector<mpc::Message>& msgs) {
          p.apply_expo(v, msgs);
        },
        resident);
    note_records();

    long long measure = residual_measure(p, scratch);
    stat.residuals.push_back(measure);
    if (prev_measure >= 0 && 9 * measure > 7 * prev_measure)
      throw std::runtime_error(
          "phase removed less than 2/9 of the residual graph (" +
          std::to_string(prev_measure) + " -> " + std::to_string(measure) +
          ")");
    prev_measure = measure;

    std::vector<char> flags(f.n());
    for (int v = 0; v < f.n(); ++v)
      flags[v] = !p.st[v].alive || p.st[v].role == R_ROOT;
    if (cluster.all_done(flags, resident)) break;
  }

  // Post-processing: orient every set-aside path in parallel by running
  // path exponentiation again over the frozen path edges, with endpoint
  // edges carrying the endpoint's head/tail mark.
  bool any_protocol = false;
  for (int v = 0; v < f.n(); ++v) {
    Node& nd = p.st[v];
    if (!nd.aside) continue;
    nd.alive = true;  // participates in the orientation overlay
    nd.finished = false;
    nd.role = nd.head ? R_HEAD : (nd.tail ? R_TAIL : R_INTERNAL);
    nd.recs.clear();
    if (nd.role == R_INTERNAL) any_protocol = true;
    for (int u : nd.frozen) {
      int via = -1;
      for (int j = 0; j < f.degree(v); ++j)
        if (f.adj(v)[j] == u) via = j;
      nd.recs.push_back({u, via, R_UNKNOWN, true, v, false});
    }
  }
  if (any_protocol) {
    cluster.superstep(
        [&](int v, const mpc::Cluster::Send& send) {
          const Node& nd = p.st[v];
          if (!nd.aside) return;
          for (const auto& r : nd.recs)
            send(r.partner, {hdr(T_ROLE, nd.role), r.token});
        },
        [&](int v, const std::vector<mpc::Message>& msgs) {
          for (const auto& m : msgs) {
            Rec* r = p.rec_by_partner(v, m.from);
            if (!r) p.fail("post role report from a stranger");
            r->role = hdr_role(m.words[0]);
          }
        },
        resident);
    while (true) {
      ++stat.post_steps;
      if (stat.post_steps > phase_limit)
        throw std::runtime_error("path orientation failed to terminate");
      cluster.superstep(
          [&](int v, const mpc::Cluster::Send& send) {
            if (p.st[v].aside) p.emit_expo(v, send);
          },
          [&](int v, const std::vector<mpc::Message>& msgs) {
            if (!p.st[v].aside && !msgs.empty())
              p.fail("post message outside the set-aside paths");
            if (p.st[v].aside) p.apply_expo(v, msgs);
            Node& nd = p.st[v];
            if (nd.aside && nd.finished && p.parent[v] < 0) {
              for (const auto& r : nd.recs)
                if (r.role == R_HEAD) p.parent[v] = f.adj(v)[r.via];
              if (p.parent[v] < 0) p.fail("finished node saw no head side");
            }
          },
          resident);
      note_records();
      std::vector<char> flags(f.n());
      for (int v = 0; v < f.n(); ++v)
        flags[v] = !p.st[v].aside || p.parent[v] >= 0;
      if (cluster.all_done(flags, resident)) break;
    }
  }

  Orientation o;
  o.parent = p.parent;
  for (int v = 0; v < f.n(); ++v) {
    bool root = !p.st[v].aside && p.st[v].role == R_ROOT;
    if (root != (o.parent[v] < 0)) p.fail("root and parent marks disagree");
    if (root) o.roots.push_back(v);
  }
  std::sort(o.roots.begin(), o.roots.end(),
            [&](int a, int b) { return f.id(a) < f.id(b); });
  return o;
}

Orientation root_forest(const Forest& f, mpc::Config cfg,
                        RootingStats* stats) {
  mpc::Cluster cluster(f.n(), f.n(), std::max(f.m(), 1), cfg);
  return root_forest(f, cluster, stats);
}

bool check_orientation(const Forest& f, const Orientation& o,
                       std::string* why) {
  auto bad = [&](const std::string& what) {
    if (why) *why = what;
    return false;
  };
  if (static_cast<int>(o.parent.size()) != f.n())
    return bad("parent vector size mismatch");
  std::vector<std::vector<int>> children(f.n());
  for (int v = 0; v < f.n(); ++v) {
    int pv = o.parent[v];
    if (pv < 0) continue;
    if (pv >= f.n()) return bad("parent out of range");
    if (f.edge_index(v, pv) < 0)
      return bad("parent of " + std::to_string(f.id(v)) +
                 " is not an input neighbor");
    children[pv].push_back(v);
  }
  std::vector<int> expected_roots;
  for (int v = 0; v < f.n(); ++v)
    if (o.parent[v] < 0) expected_roots.push_back(v);
  {
    auto sorted = o.roots;
    std::sort(sorted.begin(), sorted.end());
    if (sorted != expected_roots) return bad("root list mismatch");
  }
  // Downward reachability from each root must cover its whole component.
  std::vector<int> owner(f.n(), -1);
  for (int r : expected_roots) {
    std::vector<int> queue{r};
    owner[r] = r;
    for (std::size_t q = 0; q < queue.size(); ++q)
      for (int c : children[queue[q]]) {
        if (owner[c] != -1) return bad("node reached twice from roots");
        owner[c] = r;
        queue.push_back(c);
      }
  }
  for (int v = 0; v < f.n(); ++v)
    if (owner[v] < 0)
      return bad("node " + std::to_string(f.id(v)) + " does not reach a root");
  for (int e = 0; e < f.m(); ++e) {
    auto [u, v] = f.edge(e);
    if (owner[u] != owner[v]) return bad("component split across roots");
  }
  return true;
}

std::string serialize_orientation(const Forest& f, const Orientation& o) {
  std::ostringstream out;
  out << "ORIENT v1\n";
  for (int r : o.roots) out << "root " << f.id(r) << "\n";
  std::vector<int> order(f.n());
  for (int v = 0; v < f.n(); ++v) order[v] = v;
  std::sort(order.begin(), order.end(),
            [&](int a, int b) { return f.id(a) < f.id(b); });
  for (int v : order)
    if (o.parent[v] >= 0)
      out << "parent " << f.id(v) << " " << f.id(o.parent[v]) << "\n";
  return out.str();
}

Orientation parse_orientation(const Forest& f, const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  Orientation o;
  o.parent.assign(f.n(), -2);
  auto err = [&](const std::string& what) {
    throw ParseError("line " + std::to_string(lineno) + ": " + what);
  };
  auto node = [&](int id) {
    if (!f.has_id(id)) err("unknown node id " + std::to_string(id));
    return f.index_of(id);
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
      if (word != "ORIENT" || !(ls >> version) || version != "v1")
        err("expected ORIENT v1 header");
      header = true;
      continue;
    }
    if (word == "root") {
      int id;
      if (!(ls >> id)) err("malformed root line");
      int v = node(id);
      if (o.parent[v] != -2) err("node assigned twice");
      o.parent[v] = -1;
      o.roots.push_back(v);
    } else if (word == "parent") {
      int c, pa;
      if (!(ls >> c >> pa)) err("malformed parent line");
      int v = node(c);
      if (o.parent[v] != -2) err("node assigned twice");
      o.parent[v] = node(pa);
    } else {
      err("unknown directive '" + word + "'");
    }
  }
  if (!header) throw ParseError("missing ORIENT v1 header");
  for (int v = 0; v < f.n(); ++v)
    if (o.parent[v] == -2)
      throw ParseError("node " + std::to_string(f.id(v)) +
                       " has no root or parent line");
  std::sort(o.roots.begin(), o.roots.end(),
            [&](int a, int b) { return f.id(a) < f.id(b); });
  return o;
}

}  // namespace tl
