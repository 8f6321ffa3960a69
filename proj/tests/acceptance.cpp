// Acceptance gate: one line per criterion, PASS or FAIL with a reason.
// Exit status is the number of failed criteria.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "compat.hpp"
#include "forest.hpp"
#include "lcl.hpp"
#include "oracle.hpp"
#include "rake.hpp"
#include "rooting.hpp"
#include "solver.hpp"

using namespace tl;

namespace {

int g_failed = 0;

void run(const char* name, const std::function<void()>& body) {
  try {
    body();
    std::printf("PASS %s\n", name);
  } catch (const std::exception& e) {
    std::printf("FAIL %s: %s\n", name, e.what());
    ++g_failed;
  }
  std::fflush(stdout);
}

void require(bool ok, const std::string& what) {
  if (!ok) throw std::runtime_error(what);
}

mpc::Config solver_cfg() {
  mpc::Config cfg;
  cfg.c_local = 64;
  cfg.c_global = 64;
  return cfg;
}

HalfEdgeLabeling no_input(const Forest& f) { return uniform_input(f, "_"); }

// Tree corpus shared by the scaling criteria.
struct Instance {
  std::string kind;
  int n;
  std::uint64_t seed;
};
std::vector<Instance> corpus() {
  std::vector<Instance> out;
  for (int n : {256, 1024, 4096})
    for (const char* kind :
         {"random-tree", "path", "caterpillar", "balanced", "forest"})
      out.push_back({kind, n, 1});
  out.push_back({"random-tree", 2048, 2});
  out.push_back({"path", 2048, 0});
  return out;
}

// Canonical form of an unrooted tree: minimal AHU string over the one or
// two centroids.
std::string ahu(const Forest& f, int root) {
  int n = f.n();
  std::vector<std::string> enc(n);
  std::function<std::string(int, int)> rec = [&](int v, int par) {
    std::vector<std::string> kids;
    for (int u : f.adj(v))
      if (u != par) kids.push_back(rec(u, v));
    std::sort(kids.begin(), kids.end());
    std::string s = "(";
    for (const auto& k : kids) s += k;
    s += ")";
    return s;
  };
  return rec(root, -1);
}

std::string canonical_tree(const Forest& f) {
  int n = f.n();
  // Find centroid(s) by repeatedly stripping leaves.
  std::vector<int> deg(n), order;
  std::vector<char> gone(n, 0);
  for (int v = 0; v < n; ++v) deg[v] = f.degree(v);
  std::vector<int> layer;
  for (int v = 0; v < n; ++v)
    if (deg[v] <= 1) layer.push_back(v);
  int remaining = n;
  while (remaining > 2) {
    std::vector<int> next;
    for (int v : layer) {
      gone[v] = 1;
      --remaining;
      for (int u : f.adj(v))
        if (!gone[u] && --deg[u] == 1) next.push_back(u);
    }
    layer = next;
  }
  std::string best;
  for (int v = 0; v < n; ++v)
    if (!gone[v]) {
      std::string s = ahu(f, v);
      if (best.empty() || s < best) best = s;
    }
  return best;
}

}  // namespace

int main() {
  // --- Rooting round count grows logarithmically, constants fitted at the
  // smallest size and held fixed.
  run("rooting-rounds-logarithmic", [] {
    auto t0 = std::chrono::steady_clock::now();
    long long c_root = 0, c0 = 0;
    for (int n : {256, 512, 1024, 2048, 4096, 8192, 16384}) {
      Forest f = generate_forest("random-tree", n, 3, 11);
      mpc::Cluster cl(f.n(), f.n(), f.m(), mpc::Config{});
      Orientation o = root_forest(f, cl);
      std::string why;
      require(check_orientation(f, o, &why), "invalid orientation: " + why);
      long long r = cl.rounds();
      double lg = std::log2(static_cast<double>(n));
      if (n == 256) {
        c_root = static_cast<long long>(std::ceil(r / lg));
        c0 = r - static_cast<long long>(c_root * lg) + c_root;
      }
      require(r <= static_cast<long long>(c_root * lg) + c0,
              "rounds " + std::to_string(r) + " above fitted bound at n=" +
                  std::to_string(n));
    }
    auto secs = std::chrono::duration_cast<std::chrono::seconds>(
                    std::chrono::steady_clock::now() - t0)
                    .count();
    require(secs < 60, "rooting sweep took " + std::to_string(secs) + "s");
  });

  // --- Path exponentiation: 8 nodes connect in exactly 3 steps; step
  // counts stay within the geometric bound; at most 2 virtual edges per
  // node at any time.
  run("path-exponentiation-steps", [] {
    require(exponentiate_path(8).steps == 3,
            "8-node path did not take exactly 3 steps");
    for (int len = 2; len <= 500; ++len) {
      PathExpStats st = exponentiate_path(len);
      int bound =
          static_cast<int>(std::ceil(std::log(std::max(1, len - 1)) /
                                     std::log(1.5))) +
          2;
      require(st.steps <= bound,
              "length " + std::to_string(len) + " took too many steps");
      require(st.max_stored_edges <= 2,
              "a node stored more than 2 virtual edges");
    }
  });

  // --- Every rooting phase removes at least 2/9 of the residual virtual
  // graph.
  run("rooting-phase-progress", [] {
    for (const auto& inst : corpus()) {
      Forest f = generate_forest(inst.kind, inst.n, 3, inst.seed);
      RootingStats st;
      Orientation o = root_forest(f, mpc::Config{}, &st);
      std::string why;
      require(check_orientation(f, o, &why), "invalid orientation: " + why);
      for (std::size_t i = 1; i < st.residuals.size(); ++i)
        require(9 * st.residuals[i] <= 7 * st.residuals[i - 1],
                "phase removed less than 2/9 of the residual");
    }
  });

  // --- Decomposition validity, phase bound, and agreement with the
  // sequential reference.
  run("decomposition-validity", [] {
    for (const auto& inst : corpus()) {
      Forest f = generate_forest(inst.kind, inst.n, 3, inst.seed);
      mpc::Cluster cl(f.n(), f.n(), f.m(), mpc::Config{});
      DecomposeStats st;
      Decomposition d = decompose(f, cl, {}, &st);
      std::string why;
      require(check_decomposition(f, d, &why), "invalid decomposition: " + why);
      long long bound =
          static_cast<long long>(
              std::ceil(std::log2(0.5 * std::log2(inst.n)))) +
          2 + 3;  // ceil(1/delta) at delta=1/2, plus the allowed constant
      require(st.phases <= bound, "too many phases at n=" +
                                      std::to_string(inst.n) + " " +
                                      inst.kind);
    }
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
      Forest f = generate_forest("random-tree", 300, 3, seed);
      require(decompose(f).layer_of == decompose_local(f).layer_of,
              "cluster and sequential layers differ at seed " +
                  std::to_string(seed));
    }
  });

  // --- Each reduction step sheds a third of the instance; after the full
  // schedule the residual is at most n / log2 n.
  run("reduction-shrinkage", [] {
    NodeEdgeLcl lcl = builtin_lcl("three-coloring", 3);
    for (const auto& inst : corpus()) {
      if (inst.kind == "forest") continue;  // per-tree statement
      Forest f = generate_forest(inst.kind, inst.n, 3, inst.seed);
      Orientation o = root_forest(f, mpc::Config{});
      CompatTree ct = build_g0(f, o.parent, lcl, no_input(f));
      int t = std::max(
          1, static_cast<int>(std::floor(2.0 * std::log2(std::log2(inst.n)))));
      long long prev = ct.node_count();
      for (int step = 0; step < t; ++step) {
        reduce_step(ct);
        long long cur = ct.node_count();
        require(cur <= (2 * prev + 2) / 3,
                "a step removed less than a third at n=" +
                    std::to_string(inst.n) + " " + inst.kind);
        prev = cur;
      }
      require(prev <= static_cast<long long>(inst.n / std::log2(inst.n)),
              "residual above n/log2 n for " + inst.kind + " n=" +
                  std::to_string(inst.n));
    }
  });

  // --- Upward-pass potential drops by 7/8 every two iterations; iteration
  // counts for both passes are within their logarithmic bounds.
  run("solver-potential-and-iterations", [] {
    NodeEdgeLcl lcl = builtin_lcl("three-coloring", 3);
    for (const auto& inst : corpus()) {
      Forest f = generate_forest(inst.kind, inst.n, 3, inst.seed);
      SolveStats st;
      SolveResult r = solve(f, lcl, no_input(f), &st);
      require(r.solved, "three-coloring unsolved on a forest");
      for (std::size_t j = 2; j < st.phi.size(); ++j)
        require(2.0 * st.phi[j] <= 7.0 * st.phi[j - 2] * (1.0 + 1e-9) + 1e-9,
                "potential dropped by less than 7/8 over two iterations");
      long long p1_bound =
          static_cast<long long>(std::ceil(2.0 * std::log(2.0 * inst.n) /
                                           std::log(8.0 / 7.0))) +
          2;
      require(st.phase1_iterations <= p1_bound, "upward pass too long");
      require(st.phase2_iterations <= st.phase1_iterations + 2,
              "downward pass too long");
    }
  });

  // --- Exhaustive agreement with the brute-force oracle on every tree
  // shape with at most 9 nodes and degree at most 3.
  run("solver-vs-oracle-exhaustive", [] {
    auto t0 = std::chrono::steady_clock::now();
    std::vector<NodeEdgeLcl> problems;
    for (const char* name :
         {"three-coloring", "two-coloring", "unsatisfiable-edge", "free"})
      problems.push_back(builtin_lcl(name, 3));
    long long shapes = 0;
    for (int n = 1; n <= 9; ++n) {
      std::set<std::string> seen;
      std::vector<Forest> reps;
      std::vector<int> ids;
      for (int i = 1; i <= n; ++i) ids.push_back(i);
      auto consider = [&](std::vector<std::pair<int, int>> edges) {
        Forest f(ids, std::move(edges), 3);
        if (seen.insert(canonical_tree(f)).second) reps.push_back(std::move(f));
      };
      if (n == 1) {
        consider({});
      } else if (n == 2) {
        consider({{1, 2}});
      } else {
        std::vector<int> seq(n - 2, 0);
        while (true) {
          std::vector<int> deg(n + 1, 1);
          for (int s : seq) ++deg[s + 1];
          bool ok = true;
          for (int v = 1; v <= n && ok; ++v) ok = deg[v] <= 3;
          if (ok) {
            std::vector<std::pair<int, int>> edges;
            std::vector<int> d = deg;
            for (int s : seq) {
              int leaf = 1;
              while (d[leaf] != 1) ++leaf;
              edges.push_back({leaf, s + 1});
              d[leaf] = 0;
              --d[s + 1];
            }
            int a = 1;
            while (d[a] != 1) ++a;
            int b = a + 1;
            while (d[b] != 1) ++b;
            edges.push_back({a, b});
            consider(std::move(edges));
          }
          int i = n - 3;
          while (i >= 0 && seq[i] == n - 1) seq[i--] = 0;
          if (i < 0) break;
          ++seq[i];
        }
      }
      shapes += static_cast<long long>(reps.size());
      for (const Forest& f : reps) {
        HalfEdgeLabeling gin = no_input(f);
        for (const NodeEdgeLcl& lcl : problems) {
          SolveResult r = solve(f, lcl, gin);
          OracleVerdict o = brute_solve(f, lcl, gin, 500'000'000);
          require(r.solved == o.solvable, "solver and oracle disagree");
          if (r.solved)
            require(check_solution(f, lcl, gin, r.g_out).valid(),
                    "solver labeling failed the checker");
        }
      }
    }
    require(shapes >= 30, "shape enumeration came up short");
    auto secs = std::chrono::duration_cast<std::chrono::seconds>(
                    std::chrono::steady_clock::now() - t0)
                    .count();
    require(secs < 300, "exhaustive sweep took " + std::to_string(secs) + "s");
  });

  // --- Every stored link pair set and every decided branch summary equals
  // the value of an independent dynamic program, on 200 seeded instances
  // whose reduced form has at most 12 half-edges.
  run("link-semantics-vs-dp", [] {
    const char* kinds[] = {"path", "caterpillar", "random-tree"};
    int instances = 0;
    long long links_checked = 0, memos_checked = 0;
    for (std::uint64_t seed = 1; instances < 200; ++seed) {
      require(seed < 3000, "not enough qualifying instances");
      int n = 14 + static_cast<int>(seed % 27);
      Forest f = generate_forest(kinds[seed % 3], n, 3, seed);
      NodeEdgeLcl lcl =
          builtin_lcl(seed % 2 ? "three-coloring" : "two-coloring", 3);
      SolveStats st;
      st.want_debug = true;
      solve(f, lcl, no_input(f), &st);
      const CompatTree& ct = st.debug->reduced;
      long long alive = 0;
      for (char a : ct.alive) alive += a;
      if (2 * (alive - 1) > 12 || st.debug->links.empty()) continue;
      ++instances;
      CompletabilityDp dp = completability_dp(ct);
      for (const SolverLink& l : st.debug->links) {
        require(l.pairs == dp.pair_set(ct, l.u, l.v),
                "a link pair set disagrees with the reference DP");
        ++links_checked;
      }
      for (int v = 0; v < f.n(); ++v) {
        if (!ct.alive[v]) continue;
        for (std::size_t s = 0; s < st.debug->memo[v].size(); ++s) {
          long long m = st.debug->memo[v][s];
          if (m < 0) continue;
          int c = ct.slot_neighbor[v][static_cast<int>(s)];
          require(m == static_cast<long long>(dp.down[c]),
                  "a branch summary disagrees with the reference DP");
          ++memos_checked;
        }
      }
    }
    require(links_checked > 200 && memos_checked > 0,
            "differential coverage came up short");
  });

  // --- Simulated-cluster memory budgets hold at every round, and total
  // stored links stay linear.
  run("memory-budgets", [] {
    NodeEdgeLcl lcl = builtin_lcl("three-coloring", 3);
    for (const auto& inst : corpus()) {
      Forest f = generate_forest(inst.kind, inst.n, 3, inst.seed);
      {
        mpc::Cluster cl(f.n(), f.n(), f.m(), mpc::Config{});
        root_forest(f, cl);
        require(cl.peak_local_words() <= cl.local_capacity(), "rooting local");
        require(cl.peak_global_words() <= cl.global_capacity(),
                "rooting global");
      }
      {
        mpc::Cluster cl(f.n(), f.n(), f.m(), mpc::Config{});
        decompose(f, cl);
        require(cl.peak_local_words() <= cl.local_capacity(),
                "decomposition local");
        require(cl.peak_global_words() <= cl.global_capacity(),
                "decomposition global");
      }
      {
        mpc::Cluster cl(f.n(), f.n(), f.m(), solver_cfg());
        SolveStats st;
        solve(f, lcl, no_input(f), cl, &st);
        require(cl.peak_local_words() <= cl.local_capacity(), "solver local");
        require(cl.peak_global_words() <= cl.global_capacity(),
                "solver global");
        require(st.max_stored_links <= 16LL * inst.n,
                "stored links above the linear budget");
      }
    }
  });

  // --- Byte-identical reruns, including under reversed machine evaluation
  // order with the double-evaluation check enabled.
  run("determinism", [] {
    NodeEdgeLcl lcl = builtin_lcl("three-coloring", 3);
    for (const auto& inst : {Instance{"random-tree", 700, 5},
                             Instance{"caterpillar", 512, 1},
                             Instance{"forest", 900, 2}}) {
      Forest f = generate_forest(inst.kind, inst.n, 3, inst.seed);
      std::vector<std::string> outs, traces;
      for (int variant = 0; variant < 3; ++variant) {
        mpc::Config cfg = solver_cfg();
        if (variant == 2) {
          cfg.reverse_order = true;
          cfg.nondeterminism_check = true;
        }
        mpc::Cluster cl(f.n(), f.n(), f.m(), cfg);
        SolveStats st;
        SolveResult r = solve(f, lcl, no_input(f), cl, &st);
        outs.push_back(serialize_solution(f, lcl, r));
        traces.push_back(st.trace_csv());
        Orientation o = root_forest(f, mpc::Config{});
        outs.back() += serialize_orientation(f, o);
        outs.back() += serialize_decomposition(f, decompose(f));
      }
      require(outs[0] == outs[1] && outs[1] == outs[2],
              "outputs differ across reruns");
      require(traces[0] == traces[1] && traces[1] == traces[2],
              "traces differ across reruns");
    }
  });

  if (g_failed) std::printf("%d criteria failed\n", g_failed);
  return g_failed;
}
