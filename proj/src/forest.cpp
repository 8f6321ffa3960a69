#include "forest.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

namespace tl {

namespace {

// Union-find for acyclicity checks.
struct Dsu {
  std::vector<int> parent;
  explicit Dsu(int n) : parent(n) { std::iota(parent.begin(), parent.end(), 0); }
  int find(int x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  // Returns false if x and y were already connected.
  bool unite(int x, int y) {
    x = find(x);
    y = find(y);
    if (x == y) return false;
    parent[x] = y;
    return true;
  }
};

}  // namespace

Forest::Forest(std::vector<int> ids, std::vector<std::pair<int, int>> edge_ids,
               int max_degree)
    : ids_(std::move(ids)), max_degree_(max_degree) {
  for (int i = 0; i < n(); ++i) {
    if (ids_[i] <= 0) throw InvalidInput("node IDs must be positive");
    if (!index_.emplace(ids_[i], i).second)
      throw InvalidInput("duplicate node ID " + std::to_string(ids_[i]));
  }
  adj_.resize(n());
  edges_.reserve(edge_ids.size());
  for (auto& [a, b] : edge_ids) {
    if (a == b)
      throw InvalidInput("self loop at node " + std::to_string(a));
    int u = index_of(std::min(a, b));
    int v = index_of(std::max(a, b));
    edges_.emplace_back(u, v);
  }
  std::sort(edges_.begin(), edges_.end(),
            [&](const auto& x, const auto& y) {
              return std::make_pair(ids_[x.first], ids_[x.second]) <
                     std::make_pair(ids_[y.first], ids_[y.second]);
            });
  Dsu dsu(n());
  for (std::size_t e = 0; e < edges_.size(); ++e) {
    auto [u, v] = edges_[e];
    if (e > 0 && edges_[e - 1] == edges_[e])
      throw InvalidInput("duplicate edge {" + std::to_string(ids_[u]) + "," +
                         std::to_string(ids_[v]) + "}");
    if (!dsu.unite(u, v))
      throw InvalidInput("cycle through edge {" + std::to_string(ids_[u]) +
                         "," + std::to_string(ids_[v]) + "}");
    adj_[u].push_back(v);
    adj_[v].push_back(u);
  }
  int observed = 0;
  for (int v = 0; v < n(); ++v) {
    std::sort(adj_[v].begin(), adj_[v].end(),
              [&](int x, int y) { return ids_[x] < ids_[y]; });
    observed = std::max(observed, degree(v));
  }
  if (max_degree_ == 0) max_degree_ = std::max(observed, 2);
  if (observed > max_degree_)
    throw InvalidInput("degree " + std::to_string(observed) +
                       " exceeds bound " + std::to_string(max_degree_));
}

int Forest::index_of(int id) const {
  auto it = index_.find(id);
  if (it == index_.end())
    throw InvalidInput("unknown node ID " + std::to_string(id));
  return it->second;
}

int Forest::edge_index(int u, int v) const {
  if (id(u) > id(v)) std::swap(u, v);
  auto key = std::make_pair(id(u), id(v));
  int lo = 0, hi = m() - 1;
  while (lo <= hi) {
    int mid = (lo + hi) / 2;
    auto [a, b] = edges_[mid];
    auto k = std::make_pair(id(a), id(b));
    if (k == key) return mid;
    if (k < key)
      lo = mid + 1;
    else
      hi = mid - 1;
  }
  return -1;
}

int Forest::half_edge(int v, int e) const {
  auto [a, b] = edges_[e];
  if (v == a) return 2 * e;
  if (v == b) return 2 * e + 1;
  throw InvalidInput("node is not an endpoint of edge");
}

int Forest::half_edge_node(int h) const {
  auto [a, b] = edges_[h / 2];
  return (h % 2) == 0 ? a : b;
}

int Forest::half_edge_other(int h) const {
  auto [a, b] = edges_[h / 2];
  return (h % 2) == 0 ? b : a;
}

namespace {

Forest make_forest_1_to_n(int n, const std::vector<std::pair<int, int>>& edges,
                          int max_degree) {
  std::vector<int> ids(n);
  std::iota(ids.begin(), ids.end(), 1);
  return Forest(std::move(ids), edges, max_degree);
}

}  // namespace

Forest generate_forest(const std::string& kind, int n, int max_degree,
                       std::uint64_t seed) {
  if (n < 1) throw InvalidInput("n must be at least 1");
  if (max_degree < 2) throw InvalidInput("max_degree must be at least 2");
  std::vector<std::pair<int, int>> edges;
  if (kind == "path") {
    for (int i = 1; i < n; ++i) edges.emplace_back(i, i + 1);
  } else if (kind == "star") {
    if (n - 1 > max_degree)
      throw InvalidInput("star with " + std::to_string(n - 1) +
                         " leaves exceeds degree bound");
    for (int i = 2; i <= n; ++i) edges.emplace_back(1, i);
  } else if (kind == "balanced") {
    int branch = std::max(1, max_degree - 1);
    for (int i = 2; i <= n; ++i) edges.emplace_back((i - 2) / branch + 1, i);
  } else if (kind == "caterpillar") {
    if (max_degree == 2) return generate_forest("path", n, max_degree, seed);
    int spine = (n + 1) / 2;
    int legs_per = max_degree - 2;
    if (n - spine > spine * legs_per) spine = n - spine * legs_per;
    for (int i = 1; i < spine; ++i) edges.emplace_back(i, i + 1);
    for (int leg = 1; leg + spine <= n; ++leg)
      edges.emplace_back((leg - 1) / legs_per + 1, spine + leg);
  } else if (kind == "random-tree" || kind == "forest") {
    std::mt19937_64 rng(seed);
    std::vector<int> deg(n + 1, 0);
    for (int i = 2; i <= n; ++i) {
      bool attach = true;
      if (kind == "forest") attach = (rng() % 10) != 0;
      if (!attach) continue;
      // Pick an earlier node with remaining degree capacity.
      std::vector<int> open;
      for (int j = 1; j < i; ++j)
        if (deg[j] < max_degree) open.push_back(j);
      if (open.empty()) continue;
      int p = open[rng() % open.size()];
      edges.emplace_back(p, i);
      ++deg[p];
      ++deg[i];
    }
  } else {
    throw InvalidInput("unknown generator kind: " + kind);
  }
  return make_forest_1_to_n(n, edges, max_degree);
}

TreeFile parse_tree(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  bool have_header = false, have_n = false;
  long long count = -1;
  std::vector<std::pair<int, int>> edges;
  struct InLabel {
    int v, u;
    std::string sym;
  };
  std::vector<InLabel> in_labels;
  auto fail = [&](const std::string& why) {
    throw ParseError("line " + std::to_string(lineno) + ": " + why);
  };
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string trimmed = line;
    auto first = trimmed.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    if (trimmed[first] == '#') continue;
    std::istringstream ls(trimmed);
    std::string word;
    ls >> word;
    if (!have_header) {
      std::string ver;
      ls >> ver;
      if (word != "TREE" || ver != "v1") fail("expected header 'TREE v1'");
      have_header = true;
      continue;
    }
    if (word == "n") {
      if (have_n) fail("duplicate n line");
      if (!(ls >> count) || count < 0) fail("bad node count");
      have_n = true;
    } else if (word == "edge") {
      int u, v;
      if (!(ls >> u >> v)) fail("bad edge line");
      if (u == v) fail("self loop");
      edges.emplace_back(u, v);
    } else if (word == "inlabel") {
      InLabel il;
      if (!(ls >> il.v >> il.u >> il.sym)) fail("bad inlabel line");
      in_labels.push_back(il);
    } else {
      fail("unknown directive '" + word + "'");
    }
  }
  ++lineno;
  if (!have_header) fail("missing header 'TREE v1'");
  if (!have_n) fail("missing n line");
  std::vector<int> ids(count);
  std::iota(ids.begin(), ids.end(), 1);
  TreeFile out{Forest(std::move(ids), edges, 0), HalfEdgeLabeling()};
  const Forest& f = out.forest;
  out.in_labels = HalfEdgeLabeling(2 * f.m());
  for (const auto& il : in_labels) {
    int v = f.index_of(il.v);
    int u = f.index_of(il.u);
    int e = f.edge_index(v, u);
    if (e < 0)
      throw ParseError("inlabel references missing edge {" +
                       std::to_string(il.v) + "," + std::to_string(il.u) +
                       "}");
    out.in_labels.label[f.half_edge(v, e)] = il.sym;
  }
  return out;
}

std::string serialize_tree(const Forest& f, const HalfEdgeLabeling* in_labels) {
  std::ostringstream out;
  out << "TREE v1\n";
  out << "n " << f.n() << "\n";
  for (int e = 0; e < f.m(); ++e) {
    auto [u, v] = f.edge(e);
    out << "edge " << f.id(u) << " " << f.id(v) << "\n";
  }
  if (in_labels != nullptr) {
    for (int e = 0; e < f.m(); ++e) {
      auto [u, v] = f.edge(e);
      for (int side : {u, v}) {
        const std::string& sym = in_labels->label[f.half_edge(side, e)];
        if (sym.empty()) continue;
        int other = side == u ? v : u;
        out << "inlabel " << f.id(side) << " " << f.id(other) << " " << sym
            << "\n";
      }
    }
  }
  return out.str();
}

}  // namespace tl
