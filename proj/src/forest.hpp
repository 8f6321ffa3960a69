#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

namespace tl {

struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
};

struct InvalidInput : std::runtime_error {
  explicit InvalidInput(const std::string& what) : std::runtime_error(what) {}
};

// Forest of unrooted trees with distinct positive node IDs. Nodes are held
// by index 0..n-1; edges are kept sorted by (min id, max id) so that edge
// index and half-edge index are canonical across runs.
class Forest {
 public:
  Forest() = default;
  // edge_ids uses external IDs. Throws InvalidInput on self loops, duplicate
  // edges, cycles, duplicate IDs, or a degree above max_degree.
  // max_degree 0 means "use the maximum observed degree (at least 2)".
  Forest(std::vector<int> ids, std::vector<std::pair<int, int>> edge_ids,
         int max_degree = 0);

  int n() const { return static_cast<int>(ids_.size()); }
  int m() const { return static_cast<int>(edges_.size()); }
  int max_degree() const { return max_degree_; }

  int id(int v) const { return ids_[v]; }
  const std::vector<int>& ids() const { return ids_; }
  int index_of(int id) const;
  bool has_id(int id) const { return index_.count(id) != 0; }

  // Neighbors of v as node indices, sorted by neighbor ID.
  const std::vector<int>& adj(int v) const { return adj_[v]; }
  int degree(int v) const { return static_cast<int>(adj_[v].size()); }

  // Edge e as node indices with id(first) < id(second).
  std::pair<int, int> edge(int e) const { return edges_[e]; }
  int edge_index(int u, int v) const;  // -1 when absent

  // Half-edge index for (v, e): 2*e for the smaller-ID endpoint.
  int half_edge(int v, int e) const;
  int half_edge_node(int h) const;
  int half_edge_other(int h) const;
  int half_edge_edge(int h) const { return h / 2; }

 private:
  std::vector<int> ids_;
  std::unordered_map<int, int> index_;
  std::vector<std::vector<int>> adj_;
  std::vector<std::pair<int, int>> edges_;
  int max_degree_ = 0;
};

// Half-edge input/output labels, indexed by Forest half-edge index.
// An empty string means unset.
struct HalfEdgeLabeling {
  std::vector<std::string> label;

  explicit HalfEdgeLabeling(int half_edges = 0) : label(half_edges) {}
  bool complete() const {
    for (const auto& s : label)
      if (s.empty()) return false;
    return true;
  }
};

// kind: path | star | balanced | caterpillar | random-tree | forest.
// IDs are assigned 1..n. Throws InvalidInput for unknown kinds or
// parameters that cannot meet the degree bound.
Forest generate_forest(const std::string& kind, int n, int max_degree,
                       std::uint64_t seed);

// TREE v1 text format.
struct TreeFile {
  Forest forest;
  HalfEdgeLabeling in_labels;
};
TreeFile parse_tree(const std::string& text);
std::string serialize_tree(const Forest& f, const HalfEdgeLabeling* in_labels);

}  // namespace tl
