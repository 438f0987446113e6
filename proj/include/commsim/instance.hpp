#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "commsim/bit_vector.hpp"

namespace commsim {

/// k-player input for coordinate-wise problems: every player holds n bits.
struct Instance {
  std::size_t n = 0;
  std::vector<BitVector> players;

  [[nodiscard]] std::size_t k() const { return players.size(); }
};

/// Undirected edge with u < v. Vertices are 0-based internally.
struct Edge {
  std::uint32_t u = 0;
  std::uint32_t v = 0;

  friend bool operator==(const Edge&, const Edge&) = default;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

Edge make_edge(std::size_t a, std::size_t b);

struct EdgeSet {
  std::size_t vertex_count = 0;
  std::vector<Edge> edges;

  /// True when no two edges share an endpoint.
  [[nodiscard]] bool is_matching() const;
};

/// k-player input for k-CONN.
struct GraphInstance {
  std::size_t vertex_count = 0;
  std::vector<EdgeSet> players;

  [[nodiscard]] std::size_t k() const { return players.size(); }
};

/// Position of edge {u,v} in the lexicographic enumeration of all pairs of
/// `vertex_count` vertices; used to view an edge set as a bit vector.
std::size_t edge_index(const Edge& e, std::size_t vertex_count);
BitVector edge_indicator(const EdgeSet& edges);

/// Union-find over 0..n-1 with path halving and union by size.
class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n);

  std::size_t find(std::size_t x);
  /// Returns true when the two sets were distinct.
  bool unite(std::size_t a, std::size_t b);
  [[nodiscard]] std::size_t components() const { return components_; }

 private:
  std::vector<std::size_t> parent_;
  std::vector<std::size_t> size_;
  std::size_t components_;
};

}  // namespace commsim
