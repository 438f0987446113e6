#include "commsim/instance.hpp"

#include <numeric>
#include <stdexcept>
#include <utility>

namespace commsim {

Edge make_edge(std::size_t a, std::size_t b) {
  if (a == b) throw std::invalid_argument("self-loops are not edges");
  if (a > b) std::swap(a, b);
  return Edge{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(b)};
}

bool EdgeSet::is_matching() const {
  std::vector<bool> used(vertex_count, false);
  for (const auto& e : edges) {
    if (used[e.u] || used[e.v]) return false;
    used[e.u] = used[e.v] = true;
  }
  return true;
}

std::size_t edge_index(const Edge& e, std::size_t vertex_count) {
  const std::size_t u = e.u;
  const std::size_t v = e.v;
  // Pairs (u, *) for smaller u come first.
  return u * (2 * vertex_count - u - 1) / 2 + (v - u - 1);
}

BitVector edge_indicator(const EdgeSet& edges) {
  const std::size_t n = edges.vertex_count;
  BitVector out(n * (n - 1) / 2);
  for (const auto& e : edges.edges) out.set(edge_index(e, n));
  return out;
}

DisjointSets::DisjointSets(std::size_t n) : parent_(n), size_(n, 1), components_(n) {
  std::iota(parent_.begin(), parent_.end(), std::size_t{0});
}

std::size_t DisjointSets::find(std::size_t x) {
  while (parent_[x] != x) {
    parent_[x] = parent_[parent_[x]];
    x = parent_[x];
  }
  return x;
}

bool DisjointSets::unite(std::size_t a, std::size_t b) {
  a = find(a);
  b = find(b);
  if (a == b) return false;
  if (size_[a] < size_[b]) std::swap(a, b);
  parent_[b] = a;
  size_[a] += size_[b];
  --components_;
  return true;
}

}  // namespace commsim
