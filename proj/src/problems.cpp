#include "commsim/problems.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "commsim/errors.hpp"

namespace commsim::problems {

namespace {

constexpr double kRelTol = 1e-9;

void require_uniform_length(std::span<const BitVector> players) {
  if (players.empty()) throw std::invalid_argument("instance has no players");
  for (const auto& p : players) {
    if (p.size() != players.front().size()) throw std::invalid_argument("player inputs differ in length");
  }
}

}  // namespace

BitwiseOp parse_bitwise_op(std::string_view text) {
  if (text == "xor") return BitwiseOp::xor_op();
  if (text == "and") return BitwiseOp::and_op();
  if (text == "or") return BitwiseOp::or_op();
  if (text == "maj") return BitwiseOp::maj(0.5);
  if (text.starts_with("maj:")) {
    const double phi = std::stod(std::string(text.substr(4)));
    if (!(phi > 0.0 && phi < 1.0)) throw std::invalid_argument("MAJ threshold must lie in (0,1)");
    return BitwiseOp::maj(phi);
  }
  throw std::invalid_argument("unknown bitwise operation: " + std::string(text));
}

std::string to_string(const BitwiseOp& op) {
  switch (op.kind) {
    case BitwiseKind::XOR: return "xor";
    case BitwiseKind::AND: return "and";
    case BitwiseKind::OR: return "or";
    case BitwiseKind::MAJ: return "maj:" + std::to_string(op.phi);
  }
  return "?";
}

std::size_t maj_threshold(std::size_t k, double phi) {
  if (!(phi > 0.0 && phi < 1.0)) throw std::invalid_argument("MAJ threshold must lie in (0,1)");
  // Guard against k*phi landing a hair below an integer.
  const double scaled = static_cast<double>(k) * phi;
  return static_cast<std::size_t>(std::floor(scaled + kRelTol * std::max(1.0, scaled))) + 1;
}

std::vector<std::size_t> column_counts(std::span<const BitVector> players) {
  require_uniform_length(players);
  std::vector<std::size_t> counts(players.front().size(), 0);
  for (const auto& p : players) {
    for (auto i : p.indices()) ++counts[i];
  }
  return counts;
}

BitVector eval_bitwise(const BitwiseOp& op, std::span<const BitVector> players) {
  require_uniform_length(players);
  switch (op.kind) {
    case BitwiseKind::XOR: {
      BitVector out(players.front().size());
      for (const auto& p : players) out ^= p;
      return out;
    }
    case BitwiseKind::OR: {
      BitVector out(players.front().size());
      for (const auto& p : players) out |= p;
      return out;
    }
    case BitwiseKind::AND: {
      BitVector out(players.front().size(), true);
      for (const auto& p : players) out &= p;
      return out;
    }
    case BitwiseKind::MAJ: {
      const std::size_t threshold = maj_threshold(players.size(), op.phi);
      const auto counts = column_counts(players);
      BitVector out(counts.size());
      for (std::size_t j = 0; j < counts.size(); ++j) out.set(j, counts[j] >= threshold);
      return out;
    }
  }
  throw std::logic_error("unreachable");
}

BitVector eval_bitwise(const BitwiseOp& op, const Instance& instance) {
  return eval_bitwise(op, std::span<const BitVector>(instance.players));
}

bool is_connected(std::size_t vertex_count, std::span<const Edge> edges) {
  if (vertex_count <= 1) return true;
  DisjointSets sets(vertex_count);
  for (const auto& e : edges) {
    if (sets.unite(e.u, e.v) && sets.components() == 1) return true;
  }
  return sets.components() == 1;
}

bool eval_conn(const GraphInstance& instance) {
  std::vector<Edge> all;
  for (const auto& p : instance.players) {
    if (p.vertex_count != instance.vertex_count) throw std::invalid_argument("edge sets differ in vertex count");
    for (const auto& e : p.edges) {
      if (e.u == e.v || e.v >= instance.vertex_count) throw std::invalid_argument("edge endpoint out of range");
      all.push_back(e);
    }
  }
  return is_connected(instance.vertex_count, all);
}

bool eval_disj2(const BitVector& x, const BitVector& y) {
  if (x.size() != y.size()) throw std::invalid_argument("2-DISJ inputs differ in length");
  if (x.count() != y.count()) throw PromiseViolation("2-DISJ sets must have equal size");
  const std::size_t common = (x & y).count();
  if (common > 1) throw PromiseViolation("2-DISJ promise broken: sets share more than one element");
  return common == 1;
}

std::vector<bool> eval_bits2(const BitVector& x, std::span<const std::size_t> indices) {
  std::vector<std::size_t> sorted(indices.begin(), indices.end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<bool> out;
  out.reserve(sorted.size());
  for (auto i : sorted) {
    if (i >= x.size()) throw std::out_of_range("2-BITS index out of range");
    out.push_back(x.test(i));
  }
  return out;
}

std::string_view to_string(Verdict v) {
  switch (v) {
    case Verdict::NO: return "NO";
    case Verdict::EITHER: return "EITHER";
    case Verdict::YES: return "YES";
  }
  return "?";
}

Verdict hh_verdict(std::size_t count, std::size_t k, double phi, double eps) {
  if (!(phi > 0.0 && phi < 1.0) || !(eps > 0.0 && eps < 1.0)) {
    throw std::invalid_argument("heavy-hitter parameters must lie in (0,1)");
  }
  const double c = static_cast<double>(count);
  const double yes_at = phi * static_cast<double>(k);
  const double no_at = yes_at * (1.0 - eps);
  if (c >= yes_at - kRelTol * std::max(1.0, yes_at)) return Verdict::YES;
  if (c <= no_at + kRelTol * std::max(1.0, no_at)) return Verdict::NO;
  return Verdict::EITHER;
}

std::vector<Verdict> eval_hh(std::span<const BitVector> players, double phi, double eps) {
  const auto counts = column_counts(players);
  std::vector<Verdict> out;
  out.reserve(counts.size());
  for (auto c : counts) out.push_back(hh_verdict(c, players.size(), phi, eps));
  return out;
}

nlohmann::json to_json(const Instance& instance) {
  nlohmann::json players = nlohmann::json::array();
  for (const auto& p : instance.players) players.push_back(p.to_hex());
  return {{"n", instance.n}, {"k", instance.k()}, {"players", players}};
}

Instance instance_from_json(const nlohmann::json& j) {
  Instance out;
  out.n = j.at("n").get<std::size_t>();
  for (const auto& hex : j.at("players")) out.players.push_back(BitVector::from_hex(hex.get<std::string>(), out.n));
  if (j.contains("k") && j.at("k").get<std::size_t>() != out.players.size()) {
    throw std::invalid_argument("instance JSON: k does not match player count");
  }
  return out;
}

nlohmann::json to_json(const GraphInstance& instance) {
  nlohmann::json players = nlohmann::json::array();
  for (const auto& p : instance.players) {
    nlohmann::json edges = nlohmann::json::array();
    for (const auto& e : p.edges) edges.push_back({e.u + 1, e.v + 1});
    players.push_back(edges);
  }
  return {{"vertices", instance.vertex_count}, {"players", players}};
}

GraphInstance graph_from_json(const nlohmann::json& j) {
  GraphInstance out;
  out.vertex_count = j.at("vertices").get<std::size_t>();
  for (const auto& edges : j.at("players")) {
    EdgeSet set{out.vertex_count, {}};
    for (const auto& e : edges) {
      const auto u = e.at(0).get<std::size_t>();
      const auto v = e.at(1).get<std::size_t>();
      if (u < 1 || v < 1 || u > out.vertex_count || v > out.vertex_count) {
        throw std::invalid_argument("graph JSON: vertex id out of range");
      }
      set.edges.push_back(make_edge(u - 1, v - 1));
    }
    out.players.push_back(std::move(set));
  }
  return out;
}

}  // namespace commsim::problems
