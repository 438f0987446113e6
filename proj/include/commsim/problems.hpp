#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "commsim/bit_vector.hpp"
#include "commsim/instance.hpp"

/// Ground-truth evaluators for every problem the workbench simulates.
/// All functions are pure.
namespace commsim::problems {

enum class BitwiseKind { XOR, AND, OR, MAJ };

struct BitwiseOp {
  BitwiseKind kind = BitwiseKind::XOR;
  double phi = 0.5;  // MAJ threshold fraction

  static BitwiseOp xor_op() { return {BitwiseKind::XOR, 0.5}; }
  static BitwiseOp and_op() { return {BitwiseKind::AND, 0.5}; }
  static BitwiseOp or_op() { return {BitwiseKind::OR, 0.5}; }
  static BitwiseOp maj(double phi) { return {BitwiseKind::MAJ, phi}; }
};

/// Parses "xor", "and", "or", "maj" or "maj:<phi>".
BitwiseOp parse_bitwise_op(std::string_view text);
std::string to_string(const BitwiseOp& op);

/// Minimum column count for which MAJ(phi) outputs 1: floor(k*phi) + 1.
std::size_t maj_threshold(std::size_t k, double phi);

/// Coordinate-wise XOR/AND/OR/MAJ over all players.
BitVector eval_bitwise(const BitwiseOp& op, std::span<const BitVector> players);
BitVector eval_bitwise(const BitwiseOp& op, const Instance& instance);

/// Per-coordinate number of players holding a one.
std::vector<std::size_t> column_counts(std::span<const BitVector> players);

/// True iff the union of all players' edges connects every vertex.
bool eval_conn(const GraphInstance& instance);
bool is_connected(std::size_t vertex_count, std::span<const Edge> edges);

/// Promise disjointness: equal set sizes and |x & y| <= 1, else PromiseViolation.
bool eval_disj2(const BitVector& x, const BitVector& y);

/// Bits of x at the sorted positions of `indices`.
std::vector<bool> eval_bits2(const BitVector& x, std::span<const std::size_t> indices);

enum class Verdict { NO, EITHER, YES };
std::string_view to_string(Verdict v);

/// YES for count >= phi*k, NO for count <= phi*k*(1-eps), EITHER in between.
Verdict hh_verdict(std::size_t count, std::size_t k, double phi, double eps);
std::vector<Verdict> eval_hh(std::span<const BitVector> players, double phi, double eps);

// JSON forms: {"n","k","players":[hex]} and {"vertices","players":[[[u,v],...]]}
// with 1-based vertex ids on the wire.
nlohmann::json to_json(const Instance& instance);
Instance instance_from_json(const nlohmann::json& j);
nlohmann::json to_json(const GraphInstance& instance);
GraphInstance graph_from_json(const nlohmann::json& j);

}  // namespace commsim::problems
