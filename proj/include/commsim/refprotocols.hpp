#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "commsim/bit_vector.hpp"
#include "commsim/engine.hpp"
#include "commsim/problems.hpp"
#include "commsim/random_tape.hpp"

namespace commsim::refprotocols {

/// Coordinator model: every player sends its raw input, the coordinator
/// evaluates `op`. Costs exactly n*k.
std::unique_ptr<Protocol> sendall(problems::BitwiseOp op = problems::BitwiseOp::xor_op());

/// Blackboard model: players write, in id order, the gamma-coded set of
/// their ones nobody announced before; the last player then declares OR.
std::unique_ptr<Protocol> blackboard_or();

/// Coordinator model: every player sends its one-set, gap coded; the
/// coordinator declares OR, or AND when `and_mode` is set.
std::unique_ptr<Protocol> entropy_coded_or(bool and_mode = false);

struct SlepianWolfParams {
  double c_sw = 2.8;
  /// Candidate supports larger than weight_factor*(n/2)/k are not considered.
  double weight_factor = 3.0;
  /// Give up when the affine solution space exceeds 2^max_kernel_dim.
  std::size_t max_kernel_dim = 20;
};

/// Coordinator model, for the balancing distribution: a few probe players
/// send their whole input, the coordinator takes the all-ones coordinates as
/// the balancing set, and every other player sends parities of its input
/// over public random subsets. A player whose input cannot be pinned down
/// uniquely makes the run end in a declared failure.
std::unique_ptr<Protocol> slepian_wolf_or(SlepianWolfParams params = {});

/// Probe players: the smallest p with (n/2) k^-p <= 0.01, capped at
/// min(k-1, ceil(100 log2 n)).
std::size_t sw_probe_count(std::size_t n, std::size_t k);
/// m = ceil(c_sw * n * log2(k) / k).
std::size_t sw_parity_count(std::size_t n, std::size_t k, double c_sw);
std::size_t sw_weight_cap(std::size_t n, std::size_t k, double weight_factor);
/// The m public parity subsets of `player`.
std::vector<BitVector> sw_parity_subsets(const RandomTape& tape, std::size_t player, std::size_t m, std::size_t n);
BitVector sw_parities(const BitVector& input, std::span<const BitVector> subsets);

struct SwReconstruction {
  enum class Status { unique, none, ambiguous, too_large };
  Status status = Status::none;
  BitVector value;
  std::size_t consistent = 0;
};

/// Recovers an input that is all ones on `balancing` from its parities:
/// solves the linear system on the remaining coordinates over GF(2) and
/// enumerates the solution space for supports of weight <= weight_cap.
SwReconstruction sw_reconstruct(const BitVector& balancing, std::span<const BitVector> subsets,
                                const BitVector& parities, std::size_t weight_cap, std::size_t max_kernel_dim = 20);

/// Registry: sendall, bb-or, entropy-or, sw-or. `op` applies to sendall.
std::unique_ptr<Protocol> make_protocol(std::string_view name,
                                        problems::BitwiseOp op = problems::BitwiseOp::xor_op());
std::vector<std::string> protocol_names();

/// The function a protocol computes, for checking answers against the oracle.
problems::BitwiseOp protocol_target(std::string_view name, problems::BitwiseOp op = problems::BitwiseOp::xor_op());

}  // namespace commsim::refprotocols
