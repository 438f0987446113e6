#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "commsim/bit_vector.hpp"
#include "commsim/instance.hpp"
#include "commsim/random_tape.hpp"

namespace commsim::distributions {

enum class DistName {
  uniform,
  zeta,
  mu_disj,
  mu_prime,
  nu,
  tau,
  tau_phi,
  tau_hh,
  phi_conn,
  naive_onek,
  balancing,
};

std::string_view to_string(DistName name);

/// A named input distribution and its parameters.
///
/// Text form is `name:key=value,...`, e.g. `mu_prime:n=12800,k=4`.
/// `planted=1` replaces player 0's input with all ones; it exists only to
/// build asymmetric controls for the symmetry checker.
struct DistSpec {
  DistName name = DistName::uniform;
  std::size_t n = 0;
  std::size_t k = 2;
  double t = 4.0;      // mu_disj intersection parameter
  double rho = 0.5;    // zeta ones-probability
  double phi = 0.5;    // tau_phi / tau_hh threshold
  double eps = 0.1;    // tau_hh error
  bool planted = false;

  static DistSpec parse(std::string_view text);
  [[nodiscard]] std::string to_string() const;
  /// Throws std::invalid_argument on out-of-range parameters.
  void validate() const;
  [[nodiscard]] bool is_graph() const { return name == DistName::phi_conn; }
  /// Length of each player's vector as seen by the symmetry checker.
  [[nodiscard]] std::size_t coordinates() const;
};

/// Two-player set-disjointness input. `intersection` is the shared element.
struct DisjPair {
  BitVector x;
  BitVector y;
  std::optional<std::size_t> intersection;
  std::size_t l = 0;
};

/// Connectivity events of the k-CONN construction.
struct GoodInputFlag {
  bool xi1 = false;
  bool xi2 = false;

  [[nodiscard]] bool good() const { return xi1 && xi2; }
};

struct ConnWitness {
  std::vector<std::size_t> sigma;  // permutation of the 2n vertices
  BitVector left;                  // vertex membership in L; the rest is R
  GoodInputFlag flags;
};

/// Construction witnesses attached to a sample; which fields are set depends
/// on the distribution.
struct Aux {
  std::optional<DisjPair> disj;
  std::optional<std::vector<std::size_t>> special;     // mu_prime: V
  std::optional<ConnWitness> conn;                     // phi_conn
  std::optional<BitVector> high_columns;               // tau family: columns given the larger count
  std::optional<std::vector<std::size_t>> balancing;   // balancing: the all-ones half
};

struct Sample {
  Instance bits;
  std::optional<GraphInstance> graph;
  Aux aux;
};

/// Draws one instance. Deterministic in (spec, tape seed).
Sample sample(const DistSpec& spec, RandomTape& tape);

/// Player vectors for the symmetry checker: bit inputs as-is, edge sets as
/// edge-indicator vectors.
std::vector<BitVector> sample_players(const DistSpec& spec, RandomTape& tape);

/// The 2-DISJ distribution via its partition form: T0, T1 of size 2l-1 plus a
/// designated element i; x and y each contain i with probability 1/sqrt(t).
/// l = floor((n+1)/4); any coordinates beyond 4l-1 are never used by x or y.
DisjPair sample_mu_pair(std::size_t n, double t, RandomTape& tape);

/// The k-OR input built from a 2-DISJ pair: player 0 holds x; every other
/// player holds an l-subset of [n]-y, or w.p. 1/4 an (l-1)-subset of [n]-y
/// plus one special element of y. `special` is the sorted set V.
struct OrConstruction {
  Instance instance;
  std::vector<std::size_t> special;
};
OrConstruction build_or_instance(const DisjPair& pair, std::size_t k, RandomTape& tape);

/// The k-CONN input on 2n vertices built from a 2-DISJ pair: player 0 gets
/// the sigma-pairs indexed by x, players 1..k-1 matchings of size l inside
/// L and R, each with one L-R edge w.p. 1/(10k).
struct ConnConstruction {
  GraphInstance graph;
  ConnWitness witness;
};
ConnConstruction build_conn_instance(const DisjPair& pair, std::size_t k, RandomTape& tape);

/// Default player count for phi_conn: ceil(68 ln n) + 1.
std::size_t conn_default_players(std::size_t n);

BitVector random_bits(std::size_t n, RandomTape& tape);
BitVector bernoulli_bits(std::size_t n, double p, RandomTape& tape);

/// count vectors, uniform subject to their XOR being y.
std::vector<BitVector> conditioned_xor_fill(const BitVector& y, std::size_t count, RandomTape& tape);

using PlayerSampler = std::function<std::vector<BitVector>(RandomTape&)>;

struct SymmetryOptions {
  double alpha = 0.01;
  std::size_t max_player_pairs = 16;
  std::size_t column_pairs = 16;
};

struct PairResult {
  std::size_t a = 0;
  std::size_t b = 0;
  double max_chi2 = 0.0;
  double min_p = 1.0;
};

struct SymmetryReport {
  std::size_t trials = 0;
  std::size_t tests = 0;
  std::vector<PairResult> pairs;
  double max_chi2 = 0.0;
  double min_p = 1.0;
  /// Bonferroni-corrected minimum p-value.
  double corrected_p = 1.0;
  bool pass = true;
  std::string worst;
};

/// Exchangeability check between players: per-coordinate paired McNemar
/// tests and Bowker symmetry tests on joint patterns of column pairs, over a
/// sampled set of player pairs. PASS iff the Bonferroni-corrected minimum
/// p-value is at least alpha.
SymmetryReport symmetry_check(const PlayerSampler& sampler, std::size_t players, std::size_t trials,
                              const RandomTape& tape, const SymmetryOptions& options = {});
SymmetryReport symmetry_check(const DistSpec& spec, std::size_t trials, const RandomTape& tape,
                              const SymmetryOptions& options = {});

/// Sum over coordinates of the binary entropy of player 0's empirical
/// ones-frequency.
double empirical_entropy(const DistSpec& spec, std::size_t trials, const RandomTape& tape);

nlohmann::json to_json(const Aux& aux);
nlohmann::json to_json(const Sample& sample);

}  // namespace commsim::distributions
