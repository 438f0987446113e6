#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "commsim/distributions.hpp"
#include "commsim/engine.hpp"
#include "commsim/problems.hpp"
#include "commsim/stats.hpp"

namespace commsim::reductions {

/// One per-trial CSV row: trial,seed,good,crossing_bits,total_bits,answer,oracle_answer.
struct TrialRow {
  std::size_t trial = 0;
  std::uint64_t seed = 0;
  bool good = true;
  std::uint64_t crossing_bits = 0;
  std::uint64_t total_bits = 0;
  std::string answer;
  std::string oracle_answer;
};

std::string csv_header();
std::string to_csv(const TrialRow& row);

/// A k-player run viewed as a two-player protocol: Alice simulates
/// `alice_role`, Bob everything else. Its cost is the crossing cost.
struct TwoPlayerRun {
  std::vector<EndpointId> alice_role;
  std::vector<EndpointId> bob_role;
  std::uint64_t crossing_bits = 0;
  std::uint64_t total_bits = 0;
  Answer derived_answer;
};

/// Blackboard writes by Alice's players cross; Bob observes the board.
TwoPlayerRun split_run(const RunResult& run, std::span<const EndpointId> alice_role);

struct SymmetrizeOptions {
  /// Trials of the symmetry pre-check; 0 skips it.
  std::size_t symmetry_trials = 1000;
  /// Applied to player ids before every run: player p's input goes to relabel[p].
  std::optional<std::vector<std::size_t>> relabel;
  std::size_t parallel = 1;
  /// Function the answers are scored against; OR when unset.
  std::optional<problems::BitwiseOp> target;
  double sigma = stats::kSigmaMultiplier;
};

struct SymmetrizationReport {
  std::size_t trials = 0;
  std::size_t players = 0;
  double mean_crossing = 0.0;
  double mean_total = 0.0;
  /// (2/k) * mean total.
  double bound = 0.0;
  /// Standard error of crossing - (2/k) total.
  double diff_se = 0.0;
  bool ratio_ok = false;
  /// crossing * k == total on every trial.
  bool exact_share = false;
  std::size_t correct = 0;
  std::size_t failed = 0;
  std::vector<std::uint64_t> crossing;
  std::vector<TrialRow> rows;
};

/// Symmetrization of a coordinator or message-passing protocol: per trial
/// Alice plays one uniform player, Bob the rest (coordinator included).
/// Throws AsymmetricDistribution when the pre-check fails.
SymmetrizationReport symmetrize_coordinator(const Protocol& protocol, const distributions::DistSpec& spec,
                                            std::size_t trials, const RandomTape& tape,
                                            const SymmetrizeOptions& options = {});

/// Blackboard variant: two distinct uniform players i, j; the crossing cost
/// is what they write.
SymmetrizationReport symmetrize_blackboard(const Protocol& protocol, const distributions::DistSpec& spec,
                                           std::size_t trials, const RandomTape& tape,
                                           const SymmetrizeOptions& options = {});

/// Dispatches on the protocol's model.
SymmetrizationReport symmetrize(const Protocol& protocol, const distributions::DistSpec& spec, std::size_t trials,
                                const RandomTape& tape, const SymmetrizeOptions& options = {});

/// Two distinct uniform players.
std::pair<std::size_t, std::size_t> draw_distinct_pair(std::size_t k, RandomTape& tape);

/// XOR symmetrization: Alice holds x as player i, Bob fills the other
/// players' inputs uniformly with XOR y and they run sendall-XOR. Returns
/// whether Alice's reconstruction answer ^ x equals y.
bool xor_symmetrization_recovers(std::size_t n, std::size_t k, RandomTape& tape);

// --- 2-DISJ -> k-OR ---------------------------------------------------------

/// True iff some w in W & y is not a special element.
bool decide_disj_from_or(const BitVector& w, const BitVector& y, std::span<const std::size_t> special);

struct OrReductionReport {
  std::size_t trials = 0;
  std::size_t disagreements = 0;
  std::size_t false_positives = 0;
  std::size_t disjoint_trials = 0;
  double disagreement_rate = 0.0;
  double bound = 0.0;  // 4k/n
  double se = 0.0;
  bool pass = false;
  std::vector<TrialRow> rows;
};

/// k-OR is evaluated by `protocol` when given, else by the exact oracle.
OrReductionReport or_reduction(std::size_t n, std::size_t k, std::size_t trials, const RandomTape& tape,
                               const Protocol* protocol = nullptr, std::size_t parallel = 1);

// --- 2-DISJ -> k-CONN -------------------------------------------------------

using ConnSolver = std::function<bool(const GraphInstance&)>;

struct ConnDriverResult {
  bool answer = false;
  bool flagged = false;
  std::size_t repetitions = 0;
  std::size_t good = 0;
  std::optional<distributions::ConnConstruction> chosen;
};

/// ceil(c log2 k) independent constructions; solves one uniformly chosen good
/// one and answers connected <=> intersecting. No good one: fair coin, flagged.
ConnDriverResult conn_reduction_driver(const distributions::DisjPair& pair, std::size_t k, double c, RandomTape& tape,
                                       const ConnSolver& solver = {});

std::size_t conn_repetitions(std::size_t k, double c);

struct ConnLemmaReport {
  std::size_t trials = 0;
  std::size_t k = 0;
  double xi1_freq = 0.0;
  double good_freq = 0.0;
  double good_se = 0.0;
  std::size_t conditional_violations = 0;
  bool pass = false;
  std::vector<TrialRow> rows;
};

ConnLemmaReport conn_lemma(std::size_t n, std::size_t k, std::size_t trials, const RandomTape& tape,
                           std::size_t parallel = 1);

struct ConnReductionReport {
  std::size_t trials = 0;
  std::size_t k = 0;
  std::size_t repetitions = 0;
  std::size_t agreements = 0;
  std::size_t flagged = 0;
  std::size_t good_trials = 0;
  std::size_t good_agreements = 0;
  double agreement_rate = 0.0;
  double flagged_freq = 0.0;
  double flagged_bound = 0.0;
  bool pass = false;
  std::vector<TrialRow> rows;
};

ConnReductionReport conn_reduction(std::size_t n, std::size_t k, double c, std::size_t trials, const RandomTape& tape,
                                   std::size_t parallel = 1);

// --- k-MAJ -> 2-BITS --------------------------------------------------------

/// Coordinates where Bob's count is exactly t: there the majority is Alice's bit.
std::vector<std::size_t> derive_bits_instance(std::span<const std::size_t> bob_columns, std::size_t t);

struct MajReductionReport {
  std::size_t trials = 0;
  std::size_t large_undecided = 0;  // |S| >= n/4
  double large_freq = 0.0;
  double alice_ones_fraction = 0.0;
  std::size_t majority_mismatches = 0;
  bool pass = false;
  std::vector<TrialRow> rows;
};

MajReductionReport maj_reduction(std::size_t n, std::size_t k, std::size_t trials, const RandomTape& tape,
                                 std::size_t parallel = 1);

// --- direct sum -------------------------------------------------------------

/// Finite joint distribution mu over X x Y with a Boolean function f.
struct JointTable {
  std::size_t nx = 0;
  std::size_t ny = 0;
  std::vector<double> p;   // row-major, p[x * ny + y]
  std::vector<char> f;     // f(x, y)

  /// Throws std::invalid_argument on a malformed or non-normalized table.
  void validate() const;
  [[nodiscard]] double prob(std::size_t x, std::size_t y) const { return p[x * ny + y]; }
  [[nodiscard]] bool value(std::size_t x, std::size_t y) const { return f[x * ny + y] != 0; }
  /// mu(f^-1(1)).
  [[nodiscard]] double mass_of_ones() const;
};

/// Equality on m values: x = y with probability q, otherwise a uniform pair
/// of distinct values. mu(f^-1(1)) = q.
JointTable sparse_equality_table(std::size_t m, double q);

struct DirectSumInstance {
  std::size_t x = 0;
  std::vector<std::size_t> y;  // y_1..y_k
};

/// (x, y_1) ~ mu, then y_2..y_k i.i.d. from the conditional of y given x.
DirectSumInstance direct_sum_build(const JointTable& table, std::size_t k, RandomTape& tape);
/// Same with x fixed and y_1 = w; the dummies follow the conditional given x.
DirectSumInstance direct_sum_embed(const JointTable& table, std::size_t k, std::size_t x, std::size_t w,
                                   RandomTape& tape);

/// The players' y values one-hot encoded, for the symmetry checker.
std::vector<BitVector> direct_sum_players(const DirectSumInstance& inst, std::size_t ny);

/// Message-passing f^k protocol: Carol is player 0 and holds x, P_i is
/// player i and sends gamma(y_i + 1) to Carol, who declares the k bits
/// f(x, y_i). `or_mode` declares their OR instead.
std::unique_ptr<Protocol> direct_sum_protocol(const JointTable& table, bool or_mode = false);
Instance direct_sum_engine_instance(const DirectSumInstance& inst, const JointTable& table);

struct DirectSumOrResult {
  bool answer = false;
  bool flagged = false;
  std::size_t good = 0;
  std::size_t repetitions = 0;
};

/// f(u, w) through f^k_OR on a uniformly chosen good repetition (every dummy
/// has f = 0). Refuses tables with mu(f^-1(1)) > 1/(10k).
DirectSumOrResult direct_sum_or_driver(const JointTable& table, std::size_t k, std::size_t u, std::size_t w,
                                       std::size_t repetitions, RandomTape& tape);

/// ceil(c * log2(1/eps)).
std::size_t direct_sum_repetitions(double c, double eps);

struct DirectSumReport {
  std::size_t trials = 0;
  std::size_t k = 0;
  double mean_crossing = 0.0;
  double mean_total = 0.0;
  double share_bound = 0.0;
  bool share_ok = false;
  distributions::SymmetryReport symmetry;
  double single_good_freq = 0.0;
  double single_good_se = 0.0;
  bool good_ok = false;
  std::size_t or_errors = 0;
  std::size_t or_flagged = 0;
  double or_error_freq = 0.0;
  bool or_ok = false;
  bool pass = false;
  std::vector<TrialRow> rows;
};

DirectSumReport direct_sum_experiment(const JointTable& table, std::size_t k, std::size_t trials, double c,
                                      double eps, const RandomTape& tape, std::size_t parallel = 1);

}  // namespace commsim::reductions
