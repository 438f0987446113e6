#include "commsim/reductions.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <stdexcept>

#include "commsim/coding.hpp"
#include "commsim/errors.hpp"
#include "commsim/parallel.hpp"
#include "commsim/problems.hpp"
#include "commsim/refprotocols.hpp"

namespace commsim::reductions {

namespace {

using distributions::DistSpec;

std::string bit_text(bool b) { return b ? "1" : "0"; }

std::string answer_text(const Answer& a) { return a.failed ? "fail" : a.value.to_hex(); }

Instance relabeled(const Instance& inst, const std::optional<std::vector<std::size_t>>& relabel) {
  if (!relabel) return inst;
  if (relabel->size() != inst.k()) throw std::invalid_argument("relabeling must be a permutation of the players");
  Instance out{inst.n, std::vector<BitVector>(inst.k())};
  for (std::size_t p = 0; p < inst.k(); ++p) out.players.at((*relabel)[p]) = inst.players[p];
  return out;
}

void require_symmetric(const DistSpec& spec, const RandomTape& tape, const SymmetrizeOptions& options) {
  if (options.symmetry_trials == 0) return;
  const auto report = distributions::symmetry_check(spec, options.symmetry_trials, tape.derive("symmetry-precheck"));
  if (!report.pass) {
    throw AsymmetricDistribution("distribution " + spec.to_string() + " failed the symmetry check (" + report.worst +
                                 ")");
  }
}

struct SymTrial {
  std::uint64_t seed = 0;
  std::uint64_t crossing = 0;
  std::uint64_t total = 0;
  Answer answer;
  BitVector oracle;
};

template <typename ChooseAlice>
SymmetrizationReport symmetrize_impl(const Protocol& protocol, const DistSpec& spec, std::size_t trials,
                                     const RandomTape& tape, const SymmetrizeOptions& options, ChooseAlice choose) {
  require_symmetric(spec, tape, options);
  const std::size_t k = spec.k;
  const auto target = options.target.value_or(problems::BitwiseOp::or_op());
  std::vector<SymTrial> results(trials);
  parallel_for(trials, options.parallel, [&](std::size_t t) {
    const RandomTape tt = tape.derive("trial", t);
    RandomTape input_tape = tt.derive("input");
    RandomTape alice_tape = tt.derive("alice");
    const Instance inst = relabeled(distributions::sample(spec, input_tape).bits, options.relabel);
    const auto run = run_protocol(protocol.model(), protocol, inst, tt.derive("coins"));
    Partition part;
    part.side_a = choose(k, alice_tape);
    part.observer_is_a = false;
    auto& r = results[t];
    r.seed = tt.seed();
    r.crossing = *cost(run.transcript, part).crossing_bits;
    r.total = cost(run.transcript).total_bits;
    r.answer = run.answer;
    r.oracle = problems::eval_bitwise(target, inst);
  });

  SymmetrizationReport report;
  report.trials = trials;
  report.players = k;
  stats::RunningStats crossing;
  stats::RunningStats total;
  stats::RunningStats diff;
  report.exact_share = true;
  const double share = 2.0 / static_cast<double>(k);
  for (std::size_t t = 0; t < trials; ++t) {
    const auto& r = results[t];
    crossing.add(static_cast<double>(r.crossing));
    total.add(static_cast<double>(r.total));
    diff.add(static_cast<double>(r.crossing) - share * static_cast<double>(r.total));
    report.exact_share = report.exact_share && r.crossing * k == r.total;
    report.crossing.push_back(r.crossing);
    if (r.answer.failed) {
      ++report.failed;
    } else if (r.answer.value == r.oracle) {
      ++report.correct;
    }
    TrialRow row;
    row.trial = t;
    row.seed = r.seed;
    row.good = !r.answer.failed;
    row.crossing_bits = r.crossing;
    row.total_bits = r.total;
    row.answer = answer_text(r.answer);
    row.oracle_answer = r.oracle.to_hex();
    report.rows.push_back(std::move(row));
  }
  report.mean_crossing = crossing.mean();
  report.mean_total = total.mean();
  report.bound = share * total.mean();
  report.diff_se = diff.standard_error();
  report.ratio_ok = diff.mean() <= options.sigma * report.diff_se;
  return report;
}

}  // namespace

std::string csv_header() { return "trial,seed,good,crossing_bits,total_bits,answer,oracle_answer"; }

std::string to_csv(const TrialRow& row) {
  std::ostringstream out;
  out << row.trial << ',' << row.seed << ',' << (row.good ? 1 : 0) << ',' << row.crossing_bits << ','
      << row.total_bits << ',' << row.answer << ',' << row.oracle_answer;
  return out.str();
}

TwoPlayerRun split_run(const RunResult& run, std::span<const EndpointId> alice_role) {
  TwoPlayerRun out;
  out.alice_role.assign(alice_role.begin(), alice_role.end());
  const std::size_t endpoints = endpoint_count(run.transcript.model, run.transcript.players);
  for (std::size_t e = 0; e < endpoints; ++e) {
    const auto id = static_cast<EndpointId>(e);
    if (std::find(alice_role.begin(), alice_role.end(), id) == alice_role.end()) out.bob_role.push_back(id);
  }
  const Partition part{out.alice_role, false};
  const auto c = cost(run.transcript, part);
  out.crossing_bits = *c.crossing_bits;
  out.total_bits = c.total_bits;
  out.derived_answer = run.answer;
  return out;
}

std::pair<std::size_t, std::size_t> draw_distinct_pair(std::size_t k, RandomTape& tape) {
  if (k < 2) throw std::invalid_argument("need two players");
  const auto i = static_cast<std::size_t>(tape.uniform(k));
  auto j = static_cast<std::size_t>(tape.uniform(k - 1));
  if (j >= i) ++j;
  return {i, j};
}

SymmetrizationReport symmetrize_coordinator(const Protocol& protocol, const DistSpec& spec, std::size_t trials,
                                            const RandomTape& tape, const SymmetrizeOptions& options) {
  if (protocol.model() == ModelKind::blackboard) throw std::invalid_argument("blackboard protocol: use symmetrize_blackboard");
  return symmetrize_impl(protocol, spec, trials, tape, options, [](std::size_t k, RandomTape& t) {
    return std::vector<EndpointId>{static_cast<EndpointId>(t.uniform(k))};
  });
}

SymmetrizationReport symmetrize_blackboard(const Protocol& protocol, const DistSpec& spec, std::size_t trials,
                                           const RandomTape& tape, const SymmetrizeOptions& options) {
  if (protocol.model() != ModelKind::blackboard) throw std::invalid_argument("not a blackboard protocol");
  return symmetrize_impl(protocol, spec, trials, tape, options, [](std::size_t k, RandomTape& t) {
    const auto [i, j] = draw_distinct_pair(k, t);
    return std::vector<EndpointId>{static_cast<EndpointId>(i), static_cast<EndpointId>(j)};
  });
}

SymmetrizationReport symmetrize(const Protocol& protocol, const DistSpec& spec, std::size_t trials,
                                const RandomTape& tape, const SymmetrizeOptions& options) {
  if (protocol.model() == ModelKind::blackboard) return symmetrize_blackboard(protocol, spec, trials, tape, options);
  return symmetrize_coordinator(protocol, spec, trials, tape, options);
}

bool xor_symmetrization_recovers(std::size_t n, std::size_t k, RandomTape& tape) {
  const BitVector x = distributions::random_bits(n, tape);
  const BitVector y = distributions::random_bits(n, tape);
  const auto i = static_cast<std::size_t>(tape.uniform(k));
  auto rest = distributions::conditioned_xor_fill(y, k - 1, tape);
  Instance inst{n, {}};
  for (std::size_t p = 0, r = 0; p < k; ++p) inst.players.push_back(p == i ? x : rest[r++]);
  const auto proto = refprotocols::sendall(problems::BitwiseOp::xor_op());
  const auto run = run_protocol(ModelKind::coordinator, *proto, inst, tape.derive("coins"));
  return (run.answer.value ^ x) == y;
}

// --- k-OR -------------------------------------------------------------------

bool decide_disj_from_or(const BitVector& w, const BitVector& y, std::span<const std::size_t> special) {
  for (auto c : (w & y).indices()) {
    if (!std::binary_search(special.begin(), special.end(), c)) return true;
  }
  return false;
}

OrReductionReport or_reduction(std::size_t n, std::size_t k, std::size_t trials, const RandomTape& tape,
                               const Protocol* protocol, std::size_t parallel) {
  struct Result {
    std::uint64_t seed = 0;
    bool truth = false;
    bool answer = false;
    std::uint64_t crossing = 0;
    std::uint64_t total = 0;
  };
  std::vector<Result> results(trials);
  parallel_for(trials, parallel, [&](std::size_t t) {
    const RandomTape tt = tape.derive("trial", t);
    RandomTape input = tt.derive("input");
    const auto pair = distributions::sample_mu_pair(n, 4.0, input);
    const auto built = distributions::build_or_instance(pair, k, input);
    BitVector w;
    auto& r = results[t];
    if (protocol != nullptr) {
      const auto run = run_protocol(protocol->model(), *protocol, built.instance, tt.derive("coins"));
      w = run.answer.value;
      const std::vector<EndpointId> alice{0};
      const auto split = split_run(run, alice);
      r.crossing = split.crossing_bits;
      r.total = split.total_bits;
    } else {
      w = problems::eval_bitwise(problems::BitwiseOp::or_op(), built.instance);
    }
    r.seed = tt.seed();
    r.truth = problems::eval_disj2(pair.x, pair.y);
    r.answer = decide_disj_from_or(w, pair.y, built.special);
  });

  OrReductionReport report;
  report.trials = trials;
  for (std::size_t t = 0; t < trials; ++t) {
    const auto& r = results[t];
    if (r.answer != r.truth) ++report.disagreements;
    if (!r.truth) {
      ++report.disjoint_trials;
      if (r.answer) ++report.false_positives;
    }
    report.rows.push_back(TrialRow{t, r.seed, true, r.crossing, r.total, bit_text(r.answer), bit_text(r.truth)});
  }
  report.disagreement_rate = static_cast<double>(report.disagreements) / static_cast<double>(trials);
  report.bound = 4.0 * static_cast<double>(k) / static_cast<double>(n);
  report.se = stats::proportion_se(report.bound, trials);
  report.pass = report.disagreement_rate <= report.bound + stats::kSigmaMultiplier * report.se &&
                report.false_positives == 0;
  return report;
}

// --- k-CONN -----------------------------------------------------------------

std::size_t conn_repetitions(std::size_t k, double c) {
  return static_cast<std::size_t>(std::ceil(c * std::log2(static_cast<double>(std::max<std::size_t>(k, 2))) - 1e-9));
}

ConnDriverResult conn_reduction_driver(const distributions::DisjPair& pair, std::size_t k, double c, RandomTape& tape,
                                       const ConnSolver& solver) {
  ConnDriverResult out;
  out.repetitions = conn_repetitions(k, c);
  for (std::size_t rep = 0; rep < out.repetitions; ++rep) {
    RandomTape rt = tape.derive("repetition", rep);
    auto built = distributions::build_conn_instance(pair, k, rt);
    if (!built.witness.flags.good()) continue;
    ++out.good;
    // Reservoir choice: uniform over the good repetitions.
    if (tape.uniform(out.good) == 0) out.chosen = std::move(built);
  }
  if (!out.chosen) {
    out.flagged = true;
    out.answer = tape.bernoulli(0.5);
    return out;
  }
  out.answer = solver ? solver(out.chosen->graph) : problems::eval_conn(out.chosen->graph);
  return out;
}

ConnLemmaReport conn_lemma(std::size_t n, std::size_t k, std::size_t trials, const RandomTape& tape,
                           std::size_t parallel) {
  struct Result {
    std::uint64_t seed = 0;
    distributions::GoodInputFlag flags;
    bool connected = false;
    bool truth = false;
  };
  std::vector<Result> results(trials);
  parallel_for(trials, parallel, [&](std::size_t t) {
    const RandomTape tt = tape.derive("trial", t);
    RandomTape input = tt.derive("input");
    const auto pair = distributions::sample_mu_pair(n, 10.0 * static_cast<double>(k), input);
    const auto built = distributions::build_conn_instance(pair, k, input);
    auto& r = results[t];
    r.seed = tt.seed();
    r.flags = built.witness.flags;
    r.connected = problems::eval_conn(built.graph);
    r.truth = problems::eval_disj2(pair.x, pair.y);
  });

  ConnLemmaReport report;
  report.trials = trials;
  report.k = k;
  std::size_t xi1 = 0;
  std::size_t good = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    const auto& r = results[t];
    xi1 += r.flags.xi1 ? 1 : 0;
    if (r.flags.good()) {
      ++good;
      if (r.connected != r.truth) ++report.conditional_violations;
    }
    report.rows.push_back(TrialRow{t, r.seed, r.flags.good(), 0, 0, bit_text(r.connected), bit_text(r.truth)});
  }
  report.xi1_freq = static_cast<double>(xi1) / static_cast<double>(trials);
  report.good_freq = static_cast<double>(good) / static_cast<double>(trials);
  report.good_se = stats::proportion_se(8.0 / 9.0, trials);
  report.pass = report.xi1_freq >= 0.99 && report.good_freq >= 8.0 / 9.0 - stats::kSigmaMultiplier * report.good_se &&
                report.conditional_violations == 0;
  return report;
}

ConnReductionReport conn_reduction(std::size_t n, std::size_t k, double c, std::size_t trials, const RandomTape& tape,
                                   std::size_t parallel) {
  struct Result {
    std::uint64_t seed = 0;
    ConnDriverResult driver;
    bool truth = false;
  };
  std::vector<Result> results(trials);
  parallel_for(trials, parallel, [&](std::size_t t) {
    const RandomTape tt = tape.derive("trial", t);
    RandomTape input = tt.derive("input");
    const auto pair = distributions::sample_mu_pair(n, 10.0 * static_cast<double>(k), input);
    RandomTape driver_tape = tt.derive("driver");
    auto& r = results[t];
    r.seed = tt.seed();
    r.driver = conn_reduction_driver(pair, k, c, driver_tape);
    r.driver.chosen.reset();
    r.truth = problems::eval_disj2(pair.x, pair.y);
  });

  ConnReductionReport report;
  report.trials = trials;
  report.k = k;
  report.repetitions = conn_repetitions(k, c);
  for (std::size_t t = 0; t < trials; ++t) {
    const auto& r = results[t];
    const bool agree = r.driver.answer == r.truth;
    report.agreements += agree ? 1 : 0;
    if (r.driver.flagged) {
      ++report.flagged;
    } else {
      ++report.good_trials;
      report.good_agreements += agree ? 1 : 0;
    }
    report.rows.push_back(
        TrialRow{t, r.seed, !r.driver.flagged, 0, 0, bit_text(r.driver.answer), bit_text(r.truth)});
  }
  const double n_trials = static_cast<double>(trials);
  report.agreement_rate = static_cast<double>(report.agreements) / n_trials;
  report.flagged_freq = static_cast<double>(report.flagged) / n_trials;
  const double p_none = std::pow(1.0 / 9.0, static_cast<double>(report.repetitions));
  report.flagged_bound = p_none + stats::kSigmaMultiplier * stats::proportion_se(p_none, trials);
  report.pass = report.agreement_rate >= 0.98 && report.good_agreements == report.good_trials &&
                report.flagged_freq <= report.flagged_bound;
  return report;
}

// --- k-MAJ ------------------------------------------------------------------

std::vector<std::size_t> derive_bits_instance(std::span<const std::size_t> bob_columns, std::size_t t) {
  std::vector<std::size_t> out;
  for (std::size_t c = 0; c < bob_columns.size(); ++c) {
    if (bob_columns[c] == t) out.push_back(c);
  }
  return out;
}

MajReductionReport maj_reduction(std::size_t n, std::size_t k, std::size_t trials, const RandomTape& tape,
                                 std::size_t parallel) {
  if (k % 2 == 0 || k < 3) throw std::invalid_argument("the majority reduction needs odd k >= 3");
  const std::size_t t_half = k / 2;
  const auto spec = DistSpec::parse("tau:n=" + std::to_string(n) + ",k=" + std::to_string(k));
  struct Result {
    std::uint64_t seed = 0;
    std::size_t undecided = 0;
    std::size_t alice_ones = 0;
    bool match = true;
  };
  std::vector<Result> results(trials);
  parallel_for(trials, parallel, [&](std::size_t t) {
    const RandomTape tt = tape.derive("trial", t);
    RandomTape input = tt.derive("input");
    const auto s = distributions::sample(spec, input);
    RandomTape pick = tt.derive("alice");
    const auto alice = static_cast<std::size_t>(pick.uniform(k));
    auto bob = problems::column_counts(s.bits.players);
    const auto& a = s.bits.players[alice];
    for (auto c : a.indices()) --bob[c];
    const auto undecided = derive_bits_instance(bob, t_half);
    const auto maj = problems::eval_bitwise(problems::BitwiseOp::maj(0.5), s.bits);
    auto& r = results[t];
    r.seed = tt.seed();
    r.undecided = undecided.size();
    for (auto c : undecided) {
      r.alice_ones += a.test(c) ? 1 : 0;
      if (maj.test(c) != a.test(c)) r.match = false;
    }
  });

  MajReductionReport report;
  report.trials = trials;
  std::size_t ones = 0;
  std::size_t total = 0;
  for (std::size_t t = 0; t < trials; ++t) {
    const auto& r = results[t];
    const bool large = 4 * r.undecided >= n;
    report.large_undecided += large ? 1 : 0;
    ones += r.alice_ones;
    total += r.undecided;
    report.majority_mismatches += r.match ? 0 : 1;
    report.rows.push_back(TrialRow{t, r.seed, large, 0, 0, std::to_string(r.undecided), std::to_string(r.alice_ones)});
  }
  report.large_freq = static_cast<double>(report.large_undecided) / static_cast<double>(trials);
  report.alice_ones_fraction = total == 0 ? 0.0 : static_cast<double>(ones) / static_cast<double>(total);
  report.pass = report.large_freq >= 6.0 / 7.0 && std::abs(report.alice_ones_fraction - 0.5) <= 0.03 &&
                report.majority_mismatches == 0;
  return report;
}

// --- direct sum ---------------------------------------------------------------

void JointTable::validate() const {
  if (nx == 0 || ny == 0) throw std::invalid_argument("joint table needs nonempty supports");
  if (p.size() != nx * ny || f.size() != nx * ny) throw std::invalid_argument("joint table has the wrong shape");
  double sum = 0.0;
  for (double v : p) {
    if (!(v >= 0.0) || !std::isfinite(v)) throw std::invalid_argument("joint table has a negative entry");
    sum += v;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw std::invalid_argument("joint table does not sum to 1");
}

double JointTable::mass_of_ones() const {
  double m = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) m += f[i] != 0 ? p[i] : 0.0;
  return m;
}

JointTable sparse_equality_table(std::size_t m, double q) {
  if (m < 2) throw std::invalid_argument("equality table needs at least two values");
  JointTable t;
  t.nx = m;
  t.ny = m;
  t.p.assign(m * m, (1.0 - q) / static_cast<double>(m * (m - 1)));
  t.f.assign(m * m, 0);
  for (std::size_t v = 0; v < m; ++v) {
    t.p[v * m + v] = q / static_cast<double>(m);
    t.f[v * m + v] = 1;
  }
  return t;
}

namespace {

std::size_t draw_weighted(std::span<const double> weights, double total, RandomTape& tape) {
  const double u = tape.uniform_real() * total;
  double acc = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    acc += weights[i];
    if (u < acc) return i;
  }
  // Rounding can leave u just above the running sum; take the last positive weight.
  for (std::size_t i = weights.size(); i-- > 0;) {
    if (weights[i] > 0.0) return i;
  }
  throw std::invalid_argument("all weights are zero");
}

std::size_t draw_conditional(const JointTable& table, std::size_t x, RandomTape& tape) {
  const std::span<const double> row(table.p.data() + x * table.ny, table.ny);
  const double mass = std::accumulate(row.begin(), row.end(), 0.0);
  if (mass <= 0.0) throw std::invalid_argument("conditional on a zero-probability x");
  return draw_weighted(row, mass, tape);
}

class DirectSumCarol final : public EndpointLogic {
 public:
  DirectSumCarol(const JointTable& table, bool or_mode) : table_(table), or_mode_(or_mode) {}

  Action act(const View& view) override {
    const std::size_t k = view.players() - 1;
    if (view.history().size() < k) return Action::wait();
    BitReader in(view.input());
    const auto x = static_cast<std::size_t>(coding::read_fixed(in, static_cast<unsigned>(view.input_bits())));
    BitVector values(k);
    for (const Message* m : view.history()) {
      BitReader msg(m->payload);
      const auto y = static_cast<std::size_t>(coding::read_gamma(msg) - 1);
      if (y >= table_.ny) throw ProtocolError("direct sum: y out of range");
      values.set(m->sender - 1, table_.value(x, y));
    }
    if (or_mode_) {
      BitVector out(1);
      out.set(0, values.count() > 0);
      return Action::declare(out);
    }
    return Action::declare(values);
  }

 private:
  JointTable table_;
  bool or_mode_;
};

class DirectSumPlayer final : public EndpointLogic {
 public:
  Action act(const View& view) override {
    if (sent_) return Action::wait();
    sent_ = true;
    BitReader in(view.input());
    const auto y = coding::read_fixed(in, static_cast<unsigned>(view.input_bits()));
    BitVector payload;
    coding::write_gamma(payload, y + 1);
    return Action::send(0, std::move(payload));
  }

 private:
  bool sent_ = false;
};

class DirectSumProtocol final : public Protocol {
 public:
  DirectSumProtocol(JointTable table, bool or_mode) : table_(std::move(table)), or_mode_(or_mode) {}

  [[nodiscard]] std::string name() const override { return or_mode_ ? "direct-sum-or" : "direct-sum"; }
  [[nodiscard]] ModelKind model() const override { return ModelKind::message_passing; }
  [[nodiscard]] std::unique_ptr<EndpointLogic> make_endpoint(EndpointId id, std::size_t) const override {
    if (id == 0) return std::make_unique<DirectSumCarol>(table_, or_mode_);
    return std::make_unique<DirectSumPlayer>();
  }

 private:
  JointTable table_;
  bool or_mode_;
};

bool dummies_zero(const JointTable& table, const DirectSumInstance& inst) {
  for (std::size_t i = 1; i < inst.y.size(); ++i) {
    if (table.value(inst.x, inst.y[i])) return false;
  }
  return true;
}

}  // namespace

DirectSumInstance direct_sum_build(const JointTable& table, std::size_t k, RandomTape& tape) {
  table.validate();
  const std::size_t cell = draw_weighted(table.p, 1.0, tape);
  DirectSumInstance out;
  out.x = cell / table.ny;
  out.y.push_back(cell % table.ny);
  for (std::size_t i = 1; i < k; ++i) out.y.push_back(draw_conditional(table, out.x, tape));
  return out;
}

DirectSumInstance direct_sum_embed(const JointTable& table, std::size_t k, std::size_t x, std::size_t w,
                                   RandomTape& tape) {
  DirectSumInstance out;
  out.x = x;
  out.y.push_back(w);
  for (std::size_t i = 1; i < k; ++i) out.y.push_back(draw_conditional(table, x, tape));
  return out;
}

std::vector<BitVector> direct_sum_players(const DirectSumInstance& inst, std::size_t ny) {
  std::vector<BitVector> out;
  out.reserve(inst.y.size());
  for (auto y : inst.y) {
    BitVector v(ny);
    v.set(y);
    out.push_back(std::move(v));
  }
  return out;
}

std::unique_ptr<Protocol> direct_sum_protocol(const JointTable& table, bool or_mode) {
  table.validate();
  return std::make_unique<DirectSumProtocol>(table, or_mode);
}

Instance direct_sum_engine_instance(const DirectSumInstance& inst, const JointTable& table) {
  const unsigned width = std::max({1U, coding::ceil_log2(table.nx), coding::ceil_log2(table.ny)});
  Instance out{width, {}};
  BitVector carol;
  coding::write_fixed(carol, inst.x, width);
  out.players.push_back(std::move(carol));
  for (auto y : inst.y) {
    BitVector v;
    coding::write_fixed(v, y, width);
    out.players.push_back(std::move(v));
  }
  return out;
}

std::size_t direct_sum_repetitions(double c, double eps) {
  return static_cast<std::size_t>(std::ceil(c * std::log2(1.0 / eps) - 1e-9));
}

DirectSumOrResult direct_sum_or_driver(const JointTable& table, std::size_t k, std::size_t u, std::size_t w,
                                       std::size_t repetitions, RandomTape& tape) {
  table.validate();
  if (table.mass_of_ones() > 1.0 / (10.0 * static_cast<double>(k)) + 1e-12) {
    throw std::invalid_argument("direct sum OR: mu(f^-1(1)) exceeds 1/(10k)");
  }
  DirectSumOrResult out;
  out.repetitions = repetitions;
  std::optional<DirectSumInstance> chosen;
  for (std::size_t rep = 0; rep < repetitions; ++rep) {
    RandomTape rt = tape.derive("repetition", rep);
    auto inst = direct_sum_embed(table, k, u, w, rt);
    if (!dummies_zero(table, inst)) continue;
    ++out.good;
    if (tape.uniform(out.good) == 0) chosen = std::move(inst);
  }
  if (!chosen) {
    out.flagged = true;
    out.answer = tape.bernoulli(0.5);
    return out;
  }
  const auto proto = direct_sum_protocol(table, true);
  const auto run = run_protocol(ModelKind::message_passing, *proto, direct_sum_engine_instance(*chosen, table),
                                tape.derive("coins"));
  out.answer = run.answer.value.test(0);
  return out;
}

DirectSumReport direct_sum_experiment(const JointTable& table, std::size_t k, std::size_t trials, double c,
                                      double eps, const RandomTape& tape, std::size_t parallel) {
  table.validate();
  const auto proto = direct_sum_protocol(table, false);
  const std::size_t reps = direct_sum_repetitions(c, eps);
  struct Result {
    std::uint64_t seed = 0;
    std::uint64_t crossing = 0;
    std::uint64_t total = 0;
    bool single_good = false;
    bool fk_correct = true;
    DirectSumOrResult driver;
    bool truth = false;
  };
  std::vector<Result> results(trials);
  parallel_for(trials, parallel, [&](std::size_t t) {
    const RandomTape tt = tape.derive("trial", t);
    RandomTape input = tt.derive("input");
    const auto inst = direct_sum_build(table, k, input);
    const auto run = run_protocol(ModelKind::message_passing, *proto, direct_sum_engine_instance(inst, table),
                                  tt.derive("coins"));
    auto& r = results[t];
    r.seed = tt.seed();
    const std::vector<EndpointId> p1{1};
    const auto split = split_run(run, p1);
    r.crossing = split.crossing_bits;
    r.total = split.total_bits;
    r.single_good = dummies_zero(table, inst);
    for (std::size_t i = 0; i < k; ++i) {
      if (run.answer.value.test(i) != table.value(inst.x, inst.y[i])) r.fk_correct = false;
    }
    RandomTape pair_tape = tt.derive("pair");
    const auto cell = direct_sum_build(table, 1, pair_tape);
    RandomTape driver_tape = tt.derive("driver");
    r.driver = direct_sum_or_driver(table, k, cell.x, cell.y[0], reps, driver_tape);
    r.truth = table.value(cell.x, cell.y[0]);
  });

  DirectSumReport report;
  report.trials = trials;
  report.k = k;
  stats::RunningStats crossing;
  stats::RunningStats total;
  stats::RunningStats diff;
  std::size_t good = 0;
  bool fk_correct = true;
  const double share = 2.0 / static_cast<double>(k);
  for (std::size_t t = 0; t < trials; ++t) {
    const auto& r = results[t];
    crossing.add(static_cast<double>(r.crossing));
    total.add(static_cast<double>(r.total));
    diff.add(static_cast<double>(r.crossing) - share * static_cast<double>(r.total));
    good += r.single_good ? 1 : 0;
    fk_correct = fk_correct && r.fk_correct;
    if (r.driver.flagged) ++report.or_flagged;
    if (r.driver.answer != r.truth) ++report.or_errors;
    report.rows.push_back(
        TrialRow{t, r.seed, r.single_good, r.crossing, r.total, bit_text(r.driver.answer), bit_text(r.truth)});
  }
  report.mean_crossing = crossing.mean();
  report.mean_total = total.mean();
  report.share_bound = share * total.mean();
  report.share_ok = fk_correct && diff.mean() <= stats::kSigmaMultiplier * diff.standard_error();

  const distributions::PlayerSampler sampler = [&](RandomTape& t) {
    return direct_sum_players(direct_sum_build(table, k, t), table.ny);
  };
  report.symmetry = distributions::symmetry_check(sampler, k, trials, tape.derive("symmetry"));

  report.single_good_freq = static_cast<double>(good) / static_cast<double>(trials);
  report.single_good_se = stats::proportion_se(0.9, trials);
  report.good_ok = report.single_good_freq >= 0.9 - stats::kSigmaMultiplier * report.single_good_se;
  report.or_error_freq = static_cast<double>(report.or_errors) / static_cast<double>(trials);
  report.or_ok = report.or_error_freq <= eps;
  report.pass = report.share_ok && report.symmetry.pass && report.good_ok && report.or_ok;
  return report;
}

}  // namespace commsim::reductions
