#include "commsim/experiments.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <functional>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "commsim/distributions.hpp"
#include "commsim/engine.hpp"
#include "commsim/errors.hpp"
#include "commsim/geoapps.hpp"
#include "commsim/parallel.hpp"
#include "commsim/problems.hpp"
#include "commsim/reductions.hpp"
#include "commsim/refprotocols.hpp"
#include "commsim/stats.hpp"

namespace commsim::experiments {

using distributions::DistSpec;

// --- parameters -------------------------------------------------------------

Params Params::parse(std::span<const std::string> words) {
  Params out;
  for (const auto& w : words) {
    const auto eq = w.find('=');
    if (eq == std::string::npos || eq == 0) throw std::invalid_argument("expected key=value, got '" + w + "'");
    out.values_[w.substr(0, eq)] = w.substr(eq + 1);
  }
  return out;
}

Params Params::from_json(const nlohmann::json& object) {
  if (!object.is_object()) throw std::invalid_argument("parameters must be a JSON object");
  Params out;
  for (const auto& [key, value] : object.items()) {
    if (value.is_string()) {
      out.values_[key] = value.get<std::string>();
    } else if (value.is_number_unsigned() || value.is_number_integer() || value.is_number_float() ||
               value.is_boolean()) {
      out.values_[key] = value.dump();
    } else {
      throw std::invalid_argument("parameter " + key + " must be a scalar");
    }
  }
  return out;
}

void Params::merge(const Params& other) {
  for (const auto& [k, v] : other.values_) values_[k] = v;
}

std::string Params::text(const std::string& key, const std::string& fallback) {
  used_.insert(key);
  const auto it = values_.find(key);
  const std::string out = it == values_.end() ? fallback : it->second;
  resolved_[key] = out;
  return out;
}

std::size_t Params::size(const std::string& key, std::size_t fallback) {
  used_.insert(key);
  std::size_t out = fallback;
  if (const auto it = values_.find(key); it != values_.end()) {
    const auto& s = it->second;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
      throw std::invalid_argument("parameter " + key + " expects a nonnegative integer, got '" + s + "'");
    }
  }
  resolved_[key] = out;
  return out;
}

double Params::real(const std::string& key, double fallback) {
  used_.insert(key);
  double out = fallback;
  if (const auto it = values_.find(key); it != values_.end()) {
    const auto& s = it->second;
    const auto slash = s.find('/');
    try {
      std::size_t used = 0;
      if (slash != std::string::npos) {
        const double num = std::stod(s.substr(0, slash), &used);
        if (used != slash) throw std::invalid_argument(s);
        const std::string den_text = s.substr(slash + 1);
        const double den = std::stod(den_text, &used);
        if (used != den_text.size() || den == 0.0) throw std::invalid_argument(s);
        out = num / den;
      } else {
        out = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
      }
    } catch (const std::exception&) {
      throw std::invalid_argument("parameter " + key + " expects a number, got '" + s + "'");
    }
  }
  resolved_[key] = out;
  return out;
}

void Params::finish() const {
  std::string unknown;
  for (const auto& [k, v] : values_) {
    if (used_.count(k) == 0) unknown += (unknown.empty() ? "" : ", ") + k;
  }
  if (!unknown.empty()) throw std::invalid_argument("unknown parameter(s): " + unknown);
}

bool Report::pass() const {
  return !checks.empty() && std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
}

namespace {

std::string num(double x) {
  std::ostringstream out;
  out << std::setprecision(6) << x;
  return out.str();
}

std::string yes(bool b) { return b ? "1" : "0"; }

void check(Report& r, std::string name, bool pass, std::string detail) {
  r.checks.push_back({std::move(name), pass, std::move(detail)});
}

void trial_rows(Report& r, const std::vector<reductions::TrialRow>& rows) {
  r.csv_columns = {"trial", "seed", "good", "crossing_bits", "total_bits", "answer", "oracle_answer"};
  for (const auto& row : rows) {
    r.csv_rows.push_back({std::to_string(row.trial), std::to_string(row.seed), yes(row.good),
                          std::to_string(row.crossing_bits), std::to_string(row.total_bits), row.answer,
                          row.oracle_answer});
  }
}

double log2d(std::size_t k) { return std::log2(static_cast<double>(k)); }

// "direct_sum:m=16,k=8,q=1/80" names the direct-sum player inputs.
struct DirectSumShape {
  std::size_t m = 16;
  std::size_t k = 8;
  double q = 0.0;
};

std::optional<DirectSumShape> parse_direct_sum(const std::string& text) {
  const std::string head = "direct_sum";
  if (text.rfind(head, 0) != 0) return std::nullopt;
  DirectSumShape out;
  Params p;
  if (text.size() > head.size()) {
    if (text[head.size()] != ':') throw std::invalid_argument("malformed direct_sum spec");
    std::vector<std::string> words;
    std::stringstream ss(text.substr(head.size() + 1));
    for (std::string w; std::getline(ss, w, ',');) words.push_back(w);
    p = Params::parse(words);
  }
  out.m = p.size("m", out.m);
  out.k = p.size("k", out.k);
  out.q = p.real("q", 1.0 / (10.0 * static_cast<double>(out.k)));
  p.finish();
  return out;
}

// --- symmetry -----------------------------------------------------------------

void run_symmetry(Report& r, Params& p, const RandomTape& tape, const RunOptions&) {
  const std::string dist = p.text("dist", "uniform:n=64,k=8");
  r.trials = p.size("trials", 10000);
  distributions::SymmetryOptions opt;
  opt.alpha = p.real("alpha", stats::kSymmetryAlpha);
  opt.max_player_pairs = p.size("pairs", opt.max_player_pairs);
  opt.column_pairs = p.size("column_pairs", opt.column_pairs);
  p.finish();

  distributions::SymmetryReport rep;
  if (const auto ds = parse_direct_sum(dist)) {
    const auto table = reductions::sparse_equality_table(ds->m, ds->q);
    const distributions::PlayerSampler sampler = [&](RandomTape& t) {
      return reductions::direct_sum_players(reductions::direct_sum_build(table, ds->k, t), table.ny);
    };
    rep = distributions::symmetry_check(sampler, ds->k, r.trials, tape, opt);
  } else {
    rep = distributions::symmetry_check(DistSpec::parse(dist), r.trials, tape, opt);
  }
  r.statistics = {{"tests", rep.tests},       {"min_p", rep.min_p},   {"corrected_p", rep.corrected_p},
                  {"max_chi2", rep.max_chi2}, {"worst", rep.worst}, {"player_pairs", rep.pairs.size()}};
  check(r, "exchangeable", rep.pass,
        "Bonferroni-corrected p = " + num(rep.corrected_p) + " over " + std::to_string(rep.tests) +
            " tests, alpha = " + num(opt.alpha));
  r.csv_columns = {"player_a", "player_b", "max_chi2", "min_p"};
  for (const auto& pr : rep.pairs) {
    r.csv_rows.push_back({std::to_string(pr.a + 1), std::to_string(pr.b + 1), num(pr.max_chi2), num(pr.min_p)});
  }
}

// --- sym-ratio ------------------------------------------------------------------

void run_sym_ratio(Report& r, Params& p, const RandomTape& tape, const RunOptions& run) {
  const std::string name = p.text("protocol", "sendall");
  const auto op = problems::parse_bitwise_op(p.text("op", "xor"));
  const auto spec = DistSpec::parse(p.text("dist", "uniform:n=32,k=8"));
  r.trials = p.size("trials", 1000);
  reductions::SymmetrizeOptions opt;
  opt.symmetry_trials = p.size("symmetry_trials", 1000);
  opt.sigma = p.real("sigma", stats::kSigmaMultiplier);
  opt.parallel = run.parallel;
  p.finish();

  const auto proto = refprotocols::make_protocol(name, op);
  opt.target = refprotocols::protocol_target(name, op);
  reductions::SymmetrizationReport rep;
  try {
    rep = reductions::symmetrize(*proto, spec, r.trials, tape, opt);
  } catch (const AsymmetricDistribution& e) {
    check(r, "symmetric_input", false, e.what());
    r.csv_columns = {"trial", "seed", "good", "crossing_bits", "total_bits", "answer", "oracle_answer"};
    return;
  }
  const std::size_t k = spec.k;
  r.statistics = {{"players", k},
                  {"model", std::string(to_string(proto->model()))},
                  {"mean_crossing", rep.mean_crossing},
                  {"mean_total", rep.mean_total},
                  {"share", rep.mean_total > 0 ? rep.mean_crossing / rep.mean_total : 0.0},
                  {"bound", rep.bound},
                  {"diff_se", rep.diff_se},
                  {"correct", rep.correct},
                  {"failed", rep.failed},
                  {"exact_share", rep.exact_share}};
  if (opt.symmetry_trials > 0) check(r, "symmetric_input", true, "pre-check passed");
  check(r, "crossing_within_2_over_k", rep.ratio_ok,
        "mean crossing " + num(rep.mean_crossing) + " vs (2/k) mean total " + num(rep.bound) + " + " +
            num(opt.sigma) + " se (" + num(rep.diff_se) + ")");
  if (name == "sendall") {
    check(r, "crossing_equals_total_over_k", rep.exact_share,
          "crossing * k == total on every trial: " + std::string(rep.exact_share ? "yes" : "no"));
  }
  check(r, "answers_exact", rep.correct + rep.failed == rep.trials,
        std::to_string(rep.correct) + " correct, " + std::to_string(rep.failed) + " declared failures");
  trial_rows(r, rep.rows);
}

// --- or-reduction -----------------------------------------------------------------

void run_or_reduction(Report& r, Params& p, const RandomTape& tape, const RunOptions& run) {
  const std::size_t n = p.size("n", 12800);
  const std::size_t k = p.size("k", 4);
  r.trials = p.size("trials", 10000);
  const std::string via = p.text("protocol", "oracle");
  p.finish();
  std::unique_ptr<Protocol> proto;
  if (via != "oracle") proto = refprotocols::make_protocol(via, problems::BitwiseOp::or_op());
  if (proto && refprotocols::protocol_target(via, problems::BitwiseOp::or_op()).kind != problems::BitwiseKind::OR) {
    throw std::invalid_argument("protocol " + via + " does not compute OR");
  }
  const auto rep = reductions::or_reduction(n, k, r.trials, tape, proto.get(), run.parallel);
  r.statistics = {{"disagreements", rep.disagreements},
                  {"disagreement_rate", rep.disagreement_rate},
                  {"bound", rep.bound},
                  {"se", rep.se},
                  {"disjoint_trials", rep.disjoint_trials},
                  {"false_positives", rep.false_positives}};
  check(r, "error_within_4k_over_n", rep.disagreement_rate <= rep.bound + stats::kSigmaMultiplier * rep.se,
        "rate " + num(rep.disagreement_rate) + " vs 4k/n = " + num(rep.bound) + " + 3 se (" + num(rep.se) + ")");
  check(r, "no_false_positives", rep.false_positives == 0,
        std::to_string(rep.false_positives) + " of " + std::to_string(rep.disjoint_trials) + " disjoint trials");
  trial_rows(r, rep.rows);
}

// --- conn ---------------------------------------------------------------------------

void run_conn_lemma(Report& r, Params& p, const RandomTape& tape, const RunOptions& run) {
  const std::size_t n = p.size("n", 64);
  const std::size_t k = p.size("k", distributions::conn_default_players(n));
  r.trials = p.size("trials", 1000);
  p.finish();
  const auto rep = reductions::conn_lemma(n, k, r.trials, tape, run.parallel);
  r.statistics = {{"k", k},
                  {"xi1_freq", rep.xi1_freq},
                  {"good_freq", rep.good_freq},
                  {"good_se", rep.good_se},
                  {"conditional_violations", rep.conditional_violations}};
  check(r, "xi1_at_least_0.99", rep.xi1_freq >= 0.99, "Pr[xi1] = " + num(rep.xi1_freq));
  check(r, "good_at_least_8_9", rep.good_freq >= 8.0 / 9.0 - stats::kSigmaMultiplier * rep.good_se,
        "good rate " + num(rep.good_freq) + " vs 8/9 - 3 se (" + num(rep.good_se) + ")");
  check(r, "good_implies_equivalence", rep.conditional_violations == 0,
        std::to_string(rep.conditional_violations) + " good trials where connectivity differs from intersection");
  trial_rows(r, rep.rows);
}

void run_conn_reduction(Report& r, Params& p, const RandomTape& tape, const RunOptions& run) {
  const std::size_t n = p.size("n", 64);
  const std::size_t k = p.size("k", distributions::conn_default_players(n));
  const double c = p.real("c", 10.0);
  r.trials = p.size("trials", 1000);
  p.finish();
  const auto rep = reductions::conn_reduction(n, k, c, r.trials, tape, run.parallel);
  r.statistics = {{"k", k},
                  {"repetitions", rep.repetitions},
                  {"agreement_rate", rep.agreement_rate},
                  {"good_trials", rep.good_trials},
                  {"good_agreements", rep.good_agreements},
                  {"flagged", rep.flagged},
                  {"flagged_bound", rep.flagged_bound}};
  check(r, "agreement_at_least_0.98", rep.agreement_rate >= 0.98, "agreement " + num(rep.agreement_rate));
  check(r, "good_trials_exact", rep.good_agreements == rep.good_trials,
        std::to_string(rep.good_agreements) + " of " + std::to_string(rep.good_trials));
  check(r, "flagged_within_bound", rep.flagged_freq <= rep.flagged_bound,
        "flagged " + num(rep.flagged_freq) + " vs " + num(rep.flagged_bound));
  trial_rows(r, rep.rows);
}

// --- maj ----------------------------------------------------------------------------

void run_maj_reduction(Report& r, Params& p, const RandomTape& tape, const RunOptions& run) {
  const std::size_t n = p.size("n", 400);
  const std::size_t k = p.size("k", 7);
  r.trials = p.size("trials", 1000);
  p.finish();
  const auto rep = reductions::maj_reduction(n, k, r.trials, tape, run.parallel);
  r.statistics = {{"large_undecided", rep.large_undecided},
                  {"large_freq", rep.large_freq},
                  {"alice_ones_fraction", rep.alice_ones_fraction},
                  {"majority_mismatches", rep.majority_mismatches}};
  check(r, "undecided_large", rep.large_freq >= 6.0 / 7.0,
        "|S| >= n/4 in " + num(rep.large_freq) + " of trials (need 6/7)");
  check(r, "alice_unbiased", std::abs(rep.alice_ones_fraction - 0.5) <= 0.03,
        "ones fraction " + num(rep.alice_ones_fraction));
  check(r, "majority_is_alice_bit", rep.majority_mismatches == 0,
        std::to_string(rep.majority_mismatches) + " trials with a mismatch");
  trial_rows(r, rep.rows);
}

// --- upper-bounds ---------------------------------------------------------------------

struct CostRun {
  std::uint64_t seed = 0;
  std::uint64_t total = 0;
  bool failed = false;
  bool correct = false;
};

std::vector<CostRun> cost_runs(const Protocol& proto, problems::BitwiseOp target, const DistSpec& spec,
                               std::size_t trials, const RandomTape& tape, std::size_t parallel) {
  std::vector<CostRun> out(trials);
  parallel_for(trials, parallel, [&](std::size_t t) {
    const RandomTape tt = tape.derive("trial", t);
    RandomTape input = tt.derive("input");
    const auto inst = distributions::sample(spec, input).bits;
    const auto run = run_protocol(proto.model(), proto, inst, tt.derive("coins"));
    out[t].seed = tt.seed();
    out[t].total = cost(run.transcript).total_bits;
    out[t].failed = run.answer.failed;
    out[t].correct = !run.answer.failed && run.answer.value == problems::eval_bitwise(target, inst);
  });
  return out;
}

void run_upper_bounds(Report& r, Params& p, const RandomTape& tape, const RunOptions& run) {
  const std::size_t n = p.size("n", 1024);
  const std::string ks_text = p.text("ks", "4,16,64");
  const std::size_t entropy_k = p.size("entropy_k", 16);
  const std::size_t sw_n = p.size("sw_n", 256);
  const std::size_t sw_k = p.size("sw_k", 32);
  refprotocols::SlepianWolfParams swp;
  swp.c_sw = p.real("c_sw", swp.c_sw);
  r.trials = p.size("trials", 200);
  p.finish();

  std::vector<std::size_t> ks;
  {
    std::stringstream ss(ks_text);
    for (std::string w; std::getline(ss, w, ',');) ks.push_back(std::stoul(w));
  }
  r.csv_columns = {"protocol", "dist", "trial", "seed", "total_bits", "failed", "correct"};
  nlohmann::json runs = nlohmann::json::array();

  auto record = [&](const std::string& label, const DistSpec& spec, const std::vector<CostRun>& rs) {
    stats::RunningStats total;
    std::size_t failed = 0;
    std::size_t wrong = 0;
    std::uint64_t max_total = 0;
    for (std::size_t t = 0; t < rs.size(); ++t) {
      total.add(static_cast<double>(rs[t].total));
      max_total = std::max(max_total, rs[t].total);
      failed += rs[t].failed ? 1 : 0;
      wrong += !rs[t].failed && !rs[t].correct ? 1 : 0;
      r.csv_rows.push_back({label, spec.to_string(), std::to_string(t), std::to_string(rs[t].seed),
                            std::to_string(rs[t].total), yes(rs[t].failed), yes(rs[t].correct)});
    }
    runs.push_back({{"protocol", label},
                    {"dist", spec.to_string()},
                    {"mean_total", total.mean()},
                    {"max_total", max_total},
                    {"failed", failed},
                    {"wrong", wrong}});
    check(r, label + "_exact_" + spec.to_string(), wrong == 0,
          std::to_string(wrong) + " wrong answers among " + std::to_string(rs.size() - failed) + " completed runs");
    return std::tuple{total.mean(), max_total, failed};
  };

  const auto bb = refprotocols::blackboard_or();
  for (auto k : ks) {
    const auto spec = DistSpec::parse("nu:n=" + std::to_string(n) + ",k=" + std::to_string(k));
    const auto rs = cost_runs(*bb, problems::BitwiseOp::or_op(), spec, r.trials, tape.derive("bb-or", k), run.parallel);
    const auto [mean, max_total, failed] = record("bb-or", spec, rs);
    const double bound = 4.0 * static_cast<double>(n) * log2d(k);
    check(r, "bb-or_cost_k" + std::to_string(k), mean <= bound,
          "mean " + num(mean) + " vs 4 n log2 k = " + num(bound));
  }

  {
    const auto spec = DistSpec::parse("naive_onek:n=" + std::to_string(n) + ",k=" + std::to_string(entropy_k));
    const auto proto = refprotocols::entropy_coded_or();
    const auto rs = cost_runs(*proto, problems::BitwiseOp::or_op(), spec, r.trials, tape.derive("entropy-or"),
                              run.parallel);
    const auto [mean, max_total, failed] = record("entropy-or", spec, rs);
    const double bound = 4.0 * static_cast<double>(n) * log2d(entropy_k);
    check(r, "entropy-or_cost", mean <= bound, "mean " + num(mean) + " vs 4 n log2 k = " + num(bound));
  }

  {
    const auto spec = DistSpec::parse("balancing:n=" + std::to_string(sw_n) + ",k=" + std::to_string(sw_k));
    const auto proto = refprotocols::slepian_wolf_or(swp);
    const auto rs =
        cost_runs(*proto, problems::BitwiseOp::or_op(), spec, r.trials, tape.derive("sw-or"), run.parallel);
    const auto [mean, max_total, failed] = record("sw-or", spec, rs);
    const double half = static_cast<double>(sw_n * sw_k) / 2.0;
    const double fail_rate = rs.empty() ? 0.0 : static_cast<double>(failed) / static_cast<double>(rs.size());
    check(r, "sw-or_below_nk_over_2", static_cast<double>(max_total) < half,
          "max total " + std::to_string(max_total) + " vs nk/2 = " + num(half));
    check(r, "sw-or_failures_at_most_5pct", fail_rate <= 0.05, "failure rate " + num(fail_rate));
    const std::size_t probes = refprotocols::sw_probe_count(sw_n, sw_k);
    const auto hundred_log =
        static_cast<std::size_t>(std::ceil(100.0 * std::log2(static_cast<double>(sw_n))));
    r.statistics["sw_probe_players"] = probes;
    r.statistics["sw_parity_bits"] = refprotocols::sw_parity_count(sw_n, sw_k, swp.c_sw);
    r.statistics["sw_probe_note"] = "probes " + std::to_string(probes) + " players instead of min(k-1, " +
                                    std::to_string(hundred_log) +
                                    ") so that the total stays below nk/2 at this scale";
  }
  r.statistics["runs"] = runs;
}

// --- direct-sum -------------------------------------------------------------------------

void run_direct_sum(Report& r, Params& p, const RandomTape& tape, const RunOptions& run) {
  const std::size_t m = p.size("m", 16);
  const std::size_t k = p.size("k", 8);
  const double q = p.real("q", 1.0 / (10.0 * static_cast<double>(k)));
  const double c = p.real("c", 4.0);
  const double eps = p.real("eps", 0.05);
  r.trials = p.size("trials", 1000);
  p.finish();
  const auto table = reductions::sparse_equality_table(m, q);
  const auto rep = reductions::direct_sum_experiment(table, k, r.trials, c, eps, tape, run.parallel);
  r.statistics = {{"mean_crossing", rep.mean_crossing},
                  {"mean_total", rep.mean_total},
                  {"share_bound", rep.share_bound},
                  {"symmetry_corrected_p", rep.symmetry.corrected_p},
                  {"single_good_freq", rep.single_good_freq},
                  {"single_good_se", rep.single_good_se},
                  {"repetitions", reductions::direct_sum_repetitions(c, eps)},
                  {"or_errors", rep.or_errors},
                  {"or_flagged", rep.or_flagged},
                  {"or_error_freq", rep.or_error_freq}};
  check(r, "p1_share_within_2_over_k", rep.share_ok,
        "mean crossing " + num(rep.mean_crossing) + " vs (2/k) mean total " + num(rep.share_bound));
  check(r, "inputs_exchangeable", rep.symmetry.pass, "corrected p = " + num(rep.symmetry.corrected_p));
  check(r, "good_repetition_rate", rep.good_ok,
        "single-repetition good rate " + num(rep.single_good_freq) + " vs 0.9 - 3 se");
  check(r, "or_combining_error", rep.or_ok, "error rate " + num(rep.or_error_freq) + " vs eps = " + num(eps));
  trial_rows(r, rep.rows);
}

// --- kernels ------------------------------------------------------------------------------

void run_kernels(Report& r, Params& p, const RandomTape& tape, const RunOptions& run) {
  const double eps = p.real("eps", 0.1);
  const std::size_t points = p.size("points", 1000);
  const double or_eps = p.real("or_eps", 0.05);
  const std::size_t or_k = p.size("or_k", 8);
  const double or_p = p.real("or_p", 0.1);
  r.trials = p.size("trials", 100);
  p.finish();

  const std::size_t or_n = geoapps::max_or_directions(or_eps);
  const auto fine = geoapps::grid_directions(10 * geoapps::min_direction_count(eps));
  struct Result {
    std::uint64_t seed = 0;
    std::size_t kernel_size = 0;
    geoapps::KernelCheck kernel;
    geoapps::KernelCheck compose;
    geoapps::KernelCheck transitive;
    bool decode_ok = false;
  };
  std::vector<Result> results(r.trials);
  parallel_for(r.trials, run.parallel, [&](std::size_t t) {
    const RandomTape tt = tape.derive("trial", t);
    auto& res = results[t];
    res.seed = tt.seed();
    RandomTape disk = tt.derive("disk");
    const auto pts = geoapps::disk_points(points, {0.0, 0.0}, 1.0, disk);
    const auto k = geoapps::epsilon_kernel(pts, eps);
    res.kernel_size = k.size();
    res.kernel = geoapps::is_kernel(pts, k, eps, fine);
    RandomTape comp = tt.derive("compose");
    res.compose = geoapps::composability_trial(eps, points / 2, comp);
    RandomTape trans = tt.derive("transitive");
    res.transitive = geoapps::transitivity_trial(eps / 2, eps / 2, points, trans);
    RandomTape bits_tape = tt.derive("or-bits");
    std::vector<BitVector> rows;
    for (std::size_t i = 0; i < or_k; ++i) rows.push_back(distributions::bernoulli_bits(or_n, or_p, bits_tape));
    const auto inst = geoapps::build_kernel_instance_from_or(rows, or_eps);
    const auto kidx = geoapps::epsilon_kernel_indices(inst.all, or_eps, geoapps::or_kernel_direction_count(inst));
    res.decode_ok = geoapps::decode_kernel(inst, kidx) == problems::eval_bitwise(problems::BitwiseOp::or_op(), rows);
  });

  std::size_t kernel_ok = 0;
  std::size_t compose_ok = 0;
  std::size_t transitive_ok = 0;
  std::size_t decode_ok = 0;
  const geoapps::KernelCheck* worst = nullptr;
  r.csv_columns = {"trial", "seed", "kernel_size", "kernel_ok", "worst_ratio", "compose_ok", "transitive_ok",
                   "decode_ok"};
  for (std::size_t t = 0; t < r.trials; ++t) {
    const auto& res = results[t];
    kernel_ok += res.kernel.ok ? 1 : 0;
    compose_ok += res.compose.ok ? 1 : 0;
    transitive_ok += res.transitive.ok ? 1 : 0;
    decode_ok += res.decode_ok ? 1 : 0;
    if (worst == nullptr || res.kernel.worst_ratio > worst->worst_ratio) worst = &res.kernel;
    r.csv_rows.push_back({std::to_string(t), std::to_string(res.seed), std::to_string(res.kernel_size),
                          yes(res.kernel.ok), num(res.kernel.worst_ratio), yes(res.compose.ok),
                          yes(res.transitive.ok), yes(res.decode_ok)});
  }
  r.statistics = {{"or_directions", or_n}, {"kernel_directions", geoapps::min_direction_count(eps)},
                  {"test_directions", fine.size()}};
  if (worst != nullptr) r.statistics["worst_kernel"] = geoapps::to_json(*worst);
  const auto of = [&](std::size_t x) { return std::to_string(x) + " of " + std::to_string(r.trials); };
  check(r, "grid_kernel_is_kernel", kernel_ok == r.trials, of(kernel_ok));
  check(r, "composability", compose_ok == r.trials, of(compose_ok));
  check(r, "transitivity", transitive_ok == r.trials, of(transitive_ok));
  check(r, "or_decode", decode_ok == r.trials, of(decode_ok));

  // The first trial's k-OR point sets, for plotting.
  RandomTape bits_tape = tape.derive("trial", 0).derive("or-bits");
  std::vector<BitVector> rows;
  for (std::size_t i = 0; i < or_k; ++i) rows.push_back(distributions::bernoulli_bits(or_n, or_p, bits_tape));
  const auto inst = geoapps::build_kernel_instance_from_or(rows, or_eps);
  std::ostringstream pts;
  geoapps::write_points_csv(pts, inst.players);
  r.attachments["kernels_points.csv"] = pts.str();
}

// --- heavy-hitters ------------------------------------------------------------------------

void run_heavy_hitters(Report& r, Params& p, const RandomTape& tape, const RunOptions& run) {
  const std::size_t n = p.size("n", 64);
  const std::size_t k = p.size("k", 20);
  const double phi = p.real("phi", 0.3);
  const double eps = p.real("eps", 0.1);
  r.trials = p.size("trials", 1000);
  p.finish();
  std::vector<geoapps::HhGroupResult> results(r.trials);
  std::vector<std::uint64_t> seeds(r.trials);
  parallel_for(r.trials, run.parallel, [&](std::size_t t) {
    const RandomTape tt = tape.derive("trial", t);
    seeds[t] = tt.seed();
    RandomTape input = tt.derive("input");
    results[t] = geoapps::hh_group_reduction(n, k, phi, eps, input);
    results[t].grouped = {};
  });
  std::size_t binary = 0;
  std::size_t match = 0;
  std::size_t clean = 0;
  std::size_t exact = 0;
  std::size_t maj_applicable = 0;
  std::size_t maj_ok = 0;
  std::set<std::size_t> totals_seen;
  r.csv_columns = {"trial", "seed", "yes_columns", "counts_binary", "verdicts_match", "no_either", "totals_exact"};
  for (std::size_t t = 0; t < r.trials; ++t) {
    const auto& res = results[t];
    binary += res.counts_binary ? 1 : 0;
    match += res.verdicts_match ? 1 : 0;
    clean += res.no_either ? 1 : 0;
    exact += res.totals_exact ? 1 : 0;
    if (res.maj_match) {
      ++maj_applicable;
      maj_ok += *res.maj_match ? 1 : 0;
    }
    totals_seen.insert(res.totals.begin(), res.totals.end());
    const auto yes_cols = std::count(res.grouped_verdicts.begin(), res.grouped_verdicts.end(), problems::Verdict::YES);
    r.csv_rows.push_back({std::to_string(t), std::to_string(seeds[t]), std::to_string(yes_cols),
                          yes(res.counts_binary), yes(res.verdicts_match), yes(res.no_either),
                          yes(res.totals_exact)});
  }
  const double kphi = static_cast<double>(k) * phi;
  r.statistics = {{"groups", static_cast<std::size_t>(std::llround(1.0 / eps))},
                  {"group_size", static_cast<std::size_t>(std::llround(static_cast<double>(k) * eps))},
                  {"k_phi", kphi},
                  {"k_phi_1_minus_eps", kphi * (1.0 - eps)},
                  {"totals_seen", totals_seen}};
  const auto of = [&](std::size_t x) { return std::to_string(x) + " of " + std::to_string(r.trials); };
  check(r, "group_counts_binary", binary == r.trials, of(binary));
  check(r, "verdicts_match_ungrouped", match == r.trials, of(match));
  check(r, "totals_outside_either_band", clean == r.trials, of(clean));
  std::string seen;
  for (auto v : totals_seen) seen += (seen.empty() ? "" : ",") + std::to_string(v);
  check(r, "totals_exactly_kphi_or_kphi_1_minus_eps", exact == r.trials,
        of(exact) + "; totals seen {" + seen + "} vs {" + num(kphi) + "," + num(kphi * (1.0 - eps)) + "}");
  if (maj_applicable > 0) check(r, "majority_instance", maj_ok == maj_applicable, of(maj_ok));
}

// --- registry ----------------------------------------------------------------------------

using Runner = void (*)(Report&, Params&, const RandomTape&, const RunOptions&);

struct Experiment {
  std::string_view id;
  std::string_view claim;
  std::string_view params;
  std::string_view pass;
  Runner run;
};

constexpr std::array<Experiment, 10> kExperiments{{
    {"symmetry",
     "A hard input distribution is symmetric: permuting the players leaves the joint law of the inputs unchanged.",
     "dist=<spec> (uniform:n=64,k=8; also direct_sum:m=16,k=8,q=1/80), trials=10000, alpha=0.01, pairs=16, "
     "column_pairs=16",
     "Bonferroni-corrected minimum p-value of per-coordinate McNemar and column-pair Bowker tests >= alpha.",
     run_symmetry},
    {"sym-ratio",
     "Symmetrization: when Alice plays one random player (two for blackboard) and Bob the rest, the expected "
     "two-party cost is at most a 2/k share of the k-party cost.",
     "protocol=sendall|bb-or|entropy-or|sw-or, op=xor|and|or|maj:<phi>, dist=<spec> (uniform:n=32,k=8), "
     "trials=1000, symmetry_trials=1000, sigma=3",
     "mean(crossing - (2/k) total) <= sigma standard errors; answers exact; for sendall crossing*k == total.",
     run_sym_ratio},
    {"or-reduction",
     "2-DISJ reduces to k-OR: Alice's set is player 1, Bob's players draw from the complement of y with one "
     "planted special element; the OR then decides disjointness with error at most 4k/n.",
     "n=12800, k=4, trials=10000, protocol=oracle|<registry name>",
     "disagreement rate <= 4k/n + 3 se and no false positive on disjoint pairs.", run_or_reduction},
    {"conn-lemma",
     "In the k-CONN construction with k >= 68 ln n + 1, Bob's players connect each side with probability at "
     "least 1 - 1/(2n), and the input is good with probability at least 8/9.",
     "n=64, k=ceil(68 ln n)+1, trials=1000",
     "Pr[xi1] >= 0.99, good rate >= 8/9 - 3 se, and good inputs are connected exactly when x and y intersect.",
     run_conn_lemma},
    {"conn-reduction",
     "2-DISJ reduces to k-CONN: repeat the construction c log2 k times and solve one good repetition.",
     "n=64, k=ceil(68 ln n)+1, c=10, trials=1000",
     "agreement with DISJ >= 0.98, exact on trials with a good repetition, flagged rate within bound.",
     run_conn_reduction},
    {"maj-reduction",
     "2-BITS reduces to k-MAJ: where Bob's players hold exactly floor(k/2) ones the majority is Alice's bit, "
     "and such coordinates make up a constant fraction.",
     "n=400, k=7 (odd), trials=1000",
     "|undecided| >= n/4 with frequency >= 6/7, Alice's ones fraction within 0.5 +- 0.03, majority equals "
     "Alice's bit everywhere on the undecided set.",
     run_maj_reduction},
    {"upper-bounds",
     "Reference protocols: blackboard OR and entropy-coded OR cost O(n log k); the parity protocol over the "
     "balancing distribution costs less than nk/2.",
     "n=1024, ks=4,16,64, entropy_k=16, sw_n=256, sw_k=32, c_sw=2.8, trials=200",
     "mean cost <= 4 n log2 k for bb-or and entropy-or, sw-or total < nk/2 with failure rate <= 5%, every "
     "completed run exact.",
     run_upper_bounds},
    {"direct-sum",
     "Direct sum: with Carol holding x and k players holding conditionally independent y_i, one player's "
     "share of the communication is at most 2/k; the OR-combining variant recovers f from a good repetition.",
     "m=16, k=8, q=1/(10k), c=4, eps=0.05, trials=1000",
     "P_1 crossing share <= (2/k) total + 3 se, (y_1..y_k) exchangeable, single-repetition good rate >= 0.9 - "
     "3 se, OR-combining error <= eps.",
     run_direct_sum},
    {"kernels",
     "eps-kernels: a subset K of P with wid(P,u) - wid(K,u) <= eps wid(P,u) in every direction u; kernels "
     "compose under union and chain with eps1 + eps2; a kernel of the k-OR point construction (norms 1 and "
     "1 - 2 eps) reveals the OR.",
     "eps=0.1, points=1000, trials=100, or_eps=0.05, or_k=8, or_p=0.1",
     "grid kernel passes on a 10m test grid, composability and transitivity pass, decoded bits equal the OR, "
     "all on every trial.",
     run_kernels},
    {"heavy-hitters",
     "Heavy hitters: grouping the k players into 1/eps groups of k eps identical players yields a 1/eps-player "
     "instance whose per-coordinate totals are k phi or k phi (1 - eps).",
     "n=64, k=20, phi=0.3, eps=0.1, trials=1000",
     "group counts are 0 or k eps, verdicts match the ungrouped instance and avoid the undecided band, totals "
     "are exactly k phi or k phi (1 - eps).",
     run_heavy_hitters},
}};

const Experiment& find(std::string_view id) {
  for (const auto& e : kExperiments) {
    if (e.id == id) return e;
  }
  throw std::invalid_argument("unknown experiment '" + std::string(id) + "'");
}

}  // namespace

std::vector<std::string> experiment_ids() {
  std::vector<std::string> out;
  for (const auto& e : kExperiments) out.emplace_back(e.id);
  return out;
}

bool is_experiment(std::string_view id) {
  return std::any_of(kExperiments.begin(), kExperiments.end(), [&](const Experiment& e) { return e.id == id; });
}

std::string describe(std::string_view id) {
  const auto& e = find(id);
  std::ostringstream out;
  out << e.id << "\n  claim:      " << e.claim << "\n  parameters: " << e.params << "\n  pass:       " << e.pass
      << '\n';
  return out.str();
}

Report run_experiment(std::string_view id, Params params, const RunOptions& options) {
  const auto& e = find(id);
  Report r;
  r.experiment = std::string(id);
  r.seed = options.seed;
  e.run(r, params, RandomTape(options.seed).derive(e.id), options);
  r.parameters = params.resolved();
  return r;
}

nlohmann::json to_json(const Report& report) {
  nlohmann::json checks = nlohmann::json::array();
  for (const auto& c : report.checks) checks.push_back({{"name", c.name}, {"pass", c.pass}, {"detail", c.detail}});
  return {{"experiment", report.experiment},
          {"parameters", report.parameters},
          {"seed", report.seed},
          {"trials", report.trials},
          {"statistics", report.statistics},
          {"checks", checks},
          {"csv_columns", report.csv_columns},
          {"pass", report.pass()}};
}

void write_csv(std::ostream& out, const Report& report) {
  auto line = [&](const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
    out << '\n';
  };
  line(report.csv_columns);
  for (const auto& row : report.csv_rows) line(row);
}

std::string csv_text(const Report& report) {
  std::ostringstream out;
  write_csv(out, report);
  return out.str();
}

}  // namespace commsim::experiments
