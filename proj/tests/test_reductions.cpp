#include <doctest.h>

#include <cmath>
#include <map>

#include "commsim/errors.hpp"
#include "commsim/problems.hpp"
#include "commsim/reductions.hpp"
#include "commsim/refprotocols.hpp"
#include "commsim/stats.hpp"

using namespace commsim;
using distributions::DistSpec;
namespace rd = commsim::reductions;

namespace {

rd::SymmetrizeOptions quick(std::size_t symmetry_trials = 400) {
  rd::SymmetrizeOptions o;
  o.symmetry_trials = symmetry_trials;
  return o;
}

std::vector<std::uint64_t> histogram(const std::vector<std::uint64_t>& values, std::uint64_t lo, std::uint64_t width,
                                     std::size_t bins) {
  std::vector<std::uint64_t> h(bins, 0);
  for (auto v : values) {
    const auto b = v < lo ? 0 : std::min<std::uint64_t>((v - lo) / width, bins - 1);
    ++h[b];
  }
  return h;
}

}  // namespace

TEST_CASE("csv rows") {
  CHECK(rd::csv_header() == "trial,seed,good,crossing_bits,total_bits,answer,oracle_answer");
  const rd::TrialRow row{3, 99, false, 7, 40, "1", "0"};
  CHECK(rd::to_csv(row) == "3,99,0,7,40,1,0");
}

TEST_CASE("sendall symmetrization charges Alice exactly one input") {
  const auto proto = refprotocols::sendall(problems::BitwiseOp::or_op());
  const auto spec = DistSpec::parse("uniform:n=32,k=6");
  const auto r = rd::symmetrize(*proto, spec, 200, RandomTape(5), quick());
  CHECK(r.exact_share);
  CHECK(r.mean_crossing == doctest::Approx(32.0));
  CHECK(r.mean_total == doctest::Approx(32.0 * 6));
  CHECK(r.ratio_ok);
  CHECK(r.correct == 200);
  CHECK(r.rows.size() == 200);
}

TEST_CASE("blackboard symmetrization stays under the 2/k share") {
  const auto proto = refprotocols::blackboard_or();
  const auto spec = DistSpec::parse("nu:n=64,k=8");
  const auto r = rd::symmetrize(*proto, spec, 400, RandomTape(17), quick());
  CHECK(r.ratio_ok);
  CHECK(r.correct == 400);
  CHECK(r.mean_crossing <= r.bound + 3 * r.diff_se);
}

TEST_CASE("k = 2 blackboard: both players are on Alice's side") {
  const auto proto = refprotocols::blackboard_or();
  const auto spec = DistSpec::parse("uniform:n=16,k=2");
  const auto r = rd::symmetrize(*proto, spec, 50, RandomTape(3), quick());
  for (const auto& row : r.rows) CHECK(row.crossing_bits == row.total_bits);
}

TEST_CASE("distinct pairs are distinct and cover every pair") {
  RandomTape t(8);
  std::map<std::pair<std::size_t, std::size_t>, int> seen;
  for (int i = 0; i < 3000; ++i) {
    const auto p = rd::draw_distinct_pair(4, t);
    REQUIRE(p.first != p.second);
    REQUIRE(p.first < 4);
    REQUIRE(p.second < 4);
    ++seen[p];
  }
  CHECK(seen.size() == 12);
  CHECK_THROWS(rd::draw_distinct_pair(1, t));
}

TEST_CASE("planted inputs are refused") {
  const auto proto = refprotocols::sendall(problems::BitwiseOp::or_op());
  const auto spec = DistSpec::parse("uniform:n=16,k=4,planted=1");
  CHECK_THROWS_AS(rd::symmetrize(*proto, spec, 10, RandomTape(1), quick()), AsymmetricDistribution);
}

TEST_CASE("relabeling players leaves the crossing-cost distribution unchanged") {
  const auto proto = refprotocols::blackboard_or();
  const auto spec = DistSpec::parse("nu:n=64,k=6");
  auto plain = quick(0);
  auto shuffled = quick(0);
  shuffled.relabel = std::vector<std::size_t>{3, 5, 0, 1, 4, 2};
  const auto a = rd::symmetrize(*proto, spec, 1500, RandomTape(21), plain);
  const auto b = rd::symmetrize(*proto, spec, 1500, RandomTape(22), shuffled);
  const auto ha = histogram(a.crossing, 0, 8, 8);
  const auto hb = histogram(b.crossing, 0, 8, 8);
  std::vector<std::uint64_t> ka;
  std::vector<std::uint64_t> kb;
  for (std::size_t i = 0; i < ha.size(); ++i) {
    if (ha[i] + hb[i] > 0) {
      ka.push_back(ha[i]);
      kb.push_back(hb[i]);
    }
  }
  CHECK(stats::two_sample_chi_square(ka, kb).p_value > 0.001);
  CHECK(b.correct == 1500);
}

TEST_CASE("relabel must match k") {
  const auto proto = refprotocols::blackboard_or();
  auto o = quick(0);
  o.relabel = std::vector<std::size_t>{0, 1};
  CHECK_THROWS(rd::symmetrize(*proto, DistSpec::parse("uniform:n=8,k=3"), 2, RandomTape(1), o));
}

TEST_CASE("xor symmetrization recovers Bob's vector") {
  RandomTape t(77);
  for (int i = 0; i < 200; ++i) REQUIRE(rd::xor_symmetrization_recovers(40, 2 + i % 7, t));
}

TEST_CASE("DISJ decision from the OR") {
  const auto y = BitVector::from_string("0110");
  const std::vector<std::size_t> special{1};
  CHECK_FALSE(rd::decide_disj_from_or(BitVector::from_string("1100"), y, special));
  CHECK(rd::decide_disj_from_or(BitVector::from_string("0010"), y, special));
  CHECK_FALSE(rd::decide_disj_from_or(BitVector::from_string("1001"), y, special));
}

TEST_CASE("OR reduction: no false positives and rate within 4k/n") {
  const auto r = rd::or_reduction(255, 4, 800, RandomTape(9));
  CHECK(r.false_positives == 0);
  CHECK(r.bound == doctest::Approx(16.0 / 255));
  CHECK(r.pass);

  const auto proto = refprotocols::sendall(problems::BitwiseOp::or_op());
  const auto via = rd::or_reduction(255, 4, 200, RandomTape(9), proto.get());
  const auto oracle = rd::or_reduction(255, 4, 200, RandomTape(9));
  for (std::size_t t = 0; t < 200; ++t) {
    REQUIRE(via.rows[t].answer == oracle.rows[t].answer);
    REQUIRE(via.rows[t].crossing_bits == 255);
  }
}

TEST_CASE("trial results do not depend on the worker count") {
  const auto a = rd::or_reduction(127, 5, 120, RandomTape(4), nullptr, 1);
  const auto b = rd::or_reduction(127, 5, 120, RandomTape(4), nullptr, 3);
  REQUIRE(a.rows.size() == b.rows.size());
  for (std::size_t i = 0; i < a.rows.size(); ++i) CHECK(rd::to_csv(a.rows[i]) == rd::to_csv(b.rows[i]));
}

TEST_CASE("repetition counts") {
  CHECK(rd::conn_repetitions(284, 10.0) == 82);
  CHECK(rd::conn_repetitions(2, 10.0) == 10);
  CHECK(rd::direct_sum_repetitions(4.0, 0.05) == 18);
}

TEST_CASE("good CONN instances are connected exactly when the pair intersects") {
  RandomTape t(31);
  std::size_t good = 0;
  for (int i = 0; i < 300; ++i) {
    const auto pair = distributions::sample_mu_pair(40, 600.0, t);
    const auto built = distributions::build_conn_instance(pair, 60, t);
    if (!built.witness.flags.good()) continue;
    ++good;
    REQUIRE(problems::eval_conn(built.graph) == problems::eval_disj2(pair.x, pair.y));
  }
  CHECK(good > 200);
}

TEST_CASE("CONN driver with an injected solver") {
  RandomTape t(12);
  const auto pair = distributions::sample_mu_pair(40, 600.0, t);
  std::size_t calls = 0;
  const rd::ConnSolver solver = [&](const GraphInstance& g) {
    ++calls;
    return problems::eval_conn(g);
  };
  const auto r = rd::conn_reduction_driver(pair, 60, 10.0, t, solver);
  CHECK(r.repetitions == rd::conn_repetitions(60, 10.0));
  if (r.flagged) {
    CHECK(calls == 0);
  } else {
    CHECK(calls == 1);
    CHECK(r.answer == problems::eval_disj2(pair.x, pair.y));
    CHECK(r.chosen->witness.flags.good());
  }
}

TEST_CASE("CONN lemma at moderate size") {
  const auto r = rd::conn_lemma(40, 60, 300, RandomTape(13));
  CHECK(r.conditional_violations == 0);
  CHECK(r.pass);
}

TEST_CASE("CONN reduction agrees with DISJ") {
  const auto r = rd::conn_reduction(40, 60, 10.0, 150, RandomTape(6));
  CHECK(r.good_agreements == r.good_trials);
  CHECK(r.pass);
}

TEST_CASE("undecided coordinates") {
  const std::vector<std::size_t> bob{2, 1, 2, 0, 2};
  CHECK(rd::derive_bits_instance(bob, 2) == std::vector<std::size_t>{0, 2, 4});
  CHECK(rd::derive_bits_instance(bob, 3).empty());
}

TEST_CASE("MAJ reduction") {
  const auto r = rd::maj_reduction(256, 9, 300, RandomTape(2));
  CHECK(r.majority_mismatches == 0);
  CHECK(r.pass);
  CHECK_THROWS(rd::maj_reduction(64, 8, 10, RandomTape(2)));
}

TEST_CASE("joint tables") {
  const auto t = rd::sparse_equality_table(16, 0.0125);
  CHECK_NOTHROW(t.validate());
  CHECK(t.mass_of_ones() == doctest::Approx(0.0125));
  CHECK(t.prob(3, 3) == doctest::Approx(0.0125 / 16));
  CHECK(t.value(3, 3));
  CHECK_FALSE(t.value(3, 4));

  auto bad = t;
  bad.p[0] += 0.5;
  CHECK_THROWS(bad.validate());
  bad = t;
  bad.f.pop_back();
  CHECK_THROWS(bad.validate());
}

TEST_CASE("direct sum protocol computes f on every player") {
  const auto table = rd::sparse_equality_table(5, 0.3);
  const auto proto = rd::direct_sum_protocol(table);
  RandomTape t(44);
  for (int i = 0; i < 300; ++i) {
    const auto inst = rd::direct_sum_build(table, 4, t);
    const auto run = run_protocol(proto->model(), *proto, rd::direct_sum_engine_instance(inst, table), RandomTape(i));
    REQUIRE(run.answer.value.size() == 4);
    for (std::size_t p = 0; p < 4; ++p) REQUIRE(run.answer.value.test(p) == (inst.x == inst.y[p]));
  }
}

TEST_CASE("direct sum dummies follow the conditional") {
  // Equality with q = 0.3 on 5 values: given x, y = x with probability 0.3.
  const auto table = rd::sparse_equality_table(5, 0.3);
  RandomTape t(45);
  std::size_t equal = 0;
  const std::size_t draws = 20000;
  for (std::size_t i = 0; i < draws; ++i) {
    const auto inst = rd::direct_sum_embed(table, 2, 2, 0, t);
    CHECK(inst.y[0] == 0);
    equal += inst.y[1] == 2 ? 1 : 0;
  }
  CHECK(std::abs(static_cast<double>(equal) / draws - 0.3) < 4 * stats::proportion_se(0.3, draws));
}

TEST_CASE("direct sum OR driver") {
  const auto table = rd::sparse_equality_table(16, 1.0 / 80);
  RandomTape t(46);
  for (int i = 0; i < 100; ++i) {
    const auto r = rd::direct_sum_or_driver(table, 8, 3, i % 2 == 0 ? 3 : 7, 18, t);
    if (!r.flagged) CHECK(r.answer == (i % 2 == 0));
  }
  const auto heavy = rd::sparse_equality_table(16, 0.5);
  CHECK_THROWS(rd::direct_sum_or_driver(heavy, 8, 0, 0, 18, t));
}

TEST_CASE("direct sum experiment") {
  const auto table = rd::sparse_equality_table(16, 1.0 / 80);
  const auto r = rd::direct_sum_experiment(table, 8, 400, 4.0, 0.05, RandomTape(47));
  CHECK(r.share_ok);
  CHECK(r.symmetry.pass);
  CHECK(r.good_ok);
  CHECK(r.or_ok);
  CHECK(r.pass);
}
