#include <doctest.h>

#include <algorithm>
#include <stdexcept>

#include "commsim/errors.hpp"
#include "commsim/problems.hpp"
#include "commsim/random_tape.hpp"

using namespace commsim;
using problems::BitwiseOp;

namespace {

std::vector<BitVector> bits(std::initializer_list<const char*> rows) {
  std::vector<BitVector> out;
  for (const char* r : rows) out.push_back(BitVector::from_string(r));
  return out;
}

Instance random_instance(std::size_t n, std::size_t k, RandomTape& t) {
  Instance inst{n, {}};
  for (std::size_t j = 0; j < k; ++j) {
    BitVector v(n);
    for (std::size_t c = 0; c < n; ++c) v.set(c, t.bernoulli(0.5));
    inst.players.push_back(v);
  }
  return inst;
}

}  // namespace

TEST_CASE("bitwise examples") {
  CHECK(problems::eval_bitwise(BitwiseOp::xor_op(), bits({"101", "011", "110"})).to_string() == "000");
  CHECK(problems::eval_bitwise(BitwiseOp::or_op(), bits({"000", "000"})).to_string() == "000");
  CHECK(problems::eval_bitwise(BitwiseOp::and_op(), bits({"110", "011"})).to_string() == "010");
  // Column counts (2,1,3) with k=3: threshold floor(1.5)+1 = 2.
  CHECK(problems::eval_bitwise(BitwiseOp::maj(0.5), bits({"101", "111", "001"})).to_string() == "101");
  CHECK_THROWS(problems::eval_bitwise(BitwiseOp::xor_op(), bits({"10", "101"})));
}

TEST_CASE("maj threshold") {
  CHECK(problems::maj_threshold(3, 0.5) == 2);
  CHECK(problems::maj_threshold(7, 0.5) == 4);
  CHECK(problems::maj_threshold(10, 0.5) == 6);
  CHECK(problems::maj_threshold(10, 0.3) == 4);
}

TEST_CASE("parse bitwise op") {
  CHECK(problems::parse_bitwise_op("xor").kind == problems::BitwiseKind::XOR);
  CHECK(problems::parse_bitwise_op("or").kind == problems::BitwiseKind::OR);
  const auto m = problems::parse_bitwise_op("maj:0.25");
  CHECK(m.kind == problems::BitwiseKind::MAJ);
  CHECK(m.phi == doctest::Approx(0.25));
  CHECK_THROWS(problems::parse_bitwise_op("nand"));
}

TEST_CASE("AND is the complement of OR over complemented inputs") {
  RandomTape t(11);
  for (int trial = 0; trial < 100; ++trial) {
    const auto inst = random_instance(37, 5, t);
    Instance comp = inst;
    for (auto& p : comp.players) p = ~p;
    CHECK(problems::eval_bitwise(BitwiseOp::and_op(), inst) == ~problems::eval_bitwise(BitwiseOp::or_op(), comp));
  }
}

TEST_CASE("connectivity") {
  GraphInstance path{4, {EdgeSet{4, {make_edge(0, 1), make_edge(1, 2), make_edge(2, 3)}}}};
  CHECK(problems::eval_conn(path));
  GraphInstance triangles{6, {EdgeSet{6, {make_edge(0, 1), make_edge(1, 2), make_edge(0, 2)}},
                              EdgeSet{6, {make_edge(3, 4), make_edge(4, 5), make_edge(3, 5)}}}};
  CHECK_FALSE(problems::eval_conn(triangles));
  // Isolated vertex breaks connectivity.
  GraphInstance isolated{3, {EdgeSet{3, {make_edge(0, 1)}}}};
  CHECK_FALSE(problems::eval_conn(isolated));
  CHECK_THROWS(make_edge(2, 2));
}

TEST_CASE("connectivity is monotone under edge addition") {
  RandomTape t(12);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t v = 8;
    EdgeSet es{v, {}};
    for (int e = 0; e < 6; ++e) {
      const auto a = t.uniform(v);
      const auto b = t.uniform(v);
      if (a != b) es.edges.push_back(make_edge(a, b));
    }
    const bool before = problems::is_connected(v, es.edges);
    const auto a = t.uniform(v);
    const auto b = (a + 1 + t.uniform(v - 1)) % v;
    es.edges.push_back(make_edge(a, b));
    if (before) CHECK(problems::is_connected(v, es.edges));
  }
}

TEST_CASE("two-party problems") {
  // {1,2} vs {3,4} and {1,2} vs {2,5}, written 0-based.
  CHECK_FALSE(problems::eval_disj2(BitVector::from_string("11000"), BitVector::from_string("00110")));
  CHECK(problems::eval_disj2(BitVector::from_string("11000"), BitVector::from_string("01001")));
  CHECK_THROWS_AS(problems::eval_disj2(BitVector::from_string("11000"), BitVector::from_string("11000")),
                  PromiseViolation);
  CHECK_THROWS_AS(problems::eval_disj2(BitVector::from_string("11000"), BitVector::from_string("00100")),
                  PromiseViolation);

  const auto x = BitVector::from_string("10110");
  const std::vector<std::size_t> s{0, 2};
  CHECK(problems::eval_bits2(x, s) == std::vector<bool>{true, true});
  CHECK(problems::eval_bits2(x, {}).empty());
  const std::vector<std::size_t> bad{5};
  CHECK_THROWS_AS(problems::eval_bits2(x, bad), std::out_of_range);
}

TEST_CASE("bits2 over a 1/4-biased vector") {
  RandomTape t(13);
  const std::size_t n = 10000;
  BitVector x(n);
  for (std::size_t c = 0; c < n; ++c) x.set(c, t.bernoulli(0.25));
  std::vector<std::size_t> all(n);
  for (std::size_t c = 0; c < n; ++c) all[c] = c;
  const auto out = problems::eval_bits2(x, all);
  const double ones = static_cast<double>(std::count(out.begin(), out.end(), true)) / n;
  CHECK(ones == doctest::Approx(0.25).epsilon(0.08));
}

TEST_CASE("heavy hitter verdicts") {
  using problems::Verdict;
  CHECK(problems::hh_verdict(5, 10, 0.5, 0.2) == Verdict::YES);
  CHECK(problems::hh_verdict(4, 10, 0.5, 0.2) == Verdict::NO);
  CHECK(problems::hh_verdict(4, 10, 0.5, 0.1) == Verdict::NO);
  CHECK(problems::hh_verdict(46, 100, 0.5, 0.1) == Verdict::EITHER);
  const auto v = problems::eval_hh(bits({"110", "100"}), 0.5, 0.5);
  CHECK(v == std::vector<Verdict>{Verdict::YES, Verdict::YES, Verdict::NO});
}

TEST_CASE("json round trips") {
  RandomTape t(14);
  const auto inst = random_instance(13, 3, t);
  const auto j = problems::to_json(inst);
  CHECK(j["n"] == 13);
  CHECK(j["k"] == 3);
  const auto back = problems::instance_from_json(j);
  CHECK(back.players == inst.players);

  GraphInstance g{4, {EdgeSet{4, {make_edge(0, 3)}}, EdgeSet{4, {make_edge(1, 2)}}}};
  const auto gj = problems::to_json(g);
  CHECK(gj["players"][0][0][0] == 1);
  CHECK(gj["players"][0][0][1] == 4);
  const auto gb = problems::graph_from_json(gj);
  CHECK(gb.players[1].edges == g.players[1].edges);
}
