#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "commsim/random_tape.hpp"

using commsim::RandomTape;

TEST_CASE("same seed reproduces the stream") {
  RandomTape a(42);
  RandomTape b(42);
  for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
  CHECK(a.position() == 100);
  RandomTape c(43);
  CHECK(RandomTape(42).next_u64() != c.next_u64());
}

TEST_CASE("derived tapes are independent of parent consumption") {
  RandomTape a(7);
  const auto before = a.derive("x", 3).next_u64();
  a.next_u64();
  CHECK(a.derive("x", 3).next_u64() == before);
  CHECK(a.derive("x", 4).next_u64() != before);
  CHECK(a.derive("y").next_u64() != a.derive("x").next_u64());
}

TEST_CASE("uniform draws stay in range and are roughly flat") {
  RandomTape t(1);
  std::vector<int> hist(10, 0);
  const int draws = 100000;
  for (int i = 0; i < draws; ++i) {
    const auto v = t.uniform(10);
    REQUIRE(v < 10);
    ++hist[v];
  }
  // Each bin ~ Bin(1e5, 0.1): sd ~ 95.
  for (int h : hist) CHECK(std::abs(h - draws / 10) < 500);
  CHECK_THROWS(t.uniform(0));
}

TEST_CASE("bernoulli frequency") {
  RandomTape t(2);
  int ones = 0;
  for (int i = 0; i < 100000; ++i) ones += t.bernoulli(0.25) ? 1 : 0;
  CHECK(std::abs(ones / 100000.0 - 0.25) < 0.005);
}

TEST_CASE("permutation and sampling without replacement") {
  RandomTape t(3);
  auto p = t.permutation(50);
  std::sort(p.begin(), p.end());
  std::vector<std::size_t> id(50);
  std::iota(id.begin(), id.end(), 0);
  CHECK(p == id);

  const auto s = t.sample_without_replacement(100, 30);
  CHECK(s.size() == 30);
  CHECK(std::set<std::size_t>(s.begin(), s.end()).size() == 30);
  CHECK(*std::max_element(s.begin(), s.end()) < 100);

  // Every element of 0..9 appears in a 3-subset with probability 3/10.
  std::vector<int> hits(10, 0);
  for (int i = 0; i < 20000; ++i) {
    for (auto v : t.sample_without_replacement(10, 3)) ++hits[v];
  }
  for (int h : hits) CHECK(std::abs(h / 20000.0 - 0.3) < 0.015);
}
