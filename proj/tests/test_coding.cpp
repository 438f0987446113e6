#include <doctest.h>

#include <algorithm>
#include <stdexcept>

#include "commsim/coding.hpp"
#include "commsim/random_tape.hpp"

using namespace commsim;

TEST_CASE("ceil_log2") {
  CHECK(coding::ceil_log2(0) == 0);
  CHECK(coding::ceil_log2(1) == 0);
  CHECK(coding::ceil_log2(2) == 1);
  CHECK(coding::ceil_log2(3) == 2);
  CHECK(coding::ceil_log2(32) == 5);
  CHECK(coding::ceil_log2(33) == 6);
}

TEST_CASE("gamma codes") {
  BitVector out;
  coding::write_gamma(out, 1);
  CHECK(out.to_string() == "1");
  out = BitVector();
  coding::write_gamma(out, 5);
  CHECK(out.to_string() == "00101");
  CHECK(coding::gamma_length(5) == 5);
  CHECK(coding::gamma_length(1) == 1);
  CHECK_THROWS(coding::write_gamma(out, 0));

  BitVector seq;
  for (std::uint64_t v = 1; v < 300; v += 7) coding::write_gamma(seq, v);
  BitReader in(seq);
  for (std::uint64_t v = 1; v < 300; v += 7) CHECK(coding::read_gamma(in) == v);
  CHECK(in.at_end());
}

TEST_CASE("index sets round trip") {
  BitVector out;
  coding::write_index_set(out, {});
  CHECK(out.size() == 1);

  RandomTape t(5);
  for (int trial = 0; trial < 200; ++trial) {
    auto idx = t.sample_without_replacement(1000, t.uniform(40));
    std::sort(idx.begin(), idx.end());
    BitVector payload;
    coding::write_index_set(payload, idx);
    BitReader in(payload);
    CHECK(coding::read_index_set(in, 1000) == idx);
    CHECK(in.at_end());
  }
}

TEST_CASE("malformed index sets are rejected") {
  BitVector payload;
  const std::vector<std::size_t> idx{900};
  coding::write_index_set(payload, idx);
  BitReader in(payload);
  CHECK_THROWS_AS(coding::read_index_set(in, 100), std::runtime_error);

  BitVector truncated = BitVector::from_string("001");
  BitReader in2(truncated);
  CHECK_THROWS(coding::read_index_set(in2, 100));
}
