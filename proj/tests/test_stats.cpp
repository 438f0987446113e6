#include <doctest.h>

#include <cmath>
#include <vector>

#include "commsim/stats.hpp"

using namespace commsim::stats;

TEST_CASE("running stats match the two-pass formulas") {
  const std::vector<double> xs{2, 4, 4, 4, 5, 5, 7, 9};
  RunningStats s;
  for (double x : xs) s.add(x);
  CHECK(s.mean() == doctest::Approx(5.0));
  // Sum of squared deviations 32, n-1 = 7.
  CHECK(s.variance() == doctest::Approx(32.0 / 7.0));
  CHECK(s.standard_error() == doctest::Approx(std::sqrt(32.0 / 7.0 / 8.0)));

  RunningStats a;
  RunningStats b;
  for (std::size_t i = 0; i < xs.size(); ++i) (i < 3 ? a : b).add(xs[i]);
  a.merge(b);
  CHECK(a.count() == 8);
  CHECK(a.mean() == doctest::Approx(5.0));
  CHECK(a.variance() == doctest::Approx(32.0 / 7.0));
}

TEST_CASE("chi-square tail") {
  CHECK(chi_square_sf(3.841458820694124, 1) == doctest::Approx(0.05).epsilon(1e-6));
  // df=2 is exponential with mean 2.
  CHECK(chi_square_sf(5.0, 2) == doctest::Approx(std::exp(-2.5)));
  CHECK(chi_square_sf(0.0, 3) == 1.0);
  CHECK(chi_square_sf(1.0, 0) == 1.0);
}

TEST_CASE("exact binomial and McNemar") {
  CHECK(binomial_half_two_sided(0, 10) == doctest::Approx(2.0 / 1024.0));
  CHECK(binomial_half_two_sided(5, 10) == 1.0);
  // P[X <= 2] for Bin(10,1/2) = 56/1024.
  CHECK(binomial_half_two_sided(8, 10) == doctest::Approx(112.0 / 1024.0));
  const auto r = mcnemar(10, 0);
  CHECK(r.statistic == doctest::Approx(10.0));
  CHECK(r.p_value == doctest::Approx(2.0 / 1024.0));
  CHECK(mcnemar(0, 0).p_value == 1.0);
}

TEST_CASE("Bowker symmetry") {
  // Symmetric table: statistic 0.
  const std::vector<std::uint64_t> sym{5, 3, 3, 5};
  CHECK(bowker(sym, 2).statistic == 0.0);
  CHECK(bowker(sym, 2).p_value == 1.0);
  // (9-1)^2/(9+1) = 6.4 on one degree of freedom.
  const std::vector<std::uint64_t> skew{0, 9, 1, 0};
  const auto r = bowker(skew, 2);
  CHECK(r.statistic == doctest::Approx(6.4));
  CHECK(r.df == 1.0);
  CHECK(r.p_value == doctest::Approx(chi_square_sf(6.4, 1)));
  CHECK_THROWS(bowker(skew, 3));
}

TEST_CASE("two-sample chi-square") {
  const std::vector<std::uint64_t> a{10, 20, 30};
  CHECK(two_sample_chi_square(a, a).statistic == doctest::Approx(0.0));
  const std::vector<std::uint64_t> b{30, 20, 10};
  // Pooled expected 20 per cell: 4 cells at 100/20 = 20.
  CHECK(two_sample_chi_square(a, b).statistic == doctest::Approx(20.0));
  CHECK(two_sample_chi_square(a, b).df == 2.0);
}

TEST_CASE("binary entropy") {
  CHECK(binary_entropy(0.5) == doctest::Approx(1.0));
  CHECK(binary_entropy(0.0) == 0.0);
  CHECK(binary_entropy(1.0 / 16.0) == doctest::Approx(0.3372900666));
  CHECK(proportion_se(0.5, 100) == doctest::Approx(0.05));
}
