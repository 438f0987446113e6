#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace commsim::stats {

/// Pass thresholds shared by every experiment unless overridden.
inline constexpr double kSigmaMultiplier = 3.0;
inline constexpr double kSymmetryAlpha = 0.01;

/// Welford accumulator.
class RunningStats {
 public:
  void add(double x);
  void merge(const RunningStats& other);

  [[nodiscard]] std::size_t count() const { return n_; }
  [[nodiscard]] double mean() const { return mean_; }
  /// Unbiased sample variance; 0 for fewer than two samples.
  [[nodiscard]] double variance() const;
  [[nodiscard]] double stddev() const;
  /// Standard error of the mean.
  [[nodiscard]] double standard_error() const;

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

/// Standard error of a Bernoulli frequency estimated from `trials` draws.
double proportion_se(double p, std::size_t trials);

/// Upper tail P[chi2_df >= x].
double chi_square_sf(double x, double df);

/// Exact two-sided binomial test of successes ~ Bin(trials, 1/2).
double binomial_half_two_sided(std::uint64_t successes, std::uint64_t trials);

struct TestResult {
  double statistic = 0.0;
  double df = 0.0;
  double p_value = 1.0;
};

/// McNemar test of marginal homogeneity from discordant counts n01 and n10;
/// the p-value is exact (binomial).
TestResult mcnemar(std::uint64_t n01, std::uint64_t n10);

/// Bowker symmetry test of a square contingency table (row-major, dim x dim):
/// H0 is table[i][j] and table[j][i] having equal cell probabilities.
TestResult bowker(std::span<const std::uint64_t> table, std::size_t dim);

/// Chi-square homogeneity test for two histograms over the same bins.
TestResult two_sample_chi_square(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b);

/// Binary entropy in bits.
double binary_entropy(double p);

}  // namespace commsim::stats
