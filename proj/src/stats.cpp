#include "commsim/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <boost/math/distributions/binomial.hpp>
#include <boost/math/special_functions/gamma.hpp>

namespace commsim::stats {

void RunningStats::add(double x) {
  ++n_;
  const double delta = x - mean_;
  mean_ += delta / static_cast<double>(n_);
  m2_ += delta * (x - mean_);
}

void RunningStats::merge(const RunningStats& other) {
  if (other.n_ == 0) return;
  if (n_ == 0) {
    *this = other;
    return;
  }
  const double total = static_cast<double>(n_ + other.n_);
  const double delta = other.mean_ - mean_;
  mean_ += delta * static_cast<double>(other.n_) / total;
  m2_ += other.m2_ + delta * delta * static_cast<double>(n_) * static_cast<double>(other.n_) / total;
  n_ += other.n_;
}

double RunningStats::variance() const { return n_ < 2 ? 0.0 : m2_ / static_cast<double>(n_ - 1); }

double RunningStats::stddev() const { return std::sqrt(variance()); }

double RunningStats::standard_error() const {
  return n_ == 0 ? 0.0 : std::sqrt(variance() / static_cast<double>(n_));
}

double proportion_se(double p, std::size_t trials) {
  if (trials == 0) return 0.0;
  return std::sqrt(std::max(p * (1.0 - p), 0.0) / static_cast<double>(trials));
}

double chi_square_sf(double x, double df) {
  if (df <= 0.0) return 1.0;
  if (x <= 0.0) return 1.0;
  return boost::math::gamma_q(df / 2.0, x / 2.0);
}

double binomial_half_two_sided(std::uint64_t successes, std::uint64_t trials) {
  if (trials == 0) return 1.0;
  const boost::math::binomial_distribution<double> dist(static_cast<double>(trials), 0.5);
  const auto k = static_cast<double>(std::min(successes, trials - successes));
  // Symmetric null: double the smaller tail.
  const double tail = boost::math::cdf(dist, k);
  return std::min(1.0, 2.0 * tail);
}

TestResult mcnemar(std::uint64_t n01, std::uint64_t n10) {
  TestResult r;
  const std::uint64_t total = n01 + n10;
  if (total == 0) return r;
  const double diff = static_cast<double>(n01) - static_cast<double>(n10);
  r.statistic = diff * diff / static_cast<double>(total);
  r.df = 1.0;
  r.p_value = binomial_half_two_sided(n01, total);
  return r;
}

TestResult bowker(std::span<const std::uint64_t> table, std::size_t dim) {
  if (table.size() != dim * dim) throw std::invalid_argument("bowker: table is not dim x dim");
  TestResult r;
  for (std::size_t i = 0; i < dim; ++i) {
    for (std::size_t j = i + 1; j < dim; ++j) {
      const auto a = static_cast<double>(table[i * dim + j]);
      const auto b = static_cast<double>(table[j * dim + i]);
      if (a + b == 0.0) continue;
      r.statistic += (a - b) * (a - b) / (a + b);
      r.df += 1.0;
    }
  }
  r.p_value = chi_square_sf(r.statistic, r.df);
  return r;
}

TestResult two_sample_chi_square(std::span<const std::uint64_t> a, std::span<const std::uint64_t> b) {
  if (a.size() != b.size()) throw std::invalid_argument("histograms must share bins");
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    na += static_cast<double>(a[i]);
    nb += static_cast<double>(b[i]);
  }
  TestResult r;
  if (na == 0.0 || nb == 0.0) return r;
  std::size_t used = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double col = static_cast<double>(a[i] + b[i]);
    if (col == 0.0) continue;
    ++used;
    const double ea = col * na / (na + nb);
    const double eb = col * nb / (na + nb);
    r.statistic += (static_cast<double>(a[i]) - ea) * (static_cast<double>(a[i]) - ea) / ea;
    r.statistic += (static_cast<double>(b[i]) - eb) * (static_cast<double>(b[i]) - eb) / eb;
  }
  r.df = used > 1 ? static_cast<double>(used - 1) : 0.0;
  r.p_value = chi_square_sf(r.statistic, r.df);
  return r;
}

double binary_entropy(double p) {
  if (p <= 0.0 || p >= 1.0) return 0.0;
  return -p * std::log2(p) - (1.0 - p) * std::log2(1.0 - p);
}

}  // namespace commsim::stats
