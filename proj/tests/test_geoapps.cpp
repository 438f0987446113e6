#include <doctest.h>

#include <cmath>
#include <numbers>
#include <sstream>

#include "commsim/geoapps.hpp"
#include "commsim/problems.hpp"

using namespace commsim;
using namespace commsim::geoapps;

namespace {

// Largest odd n with 1 - cos(2 pi / n) >= 2 eps, solved through acos.
std::size_t odd_direction_oracle(double eps) {
  auto n = static_cast<std::size_t>(std::floor(2.0 * std::numbers::pi / std::acos(1.0 - 2.0 * eps)));
  return n % 2 == 1 ? n : n - 1;
}

std::vector<BitVector> random_rows(std::size_t k, std::size_t n, double p, RandomTape& t) {
  std::vector<BitVector> rows;
  for (std::size_t i = 0; i < k; ++i) {
    BitVector b(n);
    for (std::size_t j = 0; j < n; ++j) b.set(j, t.bernoulli(p));
    rows.push_back(b);
  }
  return rows;
}

}  // namespace

TEST_CASE("width") {
  const PointSet tri{{0, 0}, {1, 0}, {0, 1}};
  CHECK(width(tri, {1, 0}) == 1.0);
  CHECK(width(tri, {1, 1}) == doctest::Approx(1.0));
  const PointSet one{{0.3, -2}};
  for (const auto& u : grid_directions(7)) CHECK(width(one, u) == 0.0);
  CHECK_THROWS(width(PointSet{}, {1, 0}));
  CHECK_THROWS(width(tri, {0, 0}));
  CHECK_THROWS(width(PointSet{{NAN, 0}}, {1, 0}));
}

TEST_CASE("width of a sampled circle") {
  const auto circle = grid_directions(360);
  RandomTape t(3);
  for (int i = 0; i < 200; ++i) {
    const double a = 2 * std::numbers::pi * t.uniform_real();
    CHECK(std::abs(width(circle, {std::cos(a), std::sin(a)}) - 2.0) <= 0.001);
  }
}

TEST_CASE("width is positively homogeneous") {
  RandomTape t(4);
  const auto p = disk_points(50, {1, 2}, 3, t);
  for (int i = 0; i < 50; ++i) {
    const Point u{t.uniform_real() - 0.5, t.uniform_real() - 0.5};
    const double c = 0.1 + 10 * t.uniform_real();
    CHECK(width(p, {c * u.x, c * u.y}) == doctest::Approx(c * width(p, u)).epsilon(1e-9));
  }
}

TEST_CASE("direction counts") {
  CHECK(min_direction_count(0.1) == 20);
  CHECK(min_direction_count(0.25) == 13);
  CHECK_THROWS(epsilon_kernel_indices(PointSet{{0, 0}}, 0.1, 19));
  CHECK_THROWS(epsilon_kernel_indices(PointSet{{0, 0}}, 0.5));
}

TEST_CASE("square and collinear kernels") {
  const PointSet square{{0, 0}, {1, 0}, {1, 1}, {0, 1}};
  for (double eps : {0.01, 0.1, 0.4}) CHECK(epsilon_kernel(square, eps) == square);

  const PointSet line{{0, 0}, {1, 0}, {2, 0}, {3, 0}};
  for (std::size_t m : {20U, 24U, 40U}) {
    CHECK(epsilon_kernel_indices(line, 0.1, m) == std::vector<std::size_t>{0, 3});
  }
}

TEST_CASE("grid kernel of a disk passes on a finer grid") {
  for (std::uint64_t s = 0; s < 20; ++s) {
    RandomTape t(s);
    const auto p = disk_points(1000, {0, 0}, 1, t);
    const auto k = epsilon_kernel(p, 0.1);
    CHECK(k.size() < p.size());
    CHECK(is_kernel(p, k, 0.1, grid_directions(200)).ok);
  }
}

TEST_CASE("is_kernel basics") {
  RandomTape t(5);
  const auto p = disk_points(100, {0, 0}, 1, t);
  CHECK(is_kernel(p, p, 1e-6, grid_directions(64)).ok);

  const PointSet seg{{0, 0}, {1, 0}, {2, 0}};
  const PointSet mid{{1, 0}};
  const auto r = is_kernel(seg, mid, 0.1, grid_directions(16));
  CHECK_FALSE(r.ok);
  CHECK(r.worst_ratio == doctest::Approx(1.0));
  CHECK(std::abs(r.worst_direction.x) > 0.9);

  const PointSet stranger{{5, 5}};
  CHECK_THROWS(is_kernel(seg, stranger, 0.1, grid_directions(16)));
  CHECK(to_json(r).at("ok") == false);
}

TEST_CASE("adding points to a kernel keeps it a kernel") {
  RandomTape t(6);
  const auto dirs = grid_directions(200);
  for (int trial = 0; trial < 20; ++trial) {
    const auto p = disk_points(300, {0, 0}, 1, t);
    auto k = epsilon_kernel(p, 0.1);
    REQUIRE(is_kernel(p, k, 0.1, dirs).ok);
    for (int add = 0; add < 10; ++add) {
      k.push_back(p[t.uniform(p.size())]);
      REQUIRE(is_kernel(p, k, 0.1, dirs).ok);
    }
  }
}

TEST_CASE("composability and transitivity") {
  RandomTape t(7);
  for (int s = 0; s < 100; ++s) {
    CHECK(composability_trial(0.1, 500, t).ok);
    CHECK(transitivity_trial(0.05, 0.05, 500, t).ok);
  }
}

TEST_CASE("OR instance direction limits") {
  for (double eps : {0.02, 0.05, 0.1, 0.2}) CHECK(max_or_directions(eps) == odd_direction_oracle(eps));
  CHECK(max_or_directions(0.05) == 13);
  CHECK(drop_one_breaks(13, 0.05));
  CHECK_FALSE(drop_one_breaks(41, 0.05));

  RandomTape t(8);
  CHECK_THROWS(build_kernel_instance_from_or(random_rows(3, 12, 0.5, t), 0.05));
  CHECK_THROWS(build_kernel_instance_from_or(random_rows(3, 15, 0.5, t), 0.05));
  CHECK_NOTHROW(build_kernel_instance_from_or(random_rows(3, 13, 0.5, t), 0.05));
}

TEST_CASE("OR instance geometry") {
  RandomTape t(9);
  const auto rows = random_rows(4, 13, 0.5, t);
  const auto inst = build_kernel_instance_from_or(rows, 0.05);
  CHECK(inst.drop_one_verified);
  REQUIRE(inst.players.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    for (std::size_t j = 0; j < 13; ++j) {
      const auto& p = inst.players[i][j];
      CHECK(std::hypot(p.x, p.y) == doctest::Approx(rows[i].test(j) ? 1.0 : 0.9).epsilon(1e-12));
      CHECK(std::atan2(p.y, p.x) == doctest::Approx(std::remainder(2 * std::numbers::pi * j / 13, 2 * std::numbers::pi)));
    }
  }
}

TEST_CASE("OR decode through grid kernels") {
  const std::size_t n = 13;
  const std::size_t m = n * 3;
  SUBCASE("all zeros") {
    const std::vector<BitVector> rows(5, BitVector(n));
    const auto inst = build_kernel_instance_from_or(rows, 0.05);
    CHECK(decode_kernel(inst, epsilon_kernel_indices(inst.all, 0.05, m)).count() == 0);
  }
  SUBCASE("one all-ones player") {
    RandomTape t(10);
    auto rows = random_rows(5, n, 0.2, t);
    rows[0] = BitVector(n, true);
    const auto inst = build_kernel_instance_from_or(rows, 0.05);
    CHECK(decode_kernel(inst, epsilon_kernel_indices(inst.all, 0.05, m)).count() == n);
  }
  SUBCASE("random bits") {
    for (std::uint64_t s = 0; s < 100; ++s) {
      RandomTape t(s);
      const auto rows = random_rows(8, n, 0.1, t);
      const auto inst = build_kernel_instance_from_or(rows, 0.05);
      const auto k = epsilon_kernel_indices(inst.all, 0.05, m);
      REQUIRE(decode_kernel(inst, k) == problems::eval_bitwise(problems::BitwiseOp::or_op(), rows));
    }
  }
}

TEST_CASE("OR decode through a minimal kernel") {
  // Greedily drop points while the kernel test still holds; any kernel must decode.
  const std::size_t n = 9;
  const double eps = 0.1;
  const auto tests = grid_directions(16 * n);
  for (std::uint64_t s = 0; s < 20; ++s) {
    RandomTape t(100 + s);
    const auto rows = random_rows(4, n, 0.3, t);
    const auto inst = build_kernel_instance_from_or(rows, eps);
    std::vector<char> alive(inst.all.size(), 1);
    auto kept = [&] {
      std::vector<std::size_t> idx;
      for (std::size_t i = 0; i < alive.size(); ++i) {
        if (alive[i]) idx.push_back(i);
      }
      return idx;
    };
    for (std::size_t i = alive.size(); i-- > 0;) {
      alive[i] = 0;
      PointSet kp;
      for (auto j : kept()) kp.push_back(inst.all[j]);
      if (!is_kernel(inst.all, kp, eps, tests).ok) alive[i] = 1;
    }
    const auto keep = kept();
    CHECK(keep.size() < inst.all.size());
    REQUIRE(decode_kernel(inst, keep) == problems::eval_bitwise(problems::BitwiseOp::or_op(), rows));
  }
}

TEST_CASE("points csv") {
  std::ostringstream out;
  const std::vector<PointSet> players{{{0, 1}}, {{0.5, -2}, {3, 4}}};
  write_points_csv(out, players);
  CHECK(out.str() == "player,x,y\n1,0,1\n2,0.5,-2\n2,3,4\n");
}

TEST_CASE("heavy-hitter grouping: two groups of five") {
  RandomTape t(11);
  const auto r = hh_group_reduction(64, 10, 0.5, 0.5, t);
  CHECK(r.groups == 2);
  CHECK(r.group_size == 5);
  CHECK(r.grouped.players.size() == 2);
  CHECK(r.counts_binary);
  for (std::size_t c = 0; c < 64; ++c) {
    CHECK((r.totals[c] == 5 || r.totals[c] == 0));
    CHECK(r.grouped_verdicts[c] == (r.totals[c] == 5 ? problems::Verdict::YES : problems::Verdict::NO));
  }
  CHECK(r.verdicts_match);
  CHECK(r.no_either);
  // kphi(1 - eps) = 2.5 is not a multiple of the group size.
  CHECK_FALSE(r.totals_exact);
}

TEST_CASE("heavy-hitter grouping: verdicts over many samples") {
  RandomTape t(12);
  for (int i = 0; i < 1000; ++i) {
    const auto r = hh_group_reduction(16, 20, 0.3, 0.1, t);
    REQUIRE(r.counts_binary);
    REQUIRE(r.verdicts_match);
    REQUIRE(r.no_either);
  }
}

TEST_CASE("heavy-hitter grouping: odd group count is a majority instance") {
  RandomTape t(13);
  for (int i = 0; i < 200; ++i) {
    const auto r = hh_group_reduction(32, 9, 0.5, 1.0 / 3, t);
    REQUIRE(r.maj_match.has_value());
    REQUIRE(*r.maj_match);
  }
  const auto even = hh_group_reduction(8, 10, 0.5, 0.5, t);
  CHECK_FALSE(even.maj_match.has_value());
}

TEST_CASE("heavy-hitter grouping: divisibility") {
  RandomTape t(14);
  CHECK_THROWS(hh_group_reduction(8, 10, 0.5, 0.3, t));
  CHECK_THROWS(hh_group_reduction(8, 7, 0.5, 0.5, t));
}
