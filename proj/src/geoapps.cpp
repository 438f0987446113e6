#include "commsim/geoapps.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <utility>

#include "commsim/distributions.hpp"

namespace commsim::geoapps {

namespace {

constexpr double kRelTol = 1e-9;

void require_finite(std::span<const Point> points) {
  for (const auto& p : points) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) throw std::invalid_argument("point with non-finite coordinates");
  }
}

void require_direction(const Point& u) {
  if (!std::isfinite(u.x) || !std::isfinite(u.y) || (u.x == 0.0 && u.y == 0.0)) {
    throw std::invalid_argument("direction must be finite and nonzero");
  }
}

std::size_t extreme_index(std::span<const Point> points, const Point& u) {
  double best = -INFINITY;
  for (const auto& p : points) best = std::max(best, dot(p, u));
  const double tol = kRelTol * std::max(1.0, std::abs(best));
  const Point tangent{-u.y, u.x};
  std::size_t pick = points.size();
  double pick_t = -INFINITY;
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (dot(points[i], u) < best - tol) continue;
    const double t = dot(points[i], tangent);
    if (t > pick_t) {
      pick_t = t;
      pick = i;
    }
  }
  return pick;
}

PointSet pick(std::span<const Point> points, std::span<const std::size_t> idx) {
  PointSet out;
  out.reserve(idx.size());
  for (auto i : idx) out.push_back(points[i]);
  return out;
}

bool point_less(const Point& a, const Point& b) { return std::pair(a.x, a.y) < std::pair(b.x, b.y); }

}  // namespace

double width(std::span<const Point> points, const Point& u) {
  if (points.empty()) throw std::invalid_argument("width of an empty point set");
  require_direction(u);
  require_finite(points);
  double hi = -INFINITY;
  double lo = INFINITY;
  for (const auto& p : points) {
    const double v = dot(p, u);
    hi = std::max(hi, v);
    lo = std::min(lo, v);
  }
  return hi - lo;
}

std::vector<Point> grid_directions(std::size_t m) {
  std::vector<Point> out;
  out.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    const double a = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(m);
    out.push_back({std::cos(a), std::sin(a)});
  }
  return out;
}

std::size_t min_direction_count(double eps) {
  return static_cast<std::size_t>(std::ceil(2.0 * std::numbers::pi / std::sqrt(eps)));
}

std::vector<std::size_t> epsilon_kernel_indices(std::span<const Point> points, double eps, std::size_t m) {
  if (!(eps > 0.0 && eps < 0.5)) throw std::invalid_argument("kernel eps must lie in (0, 1/2)");
  const std::size_t need = min_direction_count(eps);
  if (m == 0) m = need;
  if (m < need) throw std::invalid_argument("too few directions for this eps");
  require_finite(points);
  if (points.empty()) return {};
  std::vector<std::size_t> out;
  for (const auto& u : grid_directions(m)) {
    out.push_back(extreme_index(points, u));
    out.push_back(extreme_index(points, Point{-u.x, -u.y}));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

PointSet epsilon_kernel(std::span<const Point> points, double eps, std::size_t m) {
  const auto idx = epsilon_kernel_indices(points, eps, m);
  return pick(points, idx);
}

KernelCheck is_kernel(std::span<const Point> points, std::span<const Point> kernel, double eps,
                      std::span<const Point> directions) {
  PointSet sorted(points.begin(), points.end());
  std::sort(sorted.begin(), sorted.end(), point_less);
  for (const auto& q : kernel) {
    if (!std::binary_search(sorted.begin(), sorted.end(), q, point_less)) {
      throw std::invalid_argument("kernel point is not in the point set");
    }
  }
  KernelCheck check;
  check.eps = eps;
  check.directions = directions.size();
  if (points.empty()) return check;
  if (kernel.empty()) {
    check.ok = false;
    check.worst_ratio = 1.0;
    return check;
  }
  double worst = -INFINITY;
  for (const auto& u : directions) {
    const double wp = width(points, u);
    if (wp <= 0.0) continue;
    const double ratio = (wp - width(kernel, u)) / wp;
    if (ratio > worst) {
      worst = ratio;
      check.worst_direction = u;
    }
  }
  check.worst_ratio = std::max(0.0, worst);
  check.ok = check.worst_ratio <= eps + kRelTol;
  return check;
}

nlohmann::json to_json(const KernelCheck& check) {
  return {{"ok", check.ok},
          {"eps", check.eps},
          {"directions", check.directions},
          {"worst_ratio", check.worst_ratio},
          {"worst_direction", {check.worst_direction.x, check.worst_direction.y}}};
}

PointSet disk_points(std::size_t count, const Point& centre, double radius, RandomTape& tape) {
  PointSet out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double r = radius * std::sqrt(tape.uniform_real());
    const double a = 2.0 * std::numbers::pi * tape.uniform_real();
    out.push_back({centre.x + r * std::cos(a), centre.y + r * std::sin(a)});
  }
  return out;
}

namespace {

PointSet random_disk(std::size_t count, RandomTape& tape) {
  const Point centre{4.0 * tape.uniform_real() - 2.0, 4.0 * tape.uniform_real() - 2.0};
  const double radius = 0.5 + tape.uniform_real();
  return disk_points(count, centre, radius, tape);
}

}  // namespace

KernelCheck composability_trial(double eps, std::size_t points_per_disk, RandomTape& tape) {
  const auto p1 = random_disk(points_per_disk, tape);
  const auto p2 = random_disk(points_per_disk, tape);
  PointSet all = p1;
  all.insert(all.end(), p2.begin(), p2.end());
  PointSet kernel = epsilon_kernel(p1, eps);
  const auto k2 = epsilon_kernel(p2, eps);
  kernel.insert(kernel.end(), k2.begin(), k2.end());
  return is_kernel(all, kernel, eps, grid_directions(10 * min_direction_count(eps)));
}

KernelCheck transitivity_trial(double eps1, double eps2, std::size_t points, RandomTape& tape) {
  const auto p = random_disk(points, tape);
  const auto k1 = epsilon_kernel(p, eps1);
  const auto k2 = epsilon_kernel(k1, eps2);
  const double eps = eps1 + eps2;
  return is_kernel(p, k2, eps, grid_directions(10 * min_direction_count(std::min(eps1, eps2))));
}

std::size_t max_or_directions(double eps) {
  if (!(eps > 0.0 && eps < 0.5)) throw std::invalid_argument("kernel eps must lie in (0, 1/2)");
  std::size_t best = 3;
  for (std::size_t n = 3;; n += 2) {
    if (1.0 - std::cos(2.0 * std::numbers::pi / static_cast<double>(n)) < 2.0 * eps - kRelTol) return best;
    best = n;
  }
}

bool drop_one_breaks(std::size_t directions, double eps) {
  const auto ring = grid_directions(directions);
  const auto tests = grid_directions(16 * directions);
  for (std::size_t j = 0; j < ring.size(); ++j) {
    PointSet rest;
    for (std::size_t i = 0; i < ring.size(); ++i) {
      if (i != j) rest.push_back(ring[i]);
    }
    if (is_kernel(ring, rest, eps, tests).ok) return false;
  }
  return true;
}

KernelOrInstance build_kernel_instance_from_or(std::span<const BitVector> bits, double eps) {
  if (bits.empty()) throw std::invalid_argument("need at least one player");
  if (!(eps > 0.0 && eps < 0.5)) throw std::invalid_argument("kernel eps must lie in (0, 1/2)");
  const std::size_t n = bits.front().size();
  for (const auto& b : bits) {
    if (b.size() != n) throw std::invalid_argument("players hold different numbers of bits");
  }
  if (n < 3 || n % 2 == 0) throw std::invalid_argument("the direction count must be odd and at least 3");
  if (n > max_or_directions(eps)) {
    throw std::invalid_argument("direction spacing too fine for eps: at most " +
                                std::to_string(max_or_directions(eps)) + " directions");
  }
  KernelOrInstance inst;
  inst.eps = eps;
  inst.directions = n;
  inst.drop_one_verified = drop_one_breaks(n, eps);
  if (!inst.drop_one_verified) throw std::invalid_argument("unit ring survives dropping a point");
  const auto dirs = grid_directions(n);
  const double low = 1.0 - 2.0 * eps;
  for (std::size_t i = 0; i < bits.size(); ++i) {
    PointSet ps;
    for (std::size_t j = 0; j < n; ++j) {
      const double r = bits[i].test(j) ? 1.0 : low;
      ps.push_back({r * dirs[j].x, r * dirs[j].y});
      inst.all.push_back(ps.back());
      inst.labels.push_back({i, j});
    }
    inst.players.push_back(std::move(ps));
  }
  return inst;
}

BitVector decode_kernel(const KernelOrInstance& instance, std::span<const std::size_t> kernel) {
  BitVector out(instance.directions);
  const double low = 1.0 - 2.0 * instance.eps;
  for (auto idx : kernel) {
    const auto& p = instance.all.at(idx);
    const double norm = std::hypot(p.x, p.y);
    if (std::abs(norm - 1.0) <= kRelTol) {
      out.set(instance.labels[idx].direction);
    } else if (std::abs(norm - low) > kRelTol) {
      throw std::invalid_argument("kernel point has an unexpected norm");
    }
  }
  return out;
}

std::size_t or_kernel_direction_count(const KernelOrInstance& instance) {
  const std::size_t need = min_direction_count(instance.eps);
  return (need + instance.directions - 1) / instance.directions * instance.directions;
}

void write_points_csv(std::ostream& out, std::span<const PointSet> players) {
  out << "player,x,y\n";
  out << std::setprecision(17);
  for (std::size_t i = 0; i < players.size(); ++i) {
    for (const auto& p : players[i]) out << i + 1 << ',' << p.x << ',' << p.y << '\n';
  }
}

HhGroupResult hh_group_reduction(std::size_t n, std::size_t k, double phi, double eps, RandomTape& tape) {
  distributions::DistSpec spec;
  spec.name = distributions::DistName::tau_hh;
  spec.n = n;
  spec.k = k;
  spec.phi = phi;
  spec.eps = eps;
  spec.validate();
  const auto sample = distributions::sample(spec, tape);
  const auto& players = sample.bits.players;

  HhGroupResult out;
  out.groups = static_cast<std::size_t>(std::llround(1.0 / eps));
  out.group_size = static_cast<std::size_t>(std::llround(static_cast<double>(k) * eps));
  out.grouped = Instance{n, std::vector<BitVector>(out.groups, BitVector(n))};
  for (std::size_t g = 0; g < out.groups; ++g) {
    for (std::size_t c = 0; c < n; ++c) {
      std::size_t count = 0;
      for (std::size_t p = g * out.group_size; p < (g + 1) * out.group_size; ++p) count += players[p].test(c) ? 1 : 0;
      if (count != 0 && count != out.group_size) out.counts_binary = false;
      out.grouped.players[g].set(c, count == out.group_size);
    }
  }

  const double yes_at = static_cast<double>(k) * phi;
  const double no_at = yes_at * (1.0 - eps);
  auto near = [](double a, double b) { return std::abs(a - b) <= kRelTol * std::max(1.0, std::abs(b)); };
  const auto super_counts = problems::column_counts(out.grouped.players);
  out.ungrouped_verdicts = problems::eval_hh(players, phi, eps);
  for (std::size_t c = 0; c < n; ++c) {
    const std::size_t total = super_counts[c] * out.group_size;
    out.totals.push_back(total);
    const auto t = static_cast<double>(total);
    if (!near(t, yes_at) && !near(t, no_at)) out.totals_exact = false;
    const auto v = problems::hh_verdict(total, k, phi, eps);
    out.grouped_verdicts.push_back(v);
    if (v == problems::Verdict::EITHER) out.no_either = false;
    if (v != out.ungrouped_verdicts[c]) out.verdicts_match = false;
  }
  if (out.groups % 2 == 1 && phi == 0.5) {
    const auto maj = problems::eval_bitwise(problems::BitwiseOp::maj(0.5), out.grouped);
    out.maj_match = sample.aux.high_columns && maj == *sample.aux.high_columns;
  }
  return out;
}

}  // namespace commsim::geoapps
