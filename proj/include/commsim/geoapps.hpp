#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include <nlohmann/json.hpp>

#include "commsim/bit_vector.hpp"
#include "commsim/instance.hpp"
#include "commsim/problems.hpp"
#include "commsim/random_tape.hpp"

namespace commsim::geoapps {

/// Planar point; every routine here works in d = 2.
struct Point {
  double x = 0.0;
  double y = 0.0;

  friend bool operator==(const Point&, const Point&) = default;
};

using PointSet = std::vector<Point>;

inline double dot(const Point& a, const Point& b) { return a.x * b.x + a.y * b.y; }

/// max <p,u> - min <p,u>. Throws on an empty set, a zero direction or
/// non-finite coordinates.
double width(std::span<const Point> points, const Point& u);

/// m unit directions at angles 2*pi*i/m.
std::vector<Point> grid_directions(std::size_t m);

/// ceil(2*pi / sqrt(eps)).
std::size_t min_direction_count(double eps);

/// Indices of the extreme points of P in each of m grid directions and
/// their negations, ascending and unique. Ties go to the point furthest
/// counter-clockwise, so only hull vertices are picked. m = 0 selects
/// min_direction_count(eps).
std::vector<std::size_t> epsilon_kernel_indices(std::span<const Point> points, double eps, std::size_t m = 0);
PointSet epsilon_kernel(std::span<const Point> points, double eps, std::size_t m = 0);

struct KernelCheck {
  bool ok = true;
  /// Direction with the largest relative deficit (wid(P)-wid(K))/wid(P).
  Point worst_direction;
  double worst_ratio = 0.0;
  double eps = 0.0;
  std::size_t directions = 0;
};

/// The width condition on every test direction. Throws std::invalid_argument
/// when some point of K is not in P.
KernelCheck is_kernel(std::span<const Point> points, std::span<const Point> kernel, double eps,
                      std::span<const Point> directions);

nlohmann::json to_json(const KernelCheck& check);

/// `count` uniform points in the disk of the given centre and radius.
PointSet disk_points(std::size_t count, const Point& centre, double radius, RandomTape& tape);

/// Grid kernels of two random disks; checks their union against the union of
/// the disks on a 10m test grid.
KernelCheck composability_trial(double eps, std::size_t points_per_disk, RandomTape& tape);

/// K1 = eps1-kernel of a disk, K2 = eps2-kernel of K1; checks K2 against
/// the disk with eps1 + eps2.
KernelCheck transitivity_trial(double eps1, double eps2, std::size_t points, RandomTape& tape);

// --- k-OR -> eps-kernel -----------------------------------------------------

/// Largest odd direction count whose angular spacing still separates a unit
/// point from its neighbours by 2 eps: 1 - cos(2 pi / n) >= 2 eps.
std::size_t max_or_directions(double eps);

struct PointLabel {
  std::size_t player = 0;
  std::size_t direction = 0;
};

struct KernelOrInstance {
  double eps = 0.0;
  std::size_t directions = 0;
  std::vector<PointSet> players;
  /// All players' points, player-major, with their labels.
  PointSet all;
  std::vector<PointLabel> labels;
  /// Removing any single point of the unit ring breaks the kernel property.
  bool drop_one_verified = false;
};

/// Player i's j-th point lies on direction j at norm 1 when bit j is set and
/// at norm 1 - 2 eps otherwise. Refuses an even or too fine direction grid.
KernelOrInstance build_kernel_instance_from_or(std::span<const BitVector> bits, double eps);

/// Bit j is 1 iff the kernel (indices into `all`) holds a norm-1 point on
/// direction j. Throws on a point whose norm is neither 1 nor 1 - 2 eps.
BitVector decode_kernel(const KernelOrInstance& instance, std::span<const std::size_t> kernel);

/// Smallest multiple of the instance's direction count that meets
/// min_direction_count(eps), so every u_j is a kernel direction.
std::size_t or_kernel_direction_count(const KernelOrInstance& instance);

/// Whether ring \ {point j} fails the eps-kernel test for every j.
bool drop_one_breaks(std::size_t directions, double eps);

/// CSV rows player,x,y with 1-based players.
void write_points_csv(std::ostream& out, std::span<const PointSet> players);

// --- heavy hitters ----------------------------------------------------------

struct HhGroupResult {
  std::size_t groups = 0;
  std::size_t group_size = 0;
  /// One super-player per group: bit set where the group's count is k*eps.
  Instance grouped;
  std::vector<std::size_t> totals;
  std::vector<problems::Verdict> grouped_verdicts;
  std::vector<problems::Verdict> ungrouped_verdicts;
  /// Every group count is 0 or k*eps.
  bool counts_binary = true;
  /// Every total is exactly k*phi or k*phi*(1-eps).
  bool totals_exact = true;
  bool verdicts_match = true;
  bool no_either = true;
  /// Majority of the super-players equals the YES columns; set when the
  /// group count is odd and phi = 1/2.
  std::optional<bool> maj_match;
};

HhGroupResult hh_group_reduction(std::size_t n, std::size_t k, double phi, double eps, RandomTape& tape);

}  // namespace commsim::geoapps
