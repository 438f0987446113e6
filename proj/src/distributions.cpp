#include "commsim/distributions.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

#include "commsim/problems.hpp"
#include "commsim/stats.hpp"

namespace commsim::distributions {

namespace {

constexpr double kTol = 1e-9;

bool near_integer(double x) { return std::abs(x - std::round(x)) < kTol; }

struct NameEntry {
  DistName name;
  std::string_view text;
};

constexpr std::array<NameEntry, 11> kNames{{
    {DistName::uniform, "uniform"},
    {DistName::zeta, "zeta"},
    {DistName::mu_disj, "mu_disj"},
    {DistName::mu_prime, "mu_prime"},
    {DistName::nu, "nu"},
    {DistName::tau, "tau"},
    {DistName::tau_phi, "tau_phi"},
    {DistName::tau_hh, "tau_hh"},
    {DistName::phi_conn, "phi_conn"},
    {DistName::naive_onek, "naive_onek"},
    {DistName::balancing, "balancing"},
}};

std::size_t parse_size(std::string_view key, std::string_view value) {
  std::size_t out = 0;
  const auto* end = value.data() + value.size();
  auto [ptr, ec] = std::from_chars(value.data(), end, out);
  if (ec != std::errc{} || ptr != end) {
    throw std::invalid_argument("parameter " + std::string(key) + " expects an integer, got '" + std::string(value) + "'");
  }
  return out;
}

double parse_double(std::string_view key, std::string_view value) {
  // Accept fractions such as 1/16.
  if (auto slash = value.find('/'); slash != std::string_view::npos) {
    const double num = parse_double(key, value.substr(0, slash));
    const double den = parse_double(key, value.substr(slash + 1));
    if (den == 0.0) throw std::invalid_argument("parameter " + std::string(key) + " divides by zero");
    return num / den;
  }
  try {
    std::size_t used = 0;
    const std::string s(value);
    const double out = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument("trailing characters");
    return out;
  } catch (const std::exception&) {
    throw std::invalid_argument("parameter " + std::string(key) + " expects a number, got '" + std::string(value) + "'");
  }
}

std::string format_double(double x) {
  std::ostringstream out;
  out.precision(12);
  out << x;
  return out.str();
}

BitVector subset_bits(std::size_t n, std::span<const std::size_t> idx) { return BitVector::from_indices(n, idx); }

// m-subset of `pool`, uniformly.
std::vector<std::size_t> choose(std::span<const std::size_t> pool, std::size_t m, RandomTape& tape) {
  std::vector<std::size_t> out;
  out.reserve(m);
  for (auto j : tape.sample_without_replacement(pool.size(), m)) out.push_back(pool[j]);
  return out;
}

template <typename F>
void for_each_set_bit(const BitVector& v, F&& f) {
  const auto words = v.words();
  for (std::size_t w = 0; w < words.size(); ++w) {
    std::uint64_t bits = words[w];
    while (bits != 0) {
      f(w * 64 + static_cast<std::size_t>(std::countr_zero(bits)));
      bits &= bits - 1;
    }
  }
}

// Column counts spread uniformly over the k players: count[c] ones in column c.
Instance place_counts(std::size_t n, std::size_t k, std::span<const std::size_t> counts, RandomTape& tape) {
  Instance inst{n, std::vector<BitVector>(k, BitVector(n))};
  for (std::size_t c = 0; c < n; ++c) {
    for (auto p : tape.sample_without_replacement(k, counts[c])) inst.players[p].set(c);
  }
  return inst;
}

Sample sample_tau(const DistSpec& spec, RandomTape& tape) {
  const std::size_t low = spec.name == DistName::tau ? spec.k / 2 : static_cast<std::size_t>(std::floor(spec.k * spec.phi + kTol));
  BitVector high(spec.n);
  std::vector<std::size_t> counts(spec.n);
  for (std::size_t c = 0; c < spec.n; ++c) {
    const bool up = tape.bernoulli(0.5);
    high.set(c, up);
    counts[c] = low + (up ? 1 : 0);
  }
  Sample s;
  s.bits = place_counts(spec.n, spec.k, counts, tape);
  s.aux.high_columns = std::move(high);
  return s;
}

Sample sample_tau_hh(const DistSpec& spec, RandomTape& tape) {
  const auto groups = static_cast<std::size_t>(std::llround(1.0 / spec.eps));
  const auto group_size = static_cast<std::size_t>(std::llround(spec.k * spec.eps));
  const auto yes_groups = static_cast<std::size_t>(std::ceil(spec.phi / spec.eps - kTol));
  const auto no_groups = static_cast<std::size_t>(std::floor(spec.phi * (1.0 - spec.eps) / spec.eps + kTol));
  Sample s;
  s.bits = Instance{spec.n, std::vector<BitVector>(spec.k, BitVector(spec.n))};
  BitVector high(spec.n);
  for (std::size_t c = 0; c < spec.n; ++c) {
    const bool up = tape.bernoulli(0.5);
    high.set(c, up);
    for (auto g : tape.sample_without_replacement(groups, up ? yes_groups : no_groups)) {
      for (std::size_t p = g * group_size; p < (g + 1) * group_size; ++p) s.bits.players[p].set(c);
    }
  }
  s.aux.high_columns = std::move(high);
  return s;
}

Sample sample_balancing(const DistSpec& spec, RandomTape& tape) {
  auto half = tape.sample_without_replacement(spec.n, spec.n / 2);
  std::sort(half.begin(), half.end());
  const BitVector ones = subset_bits(spec.n, half);
  Sample s;
  s.bits.n = spec.n;
  const double p = 1.0 / static_cast<double>(spec.k);
  for (std::size_t j = 0; j < spec.k; ++j) s.bits.players.push_back(bernoulli_bits(spec.n, p, tape) | ones);
  s.aux.balancing = std::move(half);
  return s;
}

std::vector<std::pair<std::size_t, std::size_t>> choose_player_pairs(std::size_t k, std::size_t cap, RandomTape& tape) {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  if (k * (k - 1) / 2 <= cap) {
    for (std::size_t a = 0; a < k; ++a) {
      for (std::size_t b = a + 1; b < k; ++b) pairs.emplace_back(a, b);
    }
    return pairs;
  }
  std::set<std::pair<std::size_t, std::size_t>> seen;
  // Player 0 is the odd one out in every reduction, so test it explicitly.
  for (std::size_t b = 1; b < k && pairs.size() < cap / 2; ++b) {
    pairs.emplace_back(0, b);
    seen.emplace(0, b);
  }
  while (pairs.size() < cap) {
    auto a = static_cast<std::size_t>(tape.uniform(k));
    auto b = static_cast<std::size_t>(tape.uniform(k));
    if (a == b) continue;
    if (a > b) std::swap(a, b);
    if (seen.emplace(a, b).second) pairs.emplace_back(a, b);
  }
  return pairs;
}

}  // namespace

std::string_view to_string(DistName name) {
  for (const auto& e : kNames) {
    if (e.name == name) return e.text;
  }
  return "?";
}

DistSpec DistSpec::parse(std::string_view text) {
  const auto colon = text.find(':');
  const std::string_view head = text.substr(0, colon);
  DistSpec spec;
  const auto it = std::find_if(kNames.begin(), kNames.end(), [&](const NameEntry& e) { return e.text == head; });
  if (it == kNames.end()) throw std::invalid_argument("unknown distribution: " + std::string(head));
  spec.name = it->name;

  bool k_given = false;
  std::string_view rest = colon == std::string_view::npos ? std::string_view{} : text.substr(colon + 1);
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const std::string_view item = rest.substr(0, comma);
    rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) throw std::invalid_argument("expected key=value, got '" + std::string(item) + "'");
    const std::string_view key = item.substr(0, eq);
    const std::string_view value = item.substr(eq + 1);
    if (key == "n") {
      spec.n = parse_size(key, value);
    } else if (key == "k") {
      spec.k = parse_size(key, value);
      k_given = true;
    } else if (key == "t") {
      spec.t = parse_double(key, value);
    } else if (key == "rho") {
      spec.rho = parse_double(key, value);
    } else if (key == "phi") {
      spec.phi = parse_double(key, value);
    } else if (key == "eps") {
      spec.eps = parse_double(key, value);
    } else if (key == "planted") {
      spec.planted = parse_size(key, value) != 0;
    } else {
      throw std::invalid_argument("unknown distribution parameter: " + std::string(key));
    }
  }
  if (!k_given) {
    if (spec.name == DistName::zeta) spec.k = 1;
    if (spec.name == DistName::phi_conn && spec.n > 0) spec.k = conn_default_players(spec.n);
  }
  if (spec.name == DistName::mu_prime) spec.t = 4.0;
  if (spec.name == DistName::phi_conn) spec.t = 10.0 * static_cast<double>(spec.k);
  spec.validate();
  return spec;
}

std::string DistSpec::to_string() const {
  std::string out(distributions::to_string(name));
  out += ":n=" + std::to_string(n);
  out += ",k=" + std::to_string(k);
  switch (name) {
    case DistName::zeta: out += ",rho=" + format_double(rho); break;
    case DistName::mu_disj: out += ",t=" + format_double(t); break;
    case DistName::tau_phi: out += ",phi=" + format_double(phi); break;
    case DistName::tau_hh: out += ",phi=" + format_double(phi) + ",eps=" + format_double(eps); break;
    default: break;
  }
  if (planted) out += ",planted=1";
  return out;
}

void DistSpec::validate() const {
  auto fail = [&](const std::string& why) {
    throw std::invalid_argument(std::string(distributions::to_string(name)) + ": " + why);
  };
  if (n == 0) fail("n must be positive");
  if (name == DistName::zeta) {
    if (k < 1) fail("k must be at least 1");
    if (!(rho > 0.0 && rho < 1.0)) fail("rho must lie in (0,1)");
    return;
  }
  if (k < 2) fail("k must be at least 2");
  switch (name) {
    case DistName::mu_disj:
      if (k != 2) fail("2-DISJ has exactly two players");
      if (n % 4 != 3) fail("n must be 3 mod 4");
      if (t < 2.0) fail("t must be at least 2");
      break;
    case DistName::mu_prime:
    case DistName::phi_conn:
      if (n < 3) fail("n must be at least 3");
      break;
    case DistName::tau:
      if (k % 2 == 0) fail("k must be odd");
      break;
    case DistName::tau_phi:
      if (!(phi > 0.0 && phi < 1.0)) fail("phi must lie in (0,1)");
      if (static_cast<std::size_t>(std::floor(k * phi + kTol)) + 1 > k) fail("floor(k*phi)+1 exceeds k");
      break;
    case DistName::tau_hh: {
      if (!(phi > 0.0 && phi < 1.0)) fail("phi must lie in (0,1)");
      if (!(eps > 0.0 && eps < 1.0)) fail("eps must lie in (0,1)");
      if (!near_integer(1.0 / eps)) fail("1/eps must be an integer");
      if (!near_integer(k * eps) || std::llround(k * eps) < 1) fail("k*eps must be a positive integer");
      if (std::ceil(phi / eps - kTol) > std::round(1.0 / eps)) fail("phi/eps exceeds the group count");
      break;
    }
    case DistName::balancing:
      if (n < 2) fail("n must be at least 2");
      break;
    default:
      break;
  }
}

std::size_t DistSpec::coordinates() const {
  if (name == DistName::phi_conn) return (2 * n) * (2 * n - 1) / 2;
  return n;
}

std::size_t conn_default_players(std::size_t n) {
  return static_cast<std::size_t>(std::ceil(68.0 * std::log(static_cast<double>(n)))) + 1;
}

BitVector random_bits(std::size_t n, RandomTape& tape) {
  BitVector out(n);
  auto words = out.words();
  for (auto& w : words) w = tape.next_u64();
  if (n % 64 != 0 && !words.empty()) words.back() &= (std::uint64_t{1} << (n % 64)) - 1;
  return out;
}

BitVector bernoulli_bits(std::size_t n, double p, RandomTape& tape) {
  if (p == 0.5) return random_bits(n, tape);
  BitVector out(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (tape.bernoulli(p)) out.set(i);
  }
  return out;
}

std::vector<BitVector> conditioned_xor_fill(const BitVector& y, std::size_t count, RandomTape& tape) {
  if (count == 0) throw std::invalid_argument("conditioned_xor_fill needs at least one vector");
  std::vector<BitVector> out;
  out.reserve(count);
  BitVector last = y;
  for (std::size_t j = 0; j + 1 < count; ++j) {
    out.push_back(random_bits(y.size(), tape));
    last ^= out.back();
  }
  out.push_back(std::move(last));
  return out;
}

DisjPair sample_mu_pair(std::size_t n, double t, RandomTape& tape) {
  const std::size_t l = (n + 1) / 4;
  if (l == 0) throw std::invalid_argument("2-DISJ needs n >= 3");
  const auto perm = tape.permutation(n);
  const std::span<const std::size_t> t0(perm.data(), 2 * l - 1);
  const std::span<const std::size_t> t1(perm.data() + 2 * l - 1, 2 * l - 1);
  const std::size_t i = perm[4 * l - 2];
  const double q = 1.0 / std::sqrt(t);

  auto side = [&](std::span<const std::size_t> pool, bool with_i) {
    auto idx = choose(pool, with_i ? l - 1 : l, tape);
    if (with_i) idx.push_back(i);
    return subset_bits(n, idx);
  };
  const bool xi = tape.bernoulli(q);
  const bool yi = tape.bernoulli(q);
  DisjPair out;
  out.x = side(t0, xi);
  out.y = side(t1, yi);
  if (xi && yi) out.intersection = i;
  out.l = l;
  return out;
}

OrConstruction build_or_instance(const DisjPair& pair, std::size_t k, RandomTape& tape) {
  const std::size_t n = pair.x.size();
  const std::size_t l = pair.l;
  const auto y_idx = pair.y.indices();
  std::vector<std::size_t> z;
  z.reserve(n - y_idx.size());
  for (std::size_t c = 0; c < n; ++c) {
    if (!pair.y.test(c)) z.push_back(c);
  }
  if (z.size() < l || y_idx.empty()) throw std::invalid_argument("2-DISJ pair too small for the k-OR construction");

  OrConstruction out;
  out.instance.n = n;
  out.instance.players.push_back(pair.x);
  std::set<std::size_t> special;
  for (std::size_t j = 1; j < k; ++j) {
    if (tape.bernoulli(0.25)) {
      auto idx = choose(z, l - 1, tape);
      const std::size_t s = y_idx[tape.uniform(y_idx.size())];
      idx.push_back(s);
      special.insert(s);
      out.instance.players.push_back(subset_bits(n, idx));
    } else {
      out.instance.players.push_back(subset_bits(n, choose(z, l, tape)));
    }
  }
  out.special.assign(special.begin(), special.end());
  return out;
}

ConnConstruction build_conn_instance(const DisjPair& pair, std::size_t k, RandomTape& tape) {
  const std::size_t n = pair.x.size();
  const std::size_t vertices = 2 * n;
  const std::size_t l = pair.l;

  ConnConstruction out;
  auto& w = out.witness;
  std::vector<std::uint32_t> left;
  std::vector<std::uint32_t> right;
  do {
    w.sigma = tape.permutation(vertices);
    w.left = BitVector(vertices);
    left.clear();
    right.clear();
    for (std::size_t i = 0; i < n; ++i) {
      const auto a = static_cast<std::uint32_t>(w.sigma[2 * i]);
      const auto b = static_cast<std::uint32_t>(w.sigma[2 * i + 1]);
      const bool coin = tape.bernoulli(0.5);
      if (pair.y.test(i)) {
        (coin ? left : right).push_back(a);
        (coin ? right : left).push_back(b);
      } else {
        (coin ? left : right).push_back(a);
        (coin ? left : right).push_back(b);
      }
    }
    for (auto v : left) w.left.set(v);
  } while (4 * std::min(left.size(), right.size()) < n);

  if (left.size() / 2 + right.size() / 2 < l) throw std::runtime_error("k-CONN: sides too small for a matching");

  out.graph.vertex_count = vertices;
  EdgeSet alice{vertices, {}};
  for (auto i : pair.x.indices()) alice.edges.push_back(make_edge(w.sigma[2 * i], w.sigma[2 * i + 1]));
  std::sort(alice.edges.begin(), alice.edges.end());
  out.graph.players.push_back(std::move(alice));

  const double pairs_l = static_cast<double>(left.size()) * static_cast<double>(left.size() - 1) / 2.0;
  const double pairs_r = static_cast<double>(right.size()) * static_cast<double>(right.size() - 1) / 2.0;
  const double p_left = pairs_l / (pairs_l + pairs_r);
  const double p_cross = 1.0 / (10.0 * static_cast<double>(k));
  std::vector<char> used(vertices, 0);

  for (std::size_t j = 1; j < k; ++j) {
    EdgeSet mine{vertices, {}};
    std::fill(used.begin(), used.end(), 0);
    std::size_t want = l;
    if (tape.bernoulli(p_cross)) {
      const auto a = left[tape.uniform(left.size())];
      const auto b = right[tape.uniform(right.size())];
      mine.edges.push_back(make_edge(a, b));
      used[a] = used[b] = 1;
      --want;
    }
    std::size_t rejections = 0;
    while (want > 0) {
      const auto& side = tape.bernoulli(p_left) ? left : right;
      const auto a = side[tape.uniform(side.size())];
      const auto b = side[tape.uniform(side.size())];
      if (a == b || used[a] != 0 || used[b] != 0) {
        if (++rejections > 10000) throw std::runtime_error("k-CONN: matching sampler exceeded its retry budget");
        continue;
      }
      used[a] = used[b] = 1;
      mine.edges.push_back(make_edge(a, b));
      --want;
    }
    std::sort(mine.edges.begin(), mine.edges.end());
    out.graph.players.push_back(std::move(mine));
  }

  // Events over Bob's players 1..k-1.
  DisjointSets in_sides(vertices);
  DisjointSets all(vertices);
  for (std::size_t j = 1; j < k; ++j) {
    for (const auto& e : out.graph.players[j].edges) {
      all.unite(e.u, e.v);
      if (w.left.test(e.u) == w.left.test(e.v)) in_sides.unite(e.u, e.v);
    }
  }
  // Two components, one per side, means both sides are connected and spanned.
  w.flags.xi1 = in_sides.components() == 2;
  w.flags.xi2 = all.components() > 1;
  return out;
}

Sample sample(const DistSpec& spec, RandomTape& tape) {
  spec.validate();
  Sample s;
  switch (spec.name) {
    case DistName::uniform:
      s.bits.n = spec.n;
      for (std::size_t j = 0; j < spec.k; ++j) s.bits.players.push_back(random_bits(spec.n, tape));
      break;
    case DistName::zeta:
      s.bits.n = spec.n;
      for (std::size_t j = 0; j < spec.k; ++j) s.bits.players.push_back(bernoulli_bits(spec.n, spec.rho, tape));
      break;
    case DistName::nu:
    case DistName::naive_onek:
      s.bits.n = spec.n;
      for (std::size_t j = 0; j < spec.k; ++j) {
        s.bits.players.push_back(bernoulli_bits(spec.n, 1.0 / static_cast<double>(spec.k), tape));
      }
      break;
    case DistName::mu_disj: {
      auto pair = sample_mu_pair(spec.n, spec.t, tape);
      s.bits = Instance{spec.n, {pair.x, pair.y}};
      s.aux.disj = std::move(pair);
      break;
    }
    case DistName::mu_prime: {
      auto pair = sample_mu_pair(spec.n, 4.0, tape);
      auto built = build_or_instance(pair, spec.k, tape);
      s.bits = std::move(built.instance);
      s.aux.disj = std::move(pair);
      s.aux.special = std::move(built.special);
      break;
    }
    case DistName::tau:
    case DistName::tau_phi:
      s = sample_tau(spec, tape);
      break;
    case DistName::tau_hh:
      s = sample_tau_hh(spec, tape);
      break;
    case DistName::phi_conn: {
      auto pair = sample_mu_pair(spec.n, 10.0 * static_cast<double>(spec.k), tape);
      auto built = build_conn_instance(pair, spec.k, tape);
      s.graph = std::move(built.graph);
      s.aux.disj = std::move(pair);
      s.aux.conn = std::move(built.witness);
      break;
    }
    case DistName::balancing:
      s = sample_balancing(spec, tape);
      break;
  }
  if (spec.planted) {
    if (s.graph) {
      throw std::invalid_argument("planted asymmetry applies only to bit inputs");
    }
    s.bits.players.front() = ~BitVector(spec.n);
  }
  return s;
}

std::vector<BitVector> sample_players(const DistSpec& spec, RandomTape& tape) {
  Sample s = sample(spec, tape);
  if (!s.graph) return std::move(s.bits.players);
  std::vector<BitVector> out;
  out.reserve(s.graph->k());
  for (const auto& p : s.graph->players) out.push_back(edge_indicator(p));
  return out;
}

SymmetryReport symmetry_check(const PlayerSampler& sampler, std::size_t players, std::size_t trials,
                              const RandomTape& tape, const SymmetryOptions& options) {
  if (players < 2) throw std::invalid_argument("symmetry check needs at least two players");
  if (trials == 0) throw std::invalid_argument("symmetry check needs trials");
  RandomTape setup = tape.derive("symmetry-setup");
  const auto pairs = choose_player_pairs(players, options.max_player_pairs, setup);

  std::map<std::size_t, std::size_t> slot;
  for (const auto& [a, b] : pairs) {
    slot.emplace(a, slot.size());
    slot.emplace(b, slot.size());
  }

  std::size_t n = 0;
  std::vector<std::pair<std::size_t, std::size_t>> columns;
  std::vector<std::vector<std::uint64_t>> ones;
  std::vector<std::vector<std::uint64_t>> both;
  std::vector<std::vector<std::array<std::uint64_t, 16>>> joint;

  for (std::size_t trial = 0; trial < trials; ++trial) {
    RandomTape tt = tape.derive("symmetry-trial", trial);
    const auto inputs = sampler(tt);
    if (inputs.size() != players) throw std::invalid_argument("sampler returned the wrong number of players");
    if (trial == 0) {
      n = inputs.front().size();
      ones.assign(slot.size(), std::vector<std::uint64_t>(n, 0));
      both.assign(pairs.size(), std::vector<std::uint64_t>(n, 0));
      if (n >= 2) {
        for (std::size_t c = 0; c < options.column_pairs; ++c) {
          const auto pick = setup.sample_without_replacement(n, 2);
          columns.emplace_back(std::min(pick[0], pick[1]), std::max(pick[0], pick[1]));
        }
      }
      joint.assign(pairs.size(), std::vector<std::array<std::uint64_t, 16>>(columns.size(), std::array<std::uint64_t, 16>{}));
    }
    for (const auto& [p, s] : slot) {
      auto& row = ones[s];
      for_each_set_bit(inputs[p], [&](std::size_t c) { ++row[c]; });
    }
    for (std::size_t q = 0; q < pairs.size(); ++q) {
      const auto& a = inputs[pairs[q].first];
      const auto& b = inputs[pairs[q].second];
      auto& row = both[q];
      for_each_set_bit(a & b, [&](std::size_t c) { ++row[c]; });
      for (std::size_t cp = 0; cp < columns.size(); ++cp) {
        const auto [c1, c2] = columns[cp];
        const unsigned pa = (a.test(c1) ? 2U : 0U) | (a.test(c2) ? 1U : 0U);
        const unsigned pb = (b.test(c1) ? 2U : 0U) | (b.test(c2) ? 1U : 0U);
        ++joint[q][cp][pa * 4 + pb];
      }
    }
  }

  SymmetryReport report;
  report.trials = trials;
  report.tests = pairs.size() * (n + columns.size());
  for (std::size_t q = 0; q < pairs.size(); ++q) {
    const auto [a, b] = pairs[q];
    PairResult pr{a, b, 0.0, 1.0};
    auto consider = [&](const stats::TestResult& r, const std::string& what) {
      pr.max_chi2 = std::max(pr.max_chi2, r.statistic);
      if (r.p_value < pr.min_p) pr.min_p = r.p_value;
      if (r.p_value < report.min_p) {
        report.min_p = r.p_value;
        report.worst = "players " + std::to_string(a) + "," + std::to_string(b) + " " + what;
      }
    };
    for (std::size_t c = 0; c < n; ++c) {
      const auto n11 = both[q][c];
      const auto r = stats::mcnemar(ones[slot.at(b)][c] - n11, ones[slot.at(a)][c] - n11);
      consider(r, "coordinate " + std::to_string(c));
    }
    for (std::size_t cp = 0; cp < columns.size(); ++cp) {
      const auto r = stats::bowker(joint[q][cp], 4);
      consider(r, "columns " + std::to_string(columns[cp].first) + "," + std::to_string(columns[cp].second));
    }
    report.max_chi2 = std::max(report.max_chi2, pr.max_chi2);
    report.pairs.push_back(pr);
  }
  report.corrected_p = std::min(1.0, report.min_p * static_cast<double>(std::max<std::size_t>(report.tests, 1)));
  report.pass = report.corrected_p >= options.alpha;
  return report;
}

SymmetryReport symmetry_check(const DistSpec& spec, std::size_t trials, const RandomTape& tape,
                              const SymmetryOptions& options) {
  spec.validate();
  return symmetry_check([&](RandomTape& t) { return sample_players(spec, t); }, spec.k, trials, tape, options);
}

double empirical_entropy(const DistSpec& spec, std::size_t trials, const RandomTape& tape) {
  if (trials == 0) throw std::invalid_argument("entropy estimate needs trials");
  std::vector<std::uint64_t> ones(spec.coordinates(), 0);
  for (std::size_t trial = 0; trial < trials; ++trial) {
    RandomTape tt = tape.derive("entropy-trial", trial);
    const auto players = sample_players(spec, tt);
    for_each_set_bit(players.front(), [&](std::size_t c) { ++ones[c]; });
  }
  double h = 0.0;
  for (auto c : ones) h += stats::binary_entropy(static_cast<double>(c) / static_cast<double>(trials));
  return h;
}

nlohmann::json to_json(const Aux& aux) {
  nlohmann::json j = nlohmann::json::object();
  if (aux.disj) {
    j["x"] = aux.disj->x.to_hex();
    j["y"] = aux.disj->y.to_hex();
    j["l"] = aux.disj->l;
    j["intersection"] = aux.disj->intersection ? nlohmann::json(*aux.disj->intersection + 1) : nlohmann::json(nullptr);
  }
  if (aux.special) {
    auto v = nlohmann::json::array();
    for (auto s : *aux.special) v.push_back(s + 1);
    j["special"] = std::move(v);
  }
  if (aux.conn) {
    auto sigma = nlohmann::json::array();
    for (auto s : aux.conn->sigma) sigma.push_back(s + 1);
    j["sigma"] = std::move(sigma);
    j["left"] = aux.conn->left.to_hex();
    j["xi1"] = aux.conn->flags.xi1;
    j["xi2"] = aux.conn->flags.xi2;
  }
  if (aux.high_columns) j["high_columns"] = aux.high_columns->to_hex();
  if (aux.balancing) {
    auto v = nlohmann::json::array();
    for (auto s : *aux.balancing) v.push_back(s + 1);
    j["balancing"] = std::move(v);
  }
  return j;
}

nlohmann::json to_json(const Sample& sample) {
  nlohmann::json j = sample.graph ? problems::to_json(*sample.graph) : problems::to_json(sample.bits);
  j["aux"] = to_json(sample.aux);
  return j;
}

}  // namespace commsim::distributions
