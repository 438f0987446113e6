#include "commsim/refprotocols.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <optional>
#include <stdexcept>

#include "commsim/coding.hpp"
#include "commsim/distributions.hpp"
#include "commsim/errors.hpp"

namespace commsim::refprotocols {

namespace {

// A player that sends one message to the coordinator and then stays quiet.
template <typename Encode>
class SendOnce final : public EndpointLogic {
 public:
  explicit SendOnce(Encode encode) : encode_(std::move(encode)) {}

  Action act(const View& view) override {
    if (sent_) return Action::wait();
    sent_ = true;
    return Action::send(view.coordinator(), encode_(view));
  }

 private:
  Encode encode_;
  bool sent_ = false;
};

template <typename Encode>
std::unique_ptr<EndpointLogic> send_once(Encode encode) {
  return std::make_unique<SendOnce<Encode>>(std::move(encode));
}

// --- sendall -------------------------------------------------------------

class SendAllCoordinator final : public EndpointLogic {
 public:
  explicit SendAllCoordinator(problems::BitwiseOp op) : op_(op) {}

  Action act(const View& view) override {
    if (view.history().size() < view.players()) return Action::wait();
    std::vector<BitVector> inputs(view.players());
    for (const Message* m : view.history()) inputs[m->sender] = m->payload;
    return Action::declare(problems::eval_bitwise(op_, inputs));
  }

 private:
  problems::BitwiseOp op_;
};

class SendAll final : public Protocol {
 public:
  explicit SendAll(problems::BitwiseOp op) : op_(op) {}

  [[nodiscard]] std::string name() const override { return "sendall"; }
  [[nodiscard]] ModelKind model() const override { return ModelKind::coordinator; }
  [[nodiscard]] std::unique_ptr<EndpointLogic> make_endpoint(EndpointId id, std::size_t players) const override {
    if (id == players) return std::make_unique<SendAllCoordinator>(op_);
    return send_once([](const View& v) { return v.input(); });
  }

 private:
  problems::BitwiseOp op_;
};

// --- blackboard OR -------------------------------------------------------

BitVector board_union(const View& view) {
  BitVector seen(view.input_bits());
  for (const Message* m : view.history()) {
    BitReader in(m->payload);
    for (auto i : coding::read_index_set(in, view.input_bits())) seen.set(i);
  }
  return seen;
}

class BoardOrPlayer final : public EndpointLogic {
 public:
  Action act(const View& view) override {
    const BitVector seen = board_union(view);
    if (view.history().size() == view.players()) return Action::declare(seen);
    const auto fresh = (view.input() & ~seen).indices();
    BitVector payload;
    coding::write_index_set(payload, fresh);
    return Action::write_board(std::move(payload));
  }
};

class BoardOr final : public Protocol {
 public:
  [[nodiscard]] std::string name() const override { return "bb-or"; }
  [[nodiscard]] ModelKind model() const override { return ModelKind::blackboard; }
  [[nodiscard]] std::unique_ptr<EndpointLogic> make_endpoint(EndpointId, std::size_t) const override {
    return std::make_unique<BoardOrPlayer>();
  }
  [[nodiscard]] EndpointId next_speaker(std::span<const Message> board, std::size_t players) const override {
    return static_cast<EndpointId>(std::min(board.size(), players - 1));
  }
};

// --- entropy-coded OR ----------------------------------------------------

BitVector encode_set(const View& view) {
  BitVector payload;
  coding::write_index_set(payload, view.input().indices());
  return payload;
}

class EntropyCoordinator final : public EndpointLogic {
 public:
  explicit EntropyCoordinator(bool and_mode) : and_mode_(and_mode) {}

  Action act(const View& view) override {
    if (view.history().size() < view.players()) return Action::wait();
    std::vector<BitVector> inputs(view.players());
    for (const Message* m : view.history()) {
      try {
        BitReader in(m->payload);
        const auto idx = coding::read_index_set(in, view.input_bits());
        if (!in.at_end()) throw std::runtime_error("trailing bits");
        inputs[m->sender] = BitVector::from_indices(view.input_bits(), idx);
      } catch (const std::exception& e) {
        throw ProtocolError("entropy-or: cannot decode the message of player " + std::to_string(m->sender) + ": " +
                            e.what());
      }
    }
    const auto op = and_mode_ ? problems::BitwiseOp::and_op() : problems::BitwiseOp::or_op();
    return Action::declare(problems::eval_bitwise(op, inputs));
  }

 private:
  bool and_mode_;
};

class EntropyOr final : public Protocol {
 public:
  explicit EntropyOr(bool and_mode) : and_mode_(and_mode) {}

  [[nodiscard]] std::string name() const override { return "entropy-or"; }
  [[nodiscard]] ModelKind model() const override { return ModelKind::coordinator; }
  [[nodiscard]] std::unique_ptr<EndpointLogic> make_endpoint(EndpointId id, std::size_t players) const override {
    if (id == players) return std::make_unique<EntropyCoordinator>(and_mode_);
    return send_once(encode_set);
  }

 private:
  bool and_mode_;
};

// --- Slepian-Wolf OR -----------------------------------------------------

class SwCoordinator final : public EndpointLogic {
 public:
  explicit SwCoordinator(SlepianWolfParams params) : params_(params) {}

  Action act(const View& view) override {
    const std::size_t k = view.players();
    const std::size_t n = view.input_bits();
    if (view.history().size() < k) return Action::wait();

    const std::size_t probes = sw_probe_count(n, k);
    const std::size_t m = sw_parity_count(n, k, params_.c_sw);
    const std::size_t cap = sw_weight_cap(n, k, params_.weight_factor);

    std::vector<const BitVector*> payload(k, nullptr);
    for (const Message* msg : view.history()) payload[msg->sender] = &msg->payload;

    BitVector balancing = ~BitVector(n);
    BitVector answer(n);
    for (std::size_t p = 0; p < probes; ++p) {
      balancing &= *payload[p];
      answer |= *payload[p];
    }
    bool failed = false;
    for (std::size_t p = probes; p < k; ++p) {
      const auto subsets = sw_parity_subsets(view.public_tape(), p, m, n);
      const auto rec = sw_reconstruct(balancing, subsets, *payload[p], cap, params_.max_kernel_dim);
      if (rec.status != SwReconstruction::Status::unique) {
        failed = true;
        continue;
      }
      answer |= rec.value;
    }
    return Action::declare(Answer{std::move(answer), failed});
  }

 private:
  SlepianWolfParams params_;
};

class SlepianWolf final : public Protocol {
 public:
  explicit SlepianWolf(SlepianWolfParams params) : params_(params) {}

  [[nodiscard]] std::string name() const override { return "sw-or"; }
  [[nodiscard]] ModelKind model() const override { return ModelKind::coordinator; }
  [[nodiscard]] std::unique_ptr<EndpointLogic> make_endpoint(EndpointId id, std::size_t players) const override {
    if (id == players) return std::make_unique<SwCoordinator>(params_);
    const double c_sw = params_.c_sw;
    return send_once([c_sw](const View& v) {
      const std::size_t n = v.input_bits();
      const std::size_t k = v.players();
      if (v.self() < sw_probe_count(n, k)) return v.input();
      const auto subsets = sw_parity_subsets(v.public_tape(), v.self(), sw_parity_count(n, k, c_sw), n);
      return sw_parities(v.input(), subsets);
    });
  }

 private:
  SlepianWolfParams params_;
};

// Reduced row echelon form of an augmented GF(2) system; returns pivot
// columns, or nullopt when inconsistent.
std::optional<std::vector<std::size_t>> eliminate(std::vector<BitVector>& rows, std::size_t cols) {
  std::vector<std::size_t> pivots;
  std::size_t r = 0;
  for (std::size_t c = 0; c < cols && r < rows.size(); ++c) {
    std::size_t sel = r;
    while (sel < rows.size() && !rows[sel].test(c)) ++sel;
    if (sel == rows.size()) continue;
    std::swap(rows[r], rows[sel]);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i != r && rows[i].test(c)) rows[i] ^= rows[r];
    }
    pivots.push_back(c);
    ++r;
  }
  for (std::size_t i = r; i < rows.size(); ++i) {
    if (rows[i].test(cols)) return std::nullopt;
  }
  rows.resize(r);
  return pivots;
}

}  // namespace

std::unique_ptr<Protocol> sendall(problems::BitwiseOp op) { return std::make_unique<SendAll>(op); }
std::unique_ptr<Protocol> blackboard_or() { return std::make_unique<BoardOr>(); }
std::unique_ptr<Protocol> entropy_coded_or(bool and_mode) { return std::make_unique<EntropyOr>(and_mode); }
std::unique_ptr<Protocol> slepian_wolf_or(SlepianWolfParams params) { return std::make_unique<SlepianWolf>(params); }

std::size_t sw_probe_count(std::size_t n, std::size_t k) {
  if (k < 2) return k;
  const auto cap = std::min<std::size_t>(k - 1, static_cast<std::size_t>(std::ceil(100.0 * std::log2(std::max<double>(n, 2)))));
  std::size_t p = 1;
  double expected_false = static_cast<double>(n) / 2.0 / static_cast<double>(k);
  while (p < cap && expected_false > 0.01) {
    expected_false /= static_cast<double>(k);
    ++p;
  }
  return p;
}

std::size_t sw_parity_count(std::size_t n, std::size_t k, double c_sw) {
  return static_cast<std::size_t>(std::ceil(c_sw * static_cast<double>(n) * std::log2(static_cast<double>(k)) /
                                            static_cast<double>(k) - 1e-9));
}

std::size_t sw_weight_cap(std::size_t n, std::size_t k, double weight_factor) {
  return static_cast<std::size_t>(std::ceil(weight_factor * (static_cast<double>(n) / 2.0) / static_cast<double>(k) - 1e-9));
}

std::vector<BitVector> sw_parity_subsets(const RandomTape& tape, std::size_t player, std::size_t m, std::size_t n) {
  RandomTape sub = tape.derive("sw-parity", player);
  std::vector<BitVector> out;
  out.reserve(m);
  for (std::size_t j = 0; j < m; ++j) out.push_back(distributions::random_bits(n, sub));
  return out;
}

BitVector sw_parities(const BitVector& input, std::span<const BitVector> subsets) {
  BitVector out(subsets.size());
  for (std::size_t j = 0; j < subsets.size(); ++j) out.set(j, (input & subsets[j]).count() % 2 == 1);
  return out;
}

SwReconstruction sw_reconstruct(const BitVector& balancing, std::span<const BitVector> subsets,
                                const BitVector& parities, std::size_t weight_cap, std::size_t max_kernel_dim) {
  if (parities.size() != subsets.size()) throw std::invalid_argument("one parity per subset is required");
  const std::size_t n = balancing.size();
  std::vector<std::size_t> free_coords;
  for (std::size_t c = 0; c < n; ++c) {
    if (!balancing.test(c)) free_coords.push_back(c);
  }
  const std::size_t cols = free_coords.size();

  std::vector<BitVector> rows;
  rows.reserve(subsets.size());
  for (std::size_t j = 0; j < subsets.size(); ++j) {
    BitVector row(cols + 1);
    for (std::size_t c = 0; c < cols; ++c) row.set(c, subsets[j].test(free_coords[c]));
    const bool fixed = (subsets[j] & balancing).count() % 2 == 1;
    row.set(cols, parities.test(j) != fixed);
    rows.push_back(std::move(row));
  }

  SwReconstruction out;
  const auto pivots = eliminate(rows, cols);
  if (!pivots) return out;
  const std::size_t dim = cols - pivots->size();
  if (dim > max_kernel_dim) {
    out.status = SwReconstruction::Status::too_large;
    return out;
  }

  std::vector<char> is_pivot(cols, 0);
  for (auto c : *pivots) is_pivot[c] = 1;
  BitVector particular(cols);
  for (std::size_t r = 0; r < pivots->size(); ++r) particular.set((*pivots)[r], rows[r].test(cols));
  std::vector<BitVector> kernel;
  for (std::size_t f = 0; f < cols; ++f) {
    if (is_pivot[f]) continue;
    BitVector v(cols);
    v.set(f);
    for (std::size_t r = 0; r < pivots->size(); ++r) {
      if (rows[r].test(f)) v.set((*pivots)[r]);
    }
    kernel.push_back(std::move(v));
  }

  BitVector cur = particular;
  BitVector found;
  auto consider = [&] {
    if (cur.count() <= weight_cap) {
      ++out.consistent;
      found = cur;
    }
  };
  consider();
  const std::uint64_t total = std::uint64_t{1} << dim;
  for (std::uint64_t g = 1; g < total; ++g) {
    cur ^= kernel[static_cast<std::size_t>(std::countr_zero(g))];
    consider();
  }

  if (out.consistent == 0) return out;
  if (out.consistent > 1) {
    out.status = SwReconstruction::Status::ambiguous;
    return out;
  }
  out.status = SwReconstruction::Status::unique;
  out.value = balancing;
  for (std::size_t c = 0; c < cols; ++c) {
    if (found.test(c)) out.value.set(free_coords[c]);
  }
  return out;
}

std::unique_ptr<Protocol> make_protocol(std::string_view name, problems::BitwiseOp op) {
  if (name == "sendall") return sendall(op);
  if (name == "bb-or") return blackboard_or();
  if (name == "entropy-or") return entropy_coded_or(false);
  if (name == "sw-or") return slepian_wolf_or();
  throw std::invalid_argument("unknown protocol: " + std::string(name));
}

std::vector<std::string> protocol_names() { return {"sendall", "bb-or", "entropy-or", "sw-or"}; }

problems::BitwiseOp protocol_target(std::string_view name, problems::BitwiseOp op) {
  if (name == "sendall") return op;
  if (name == "bb-or" || name == "entropy-or" || name == "sw-or") return problems::BitwiseOp::or_op();
  throw std::invalid_argument("unknown protocol: " + std::string(name));
}

}  // namespace commsim::refprotocols
