#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "commsim/bit_vector.hpp"
#include "commsim/instance.hpp"
#include "commsim/random_tape.hpp"

namespace commsim {

enum class ModelKind { blackboard, message_passing, coordinator };

std::string_view to_string(ModelKind model);
ModelKind parse_model(std::string_view text);

/// Players are endpoints 0..k-1; in the coordinator model the coordinator is
/// endpoint k. kBoard is the destination of every blackboard write.
using EndpointId = std::uint32_t;
inline constexpr EndpointId kBoard = std::numeric_limits<EndpointId>::max();

/// Number of endpoints a model has for k players.
std::size_t endpoint_count(ModelKind model, std::size_t players);

struct Message {
  EndpointId sender = 0;
  EndpointId destination = 0;
  BitVector payload;
  std::uint64_t round = 0;
  /// Addressing overhead charged on top of the payload (message passing only).
  std::uint32_t header_bits = 0;

  [[nodiscard]] std::size_t charged_bits() const { return payload.size() + header_bits; }
};

/// Declared protocol output. `failed` marks a protocol that gave up, which is
/// counted separately from a wrong answer.
struct Answer {
  BitVector value;
  bool failed = false;

  friend bool operator==(const Answer&, const Answer&) = default;
};

struct Transcript {
  ModelKind model = ModelKind::coordinator;
  std::size_t players = 0;
  std::vector<Message> messages;
  Answer output;
  EndpointId outputter = 0;
};

/// Everything one endpoint is allowed to see when it acts.
class View {
 public:
  View(EndpointId self, ModelKind model, std::size_t players, std::size_t input_bits, const BitVector* input,
       const RandomTape* tape, std::span<const Message* const> history)
      : self_(self), model_(model), players_(players), input_bits_(input_bits), input_(input), tape_(tape),
        history_(history) {}

  [[nodiscard]] EndpointId self() const { return self_; }
  [[nodiscard]] ModelKind model() const { return model_; }
  [[nodiscard]] std::size_t players() const { return players_; }
  [[nodiscard]] EndpointId coordinator() const { return static_cast<EndpointId>(players_); }
  /// Public input length n.
  [[nodiscard]] std::size_t input_bits() const { return input_bits_; }
  /// Own input; throws for the input-less coordinator.
  [[nodiscard]] const BitVector& input() const;
  /// Public coins; endpoints derive labelled sub-tapes from it.
  [[nodiscard]] const RandomTape& public_tape() const { return *tape_; }
  /// The blackboard for blackboard protocols, otherwise the messages this
  /// endpoint sent or received, in round order.
  [[nodiscard]] std::span<const Message* const> history() const { return history_; }

 private:
  EndpointId self_;
  ModelKind model_;
  std::size_t players_;
  std::size_t input_bits_;
  const BitVector* input_;
  const RandomTape* tape_;
  std::span<const Message* const> history_;
};

struct Action {
  enum class Kind { send, write_board, declare, wait };

  Kind kind = Kind::wait;
  EndpointId destination = 0;
  BitVector payload;
  Answer answer;

  static Action send(EndpointId to, BitVector payload) { return {Kind::send, to, std::move(payload), {}}; }
  static Action write_board(BitVector payload) { return {Kind::write_board, kBoard, std::move(payload), {}}; }
  static Action declare(Answer answer) { return {Kind::declare, 0, {}, std::move(answer)}; }
  static Action declare(BitVector value) { return declare(Answer{std::move(value), false}); }
  static Action wait() { return {}; }
};

/// Per-endpoint transition logic. Instances may cache decoded state, but
/// everything they do must be a function of what View exposes.
class EndpointLogic {
 public:
  virtual ~EndpointLogic() = default;
  virtual Action act(const View& view) = 0;
};

/// Executable protocol description. Immutable; per-run state lives in the
/// EndpointLogic objects the engine creates for each run.
class Protocol {
 public:
  virtual ~Protocol() = default;

  [[nodiscard]] virtual std::string name() const = 0;
  [[nodiscard]] virtual ModelKind model() const = 0;
  [[nodiscard]] virtual std::unique_ptr<EndpointLogic> make_endpoint(EndpointId id, std::size_t players) const = 0;

  /// Blackboard scheduler: who speaks next given the public board.
  /// Default is round-robin by board length, lowest id first.
  [[nodiscard]] virtual EndpointId next_speaker(std::span<const Message> board, std::size_t players) const;
};

struct EngineConfig {
  /// Charge ceil(log2 k) destination bits per message-passing message.
  bool charge_addressing = false;
  /// Maximum endpoint activations; 0 selects 64*n*k.
  std::uint64_t round_budget = 0;
};

struct RunResult {
  Answer answer;
  Transcript transcript;
};

/// Runs `protocol` on `instance` under `model`. Deterministic in
/// (model, protocol, instance, tape seed). Throws ModelViolation when an
/// action breaks the model's rules and NonTerminatingProtocol when the round
/// budget runs out or every endpoint waits.
RunResult run_protocol(ModelKind model, const Protocol& protocol, const Instance& instance, const RandomTape& tape,
                       const EngineConfig& config = {});

/// Bipartition of endpoints for crossing-cost queries.
struct Partition {
  std::vector<EndpointId> side_a;
  /// Board writes cross iff the writer's side differs from the observer side.
  bool observer_is_a = false;
};

struct EndpointBits {
  std::uint64_t sent = 0;
  std::uint64_t received = 0;

  friend bool operator==(const EndpointBits&, const EndpointBits&) = default;
};

struct CostReport {
  std::uint64_t total_bits = 0;
  std::uint64_t board_bits = 0;
  std::map<EndpointId, EndpointBits> per_endpoint;
  std::optional<std::uint64_t> crossing_bits;
};

CostReport cost(const Transcript& transcript, const std::optional<Partition>& partition = std::nullopt);

/// One line per message: round,sender,dest,payload_len,payload_hex.
/// Board writes use "B" as destination.
void write_transcript(std::ostream& out, const Transcript& transcript);
std::string transcript_to_text(const Transcript& transcript);
std::vector<Message> parse_transcript(std::string_view text);

}  // namespace commsim
