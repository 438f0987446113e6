#include "commsim/engine.hpp"

#include <algorithm>
#include <deque>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "commsim/coding.hpp"
#include "commsim/errors.hpp"

namespace commsim {

std::string_view to_string(ModelKind model) {
  switch (model) {
    case ModelKind::blackboard: return "blackboard";
    case ModelKind::message_passing: return "message-passing";
    case ModelKind::coordinator: return "coordinator";
  }
  return "?";
}

ModelKind parse_model(std::string_view text) {
  if (text == "blackboard") return ModelKind::blackboard;
  if (text == "message-passing") return ModelKind::message_passing;
  if (text == "coordinator") return ModelKind::coordinator;
  throw std::invalid_argument("unknown model: " + std::string(text));
}

std::size_t endpoint_count(ModelKind model, std::size_t players) {
  return model == ModelKind::coordinator ? players + 1 : players;
}

const BitVector& View::input() const {
  if (input_ == nullptr) throw std::logic_error("the coordinator has no input");
  return *input_;
}

EndpointId Protocol::next_speaker(std::span<const Message> board, std::size_t players) const {
  return static_cast<EndpointId>(board.size() % players);
}

namespace {

struct RunState {
  ModelKind model;
  std::size_t players;
  std::size_t endpoints;
  std::size_t n;
  const Instance* instance;
  const RandomTape* tape;
  std::vector<std::unique_ptr<EndpointLogic>> logic;
  std::vector<Message> messages;
  // Visible history per endpoint, as indices into `messages`.
  std::vector<std::vector<std::size_t>> visible;

  Action act(EndpointId e) {
    const BitVector* input = e < players ? &instance->players[e] : nullptr;
    std::vector<const Message*> history;
    if (model == ModelKind::blackboard) {
      history.reserve(messages.size());
      for (const auto& m : messages) history.push_back(&m);
    } else {
      history.reserve(visible[e].size());
      for (auto idx : visible[e]) history.push_back(&messages[idx]);
    }
    const View view(e, model, players, n, input, tape, history);
    return logic[e]->act(view);
  }
};

void require_payload(const Action& action, EndpointId e) {
  if (action.payload.empty()) {
    throw ModelViolation("endpoint " + std::to_string(e) + " emitted an empty message");
  }
}

}  // namespace

RunResult run_protocol(ModelKind model, const Protocol& protocol, const Instance& instance, const RandomTape& tape,
                       const EngineConfig& config) {
  if (protocol.model() != model) {
    throw ModelViolation("protocol " + protocol.name() + " targets the " + std::string(to_string(protocol.model())) +
                         " model, not " + std::string(to_string(model)));
  }
  if (instance.players.empty()) throw std::invalid_argument("instance has no players");
  for (const auto& p : instance.players) {
    if (p.size() != instance.n) throw std::invalid_argument("player input length differs from n");
  }

  RunState state{model, instance.k(), endpoint_count(model, instance.k()), instance.n, &instance, &tape, {}, {}, {}};
  for (std::size_t e = 0; e < state.endpoints; ++e) {
    state.logic.push_back(protocol.make_endpoint(static_cast<EndpointId>(e), state.players));
  }
  state.visible.resize(state.endpoints);

  const std::uint64_t budget = config.round_budget != 0
                                   ? config.round_budget
                                   : 64 * std::max<std::uint64_t>(instance.n, 1) * instance.k();
  const std::uint32_t header =
      (config.charge_addressing && model == ModelKind::message_passing) ? coding::ceil_log2(instance.k()) : 0;
  const auto coordinator = static_cast<EndpointId>(state.players);

  auto finish = [&](EndpointId e, Answer answer) {
    RunResult result;
    result.answer = answer;
    result.transcript = Transcript{model, state.players, std::move(state.messages), std::move(answer), e};
    return result;
  };

  if (model == ModelKind::blackboard) {
    for (std::uint64_t step = 0; step < budget; ++step) {
      const EndpointId e = protocol.next_speaker(state.messages, state.players);
      if (e >= state.players) throw ModelViolation("blackboard scheduler chose an unknown endpoint");
      Action action = state.act(e);
      switch (action.kind) {
        case Action::Kind::write_board:
          require_payload(action, e);
          state.messages.push_back(Message{e, kBoard, std::move(action.payload), state.messages.size(), 0});
          break;
        case Action::Kind::declare:
          return finish(e, std::move(action.answer));
        case Action::Kind::send:
          throw ModelViolation("point-to-point send in the blackboard model");
        case Action::Kind::wait:
          break;
      }
    }
    throw NonTerminatingProtocol("protocol " + protocol.name() + " exceeded the round budget");
  }

  std::deque<EndpointId> ready;
  for (std::size_t e = 0; e < state.endpoints; ++e) ready.push_back(static_cast<EndpointId>(e));

  for (std::uint64_t step = 0; step < budget; ++step) {
    if (ready.empty()) throw NonTerminatingProtocol("protocol " + protocol.name() + " deadlocked");
    const EndpointId e = ready.front();
    ready.pop_front();
    Action action = state.act(e);
    switch (action.kind) {
      case Action::Kind::send: {
        require_payload(action, e);
        const EndpointId to = action.destination;
        if (to >= state.endpoints || to == e) throw ModelViolation("invalid message destination");
        if (model == ModelKind::coordinator && ((e == coordinator) == (to == coordinator))) {
          throw ModelViolation("coordinator model messages must involve the coordinator");
        }
        const std::size_t idx = state.messages.size();
        state.messages.push_back(Message{e, to, std::move(action.payload), idx, header});
        state.visible[e].push_back(idx);
        state.visible[to].push_back(idx);
        std::erase(ready, e);
        std::erase(ready, to);
        ready.push_front(e);
        ready.push_front(to);
        break;
      }
      case Action::Kind::declare:
        return finish(e, std::move(action.answer));
      case Action::Kind::write_board:
        throw ModelViolation("board write outside the blackboard model");
      case Action::Kind::wait:
        break;
    }
  }
  throw NonTerminatingProtocol("protocol " + protocol.name() + " exceeded the round budget");
}

CostReport cost(const Transcript& transcript, const std::optional<Partition>& partition) {
  const std::size_t endpoints = endpoint_count(transcript.model, transcript.players);
  std::vector<bool> in_a(endpoints, false);
  if (partition) {
    for (auto e : partition->side_a) {
      if (e >= endpoints) throw std::invalid_argument("partition references unknown endpoint " + std::to_string(e));
      in_a[e] = true;
    }
  }

  CostReport report;
  for (std::size_t e = 0; e < endpoints; ++e) report.per_endpoint[static_cast<EndpointId>(e)] = {};
  std::uint64_t crossing = 0;
  for (const auto& m : transcript.messages) {
    if (m.sender >= endpoints || (m.destination != kBoard && m.destination >= endpoints)) {
      throw std::invalid_argument("transcript references unknown endpoint");
    }
    const std::uint64_t bits = m.charged_bits();
    report.total_bits += bits;
    report.per_endpoint[m.sender].sent += bits;
    if (m.destination == kBoard) {
      report.board_bits += bits;
      if (partition && in_a[m.sender] != partition->observer_is_a) crossing += bits;
    } else {
      report.per_endpoint[m.destination].received += bits;
      if (partition && in_a[m.sender] != in_a[m.destination]) crossing += bits;
    }
  }
  if (partition) report.crossing_bits = crossing;
  return report;
}

void write_transcript(std::ostream& out, const Transcript& transcript) {
  for (const auto& m : transcript.messages) {
    out << m.round << ',' << m.sender << ',';
    if (m.destination == kBoard) {
      out << 'B';
    } else {
      out << m.destination;
    }
    out << ',' << m.payload.size() << ',' << m.payload.to_hex() << '\n';
  }
}

std::string transcript_to_text(const Transcript& transcript) {
  std::ostringstream out;
  write_transcript(out, transcript);
  return out.str();
}

std::vector<Message> parse_transcript(std::string_view text) {
  std::vector<Message> out;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> fields;
    std::istringstream fs(line);
    std::string field;
    while (std::getline(fs, field, ',')) fields.push_back(field);
    if (line.back() == ',') fields.emplace_back();
    if (fields.size() != 5) throw std::invalid_argument("transcript line must have 5 fields: " + line);
    Message m;
    m.round = std::stoull(fields[0]);
    m.sender = static_cast<EndpointId>(std::stoul(fields[1]));
    m.destination = fields[2] == "B" ? kBoard : static_cast<EndpointId>(std::stoul(fields[2]));
    const auto len = static_cast<std::size_t>(std::stoull(fields[3]));
    m.payload = BitVector::from_hex(fields[4], len);
    if (!out.empty() && m.round <= out.back().round) throw std::invalid_argument("transcript rounds must increase");
    out.push_back(std::move(m));
  }
  return out;
}

}  // namespace commsim
