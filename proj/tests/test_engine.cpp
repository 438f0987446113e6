#include <doctest.h>

#include <functional>

#include "commsim/engine.hpp"
#include "commsim/errors.hpp"
#include "commsim/problems.hpp"
#include "commsim/refprotocols.hpp"

using namespace commsim;

namespace {

Instance zeros(std::size_t n, std::size_t k) { return Instance{n, std::vector<BitVector>(k, BitVector(n))}; }

// Protocol whose every endpoint runs the same lambda.
class Scripted final : public Protocol {
 public:
  using Fn = std::function<Action(const View&)>;
  Scripted(ModelKind model, Fn fn) : model_(model), fn_(std::move(fn)) {}

  [[nodiscard]] std::string name() const override { return "scripted"; }
  [[nodiscard]] ModelKind model() const override { return model_; }
  [[nodiscard]] std::unique_ptr<EndpointLogic> make_endpoint(EndpointId, std::size_t) const override {
    struct Logic final : EndpointLogic {
      Fn fn;
      explicit Logic(Fn f) : fn(std::move(f)) {}
      Action act(const View& v) override { return fn(v); }
    };
    return std::make_unique<Logic>(fn_);
  }

 private:
  ModelKind model_;
  Fn fn_;
};

}  // namespace

TEST_CASE("sendall on zero inputs") {
  const auto proto = refprotocols::sendall();
  const auto run = run_protocol(ModelKind::coordinator, *proto, zeros(8, 4), RandomTape(0));
  CHECK(run.answer.value.to_string() == "00000000");
  REQUIRE(run.transcript.messages.size() == 4);
  for (const auto& m : run.transcript.messages) {
    CHECK(m.destination == 4);
    CHECK(m.payload.size() == 8);
  }
  CHECK(run.transcript.outputter == 4);

  const auto c = cost(run.transcript);
  CHECK(c.total_bits == 32);
  CHECK(c.per_endpoint.at(4).received == 32);
  for (EndpointId p = 0; p < 4; ++p) {
    const auto crossing = cost(run.transcript, Partition{{p}, false}).crossing_bits;
    REQUIRE(crossing.has_value());
    CHECK(*crossing == 8);
  }
}

TEST_CASE("sendall xor on three players") {
  Instance inst{3, {BitVector::from_string("101"), BitVector::from_string("011"), BitVector::from_string("110")}};
  const auto proto = refprotocols::sendall();
  CHECK(run_protocol(ModelKind::coordinator, *proto, inst, RandomTape(9)).answer.value.to_string() == "000");
}

TEST_CASE("runs are deterministic") {
  RandomTape t(1);
  Instance inst{64, {}};
  for (int j = 0; j < 8; ++j) {
    BitVector v(64);
    for (std::size_t c = 0; c < 64; ++c) v.set(c, t.bernoulli(0.125));
    inst.players.push_back(v);
  }
  const auto proto = refprotocols::blackboard_or();
  const auto a = run_protocol(ModelKind::blackboard, *proto, inst, RandomTape(7));
  const auto b = run_protocol(ModelKind::blackboard, *proto, inst, RandomTape(7));
  CHECK(transcript_to_text(a.transcript) == transcript_to_text(b.transcript));
  CHECK(a.answer == b.answer);
}

TEST_CASE("cost conservation") {
  RandomTape t(2);
  Instance inst{40, {}};
  for (int j = 0; j < 5; ++j) {
    BitVector v(40);
    for (std::size_t c = 0; c < 40; ++c) v.set(c, t.bernoulli(0.2));
    inst.players.push_back(v);
  }
  for (const auto& name : {"sendall", "entropy-or", "bb-or"}) {
    const auto proto = refprotocols::make_protocol(name);
    const auto run = run_protocol(proto->model(), *proto, inst, RandomTape(3));
    const auto c = cost(run.transcript);
    std::uint64_t sent = 0;
    std::uint64_t received = 0;
    for (const auto& [e, b] : c.per_endpoint) {
      sent += b.sent;
      received += b.received;
    }
    CHECK(sent == c.total_bits);
    CHECK(received + c.board_bits == c.total_bits);
  }
}

TEST_CASE("model violations") {
  const RandomTape tape(0);
  Scripted empty(ModelKind::message_passing, [](const View&) { return Action::send(1, BitVector()); });
  CHECK_THROWS_AS(run_protocol(ModelKind::message_passing, empty, zeros(4, 2), tape), ModelViolation);

  Scripted board_send(ModelKind::blackboard, [](const View&) { return Action::send(1, BitVector(1)); });
  CHECK_THROWS_AS(run_protocol(ModelKind::blackboard, board_send, zeros(4, 2), tape), ModelViolation);

  Scripted peer(ModelKind::coordinator, [](const View& v) {
    return v.self() == 0 ? Action::send(1, BitVector(1)) : Action::wait();
  });
  CHECK_THROWS_AS(run_protocol(ModelKind::coordinator, peer, zeros(4, 2), tape), ModelViolation);

  Scripted board_write(ModelKind::coordinator, [](const View&) { return Action::write_board(BitVector(1)); });
  CHECK_THROWS_AS(run_protocol(ModelKind::coordinator, board_write, zeros(4, 2), tape), ModelViolation);

  const auto proto = refprotocols::sendall();
  CHECK_THROWS_AS(run_protocol(ModelKind::blackboard, *proto, zeros(4, 2), tape), ModelViolation);
}

TEST_CASE("non-terminating protocols") {
  const RandomTape tape(0);
  Scripted idle(ModelKind::message_passing, [](const View&) { return Action::wait(); });
  CHECK_THROWS_AS(run_protocol(ModelKind::message_passing, idle, zeros(4, 3), tape), NonTerminatingProtocol);

  Scripted chatter(ModelKind::blackboard, [](const View&) { return Action::write_board(BitVector(1)); });
  CHECK_THROWS_AS(run_protocol(ModelKind::blackboard, chatter, zeros(4, 3), tape, EngineConfig{false, 50}),
                  NonTerminatingProtocol);
}

TEST_CASE("coordinator has no input") {
  Scripted peek(ModelKind::coordinator, [](const View& v) {
    (void)v.input();
    return Action::wait();
  });
  CHECK_THROWS_AS(run_protocol(ModelKind::coordinator, peek, zeros(4, 2), RandomTape(0)), std::logic_error);
}

TEST_CASE("recipient of the last message acts next") {
  // 0 pings 2, 2 answers 0, 0 declares what it received.
  Scripted ping(ModelKind::message_passing, [](const View& v) {
    const auto h = v.history();
    if (v.self() == 0 && h.empty()) return Action::send(2, BitVector::from_string("1"));
    if (v.self() == 2 && h.size() == 1) return Action::send(0, BitVector::from_string("01"));
    if (v.self() == 0 && h.size() == 2) return Action::declare(h[1]->payload);
    return Action::wait();
  });
  const auto run = run_protocol(ModelKind::message_passing, ping, zeros(4, 3), RandomTape(0));
  CHECK(run.answer.value.to_string() == "01");
  CHECK(run.transcript.outputter == 0);
  CHECK(cost(run.transcript).total_bits == 3);

  EngineConfig charged;
  charged.charge_addressing = true;
  const auto run2 = run_protocol(ModelKind::message_passing, ping, zeros(4, 3), RandomTape(0), charged);
  // ceil(log2 3) = 2 header bits per message.
  CHECK(cost(run2.transcript).total_bits == 7);
}

TEST_CASE("messages do not depend on inputs that have not spoken") {
  RandomTape t(4);
  Instance inst{16, {}};
  for (int j = 0; j < 4; ++j) {
    BitVector v(16);
    for (std::size_t c = 0; c < 16; ++c) v.set(c, t.bernoulli(0.5));
    inst.players.push_back(v);
  }
  Instance changed = inst;
  changed.players[3] = ~changed.players[3];
  const auto proto = refprotocols::sendall();
  const auto a = run_protocol(ModelKind::coordinator, *proto, inst, RandomTape(1));
  const auto b = run_protocol(ModelKind::coordinator, *proto, changed, RandomTape(1));
  for (std::size_t i = 0; i < a.transcript.messages.size(); ++i) {
    if (a.transcript.messages[i].sender == 3) break;
    CHECK(a.transcript.messages[i].payload == b.transcript.messages[i].payload);
  }
}

TEST_CASE("partition with unknown endpoint") {
  const auto proto = refprotocols::sendall();
  const auto run = run_protocol(ModelKind::coordinator, *proto, zeros(8, 4), RandomTape(0));
  CHECK_THROWS_AS(cost(run.transcript, Partition{{9}, false}), std::invalid_argument);
}

TEST_CASE("blackboard crossing uses the observer side") {
  Instance inst{8, {BitVector::from_string("11110000"), BitVector::from_string("00001111")}};
  const auto proto = refprotocols::blackboard_or();
  const auto run = run_protocol(ModelKind::blackboard, *proto, inst, RandomTape(0));
  CHECK(run.answer.value.to_string() == "11111111");
  const auto c = cost(run.transcript);
  const auto& writes = run.transcript.messages;
  REQUIRE(writes.size() == 2);
  CHECK(*cost(run.transcript, Partition{{0}, false}).crossing_bits == writes[0].payload.size());
  CHECK(*cost(run.transcript, Partition{{0}, true}).crossing_bits == writes[1].payload.size());
  CHECK(c.board_bits == c.total_bits);
}

TEST_CASE("transcript text round trip") {
  Instance inst{5, {BitVector::from_string("10110"), BitVector::from_string("00001")}};
  const auto proto = refprotocols::sendall(problems::BitwiseOp::or_op());
  const auto run = run_protocol(ModelKind::coordinator, *proto, inst, RandomTape(0));
  const auto text = transcript_to_text(run.transcript);
  CHECK(text == "0,0,2,5,b0\n1,1,2,5,08\n");
  const auto parsed = parse_transcript(text);
  REQUIRE(parsed.size() == 2);
  CHECK(parsed[0].payload == inst.players[0]);
  CHECK(parsed[1].sender == 1);
  CHECK_THROWS(parse_transcript("1,0,2,5,b0\n0,1,2,5,08\n"));
  CHECK(parse_transcript("0,0,B,1,8\n")[0].destination == kBoard);
}
