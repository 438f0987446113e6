#include <doctest.h>

#include <sstream>

#include "commsim/experiments.hpp"

using namespace commsim::experiments;

namespace {

Params words(std::initializer_list<std::string> w) { return Params::parse(std::vector<std::string>(w)); }

}  // namespace

TEST_CASE("params parse and read") {
  auto p = words({"n=12", "q=1/80", "dist=uniform:n=4,k=2"});
  CHECK(p.size("n", 3) == 12);
  CHECK(p.real("q", 0) == doctest::Approx(0.0125));
  CHECK(p.text("dist", "") == "uniform:n=4,k=2");
  CHECK(p.size("trials", 50) == 50);
  CHECK_NOTHROW(p.finish());
  CHECK(p.resolved().at("trials") == 50);
  CHECK(p.resolved().at("n") == 12);
}

TEST_CASE("params reject junk") {
  CHECK_THROWS(words({"novalue"}));
  CHECK_THROWS(words({"=3"}));
  auto p = words({"n=abc", "x=1/0"});
  CHECK_THROWS(p.size("n", 1));
  CHECK_THROWS(p.real("x", 1));
  auto q = words({"n=4", "typo=1"});
  q.size("n", 1);
  CHECK_THROWS_WITH(q.finish(), doctest::Contains("typo"));
}

TEST_CASE("params merge and json") {
  auto base = Params::from_json(nlohmann::json{{"n", 64}, {"dist", "tau:n=10,k=3"}, {"q", 0.5}});
  base.merge(words({"n=32"}));
  CHECK(base.size("n", 0) == 32);
  CHECK(base.real("q", 0) == 0.5);
  CHECK(base.has("dist"));
  CHECK_FALSE(base.has("k"));
}

TEST_CASE("registry") {
  const auto ids = experiment_ids();
  CHECK(ids.size() == 10);
  for (const auto& id : ids) {
    CHECK(is_experiment(id));
    const auto text = describe(id);
    CHECK(text.find("claim:") != std::string::npos);
    CHECK(text.find("pass:") != std::string::npos);
  }
  CHECK_FALSE(is_experiment("nope"));
  CHECK_THROWS(describe("nope"));
  CHECK_THROWS(run_experiment("nope", {}, {}));
  CHECK_THROWS(run_experiment("maj-reduction", words({"n=40", "bogus=1"}), {}));
  CHECK_THROWS(run_experiment("maj-reduction", words({"n=40", "k=4"}), {}));
}

TEST_CASE("report json and csv") {
  const auto r = run_experiment("maj-reduction", words({"n=40", "k=5", "trials=20"}), {3, 1});
  CHECK(r.trials == 20);
  CHECK(r.csv_rows.size() == 20);
  const auto j = to_json(r);
  CHECK(j.at("experiment") == "maj-reduction");
  CHECK(j.at("seed") == 3);
  CHECK(j.at("parameters").at("k") == 5);
  CHECK(j.at("checks").size() == r.checks.size());
  CHECK(j.at("pass") == r.pass());
  const auto csv = csv_text(r);
  CHECK(csv.rfind("trial,seed,good,crossing_bits,total_bits,answer,oracle_answer\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 21);
}

TEST_CASE("seed and worker count") {
  const auto p = words({"n=100", "trials=60"});
  const auto a = csv_text(run_experiment("or-reduction", p, {5, 1}));
  CHECK(a == csv_text(run_experiment("or-reduction", p, {5, 4})));
  CHECK(a != csv_text(run_experiment("or-reduction", p, {6, 1})));
}

TEST_CASE("a report with no checks does not pass") {
  Report r;
  CHECK_FALSE(r.pass());
  r.checks.push_back({"a", true, ""});
  CHECK(r.pass());
  r.checks.push_back({"b", false, ""});
  CHECK_FALSE(r.pass());
}
