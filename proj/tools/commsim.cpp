// commsim: batch runner for the communication-complexity experiments.
#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "commsim/distributions.hpp"
#include "commsim/engine.hpp"
#include "commsim/experiments.hpp"
#include "commsim/problems.hpp"
#include "commsim/refprotocols.hpp"

namespace fs = std::filesystem;
using namespace commsim;

namespace {

struct Globals {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> parallel;
};

struct Resolved {
  std::string experiment;
  experiments::Params params;
  experiments::RunOptions options;
};

std::uint64_t parse_u64(const std::string& what, const std::string& text) {
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size() || text.front() == '-') {
    throw std::invalid_argument(what + " expects a nonnegative integer, got '" + text + "'");
  }
  return v;
}

// seed= and parallel= words are run options rather than experiment parameters.
struct RunWords {
  std::vector<std::string> params;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> parallel;
};

RunWords split_words(const std::vector<std::string>& words) {
  RunWords out;
  for (const auto& w : words) {
    if (w.rfind("seed=", 0) == 0) {
      out.seed = parse_u64("seed", w.substr(5));
    } else if (w.rfind("parallel=", 0) == 0) {
      out.parallel = parse_u64("parallel", w.substr(9));
    } else {
      out.params.push_back(w);
    }
  }
  return out;
}

std::optional<std::uint64_t> env_seed() {
  const char* env = std::getenv("COMMSIM_SEED");
  if (env == nullptr || *env == '\0') return std::nullopt;
  return parse_u64("COMMSIM_SEED", env);
}

nlohmann::json read_config(const std::string& path) {
  nlohmann::json config = nlohmann::json::object();
  if (path.empty()) return config;
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot read config " + path);
  try {
    in >> config;
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument("malformed config " + path + ": " + e.what());
  }
  if (!config.is_object()) throw std::invalid_argument("config must be a JSON object");
  for (const auto& [key, value] : config.items()) {
    if (key != "experiment" && key != "parameters" && key != "trials" && key != "seed" && key != "parallel") {
      throw std::invalid_argument("unknown config key '" + key + "'");
    }
  }
  return config;
}

// Precedence: flags, then key=value words, then the config file, then COMMSIM_SEED.
Resolved resolve(const Globals& g, std::string experiment, const std::vector<std::string>& words) {
  Resolved r;
  const auto split = split_words(words);
  const auto cli = experiments::Params::parse(split.params);
  const auto config = read_config(g.config);
  try {
    if (experiment.empty()) {
      if (!config.contains("experiment")) throw std::invalid_argument("no experiment named");
      experiment = config.at("experiment").get<std::string>();
    } else if (config.contains("experiment") && config.at("experiment").get<std::string>() != experiment) {
      throw std::invalid_argument("config names experiment " + config.at("experiment").get<std::string>());
    }
    if (config.contains("parameters")) r.params = experiments::Params::from_json(config.at("parameters"));
    if (config.contains("trials")) r.params.set("trials", std::to_string(config.at("trials").get<std::size_t>()));
    if (config.contains("seed")) {
      r.options.seed = config.at("seed").get<std::uint64_t>();
    } else if (const auto e = env_seed()) {
      r.options.seed = *e;
    }
    if (config.contains("parallel")) r.options.parallel = config.at("parallel").get<std::size_t>();
  } catch (const nlohmann::json::exception& e) {
    throw std::invalid_argument(std::string("malformed config: ") + e.what());
  }
  if (!experiments::is_experiment(experiment)) throw std::invalid_argument("unknown experiment '" + experiment + "'");
  r.experiment = experiment;
  r.params.merge(cli);
  if (split.seed) r.options.seed = *split.seed;
  if (split.parallel) r.options.parallel = *split.parallel;
  if (g.seed) r.options.seed = *g.seed;
  if (g.parallel) r.options.parallel = *g.parallel;
  r.options.parallel = std::max<std::size_t>(1, r.options.parallel);
  return r;
}

std::uint64_t simple_seed(const Globals& g, const RunWords& words) {
  if (g.seed) return *g.seed;
  if (words.seed) return *words.seed;
  return env_seed().value_or(1);
}

void write_file(const fs::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << contents;
}

int run_one(const Globals& g, const std::string& id, const std::vector<std::string>& words) {
  const auto resolved = resolve(g, id, words);
  const auto report = experiments::run_experiment(resolved.experiment, resolved.params, resolved.options);
  const auto summary = experiments::to_json(report);
  if (!g.out.empty()) {
    const fs::path dir(g.out);
    fs::create_directories(dir);
    write_file(dir / (report.experiment + ".csv"), experiments::csv_text(report));
    write_file(dir / (report.experiment + ".json"), summary.dump(2) + "\n");
    for (const auto& [name, contents] : report.attachments) write_file(dir / name, contents);
  }
  std::cout << summary.dump(2) << '\n';
  for (const auto& c : report.checks) {
    std::cerr << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
  }
  return report.pass() ? 0 : 1;
}

int sample_cmd(const Globals& g, const std::vector<std::string>& words) {
  const auto split = split_words(words);
  auto p = experiments::Params::parse(split.params);
  const auto spec = distributions::DistSpec::parse(p.text("dist", "uniform:n=16,k=4"));
  const std::size_t count = p.size("count", 1);
  p.finish();
  const RandomTape tape(simple_seed(g, split));
  nlohmann::json out = nlohmann::json::array();
  for (std::size_t i = 0; i < count; ++i) {
    RandomTape t = tape.derive("sample", i);
    out.push_back(distributions::to_json(distributions::sample(spec, t)));
  }
  if (!g.out.empty()) {
    fs::create_directories(g.out);
    write_file(fs::path(g.out) / "samples.json", out.dump(2) + "\n");
  }
  std::cout << out.dump(2) << '\n';
  return 0;
}

int transcript_cmd(const Globals& g, const std::vector<std::string>& words) {
  const auto split = split_words(words);
  auto p = experiments::Params::parse(split.params);
  const std::string name = p.text("protocol", "bb-or");
  const auto op = problems::parse_bitwise_op(p.text("op", "or"));
  const auto spec = distributions::DistSpec::parse(p.text("dist", "nu:n=32,k=4"));
  EngineConfig config;
  config.charge_addressing = p.text("addressing", "0") == "1";
  p.finish();

  const auto proto = refprotocols::make_protocol(name, op);
  const RandomTape tape(simple_seed(g, split));
  RandomTape input = tape.derive("input");
  const auto inst = distributions::sample(spec, input).bits;
  const auto run = run_protocol(proto->model(), *proto, inst, tape.derive("coins"), config);
  const auto c = cost(run.transcript);
  const std::string text = transcript_to_text(run.transcript);
  if (!g.out.empty()) {
    fs::create_directories(g.out);
    write_file(fs::path(g.out) / "transcript.txt", text);
  }
  std::cout << text;
  const auto expected = problems::eval_bitwise(refprotocols::protocol_target(name, op), inst);
  std::cerr << "protocol=" << name << " model=" << to_string(proto->model())
            << " messages=" << run.transcript.messages.size() << " total_bits=" << c.total_bits
            << " answer=" << (run.answer.failed ? "fail" : run.answer.value.to_hex())
            << " oracle=" << expected.to_hex() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"commsim: multiparty communication experiments"};
  app.require_subcommand(1);
  Globals g;
  std::uint64_t seed_flag = 0;
  std::size_t parallel_flag = 0;
  app.add_option("--config", g.config, "JSON config file")->check(CLI::ExistingFile);
  app.add_option("--out", g.out, "directory for CSV and JSON output");
  auto* seed_opt = app.add_option("--seed", seed_flag, "master seed (falls back to COMMSIM_SEED, then 1)");
  auto* par_opt = app.add_option("--parallel", parallel_flag, "worker threads")->check(CLI::PositiveNumber);

  std::vector<std::string> words;
  std::string target;
  int status = 0;

  auto sync = [&] {
    if (seed_opt->count() > 0) g.seed = seed_flag;
    if (par_opt->count() > 0) g.parallel = parallel_flag;
  };
  auto add_words = [&](CLI::App* sub) {
    sub->fallthrough();
    sub->add_option("args", words, "key=value parameters");
  };

  for (const auto& id : experiments::experiment_ids()) {
    auto* sub = app.add_subcommand(id, "run the " + id + " experiment");
    add_words(sub);
    sub->callback([&, id] {
      sync();
      status = run_one(g, id, words);
    });
  }
  auto* run = app.add_subcommand("run", "run an experiment: run [id] [key=value ...], or the one named by --config");
  add_words(run);
  run->callback([&] {
    sync();
    std::string id;
    if (!words.empty() && words.front().find('=') == std::string::npos) {
      id = words.front();
      words.erase(words.begin());
    }
    status = run_one(g, id, words);
  });

  auto* describe = app.add_subcommand("describe", "print the claim an experiment checks");
  describe->add_option("experiment", target)->required();
  describe->callback([&] { std::cout << experiments::describe(target); });

  auto* list = app.add_subcommand("list", "list experiments and protocols");
  list->callback([&] {
    std::cout << "experiments:";
    for (const auto& id : experiments::experiment_ids()) std::cout << ' ' << id;
    std::cout << "\nprotocols:";
    for (const auto& p : refprotocols::protocol_names()) std::cout << ' ' << p;
    std::cout << '\n';
  });

  auto* sample = app.add_subcommand("sample", "draw instances: dist=<spec> count=N");
  add_words(sample);
  sample->callback([&] {
    sync();
    status = sample_cmd(g, words);
  });

  auto* transcript = app.add_subcommand("transcript", "run one protocol: protocol=<name> dist=<spec> [op=...]");
  add_words(transcript);
  transcript->callback([&] {
    sync();
    status = transcript_cmd(g, words);
  });

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 2;
  } catch (const std::exception& e) {
    std::cerr << "commsim: " << e.what() << '\n';
    return 2;
  }
  return status;
}
