#include "cyberdef/trace.hpp"

#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "cyberdef/errors.hpp"

namespace cyberdef {

using nlohmann::json;

namespace {

json to_json(const ActionSpec& a) {
  return json::array({static_cast<int>(a.kind), static_cast<int>(a.target.kind), a.target.id});
}

ActionSpec blue_from_json(const json& j) {
  ActionSpec a = ActionSpec::blue(static_cast<BlueAction>(j.at(0).get<int>()));
  a.target.kind = static_cast<Target::Kind>(j.at(1).get<int>());
  a.target.id = j.at(2).get<int>();
  return a;
}

json to_json(const Event& e) {
  return json::array({static_cast<int>(e.type), e.host, e.subnet, e.source, e.detail,
                      e.submitted_step, e.success ? 1 : 0, e.value});
}

Event event_from_json(const json& j) {
  Event e;
  e.type = static_cast<EventType>(j.at(0).get<int>());
  e.host = j.at(1).get<int>();
  e.subnet = j.at(2).get<int>();
  e.source = j.at(3).get<int>();
  e.detail = j.at(4).get<int>();
  e.submitted_step = j.at(5).get<int>();
  e.success = j.at(6).get<int>() != 0;
  e.value = j.at(7).get<double>();
  return e;
}

std::string foothold_string(const std::vector<Foothold>& f) {
  std::string s(f.size(), '0');
  for (std::size_t i = 0; i < f.size(); ++i) s[i] = static_cast<char>('0' + static_cast<int>(f[i]));
  return s;
}

}  // namespace

double EpisodeTrace::total_reward() const {
  double r = 0.0;
  for (const auto& s : steps) r += s.reward;
  return r;
}

EpisodeTrace begin_trace(const NetworkEnv& env, std::string strategy, std::uint64_t seed,
                         int episode) {
  EpisodeTrace t;
  t.strategy = std::move(strategy);
  t.red = env.config().red.variant;
  t.seed = seed;
  t.episode = episode;
  t.episode_length = env.config().episode_length;
  t.host_subnet = env.topology().host_subnet;
  t.steps.reserve(static_cast<std::size_t>(t.episode_length));
  return t;
}

void record_step(EpisodeTrace& trace, const TruthRecord& before, Phase phase,
                 std::vector<AgentStepRecord> actions, const StepResult& result) {
  TraceStep s;
  s.step = before.step;
  s.phase = phase;
  s.actions = std::move(actions);
  s.events = result.log;
  s.reward = result.reward;
  s.truth = before;
  s.digest = truth_digest(before);
  trace.steps.push_back(std::move(s));
}

void write_trace(std::ostream& out, const EpisodeTrace& t) {
  json header = {{"trace", 1},
                 {"strategy", t.strategy},
                 {"red", t.red},
                 {"seed", t.seed},
                 {"episode", t.episode},
                 {"episode_length", t.episode_length},
                 {"host_subnet", t.host_subnet},
                 {"steps", t.steps.size()}};
  out << header.dump() << '\n';
  for (const auto& s : t.steps) {
    json actions = json::array();
    for (const auto& a : s.actions)
      actions.push_back({{"a", to_json(a.action)},
                         {"p", a.in_progress ? 1 : 0},
                         {"c", a.subpolicy},
                         {"m", a.message},
                         {"i", a.host_ioc ? 1 : 0}});
    json events = json::array();
    for (const auto& e : s.events) events.push_back(to_json(e));
    json line = {{"step", s.step},
                 {"phase", static_cast<int>(s.phase)},
                 {"actions", actions},
                 {"events", events},
                 {"reward", s.reward},
                 {"truth", foothold_string(s.truth.footholds)},
                 {"ot", s.truth.ot_available ? 1 : 0},
                 {"digest", s.digest}};
    out << line.dump() << '\n';
  }
}

std::string serialize_trace(const EpisodeTrace& trace) {
  std::ostringstream os;
  write_trace(os, trace);
  return os.str();
}

std::vector<EpisodeTrace> read_traces(std::istream& in) {
  std::vector<EpisodeTrace> out;
  std::string line;
  std::size_t expected = 0;
  int lineno = 0;
  try {
    while (std::getline(in, line)) {
      ++lineno;
      if (line.empty()) continue;
      const json j = json::parse(line);
      if (j.contains("trace")) {
        if (!out.empty() && out.back().steps.size() != expected)
          throw InputError("trace ended early at line " + std::to_string(lineno));
        EpisodeTrace t;
        t.strategy = j.at("strategy").get<std::string>();
        t.red = j.at("red").get<std::string>();
        t.seed = j.at("seed").get<std::uint64_t>();
        t.episode = j.at("episode").get<int>();
        t.episode_length = j.at("episode_length").get<int>();
        t.host_subnet = j.at("host_subnet").get<std::vector<int>>();
        expected = j.at("steps").get<std::size_t>();
        out.push_back(std::move(t));
        continue;
      }
      if (out.empty()) throw InputError("trace step before header at line " + std::to_string(lineno));
      TraceStep s;
      s.step = j.at("step").get<int>();
      s.phase = static_cast<Phase>(j.at("phase").get<int>());
      for (const auto& a : j.at("actions")) {
        AgentStepRecord r;
        r.action = blue_from_json(a.at("a"));
        r.in_progress = a.at("p").get<int>() != 0;
        r.subpolicy = a.at("c").get<int>();
        r.message = a.at("m").get<std::uint8_t>();
        r.host_ioc = a.at("i").get<int>() != 0;
        s.actions.push_back(r);
      }
      for (const auto& e : j.at("events")) s.events.push_back(event_from_json(e));
      s.reward = j.at("reward").get<double>();
      const auto truth = j.at("truth").get<std::string>();
      s.truth.step = s.step;
      for (char c : truth) s.truth.footholds.push_back(static_cast<Foothold>(c - '0'));
      s.truth.ot_available = j.at("ot").get<int>() != 0;
      s.digest = j.at("digest").get<std::string>();
      out.back().steps.push_back(std::move(s));
    }
  } catch (const json::exception& e) {
    throw InputError("malformed trace at line " + std::to_string(lineno) + ": " + e.what());
  }
  if (!out.empty() && out.back().steps.size() != expected)
    throw InputError("trace ended early: expected " + std::to_string(expected) + " steps");
  return out;
}

std::vector<EpisodeTrace> load_traces(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open trace file " + path);
  return read_traces(in);
}

}  // namespace cyberdef
