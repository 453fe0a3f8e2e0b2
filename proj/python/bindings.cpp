#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <sstream>

#include "cyberdef/errors.hpp"
#include "cyberdef/experiment.hpp"
#include "cyberdef/metrics.hpp"
#include "cyberdef/observation.hpp"
#include "cyberdef/trace.hpp"

namespace py = pybind11;
using namespace cyberdef;

namespace {

/// Environment plus per-agent observation histories, stepped with flat action
/// indices.
class Simulator {
 public:
  explicit Simulator(ScenarioConfig config) : env_(std::move(config)) {}

  std::vector<std::vector<double>> reset(std::uint64_t seed) {
    env_.reset(seed);
    histories_.clear();
    for (int a = 0; a < env_.agent_count(); ++a)
      histories_.push_back(make_history(env_.topology(), a, env_.config().features));
    return observations();
  }

  py::tuple step(const std::vector<int>& actions) {
    if (histories_.empty()) throw ContractError("call reset before step");
    if (static_cast<int>(actions.size()) != env_.agent_count())
      throw ShapeError("expected " + std::to_string(env_.agent_count()) + " actions, got " +
                       std::to_string(actions.size()));
    JointAction joint(actions.size());
    for (int a = 0; a < env_.agent_count(); ++a) {
      const auto& space = env_.action_space(a);
      const int k = actions[static_cast<std::size_t>(a)];
      if (k < 0 || k >= space.size()) throw InvalidTargetError("action index out of range for agent " + std::to_string(a));
      joint[static_cast<std::size_t>(a)].action = space.decode(k);
    }
    const StepResult r = env_.step(joint);
    for (int a = 0; a < env_.agent_count(); ++a)
      update_history(histories_[static_cast<std::size_t>(a)], r.agent_events[static_cast<std::size_t>(a)]);
    return py::make_tuple(observations(), r.reward, r.done);
  }

  std::vector<std::vector<double>> observations() const {
    const StateView view = env_.view();
    std::vector<std::vector<double>> out;
    for (int a = 0; a < env_.agent_count(); ++a) {
      auto obs = encode_observation(histories_[static_cast<std::size_t>(a)], view);
      if (env_.pending(a)) mark_in_progress(obs);
      out.push_back(std::move(obs));
    }
    return out;
  }

  std::vector<std::string> action_names(int agent) const {
    const auto& space = env_.action_space(agent);
    std::vector<std::string> out;
    for (int k = 0; k < space.size(); ++k) out.push_back(to_string(space.decode(k)));
    return out;
  }

  const NetworkEnv& env() const { return env_; }

 private:
  NetworkEnv env_;
  std::vector<AgentHistory> histories_;
};

py::dict report_dict(const MetricsReport& r) {
  py::dict d;
  d["episodes"] = r.episodes;
  d["reward_mean"] = r.reward.mean;
  d["reward_std"] = r.reward.std;
  d["clean_hosts"] = r.clean_hosts.mean;
  d["clean_hosts_with_contractor"] = r.clean_hosts_with_contractor.mean;
  d["non_escalated"] = r.non_escalated.mean;
  d["mttr"] = r.mttr.count > 0 ? py::object(py::float_(r.mttr.mean)) : py::object(py::none());
  d["useful_recoveries"] = r.useful_recoveries.mean;
  d["wasted_recoveries"] = r.wasted_recoveries.mean;
  d["precision"] = r.precision ? py::object(py::float_(*r.precision)) : py::object(py::none());
  d["error"] = r.error ? py::object(py::float_(*r.error)) : py::object(py::none());
  d["impact_count"] = r.impact_count.mean;
  return d;
}

ExperimentConfig experiment_from(const std::string& yaml, const py::kwargs& kw) {
  ExperimentConfig cfg = parse_experiment(yaml);
  if (kw.contains("profile")) cfg.set_profile(kw["profile"].cast<std::string>());
  if (kw.contains("strategy")) cfg.strategy = parse_strategy(kw["strategy"].cast<std::string>());
  if (kw.contains("red")) cfg.set_red(kw["red"].cast<std::string>());
  if (kw.contains("seed")) cfg.seed = kw["seed"].cast<std::uint64_t>();
  if (kw.contains("episodes")) cfg.episodes = kw["episodes"].cast<int>();
  if (kw.contains("iterations")) cfg.train.iterations = kw["iterations"].cast<int>();
  if (kw.contains("workers")) cfg.train.workers = kw["workers"].cast<int>();
  if (kw.contains("checkpoint")) cfg.checkpoint = kw["checkpoint"].cast<std::string>();
  if (kw.contains("pretrained")) cfg.pretrained = kw["pretrained"].cast<std::string>();
  if (kw.contains("greedy")) cfg.greedy = kw["greedy"].cast<bool>();
  if (kw.contains("sweep")) cfg.sweep = kw["sweep"].cast<std::vector<std::string>>();
  if (kw.contains("fine_tune_iterations")) cfg.fine_tune_iterations = kw["fine_tune_iterations"].cast<int>();
  return cfg;
}

template <typename F>
void run_command(F command, const std::string& yaml, const std::string& out, const py::kwargs& kw) {
  const ExperimentConfig cfg = experiment_from(yaml, kw);
  std::ostringstream log;
  py::gil_scoped_release release;
  command(cfg, out, log);
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Multi-agent cyber defense simulator, PPO learners and experiment commands";

  py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
  py::register_exception<RejectedActionError>(m, "RejectedActionError", PyExc_RuntimeError);
  py::register_exception<InvalidTargetError>(m, "InvalidTargetError", PyExc_ValueError);
  py::register_exception<LoadError>(m, "LoadError", PyExc_IOError);
  py::register_exception<InputError>(m, "InputError", PyExc_ValueError);
  py::register_exception<ShapeError>(m, "ShapeError", PyExc_ValueError);
  py::register_exception<DomainError>(m, "DomainError", PyExc_ValueError);
  py::register_exception<ContractError>(m, "ContractError", PyExc_RuntimeError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_ArithmeticError);

  py::class_<ScenarioConfig>(m, "ScenarioConfig")
      .def_static("desk", &ScenarioConfig::desk)
      .def_static("paper", &ScenarioConfig::paper)
      .def_static("parse", [](const std::string& text) { return parse_scenario(text); }, py::arg("yaml"))
      .def_static("load", &load_scenario, py::arg("path"))
      .def("dump", &dump_scenario)
      .def_readwrite("episode_length", &ScenarioConfig::episode_length)
      .def_property(
          "red_variant", [](const ScenarioConfig& c) { return c.red.variant; },
          [](ScenarioConfig& c, const std::string& v) {
            c.red.variant = v;
            c.validate();
          })
      .def_property(
          "features",
          [](const ScenarioConfig& c) {
            py::dict d;
            d["history"] = c.features.history;
            d["ioc"] = c.features.ioc;
            d["decoy_ioc"] = c.features.decoy_ioc;
            d["communication"] = c.features.communication;
            return d;
          },
          [](ScenarioConfig& c, const py::dict& d) {
            if (d.contains("history")) c.features.history = d["history"].cast<bool>();
            if (d.contains("ioc")) c.features.ioc = d["ioc"].cast<bool>();
            if (d.contains("decoy_ioc")) c.features.decoy_ioc = d["decoy_ioc"].cast<bool>();
            if (d.contains("communication")) c.features.communication = d["communication"].cast<bool>();
          });

  py::class_<Simulator>(m, "Simulator")
      .def(py::init<ScenarioConfig>(), py::arg("scenario") = ScenarioConfig::desk())
      .def("reset", &Simulator::reset, py::arg("seed"))
      .def("step", &Simulator::step, py::arg("actions"),
           "Apply one action index per agent; returns (observations, reward, done).")
      .def("observations", &Simulator::observations)
      .def("action_names", &Simulator::action_names, py::arg("agent"))
      .def("valid_mask", [](const Simulator& s, int a) { return s.env().action_space(a).valid_mask(); })
      .def("action_count", [](const Simulator& s, int a) { return s.env().action_space(a).size(); })
      .def("pending", [](const Simulator& s, int a) { return s.env().pending(a); })
      .def_property_readonly("agent_count", [](const Simulator& s) { return s.env().agent_count(); })
      .def_property_readonly("host_count", [](const Simulator& s) { return s.env().topology().host_count(); })
      .def_property_readonly("step_index", [](const Simulator& s) { return s.env().state().step_index; })
      .def_property_readonly("done", [](const Simulator& s) { return s.env().done(); })
      .def("footholds", [](const Simulator& s) {
        std::vector<int> out;
        for (auto f : s.env().truth_snapshot().footholds) out.push_back(static_cast<int>(f));
        return out;
      });

  m.def("encode_message", &encode_message, py::arg("subnet"), py::arg("host_index"));
  m.def("decode_message", &decode_message, py::arg("bits"));
  m.def(
      "compute_gae",
      [](const std::vector<double>& r, const std::vector<double>& v, const std::vector<std::uint8_t>& d,
         double gamma, double lam, double bootstrap) {
        const GaeResult g = compute_gae(r, v, d, gamma, lam, bootstrap);
        return py::make_tuple(g.advantages, g.returns);
      },
      py::arg("rewards"), py::arg("values"), py::arg("dones"), py::arg("gamma") = 0.99,
      py::arg("lam") = 0.95, py::arg("bootstrap") = 0.0);
  m.def(
      "masked_softmax",
      [](const std::vector<double>& logits, const std::vector<std::uint8_t>& mask) {
        const Vec p = masked_softmax(Eigen::Map<const Vec>(logits.data(), static_cast<Eigen::Index>(logits.size())), mask);
        return std::vector<double>(p.data(), p.data() + p.size());
      },
      py::arg("logits"), py::arg("mask"));
  m.def(
      "precision",
      [](double tp, double fp) {
        MetricsReport r;
        r.useful_recoveries.mean = tp;
        r.wasted_recoveries.mean = fp;
        finalize_precision(r);
        return py::make_tuple(r.precision ? py::object(py::float_(*r.precision)) : py::object(py::none()),
                              r.error ? py::object(py::float_(*r.error)) : py::object(py::none()));
      },
      py::arg("useful"), py::arg("wasted"));
  m.def(
      "metrics_from_traces", [](const std::string& path) { return report_dict(compute_metrics(load_traces(path))); },
      py::arg("path"));

  m.def(
      "effective_config", [](const std::string& yaml, const py::kwargs& kw) { return dump_experiment(experiment_from(yaml, kw)); },
      py::arg("yaml") = "");
  m.def(
      "train", [](const std::string& out, const std::string& yaml, const py::kwargs& kw) { run_command(cmd_train, yaml, out, kw); },
      py::arg("out"), py::arg("yaml") = "");
  m.def(
      "evaluate", [](const std::string& out, const std::string& yaml, const py::kwargs& kw) { run_command(cmd_eval, yaml, out, kw); },
      py::arg("out"), py::arg("yaml") = "");
  m.def(
      "ablate_obs",
      [](const std::string& out, const std::string& yaml, const py::kwargs& kw) { run_command(cmd_ablate_obs, yaml, out, kw); },
      py::arg("out"), py::arg("yaml") = "");
  m.def(
      "transfer",
      [](const std::string& out, const std::string& yaml, const py::kwargs& kw) { run_command(cmd_transfer, yaml, out, kw); },
      py::arg("out"), py::arg("yaml") = "");
  m.def(
      "report",
      [](const std::vector<std::string>& inputs, const std::string& out) {
        std::ostringstream log;
        cmd_report(inputs, out, log);
        return log.str();
      },
      py::arg("inputs"), py::arg("out") = "");
  m.attr("commit") = build_commit();
}
