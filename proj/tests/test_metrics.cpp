#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <sstream>

#include "cyberdef/errors.hpp"
#include "cyberdef/metrics.hpp"
#include "cyberdef/rollout.hpp"
#include "support.hpp"

using namespace cyberdef;
using namespace cyberdef::testing;

namespace {

/// Four hosts: 0 contractor, 1-3 defended. Contractor host is always rooted.
EpisodeTrace blank_trace(int steps) {
  EpisodeTrace t;
  t.strategy = "scripted";
  t.red = "default";
  t.episode_length = steps;
  t.host_subnet = {0, 1, 1, 2};
  for (int s = 0; s < steps; ++s) {
    TraceStep st;
    st.step = s;
    st.truth.step = s;
    st.truth.footholds = {Foothold::Root, Foothold::None, Foothold::None, Foothold::None};
    t.steps.push_back(st);
  }
  return t;
}

Event recovery(int host, BlueAction a, int submitted) {
  Event e;
  e.type = EventType::RecoveryCompleted;
  e.host = host;
  e.detail = static_cast<int>(a);
  e.submitted_step = submitted;
  return e;
}

MetricsReport report_with(double tp, double fp, double reward) {
  MetricsReport r;
  r.episodes = 100;
  r.reward.mean = reward;
  r.useful_recoveries.mean = tp;
  r.wasted_recoveries.mean = fp;
  finalize_precision(r);
  return r;
}

std::vector<EpisodeTrace> random_traces(int episodes, std::uint64_t seed) {
  const ScenarioConfig scenario = ScenarioConfig::desk();
  NetworkEnv env(scenario);
  Rng rng(seed);
  std::vector<EpisodeTrace> out;
  for (int ep = 0; ep < episodes; ++ep) {
    env.reset(derive_seed(seed, static_cast<std::uint64_t>(ep)));
    EpisodeTrace tr = begin_trace(env, "random", seed, ep);
    while (!env.done()) {
      JointAction j = all_sleep(env);
      std::vector<AgentStepRecord> recs(static_cast<std::size_t>(env.agent_count()));
      for (int a = 0; a < env.agent_count(); ++a) {
        if (env.pending(a)) {
          recs[static_cast<std::size_t>(a)].in_progress = true;
          continue;
        }
        const auto& space = env.action_space(a);
        j[static_cast<std::size_t>(a)].action = space.decode(rng.uniform_int(0, space.size() - 1));
        recs[static_cast<std::size_t>(a)].action = j[static_cast<std::size_t>(a)].action;
      }
      const TruthRecord before = env.truth_snapshot();
      const Phase phase = env.state().mission_phase;
      const StepResult r = env.step(j);
      record_step(tr, before, phase, std::move(recs), r);
    }
    out.push_back(std::move(tr));
  }
  return out;
}

}  // namespace

TEST_CASE("precision and error from the published recovery counts") {
  const MetricsReport r = report_with(6.07, 2.2, -129.53);
  REQUIRE(r.precision.has_value());
  CHECK(*r.precision == doctest::Approx(6.07 / 8.27));
  CHECK(*r.precision + *r.error == doctest::Approx(1.0));
  const ReportTable t = report_table({{"H-MARL Expert", r}});
  std::istringstream csv(t.csv);
  std::string header, row;
  std::getline(csv, header);
  std::getline(csv, row);
  CHECK(row.find(",0.73,0.27,") != std::string::npos);
  CHECK(row.rfind("H-MARL Expert,-129.53,", 0) == 0);
}

TEST_CASE("no recoveries leaves precision undefined") {
  const MetricsReport r = report_with(0.0, 0.0, -10.0);
  CHECK_FALSE(r.precision.has_value());
  CHECK_FALSE(r.error.has_value());
  const ReportTable t = report_table({{"idle", r}});
  CHECK(t.csv.find(",null,null,") != std::string::npos);
  const auto m = episode_metrics(blank_trace(20));
  CHECK(m.useful_recoveries == 0);
  CHECK(m.wasted_recoveries == 0);
}

TEST_CASE("report has ten columns and one row per strategy") {
  const ReportTable t = report_table({{"A", report_with(1, 1, -1)}});
  std::istringstream csv(t.csv);
  std::string line;
  int lines = 0;
  while (std::getline(csv, line)) {
    CHECK(std::count(line.begin(), line.end(), ',') == 9);
    ++lines;
  }
  CHECK(lines == 2);
  CHECK(kReportColumns.size() == 10);
  CHECK(t.text.find("strategy") == 0);
  CHECK(t.text.find("per-episode means") != std::string::npos);
  CHECK(report_table({{"A", report_with(1, 1, -1)}}).csv == t.csv);
}

TEST_CASE("precision column matches the recovery columns of its row") {
  Rng rng(3);
  for (int k = 0; k < 200; ++k) {
    const double tp = rng.uniform_int(0, 1000) / 100.0;
    const double fp = rng.uniform_int(1, 1000) / 100.0;
    const MetricsReport r = report_with(tp, fp, -5.0);
    CHECK(*r.precision == doctest::Approx(tp / (tp + fp)));
  }
}

TEST_CASE("mean time to recover counts the compromised run") {
  EpisodeTrace t = blank_trace(40);
  for (int s = 10; s <= 19; ++s) t.steps[static_cast<std::size_t>(s)].truth.footholds[1] = Foothold::User;
  t.steps[15].events.push_back(recovery(1, BlueAction::Restore, 15));
  const auto m = episode_metrics(t);
  REQUIRE(m.mttr.has_value());
  CHECK(*m.mttr == 10.0);
  CHECK(m.useful_recoveries == 1);
  CHECK(compromised_runs({false, true, true, false, true}) == std::vector<int>{2, 1});
}

TEST_CASE("recoveries are judged by the truth at submission") {
  EpisodeTrace t = blank_trace(30);
  for (int s = 5; s < 12; ++s) t.steps[static_cast<std::size_t>(s)].truth.footholds[2] = Foothold::Root;
  t.steps[9].events.push_back(recovery(2, BlueAction::Restore, 5));
  t.steps[20].events.push_back(recovery(2, BlueAction::Remove, 18));
  t.steps[25].events.push_back(recovery(3, BlueAction::Remove, 23));
  const auto m = episode_metrics(t);
  CHECK(m.useful_recoveries == 1);
  CHECK(m.wasted_recoveries == 2);
  CHECK(m.recoveries == 3);
  CHECK(m.non_escalated == doctest::Approx(1.0 - 7.0 / 30.0 / 3.0));
}

TEST_CASE("clean host ratios with and without the contractor") {
  EpisodeTrace t = blank_trace(10);
  t.steps[0].truth.footholds[3] = Foothold::User;
  const auto m = episode_metrics(t);
  CHECK(m.clean_hosts == doctest::Approx((9.0 + 2.0 / 3.0) / 10.0));
  CHECK(m.clean_hosts_with_contractor == doctest::Approx((9 * 0.75 + 0.5) / 10.0));
  CHECK(m.clean_hosts >= m.clean_hosts_with_contractor);
}

TEST_CASE("impact count follows OT impact penalties") {
  EpisodeTrace t = blank_trace(10);
  t.steps[3].events.push_back(Event::penalty(PenaltyKind::OtImpact, -10.0, 1));
  t.steps[4].events.push_back(Event::penalty(PenaltyKind::GreenFailure, -1.0, 1));
  t.steps[7].events.push_back(Event::penalty(PenaltyKind::OtImpact, -10.0, 1));
  CHECK(episode_metrics(t).impact_count == 2);
}

TEST_CASE("traces without truth are rejected") {
  EpisodeTrace t = blank_trace(5);
  t.steps[2].truth.footholds.clear();
  CHECK_THROWS_AS(episode_metrics(t), InputError);
  CHECK_THROWS_AS(episode_metrics(blank_trace(0)), InputError);
  CHECK_THROWS_AS(compute_metrics(std::vector<EpisodeTrace>{}), InputError);
}

TEST_CASE("every recovery is counted once on random traces") {
  const auto traces = random_traces(1000, 42);
  long events = 0, counted = 0;
  for (const auto& t : traces) {
    const auto m = episode_metrics(t);
    int tp = 0, fp = 0;
    for (const auto& st : t.steps)
      for (const auto& e : st.events)
        if (e.type == EventType::RecoveryCompleted) {
          ++events;
          const auto& truth = t.steps[static_cast<std::size_t>(e.submitted_step)].truth;
          (truth.footholds[static_cast<std::size_t>(e.host)] != Foothold::None ? tp : fp)++;
        }
    CHECK(m.useful_recoveries == tp);
    CHECK(m.wasted_recoveries == fp);
    CHECK(m.recoveries == m.useful_recoveries + m.wasted_recoveries);
    double contractor_clean = 0.0;
    int contractor = 0;
    for (std::size_t h = 0; h < t.host_subnet.size(); ++h)
      if (t.is_contractor_host(static_cast<int>(h))) ++contractor;
    const int defended = static_cast<int>(t.host_subnet.size()) - contractor;
    for (const auto& st : t.steps)
      for (std::size_t h = 0; h < t.host_subnet.size(); ++h)
        if (t.is_contractor_host(static_cast<int>(h)) && st.truth.footholds[h] == Foothold::None)
          contractor_clean += 1.0 / contractor / static_cast<double>(t.steps.size());
    CHECK(m.clean_hosts_with_contractor ==
          doctest::Approx((defended * m.clean_hosts + contractor * contractor_clean) / (defended + contractor)));
    if (contractor_clean <= m.clean_hosts) CHECK(m.clean_hosts >= m.clean_hosts_with_contractor - 1e-12);
    CHECK((m.clean_hosts >= 0.0 && m.clean_hosts <= 1.0));
    CHECK(m.reward == doctest::Approx(t.total_reward()));
    counted += m.recoveries;
  }
  CHECK(events == counted);
  CHECK(events > 0);
  const MetricsReport r = compute_metrics(traces);
  CHECK(r.episodes == 1000);
  if (r.precision) CHECK(*r.precision + *r.error == doctest::Approx(1.0));
}

TEST_CASE("traces survive a serialization round trip with identical metrics") {
  const auto traces = random_traces(5, 7);
  std::stringstream ss;
  for (const auto& t : traces) write_trace(ss, t);
  const auto back = read_traces(ss);
  REQUIRE(back.size() == traces.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i] == traces[i]);
    CHECK(serialize_trace(back[i]) == serialize_trace(traces[i]));
  }
  const auto a = report_table({{"x", compute_metrics(traces)}});
  const auto b = report_table({{"x", compute_metrics(back)}});
  CHECK(a.csv == b.csv);
  std::istringstream bad("{\"trace\":1,\"strategy\":\"x\"}\nnot json\n");
  CHECK_THROWS_AS(read_traces(bad), InputError);
}

TEST_CASE("summaries use the population standard deviation") {
  const std::vector<double> v{1.0, 2.0, 3.0, 4.0};
  const Stat s = summarize(v);
  CHECK(s.mean == 2.5);
  CHECK(s.std == doctest::Approx(std::sqrt(1.25)));
  CHECK(s.count == 4);
}
