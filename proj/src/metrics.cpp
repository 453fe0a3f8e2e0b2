#include "cyberdef/metrics.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

#include "cyberdef/errors.hpp"

namespace cyberdef {

const std::vector<std::string> kReportColumns = {
    "strategy", "reward", "clean_hosts", "non_escalated", "mttr",
    "useful_recoveries", "wasted_recoveries", "precision", "error", "impact_count"};

Stat summarize(std::span<const double> values) {
  Stat s;
  s.count = static_cast<int>(values.size());
  if (values.empty()) return s;
  for (double v : values) s.mean += v;
  s.mean /= static_cast<double>(values.size());
  double var = 0.0;
  for (double v : values) var += (v - s.mean) * (v - s.mean);
  s.std = std::sqrt(var / static_cast<double>(values.size()));
  return s;
}

std::vector<int> compromised_runs(const std::vector<bool>& compromised) {
  std::vector<int> runs;
  int current = 0;
  for (bool c : compromised) {
    if (c) {
      ++current;
    } else if (current > 0) {
      runs.push_back(current);
      current = 0;
    }
  }
  if (current > 0) runs.push_back(current);
  return runs;
}

EpisodeMetrics episode_metrics(const EpisodeTrace& trace) {
  if (trace.steps.empty()) throw InputError("episode trace has no steps");
  const std::size_t hosts = trace.host_subnet.size();
  EpisodeMetrics m;
  std::vector<std::vector<bool>> compromised(hosts);
  double clean = 0.0, clean_all = 0.0, non_esc = 0.0;
  for (const auto& s : trace.steps) {
    if (s.truth.footholds.size() != hosts)
      throw InputError("trace step " + std::to_string(s.step) + " has no truth record");
    int defended = 0, c = 0, ca = 0, ne = 0;
    for (std::size_t h = 0; h < hosts; ++h) {
      const Foothold f = s.truth.footholds[h];
      if (f == Foothold::None) ++ca;
      if (trace.is_contractor_host(static_cast<int>(h))) continue;
      ++defended;
      if (f == Foothold::None) ++c;
      if (f != Foothold::Root) ++ne;
      compromised[h].push_back(f != Foothold::None);
    }
    clean += defended ? static_cast<double>(c) / defended : 1.0;
    non_esc += defended ? static_cast<double>(ne) / defended : 1.0;
    clean_all += static_cast<double>(ca) / static_cast<double>(hosts);
    m.reward += s.reward;
    for (const auto& e : s.events) {
      if (e.type == EventType::RecoveryCompleted) {
        const int t0 = trace.steps.front().step;
        const int idx = e.submitted_step - t0;
        if (idx < 0 || idx >= static_cast<int>(trace.steps.size()))
          throw InputError("recovery submitted outside the trace at step " + std::to_string(e.submitted_step));
        ++m.recoveries;
        if (trace.steps[static_cast<std::size_t>(idx)].truth.footholds.at(static_cast<std::size_t>(e.host)) !=
            Foothold::None)
          ++m.useful_recoveries;
        else
          ++m.wasted_recoveries;
      } else if (e.type == EventType::Penalty &&
                 static_cast<PenaltyKind>(e.detail) == PenaltyKind::OtImpact) {
        ++m.impact_count;
      }
    }
  }
  const double n = static_cast<double>(trace.steps.size());
  m.clean_hosts = clean / n;
  m.clean_hosts_with_contractor = clean_all / n;
  m.non_escalated = non_esc / n;
  double total = 0.0;
  int count = 0;
  for (const auto& seq : compromised)
    for (int r : compromised_runs(seq)) {
      total += r;
      ++count;
    }
  if (count > 0) m.mttr = total / count;
  return m;
}

void finalize_precision(MetricsReport& r) {
  const double tp = r.useful_recoveries.mean, fp = r.wasted_recoveries.mean;
  if (tp + fp > 0.0) {
    r.precision = tp / (tp + fp);
    r.error = 1.0 - *r.precision;
  } else {
    r.precision.reset();
    r.error.reset();
  }
}

MetricsReport compute_metrics(std::span<const EpisodeTrace> traces) {
  if (traces.empty()) throw InputError("compute_metrics: no traces");
  std::vector<double> reward, clean, clean_all, non_esc, mttr, tp, fp, impact;
  for (const auto& t : traces) {
    const auto m = episode_metrics(t);
    reward.push_back(m.reward);
    clean.push_back(m.clean_hosts);
    clean_all.push_back(m.clean_hosts_with_contractor);
    non_esc.push_back(m.non_escalated);
    if (m.mttr) mttr.push_back(*m.mttr);
    tp.push_back(m.useful_recoveries);
    fp.push_back(m.wasted_recoveries);
    impact.push_back(m.impact_count);
  }
  MetricsReport r;
  r.episodes = static_cast<int>(traces.size());
  r.reward = summarize(reward);
  r.clean_hosts = summarize(clean);
  r.clean_hosts_with_contractor = summarize(clean_all);
  r.non_escalated = summarize(non_esc);
  r.mttr = summarize(mttr);
  r.useful_recoveries = summarize(tp);
  r.wasted_recoveries = summarize(fp);
  r.impact_count = summarize(impact);
  finalize_precision(r);
  return r;
}

namespace {

std::string fixed2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  std::string s = buf;
  if (s == "-0.00") s = "0.00";
  return s;
}

std::string fixed2(const std::optional<double>& v) { return v ? fixed2(*v) : "null"; }

std::vector<std::string> row_cells(const std::string& name, const MetricsReport& r) {
  return {name,
          fixed2(r.reward.mean),
          fixed2(r.clean_hosts.mean),
          fixed2(r.non_escalated.mean),
          r.mttr.count > 0 ? fixed2(r.mttr.mean) : "null",
          fixed2(r.useful_recoveries.mean),
          fixed2(r.wasted_recoveries.mean),
          fixed2(r.precision),
          fixed2(r.error),
          fixed2(r.impact_count.mean)};
}

}  // namespace

ReportTable report_table(const std::vector<std::pair<std::string, MetricsReport>>& rows) {
  std::vector<std::vector<std::string>> cells;
  cells.push_back(kReportColumns);
  for (const auto& [name, r] : rows) cells.push_back(row_cells(name, r));

  std::ostringstream csv;
  for (const auto& row : cells) {
    for (std::size_t i = 0; i < row.size(); ++i) csv << (i ? "," : "") << row[i];
    csv << '\n';
  }

  std::vector<std::size_t> width(kReportColumns.size(), 0);
  for (const auto& row : cells)
    for (std::size_t i = 0; i < row.size(); ++i) width[i] = std::max(width[i], row[i].size());
  std::ostringstream text;
  for (std::size_t k = 0; k < cells.size(); ++k) {
    const auto& row = cells[k];
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) text << "  ";
      const std::string pad(width[i] - row[i].size(), ' ');
      text << (i == 0 ? row[i] + pad : pad + row[i]);
    }
    text << '\n';
    if (k == 0) {
      std::size_t total = 0;
      for (auto w : width) total += w + 2;
      text << std::string(total - 2, '-') << '\n';
    }
  }
  text << '\n';
  for (const auto& [name, r] : rows)
    text << name << ": reward " << fixed2(r.reward.mean) << " +/- " << fixed2(r.reward.std) << " over "
         << r.episodes << " episodes\n";
  text << "Recovery counts are per-episode means; clean_hosts excludes the contractor subnet.\n";
  return {text.str(), csv.str()};
}

}  // namespace cyberdef
