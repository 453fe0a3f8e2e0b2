#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "cyberdef/trace.hpp"

namespace cyberdef {

struct Stat {
  double mean = 0.0;
  double std = 0.0;
  /// Episodes contributing (metrics like MTTR skip episodes without data).
  int count = 0;
};

/// Arithmetic mean and population standard deviation.
Stat summarize(std::span<const double> values);

struct EpisodeMetrics {
  double reward = 0.0;
  double clean_hosts = 0.0;
  double clean_hosts_with_contractor = 0.0;
  double non_escalated = 0.0;
  /// Mean compromised run length; empty when no host was compromised.
  std::optional<double> mttr;
  int useful_recoveries = 0;
  int wasted_recoveries = 0;
  int recoveries = 0;
  int impact_count = 0;
};

struct MetricsReport {
  int episodes = 0;
  Stat reward;
  Stat clean_hosts;
  Stat clean_hosts_with_contractor;
  Stat non_escalated;
  Stat mttr;
  Stat useful_recoveries;
  Stat wasted_recoveries;
  /// TP/(TP+FP) over the mean counts; empty when both are zero.
  std::optional<double> precision;
  std::optional<double> error;
  Stat impact_count;
};

/// Throws InputError for traces without truth records.
EpisodeMetrics episode_metrics(const EpisodeTrace& trace);
MetricsReport compute_metrics(std::span<const EpisodeTrace> traces);

/// Fills precision/error from the current TP and FP means.
void finalize_precision(MetricsReport& report);

/// Lengths of maximal runs where `compromised[t]` holds; a run reaching the
/// end of the sequence is counted as is.
std::vector<int> compromised_runs(const std::vector<bool>& compromised);

struct ReportTable {
  std::string text;
  std::string csv;
};
extern const std::vector<std::string> kReportColumns;

ReportTable report_table(const std::vector<std::pair<std::string, MetricsReport>>& rows);

}  // namespace cyberdef
