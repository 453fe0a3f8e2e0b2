#include "cyberdef/red_machine.hpp"

#include <cctype>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "cyberdef/errors.hpp"

namespace cyberdef {

namespace {

constexpr std::array<std::string_view, kAttackStates> kStateNames = {
    "Unknown",      "Discovered",         "ServicesKnown", "UserFoothold",
    "RootFoothold", "DeceptionSuspected", "Withdrawn"};

std::string lower(std::string_view s) {
  std::string out;
  for (char c : s)
    if (c != '_' && c != '-') out.push_back(static_cast<char>(std::tolower(c)));
  return out;
}

}  // namespace

std::string_view to_string(AttackState s) {
  return kStateNames[static_cast<std::size_t>(s)];
}

std::string_view to_string(RedVariant v) {
  switch (v) {
    case RedVariant::Default: return "Default";
    case RedVariant::Aggressive: return "Aggressive";
    case RedVariant::Stealthy: return "Stealthy";
    case RedVariant::Impact: return "Impact";
    case RedVariant::ExternalScan: return "ExternalScan";
  }
  return "?";
}

std::optional<AttackState> parse_attack_state(std::string_view s) {
  const auto key = lower(s);
  for (std::size_t i = 0; i < kStateNames.size(); ++i)
    if (lower(kStateNames[i]) == key) return static_cast<AttackState>(i);
  if (key == "k") return AttackState::Discovered;
  if (key == "s") return AttackState::ServicesKnown;
  if (key == "u") return AttackState::UserFoothold;
  if (key == "r") return AttackState::RootFoothold;
  return std::nullopt;
}

std::optional<RedVariant> parse_red_variant(std::string_view s) {
  const auto key = lower(s);
  for (auto v : {RedVariant::Default, RedVariant::Aggressive, RedVariant::Stealthy,
                 RedVariant::Impact, RedVariant::ExternalScan})
    if (lower(to_string(v)) == key) return v;
  return std::nullopt;
}

bool is_actionable(AttackState s) {
  return s == AttackState::Discovered || s == AttackState::ServicesKnown ||
         s == AttackState::UserFoothold || s == AttackState::RootFoothold;
}

bool legal_in_state(AttackState s, RedAction a) {
  using A = RedAction;
  switch (s) {
    case AttackState::Discovered:
      return a == A::AggressiveServiceDiscovery ||
             a == A::StealthServiceDiscovery;
    case AttackState::ServicesKnown:
      return a == A::DiscoverRemoteSystems || a == A::DiscoverDeception ||
             a == A::ExploitNetworkServices;
    case AttackState::UserFoothold:
      return a == A::DiscoverRemoteSystems || a == A::PrivilegeEscalate;
    case AttackState::RootFoothold:
      return a == A::DiscoverRemoteSystems || a == A::Impact ||
             a == A::DegradeServices || a == A::Withdraw;
    default:
      return false;
  }
}

void TransitionMatrix::validate() const {
  for (int si = 0; si < kAttackStates; ++si) {
    const auto s = static_cast<AttackState>(si);
    double sum = 0.0;
    for (int ai = 0; ai < kRedActionKinds; ++ai) {
      const double p = rows[si][ai];
      if (!(p >= 0.0 && p <= 1.0) || !std::isfinite(p))
        throw ConfigError("red matrix: probability out of [0,1] in state " +
                          std::string(to_string(s)));
      if (p > 0.0 && !legal_in_state(s, static_cast<RedAction>(ai)))
        throw ConfigError("red matrix: illegal action " +
                          std::string(to_string(static_cast<RedAction>(ai))) +
                          " has mass in state " + std::string(to_string(s)));
      sum += p;
    }
    if (is_actionable(s) && std::abs(sum - 1.0) > 1e-9)
      throw ConfigError("red matrix: row " + std::string(to_string(s)) +
                        " does not sum to 1");
  }
}

TransitionMatrix builtin_matrix(RedVariant v) {
  using A = RedAction;
  using S = AttackState;
  TransitionMatrix m;
  m.at(S::Discovered, A::AggressiveServiceDiscovery) = 0.5;
  m.at(S::Discovered, A::StealthServiceDiscovery) = 0.5;

  m.at(S::ServicesKnown, A::DiscoverRemoteSystems) = 0.25;
  m.at(S::ServicesKnown, A::DiscoverDeception) = 0.25;
  m.at(S::ServicesKnown, A::ExploitNetworkServices) = 0.5;

  m.at(S::UserFoothold, A::DiscoverRemoteSystems) = 0.5;
  m.at(S::UserFoothold, A::PrivilegeEscalate) = 0.5;

  m.at(S::RootFoothold, A::DiscoverRemoteSystems) = 0.3;
  m.at(S::RootFoothold, A::Impact) = 0.3;
  m.at(S::RootFoothold, A::DegradeServices) = 0.3;
  m.at(S::RootFoothold, A::Withdraw) = 0.1;

  switch (v) {
    case RedVariant::Aggressive:
      m.at(S::Discovered, A::AggressiveServiceDiscovery) = 1.0;
      m.at(S::Discovered, A::StealthServiceDiscovery) = 0.0;
      break;
    case RedVariant::Stealthy:
      m.at(S::Discovered, A::AggressiveServiceDiscovery) = 0.0;
      m.at(S::Discovered, A::StealthServiceDiscovery) = 1.0;
      break;
    case RedVariant::Impact:
      m.at(S::RootFoothold, A::Impact) = 0.6;
      m.at(S::RootFoothold, A::DegradeServices) = 0.0;
      break;
    case RedVariant::Default:
    case RedVariant::ExternalScan:
      break;
  }
  return m;
}

TransitionMatrix parse_matrix(const std::string& text,
                              const TransitionMatrix& base) {
  TransitionMatrix m = base;
  std::array<bool, kAttackStates> touched{};
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.resize(hash);
    std::istringstream fields(line);
    std::string state_name, action_name;
    double p = 0.0;
    if (!(fields >> state_name)) continue;
    if (!(fields >> action_name >> p))
      throw ConfigError("red matrix line " + std::to_string(lineno) +
                        ": expected 'state action probability'");
    const auto s = parse_attack_state(state_name);
    const auto a = parse_red_action(action_name);
    if (!s || !a)
      throw ConfigError("red matrix line " + std::to_string(lineno) +
                        ": unknown state or action");
    auto& row = m.row(*s);
    if (!touched[static_cast<std::size_t>(*s)]) {
      row.fill(0.0);
      touched[static_cast<std::size_t>(*s)] = true;
    }
    row[static_cast<std::size_t>(*a)] = p;
  }
  m.validate();
  return m;
}

TransitionMatrix load_matrix(const std::string& path,
                             const TransitionMatrix& base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open red matrix file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_matrix(ss.str(), base);
}

std::string format_matrix(const TransitionMatrix& m) {
  std::ostringstream out;
  out << "# state\taction\tprobability\n";
  for (int si = 0; si < kAttackStates; ++si)
    for (int ai = 0; ai < kRedActionKinds; ++ai)
      if (m.rows[si][ai] > 0.0)
        out << to_string(static_cast<AttackState>(si)) << '\t'
            << to_string(static_cast<RedAction>(ai)) << '\t'
            << std::setprecision(17) << m.rows[si][ai] << '\n';
  return out.str();
}

}  // namespace cyberdef
