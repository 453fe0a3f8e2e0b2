#pragma once

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cyberdef/types.hpp"

namespace cyberdef {

/// Red's per-host view of the attack.
enum class AttackState : std::uint8_t {
  Unknown,
  Discovered,
  ServicesKnown,
  UserFoothold,
  RootFoothold,
  DeceptionSuspected,
  Withdrawn,
};
inline constexpr int kAttackStates = 7;

enum class RedVariant : std::uint8_t {
  Default,
  Aggressive,
  Stealthy,
  Impact,
  ExternalScan,
};

std::string_view to_string(AttackState s);
std::string_view to_string(RedVariant v);
std::optional<AttackState> parse_attack_state(std::string_view s);
/// Accepts "default", "Default", "aggressive", "ExternalScan", ...
std::optional<RedVariant> parse_red_variant(std::string_view s);

/// Actions the state machine allows from a state.
bool legal_in_state(AttackState s, RedAction a);
/// States in which red picks actions (rows must be stochastic).
bool is_actionable(AttackState s);

struct TransitionMatrix {
  std::array<std::array<double, kRedActionKinds>, kAttackStates> rows{};

  const std::array<double, kRedActionKinds>& row(AttackState s) const {
    return rows[static_cast<std::size_t>(s)];
  }
  std::array<double, kRedActionKinds>& row(AttackState s) {
    return rows[static_cast<std::size_t>(s)];
  }
  double& at(AttackState s, RedAction a) {
    return row(s)[static_cast<std::size_t>(a)];
  }
  double at(AttackState s, RedAction a) const {
    return row(s)[static_cast<std::size_t>(a)];
  }

  /// Every actionable row sums to 1 within 1e-9, mass only on legal actions,
  /// non-actionable rows are empty. Throws ConfigError otherwise.
  void validate() const;
};

/// Built-in synthetic defaults. Only the ServicesKnown row of the default
/// agent is taken from published numbers; the rest follow the variant
/// descriptions (discovery style and attack objective).
TransitionMatrix builtin_matrix(RedVariant v);

/// Tabular text: one "state action probability" triple per line, '#'
/// comments. States not mentioned keep the rows of `base`.
TransitionMatrix parse_matrix(const std::string& text,
                              const TransitionMatrix& base);
TransitionMatrix load_matrix(const std::string& path,
                             const TransitionMatrix& base);
std::string format_matrix(const TransitionMatrix& m);

struct PendingRed {
  ActionSpec action;
  int remaining = 0;
  int source_host = -1;
};

/// One finite-state red agent. Each subnet has one; it wakes up once it holds
/// a foothold in its home subnet (the contractor agent starts awake).
struct RedStateMachine {
  int home_subnet = 0;
  RedVariant variant = RedVariant::Default;
  TransitionMatrix matrix;
  std::vector<AttackState> states;
  std::optional<PendingRed> pending;

  AttackState state(int host) const { return states[host]; }
  bool operator==(const RedStateMachine& o) const {
    return home_subnet == o.home_subnet && variant == o.variant &&
           states == o.states && pending.has_value() == o.pending.has_value() &&
           (!pending || (pending->action == o.pending->action &&
                         pending->remaining == o.pending->remaining &&
                         pending->source_host == o.pending->source_host));
  }
};

}  // namespace cyberdef
