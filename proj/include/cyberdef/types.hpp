#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace cyberdef {

enum class Foothold : std::uint8_t { None, User, Root };
enum class Phase : std::uint8_t { P1, P2, P3 };
enum class ActorClass : std::uint8_t { Blue, Red, Green };

enum class BlueAction : std::uint8_t {
  Sleep,
  Monitor,
  Analyse,
  DeployDecoy,
  Remove,
  Restore,
  BlockTraffic,
  AllowTraffic,
};
inline constexpr int kBlueActionKinds = 8;

enum class RedAction : std::uint8_t {
  DiscoverRemoteSystems,
  AggressiveServiceDiscovery,
  StealthServiceDiscovery,
  ExploitNetworkServices,
  PrivilegeEscalate,
  Impact,
  DegradeServices,
  DiscoverDeception,
  Withdraw,
};
inline constexpr int kRedActionKinds = 9;

enum class GreenAction : std::uint8_t { AccessService, LocalWork };

struct Target {
  enum class Kind : std::uint8_t { None, Host, Subnet };
  Kind kind = Kind::None;
  int id = -1;

  static Target none() { return {}; }
  static Target host(int h) { return {Kind::Host, h}; }
  static Target subnet(int s) { return {Kind::Subnet, s}; }
  bool operator==(const Target&) const = default;
};

int duration_of(BlueAction a);
int duration_of(RedAction a);
int duration_of(GreenAction a);

struct ActionSpec {
  ActorClass actor = ActorClass::Blue;
  std::uint8_t kind = 0;
  Target target;
  int duration = 1;

  static ActionSpec blue(BlueAction a, Target t = Target::none()) {
    return {ActorClass::Blue, static_cast<std::uint8_t>(a), t, duration_of(a)};
  }
  static ActionSpec red(RedAction a, Target t) {
    return {ActorClass::Red, static_cast<std::uint8_t>(a), t, duration_of(a)};
  }
  static ActionSpec green(GreenAction a, Target t) {
    return {ActorClass::Green, static_cast<std::uint8_t>(a), t, duration_of(a)};
  }
  static ActionSpec sleep() { return blue(BlueAction::Sleep); }

  BlueAction blue_kind() const { return static_cast<BlueAction>(kind); }
  RedAction red_kind() const { return static_cast<RedAction>(kind); }
  GreenAction green_kind() const { return static_cast<GreenAction>(kind); }
  bool is_sleep() const {
    return actor == ActorClass::Blue && blue_kind() == BlueAction::Sleep;
  }
  bool operator==(const ActionSpec&) const = default;
};

std::string_view to_string(Foothold f);
std::string_view to_string(Phase p);
std::string_view to_string(BlueAction a);
std::string_view to_string(RedAction a);
std::string_view to_string(GreenAction a);
std::string to_string(const ActionSpec& a);

std::optional<BlueAction> parse_blue_action(std::string_view s);
std::optional<RedAction> parse_red_action(std::string_view s);

}  // namespace cyberdef
