#include "cyberdef/types.hpp"

#include <array>

namespace cyberdef {

namespace {

constexpr std::array<std::string_view, kBlueActionKinds> kBlueNames = {
    "Sleep",   "Monitor", "Analyse",      "DeployDecoy",
    "Remove",  "Restore", "BlockTraffic", "AllowTraffic"};

constexpr std::array<std::string_view, kRedActionKinds> kRedNames = {
    "DiscoverRemoteSystems",
    "AggressiveServiceDiscovery",
    "StealthServiceDiscovery",
    "ExploitNetworkServices",
    "PrivilegeEscalate",
    "Impact",
    "DegradeServices",
    "DiscoverDeception",
    "Withdraw"};

}  // namespace

int duration_of(BlueAction a) {
  switch (a) {
    case BlueAction::Sleep:
    case BlueAction::Monitor:
    case BlueAction::BlockTraffic:
    case BlueAction::AllowTraffic:
      return 1;
    case BlueAction::Analyse:
    case BlueAction::DeployDecoy:
      return 2;
    case BlueAction::Remove:
      return 3;
    case BlueAction::Restore:
      return 5;
  }
  return 1;
}

int duration_of(RedAction a) {
  switch (a) {
    case RedAction::DiscoverRemoteSystems:
    case RedAction::AggressiveServiceDiscovery:
    case RedAction::Withdraw:
      return 1;
    case RedAction::StealthServiceDiscovery:
      return 3;
    case RedAction::ExploitNetworkServices:
      return 4;
    case RedAction::PrivilegeEscalate:
    case RedAction::Impact:
    case RedAction::DegradeServices:
    case RedAction::DiscoverDeception:
      return 2;
  }
  return 1;
}

int duration_of(GreenAction) { return 1; }

std::string_view to_string(Foothold f) {
  switch (f) {
    case Foothold::None: return "None";
    case Foothold::User: return "User";
    case Foothold::Root: return "Root";
  }
  return "?";
}

std::string_view to_string(Phase p) {
  switch (p) {
    case Phase::P1: return "P1";
    case Phase::P2: return "P2";
    case Phase::P3: return "P3";
  }
  return "?";
}

std::string_view to_string(BlueAction a) {
  return kBlueNames[static_cast<std::size_t>(a)];
}

std::string_view to_string(RedAction a) {
  return kRedNames[static_cast<std::size_t>(a)];
}

std::string_view to_string(GreenAction a) {
  return a == GreenAction::AccessService ? "AccessService" : "LocalWork";
}

std::string to_string(const ActionSpec& a) {
  std::string out;
  switch (a.actor) {
    case ActorClass::Blue: out = std::string(to_string(a.blue_kind())); break;
    case ActorClass::Red: out = std::string(to_string(a.red_kind())); break;
    case ActorClass::Green: out = std::string(to_string(a.green_kind())); break;
  }
  switch (a.target.kind) {
    case Target::Kind::Host: out += "(h" + std::to_string(a.target.id) + ")"; break;
    case Target::Kind::Subnet: out += "(s" + std::to_string(a.target.id) + ")"; break;
    case Target::Kind::None: break;
  }
  return out;
}

std::optional<BlueAction> parse_blue_action(std::string_view s) {
  for (std::size_t i = 0; i < kBlueNames.size(); ++i)
    if (kBlueNames[i] == s) return static_cast<BlueAction>(i);
  return std::nullopt;
}

std::optional<RedAction> parse_red_action(std::string_view s) {
  for (std::size_t i = 0; i < kRedNames.size(); ++i)
    if (kRedNames[i] == s) return static_cast<RedAction>(i);
  return std::nullopt;
}

}  // namespace cyberdef
