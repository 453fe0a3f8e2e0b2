#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

#include "cyberdef/types.hpp"

namespace cyberdef {

enum class EventType : std::uint8_t {
  Alert,              // host, detail = AlertKind
  MaliciousFile,      // host, detail = Foothold level of the file (Analyse)
  AnalyseClean,       // host
  DecoyAccess,        // host = decoy host, source = red source host
  DecoyDeployed,      // host, detail = service id
  DecoyRejected,      // host (cap reached or no free service id)
  RecoveryCompleted,  // host, detail = BlueAction, submitted_step
  TrafficChanged,     // subnet = zone, detail = 1 blocked / 0 allowed
  MonitorCompleted,
  Message,            // source = sending agent, detail = 8-bit payload
  RedAction,          // detail = RedAction, host/subnet target, success flag
  GreenAccess,        // host = source, source = target host, success flag
  Phishing,           // host
  Penalty,            // detail = PenaltyKind, value
};

enum class AlertKind : std::uint8_t { Process = 0, Connection = 1 };
enum class PenaltyKind : std::uint8_t { GreenFailure, OtImpact, RestoreCost };

struct Event {
  EventType type = EventType::Alert;
  int host = -1;
  int subnet = -1;
  int source = -1;
  int detail = 0;
  int submitted_step = -1;
  bool success = true;
  double value = 0.0;

  bool operator==(const Event&) const = default;

  static Event alert(int host, AlertKind k) {
    Event e;
    e.type = EventType::Alert;
    e.host = host;
    e.detail = static_cast<int>(k);
    return e;
  }
  static Event penalty(PenaltyKind k, double v, int host = -1) {
    Event e;
    e.type = EventType::Penalty;
    e.detail = static_cast<int>(k);
    e.value = v;
    e.host = host;
    return e;
  }
};

using EventList = std::vector<Event>;

std::string_view to_string(EventType t);
bool is_ioc_event(const Event& e);

}  // namespace cyberdef
