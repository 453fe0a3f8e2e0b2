#include "cyberdef/events.hpp"

namespace cyberdef {

std::string_view to_string(EventType t) {
  switch (t) {
    case EventType::Alert: return "Alert";
    case EventType::MaliciousFile: return "MaliciousFile";
    case EventType::AnalyseClean: return "AnalyseClean";
    case EventType::DecoyAccess: return "DecoyAccess";
    case EventType::DecoyDeployed: return "DecoyDeployed";
    case EventType::DecoyRejected: return "DecoyRejected";
    case EventType::RecoveryCompleted: return "RecoveryCompleted";
    case EventType::TrafficChanged: return "TrafficChanged";
    case EventType::MonitorCompleted: return "MonitorCompleted";
    case EventType::Message: return "Message";
    case EventType::RedAction: return "RedAction";
    case EventType::GreenAccess: return "GreenAccess";
    case EventType::Phishing: return "Phishing";
    case EventType::Penalty: return "Penalty";
  }
  return "?";
}

bool is_ioc_event(const Event& e) {
  return e.type == EventType::MaliciousFile || e.type == EventType::DecoyAccess;
}

}  // namespace cyberdef
