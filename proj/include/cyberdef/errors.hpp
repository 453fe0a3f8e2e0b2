#pragma once

#include <stdexcept>
#include <string>

namespace cyberdef {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct RejectedActionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InvalidTargetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct DomainError : std::domain_error {
  using std::domain_error::domain_error;
};
struct ShapeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct LoadError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ContractError : std::logic_error {
  using std::logic_error::logic_error;
};

}  // namespace cyberdef
