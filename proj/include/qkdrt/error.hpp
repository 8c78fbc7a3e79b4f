#pragma once

#include <stdexcept>
#include <string>

namespace qkdrt {

enum class ErrorKind {
  domain,
  singular_system,
  sector_violation,
  empty_sifted_key,
  inconsistent_protocol,
  config,
  schema,
  io,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::domain: return "DomainError";
    case ErrorKind::singular_system: return "SingularSystem";
    case ErrorKind::sector_violation: return "SectorViolation";
    case ErrorKind::empty_sifted_key: return "EmptySiftedKey";
    case ErrorKind::inconsistent_protocol: return "InconsistentProtocol";
    case ErrorKind::config: return "ConfigError";
    case ErrorKind::schema: return "SchemaError";
    case ErrorKind::io: return "IoError";
  }
  return "Error";
}

}  // namespace qkdrt
