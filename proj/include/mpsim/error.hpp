#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace mpsim {

/// Error classes surfaced by the CLI as machine-readable tags.
enum class ErrorClass { config, domain, gauge, blowup, nonconvergence, io };

constexpr std::string_view to_string(ErrorClass c) noexcept {
  switch (c) {
    case ErrorClass::config: return "config";
    case ErrorClass::domain: return "domain";
    case ErrorClass::gauge: return "gauge";
    case ErrorClass::blowup: return "blowup";
    case ErrorClass::nonconvergence: return "nonconvergence";
    case ErrorClass::io: return "io";
  }
  return "unknown";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorClass cls, const std::string& what)
      : std::runtime_error(what), cls_(cls) {}

  ErrorClass error_class() const noexcept { return cls_; }

 private:
  ErrorClass cls_;
};

}  // namespace mpsim
