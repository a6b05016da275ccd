#pragma once

#include <stdexcept>
#include <string>

namespace ductmc {

// Runtime error carrying a stable machine-readable code next to the message.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}

  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

}  // namespace ductmc
