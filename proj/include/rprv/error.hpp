#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rprv {

// Malformed or inconsistent external input (files, formula text, flags).
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public InputError {
 public:
  ParseError(const std::string& message, std::size_t position)
      : InputError(message + " at position " + std::to_string(position)),
        position_{position} {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

}  // namespace rprv
