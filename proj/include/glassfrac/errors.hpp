#pragma once

#include <stdexcept>
#include <string>
#include <vector>

// Invalid arguments are reported with std::invalid_argument; the types below
// cover the remaining failure classes.
namespace glassfrac {

class DegenerateGeometryError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NoFrontierError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NotFoundError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& what, std::vector<std::size_t> lines)
      : std::runtime_error(what), lines_(std::move(lines)) {}

  /// 1-based line numbers that failed to parse.
  const std::vector<std::size_t>& lines() const noexcept { return lines_; }

 private:
  std::vector<std::size_t> lines_;
};

}  // namespace glassfrac
