#pragma once

#include <stdexcept>
#include <string>

namespace ssal {

enum class ErrorKind {
  structural,  // shape / arity / contract violations
  numeric,     // NaN, Inf, divergence
  config,      // invalid configuration or arguments
  format,      // malformed input files
  io,          // filesystem failures
  checkpoint,  // checksum or version failures on load
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool cond, ErrorKind kind, const std::string& what) {
  if (!cond) fail(kind, what);
}

}  // namespace ssal
