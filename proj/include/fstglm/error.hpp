#pragma once

#include <stdexcept>
#include <string>

namespace fstglm {

/// Failure classes surfaced by the library. The C API and the CLI map these
/// one-to-one onto status and exit codes.
enum class Errc {
  invalid_argument,
  io,
  parse,
  schema,
  numerical,
  degenerate,
};

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& what) { throw Error(code, what); }

inline void require(bool ok, const std::string& what) {
  if (!ok) fail(Errc::invalid_argument, what);
}

}  // namespace fstglm
