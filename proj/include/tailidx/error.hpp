#ifndef TAILIDX_ERROR_HPP
#define TAILIDX_ERROR_HPP

#include <stdexcept>
#include <string>

namespace tailidx {

enum class ErrorKind {
  domain,      // argument outside an operation's precondition
  tie,         // tie with the threshold where ln^u(1) is undefined
  degenerate,  // sample or model makes the quantity undefined
  parse,       // malformed input data or configuration
};

const char* to_string(ErrorKind kind);

// All library failures are reported through this type. `step` is filled in
// by multi-stage pipelines (adaptive estimation, simulation cells) so the
// caller can tell which stage rejected the input.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what, std::string step = {})
      : std::runtime_error(what), kind_(kind), step_(std::move(step)) {}

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& step() const noexcept { return step_; }

  Error with_step(std::string step) const { return Error(kind_, what(), std::move(step)); }

 private:
  ErrorKind kind_;
  std::string step_;
};

[[noreturn]] inline void throw_domain(const std::string& what) {
  throw Error(ErrorKind::domain, what);
}
[[noreturn]] inline void throw_degenerate(const std::string& what) {
  throw Error(ErrorKind::degenerate, what);
}

}  // namespace tailidx

#endif  // TAILIDX_ERROR_HPP
