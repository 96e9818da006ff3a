#ifndef BGCWM_ERROR_HPP
#define BGCWM_ERROR_HPP

#include <stdexcept>
#include <string>

namespace bgcwm {

enum class ErrorKind {
  InvalidArgument,
  Domain,
  Factorization,
  Io,
  Config,
  Numerical,
};

const char* to_string(ErrorKind kind);

// Every failure raised by the core library carries one of the kinds above so
// the C layer can map it onto a stable status code.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Raised when a symmetric matrix fails a Cholesky-type factorization.
class FactorizationError : public Error {
 public:
  FactorizationError(const std::string& what, double min_eigenvalue)
      : Error(ErrorKind::Factorization,
              what + " (min eigenvalue " + std::to_string(min_eigenvalue) + ")"),
        min_eigenvalue_(min_eigenvalue) {}
  double min_eigenvalue() const noexcept { return min_eigenvalue_; }

 private:
  double min_eigenvalue_;
};

[[noreturn]] void throw_domain(const std::string& what);
[[noreturn]] void throw_invalid(const std::string& what);

}  // namespace bgcwm

#endif  // BGCWM_ERROR_HPP
