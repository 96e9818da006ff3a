#include "bgcwm/error.hpp"

namespace bgcwm {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "invalid_argument";
    case ErrorKind::Domain: return "domain";
    case ErrorKind::Factorization: return "factorization";
    case ErrorKind::Io: return "io";
    case ErrorKind::Config: return "config";
    case ErrorKind::Numerical: return "numerical";
  }
  return "unknown";
}

void throw_domain(const std::string& what) { throw Error(ErrorKind::Domain, what); }

void throw_invalid(const std::string& what) {
  throw Error(ErrorKind::InvalidArgument, what);
}

}  // namespace bgcwm
