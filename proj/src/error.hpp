#pragma once

#include <stdexcept>
#include <string>

namespace abf {

// Mirrors abf_status in the public C header.
enum class Code {
  Ok = 0,
  ParseError,
  ValidationError,
  DegenerateMetric,
  SOnLightCone,
  DomainError,
  UnsupportedFamily,
  StencilOutOfDomain,
  SingularTensor,
  SingularBase,
  SingularUpdate,
  EmptyCone,
  InvalidParams,
  DegenerateFit,
  Internal,
};

inline const char* code_name(Code c) {
  switch (c) {
    case Code::Ok: return "Ok";
    case Code::ParseError: return "ParseError";
    case Code::ValidationError: return "ValidationError";
    case Code::DegenerateMetric: return "DegenerateMetric";
    case Code::SOnLightCone: return "SOnLightCone";
    case Code::DomainError: return "DomainError";
    case Code::UnsupportedFamily: return "UnsupportedFamily";
    case Code::StencilOutOfDomain: return "StencilOutOfDomain";
    case Code::SingularTensor: return "SingularTensor";
    case Code::SingularBase: return "SingularBase";
    case Code::SingularUpdate: return "SingularUpdate";
    case Code::EmptyCone: return "EmptyCone";
    case Code::InvalidParams: return "InvalidParams";
    case Code::DegenerateFit: return "DegenerateFit";
    case Code::Internal: return "Internal";
  }
  return "Unknown";
}

class Error : public std::runtime_error {
 public:
  Error(Code code, const std::string& msg) : std::runtime_error(msg), code_(code) {}
  Code code() const { return code_; }

 private:
  Code code_;
};

[[noreturn]] inline void fail(Code c, const std::string& msg) { throw Error(c, msg); }

}  // namespace abf
