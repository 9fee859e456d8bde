#pragma once

#include <stdexcept>
#include <string>

namespace rose {

enum class ErrorCode {
  Syntax,
  UndefinedSymbol,
  BadAction,
  DuplicateStart,
  NonproductiveSymbol,
  UnknownToken,
  SpecViolation,
  InvalidSpec,
  EmptyCorpus,
  InvalidArgument,
  Io,
};

const char* to_string(ErrorCode code) noexcept;

// Every failure raised by the library carries one of the codes above so that
// callers (and the Python layer) can branch on the kind without string matching.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace rose
