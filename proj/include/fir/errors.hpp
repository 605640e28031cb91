#pragma once

#include <stdexcept>
#include <string>

namespace fir {

enum class Errc {
  ParseError,
  ShapeError,
  ValueError,
  IoError,
  MissingReference,
  NoTransition,
  BadBounds,
  BadShapeParams,
  BadPath,
  EmptySet,
  LengthMismatch,
  ZeroVariance,
  DegenerateAnova,
  OneSided,
  BadApex,
  BadEvent,
  BadK,
  BadSpec,
  BadIndex,
  SchemaError,
  ConfigError,
  Internal,
};

const char* errc_name(Errc c);

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& message)
      : std::runtime_error(std::string(errc_name(code)) + ": " + message), code_(code) {}

  Errc code() const { return code_; }

 private:
  Errc code_;
};

[[noreturn]] inline void fail(Errc code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace fir
