#include "fir/errors.hpp"

namespace fir {

const char* errc_name(Errc c) {
  switch (c) {
    case Errc::ParseError: return "ParseError";
    case Errc::ShapeError: return "ShapeError";
    case Errc::ValueError: return "ValueError";
    case Errc::IoError: return "IoError";
    case Errc::MissingReference: return "MissingReference";
    case Errc::NoTransition: return "NoTransition";
    case Errc::BadBounds: return "BadBounds";
    case Errc::BadShapeParams: return "BadShapeParams";
    case Errc::BadPath: return "BadPath";
    case Errc::EmptySet: return "EmptySet";
    case Errc::LengthMismatch: return "LengthMismatch";
    case Errc::ZeroVariance: return "ZeroVariance";
    case Errc::DegenerateAnova: return "DegenerateAnova";
    case Errc::OneSided: return "OneSided";
    case Errc::BadApex: return "BadApex";
    case Errc::BadEvent: return "BadEvent";
    case Errc::BadK: return "BadK";
    case Errc::BadSpec: return "BadSpec";
    case Errc::BadIndex: return "BadIndex";
    case Errc::SchemaError: return "SchemaError";
    case Errc::ConfigError: return "ConfigError";
    case Errc::Internal: return "Internal";
  }
  return "Error";
}

}  // namespace fir
