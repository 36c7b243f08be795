#include "gmi/error.h"

namespace gmi {

const char* err_name(Err e) {
  switch (e) {
    case Err::MismatchedCellSizes: return "MismatchedCellSizes";
    case Err::BadCellCount: return "BadCellCount";
    case Err::IndexOutOfRange: return "IndexOutOfRange";
    case Err::OutOfBounds: return "OutOfBounds";
    case Err::AllWhite: return "AllWhite";
    case Err::DimensionMismatch: return "DimensionMismatch";
    case Err::LengthMismatch: return "LengthMismatch";
    case Err::ShapeMismatch: return "ShapeMismatch";
    case Err::NonFiniteValue: return "NonFiniteValue";
    case Err::NoCachedForward: return "NoCachedForward";
    case Err::TooManyParameters: return "TooManyParameters";
    case Err::ShapeUnsupported: return "ShapeUnsupported";
    case Err::DegenerateMask: return "DegenerateMask";
    case Err::NoSourcePatch: return "NoSourcePatch";
    case Err::EmptyBatch: return "EmptyBatch";
    case Err::EmptyCorpus: return "EmptyCorpus";
    case Err::NonFiniteLoss: return "NonFiniteLoss";
    case Err::VersionMismatch: return "VersionMismatch";
    case Err::CorruptFile: return "CorruptFile";
    case Err::ArchitectureMismatch: return "ArchitectureMismatch";
    case Err::IoError: return "IoError";
    case Err::CannotSeparate: return "CannotSeparate";
    case Err::BadManifest: return "BadManifest";
    case Err::MissingImageFile: return "MissingImageFile";
    case Err::InconsistentChoiceCount: return "InconsistentChoiceCount";
    case Err::UnlabeledProblem: return "UnlabeledProblem";
    case Err::EmptySet: return "EmptySet";
    case Err::TotalNotInNorms: return "TotalNotInNorms";
  }
  return "Unknown";
}

Error::Error(Err c, const std::string& msg)
    : std::runtime_error(std::string(err_name(c)) + ": " + msg), code(c) {}

void fail(Err c, const std::string& msg) { throw Error(c, msg); }

}  // namespace gmi
