#pragma once
#include <stdexcept>
#include <string>

namespace gmi {

enum class Err {
  // image
  MismatchedCellSizes,
  BadCellCount,
  IndexOutOfRange,
  OutOfBounds,
  AllWhite,
  DimensionMismatch,
  LengthMismatch,
  // tensornet
  ShapeMismatch,
  NonFiniteValue,
  NoCachedForward,
  TooManyParameters,
  // inpaint
  ShapeUnsupported,
  DegenerateMask,
  NoSourcePatch,
  EmptyBatch,
  // train
  EmptyCorpus,
  NonFiniteLoss,
  VersionMismatch,
  CorruptFile,
  ArchitectureMismatch,
  IoError,
  // problems
  CannotSeparate,
  BadManifest,
  MissingImageFile,
  InconsistentChoiceCount,
  // solver / eval
  UnlabeledProblem,
  EmptySet,
  TotalNotInNorms,
};

const char* err_name(Err e);

struct Error : std::runtime_error {
  Err code;
  Error(Err c, const std::string& msg);
};

[[noreturn]] void fail(Err c, const std::string& msg);

}  // namespace gmi
