#pragma once

#include <stdexcept>
#include <string>

namespace spine {

enum class ErrorKind {
  Format,                 // malformed input file
  UnsupportedFormat,      // valid file, unsupported flavor
  Shape,                  // dimension / tensor shape mismatch
  Size,                   // input too small for the operation
  Domain,                 // argument outside the mathematical domain
  Degenerate,             // collinear / zero-area geometry
  AmbiguousOrdering,      // vertebra ordering not decidable
  EmptySpine,             // no regions survive filtering
  InsufficientVertebrae,  // fewer vertebrae than the pair search needs
  EmptyBoundary,          // mask has no boundary pixels
  InfeasibleSpec,         // synthetic spec cannot be placed on the canvas
  Io,                     // file system failure
};

const char* to_string(ErrorKind kind);

class SpineError : public std::runtime_error {
 public:
  SpineError(ErrorKind kind, const std::string& msg)
      : std::runtime_error(msg), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void raise(ErrorKind kind, const std::string& msg) {
  throw SpineError(kind, msg);
}

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::Format: return "format";
    case ErrorKind::UnsupportedFormat: return "unsupported-format";
    case ErrorKind::Shape: return "shape";
    case ErrorKind::Size: return "size";
    case ErrorKind::Domain: return "domain";
    case ErrorKind::Degenerate: return "degenerate";
    case ErrorKind::AmbiguousOrdering: return "ambiguous-ordering";
    case ErrorKind::EmptySpine: return "empty-spine";
    case ErrorKind::InsufficientVertebrae: return "insufficient-vertebrae";
    case ErrorKind::EmptyBoundary: return "empty-boundary";
    case ErrorKind::InfeasibleSpec: return "infeasible-spec";
    case ErrorKind::Io: return "io";
  }
  return "unknown";
}

}  // namespace spine
