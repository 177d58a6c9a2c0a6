#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace linemap {

enum class ErrorKind {
  kSize,          // dimension mismatch
  kCapability,    // input lacks something the operation needs
  kDivergence,    // non-finite value during integration
  kConditioning,  // singular or ill-conditioned inversion
  kSignature,     // non-positive conformal bracket / degenerate line element
  kSingularity,   // U = 0 in the constant-curvature factor
  kDomain,        // non-finite function values
  kUsage,         // inconsistent arguments
  kConfig,        // CLI configuration problems
  kIo,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + " error: " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kSize: return "size";
    case ErrorKind::kCapability: return "capability";
    case ErrorKind::kDivergence: return "divergence";
    case ErrorKind::kConditioning: return "conditioning";
    case ErrorKind::kSignature: return "signature";
    case ErrorKind::kSingularity: return "singularity";
    case ErrorKind::kDomain: return "domain";
    case ErrorKind::kUsage: return "usage";
    case ErrorKind::kConfig: return "config";
    case ErrorKind::kIo: return "io";
  }
  return "unknown";
}

// Throws a size error unless `actual == expected`.
inline void require_size(long actual, long expected, std::string_view what) {
  if (actual != expected) {
    throw Error(ErrorKind::kSize, std::string(what) + ": expected " + std::to_string(expected) +
                                      ", got " + std::to_string(actual));
  }
}

}  // namespace linemap
