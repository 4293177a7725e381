#pragma once

#include <stdexcept>
#include <string>

namespace vulnmap {

/// Base class for every error raised by the pipeline.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// geo
struct DegeneratePolygon final : Error { using Error::Error; };
struct EmptyInput final : Error { using Error::Error; };
struct DuplicateId final : Error { using Error::Error; };
struct KTooLarge final : Error { using Error::Error; };

// file ingestion
struct FileNotFound final : Error { using Error::Error; };
struct MalformedRow final : Error { using Error::Error; };

// street graph / routing
struct DanglingEdge final : Error { using Error::Error; };
struct NonPositiveLength final : Error { using Error::Error; };
struct EmptyGraph final : Error { using Error::Error; };
struct UnknownNode final : Error { using Error::Error; };
struct NoDonorInDepartment final : Error { using Error::Error; };

// autoencoder
struct OutOfRangeValue final : Error { using Error::Error; };
struct ShapeMismatch final : Error { using Error::Error; };
struct ProbabilityOutOfRange final : Error { using Error::Error; };
struct DivergedLoss final : Error { using Error::Error; };

// fusion statistics
struct LengthMismatch final : Error { using Error::Error; };
struct ZeroVariance final : Error { using Error::Error; };
struct ConstantColumn final : Error { using Error::Error; };
struct DomainError final : Error { using Error::Error; };
struct FitDiverged final : Error { using Error::Error; };

// configuration
struct ConfigError final : Error { using Error::Error; };

}  // namespace vulnmap
