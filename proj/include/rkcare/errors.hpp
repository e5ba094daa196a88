#pragma once

#include <stdexcept>
#include <string>

namespace rkcare {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// problem
struct DimensionMismatch : Error { using Error::Error; };
struct SingularE : Error { using Error::Error; };
struct EmptyIndicator : Error { using Error::Error; };
struct ParseError : Error { using Error::Error; };
struct UnsupportedField : Error { using Error::Error; };

// kernels
struct NonHermitianInput : Error { using Error::Error; };
struct ReorderingFailure : Error { using Error::Error; };
struct ShiftHitsSpectrum : Error { using Error::Error; };
struct RankDeficient : Error { using Error::Error; };
struct CapExceeded : Error { using Error::Error; };

// shifts
struct InfiniteShift : Error { using Error::Error; };
struct EmptyList : Error { using Error::Error; };
struct EstimateFailure : Error { using Error::Error; };

// brad
struct RankDeficientC : Error { using Error::Error; };
struct Breakdown : Error { using Error::Error; };

// dense_care
struct NoStabilizingSolution : Error { using Error::Error; };
struct IllConditionedU1 : Error { using Error::Error; };
struct SpectrumCollision : Error { using Error::Error; };

// projector / residual
struct SingularLtK : Error { using Error::Error; };
struct SingularUW : Error { using Error::Error; };
struct ShiftsExhausted : Error { using Error::Error; };
struct AllTruncated : Error { using Error::Error; };

}  // namespace rkcare
