#pragma once

#include <stdexcept>
#include <string>

namespace cgkdm {

// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define CGKDM_DECLARE_ERROR(Name)                \
  class Name : public Error {                    \
   public:                                       \
    using Error::Error;                          \
  }

// Input validation.
CGKDM_DECLARE_ERROR(InvalidInput);
CGKDM_DECLARE_ERROR(InvalidDims);
CGKDM_DECLARE_ERROR(DimMismatch);
CGKDM_DECLARE_ERROR(DimNot2);
CGKDM_DECLARE_ERROR(TiesPresent);
CGKDM_DECLARE_ERROR(BudgetExceeded);
CGKDM_DECLARE_ERROR(UnknownScenario);

// Data ingestion.
CGKDM_DECLARE_ERROR(DataError);

// Numeric failures.
CGKDM_DECLARE_ERROR(QuadratureFailure);
CGKDM_DECLARE_ERROR(NonPositiveNormalizer);
CGKDM_DECLARE_ERROR(NonPositiveMoment);
CGKDM_DECLARE_ERROR(TruncationInsufficient);
CGKDM_DECLARE_ERROR(ZeroVariance);
CGKDM_DECLARE_ERROR(DegenerateSample);
CGKDM_DECLARE_ERROR(NotPSD);
CGKDM_DECLARE_ERROR(SamplerRangeViolation);

#undef CGKDM_DECLARE_ERROR

}  // namespace cgkdm
