#pragma once
#include <stdexcept>
#include <string>

namespace ctc {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

#define CTC_ERROR(Name)                      \
  struct Name : Error {                      \
    explicit Name(const std::string& what)   \
        : Error(#Name ": " + what) {}        \
  }

CTC_ERROR(DimensionMismatch);
CTC_ERROR(IndexOutOfRange);
CTC_ERROR(InvalidState);
CTC_ERROR(UnknownGate);
CTC_ERROR(UnknownBox);
CTC_ERROR(NoSolution);
CTC_ERROR(TruncationTooSmall);
CTC_ERROR(SingularCovariance);
CTC_ERROR(UnsupportedGate);
CTC_ERROR(UnknownScenario);
CTC_ERROR(InvalidConfig);

#undef CTC_ERROR

}  // namespace ctc
