#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace knnrex {

enum class Errc {
  TooFewPoints,
  SingularCovariance,
  DimensionMismatch,
  KTooLarge,
  BadIndex,
  EmptyKcs,
  SingularSigma,
  BadParams,
  EmptySample,
  InconsistentMarginals,
  StallLimit,
  EmptyData,
  DegenerateVariance,
  ZeroDensity,
  RejectionStall,
  BadSpec,
  ParseError,
};

constexpr std::string_view errc_name(Errc code) {
  switch (code) {
    case Errc::TooFewPoints: return "TooFewPoints";
    case Errc::SingularCovariance: return "SingularCovariance";
    case Errc::DimensionMismatch: return "DimensionMismatch";
    case Errc::KTooLarge: return "KTooLarge";
    case Errc::BadIndex: return "BadIndex";
    case Errc::EmptyKcs: return "EmptyKcs";
    case Errc::SingularSigma: return "SingularSigma";
    case Errc::BadParams: return "BadParams";
    case Errc::EmptySample: return "EmptySample";
    case Errc::InconsistentMarginals: return "InconsistentMarginals";
    case Errc::StallLimit: return "StallLimit";
    case Errc::EmptyData: return "EmptyData";
    case Errc::DegenerateVariance: return "DegenerateVariance";
    case Errc::ZeroDensity: return "ZeroDensity";
    case Errc::RejectionStall: return "RejectionStall";
    case Errc::BadSpec: return "BadSpec";
    case Errc::ParseError: return "ParseError";
  }
  return "Unknown";
}

//! Every failure raised by the library carries one of the codes above; the
//! message is prefixed by the code name so the CLI can print it directly.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace knnrex
