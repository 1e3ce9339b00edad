#ifndef HGR_ERROR_HPP
#define HGR_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace hgr {

enum class Errc {
  // distributions
  InvalidAlphabet,
  AtomCapExceeded,
  NegativeProbability,
  NotNormalized,
  DuplicateEntry,
  LabelOutOfRange,
  EmptyDataset,
  InvalidEpsilon,
  // numerics
  NonFinite,
  NotSymmetric,
  DimensionMismatch,
  // lowerbound / tightness
  InconsistentMarginals,
  DInconsistentWithQ,
  DegenerateY,
  LpFailure,
  HConstraintViolated,
  MarginalMismatch,
  NotStationary,
  EmptyClass,
  // oracle / gaussian
  ZeroVariance,
  InvalidRho,
  InvalidArgument,
  InconsistentMoments,
  // io
  ParseError,
};

std::string_view to_string(Errc code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace hgr

#endif  // HGR_ERROR_HPP
