#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fracsys {

enum class ErrorKind {
  InvalidArgument,
  AccuracyLoss,
  UnsupportedOrder,
  IllConditioned,
  SeriesDivergence,
  InvalidOrder,
  IncompatibleGrids,
  InaccurateTransform,
  Consistency,
  TruncationLimit,
  RequiresRational,
  WrongStructure,
  InvalidForcing,
  NodeCollision,
  BlowUp,
  SingularSymbol,
  Validation,
};

const char* kind_name(ErrorKind k);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

// Raised when a regime cannot reach its accuracy target; carries the estimated bound.
class AccuracyLossError : public Error {
 public:
  AccuracyLossError(const std::string& what, double bound)
      : Error(ErrorKind::AccuracyLoss, what), bound_(bound) {}
  double bound() const noexcept { return bound_; }

 private:
  double bound_;
};

class BlowUpError : public Error {
 public:
  BlowUpError(const std::string& what, std::size_t step)
      : Error(ErrorKind::BlowUp, what), step_(step) {}
  std::size_t step() const noexcept { return step_; }

 private:
  std::size_t step_;
};

class SingularSymbolError : public Error {
 public:
  SingularSymbolError(const std::string& what, double frequency)
      : Error(ErrorKind::SingularSymbol, what), frequency_(frequency) {}
  double frequency() const noexcept { return frequency_; }

 private:
  double frequency_;
};

}  // namespace fracsys
