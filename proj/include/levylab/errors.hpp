#ifndef LEVYLAB_ERRORS_HPP
#define LEVYLAB_ERRORS_HPP

#include <stdexcept>
#include <string>
#include <vector>

namespace levylab {

enum class ErrorKind {
  InvalidArgument,
  QuadratureFailure,
  ConsistencyFailure,
  PreconditionFailure,
  ResolutionTooCoarse,
  IterationFailure,
  UnsupportedMeasure,
  DriftEvaluationFailure,
  GradientAugmentationInconsistency,
  Io,
};

const char* to_string(ErrorKind kind);

/// Base class of every error raised by the library. The kind is stable and
/// is what callers (and the CLI exit-code mapping) dispatch on.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

class InvalidArgument : public Error {
 public:
  explicit InvalidArgument(const std::string& what) : Error(ErrorKind::InvalidArgument, what) {}
};

class QuadratureFailure : public Error {
 public:
  QuadratureFailure(const std::string& what, double error_estimate)
      : Error(ErrorKind::QuadratureFailure, what), error_estimate_(error_estimate) {}
  double error_estimate() const noexcept { return error_estimate_; }

 private:
  double error_estimate_;
};

class ConsistencyFailure : public Error {
 public:
  ConsistencyFailure(const std::string& what, double discrepancy)
      : Error(ErrorKind::ConsistencyFailure, what), discrepancy_(discrepancy) {}
  double discrepancy() const noexcept { return discrepancy_; }

 private:
  double discrepancy_;
};

class PreconditionFailure : public Error {
 public:
  explicit PreconditionFailure(const std::string& what) : Error(ErrorKind::PreconditionFailure, what) {}
};

class ResolutionTooCoarse : public Error {
 public:
  ResolutionTooCoarse(const std::string& what, int suggested_points, double suggested_side)
      : Error(ErrorKind::ResolutionTooCoarse, what),
        suggested_points_(suggested_points),
        suggested_side_(suggested_side) {}
  int suggested_points() const noexcept { return suggested_points_; }
  double suggested_side() const noexcept { return suggested_side_; }

 private:
  int suggested_points_;
  double suggested_side_;
};

class IterationFailure : public Error {
 public:
  IterationFailure(const std::string& what, std::vector<double> residuals)
      : Error(ErrorKind::IterationFailure, what), residuals_(std::move(residuals)) {}
  const std::vector<double>& residuals() const noexcept { return residuals_; }
  double last_residual() const noexcept { return residuals_.empty() ? 0.0 : residuals_.back(); }

 private:
  std::vector<double> residuals_;
};

class UnsupportedMeasure : public Error {
 public:
  explicit UnsupportedMeasure(const std::string& what) : Error(ErrorKind::UnsupportedMeasure, what) {}
};

class DriftEvaluationFailure : public Error {
 public:
  DriftEvaluationFailure(const std::string& what, double t, std::vector<double> x)
      : Error(ErrorKind::DriftEvaluationFailure, what), t_(t), x_(std::move(x)) {}
  double time() const noexcept { return t_; }
  const std::vector<double>& point() const noexcept { return x_; }

 private:
  double t_;
  std::vector<double> x_;
};

class GradientAugmentationInconsistency : public Error {
 public:
  GradientAugmentationInconsistency(const std::string& what, double defect)
      : Error(ErrorKind::GradientAugmentationInconsistency, what), defect_(defect) {}
  double defect() const noexcept { return defect_; }

 private:
  double defect_;
};

class IoError : public Error {
 public:
  explicit IoError(const std::string& what) : Error(ErrorKind::Io, what) {}
};

}  // namespace levylab

#endif  // LEVYLAB_ERRORS_HPP
