#pragma once

#include <Eigen/Dense>

#include <functional>
#include <stdexcept>
#include <string>

namespace qline {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

using ScalarFunction = std::function<double(const Vector&)>;
using VectorFunction = std::function<Vector(const Vector&)>;
using MatrixFunction = std::function<Matrix(const Vector&)>;

/// A function evaluation produced NaN or Inf.
class NumericFailure : public std::runtime_error {
public:
  NumericFailure(const std::string& what, Vector point)
      : std::runtime_error(what), point_(std::move(point)) {}
  explicit NumericFailure(const std::string& what) : std::runtime_error(what) {}

  /// Point at which the evaluation failed (may be empty).
  const Vector& point() const { return point_; }

private:
  Vector point_;
};

class InvalidArgument : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

class NotDescentDirection : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class LineSearchFailure : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class DegenerateConstraints : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class QpFailure : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace qline
