#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace entproj {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// dataset

class FileNotFound : public Error {
 public:
  explicit FileNotFound(const std::string& path)
      : Error("file not found: " + path), path_(path) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

/// Rows with missing cells, wrong field counts or unparseable designated
/// columns. `rows()` lists every offending data row (0-based, header excluded).
class MalformedCsv : public Error {
 public:
  MalformedCsv(std::vector<std::size_t> rows, std::string column, const std::string& what)
      : Error(what), rows_(std::move(rows)), column_(std::move(column)) {}
  const std::vector<std::size_t>& rows() const noexcept { return rows_; }
  const std::string& column() const noexcept { return column_; }

 private:
  std::vector<std::size_t> rows_;
  std::string column_;
};

/// A feature column holds text that is not a finite number.
class NonNumericFeature : public Error {
 public:
  NonNumericFeature(std::string column, std::vector<std::size_t> rows, const std::string& what)
      : Error(what), column_(std::move(column)), rows_(std::move(rows)) {}
  const std::string& column() const noexcept { return column_; }
  const std::vector<std::size_t>& rows() const noexcept { return rows_; }

 private:
  std::string column_;
  std::vector<std::size_t> rows_;
};

class LabelOutOfRange : public Error {
 public:
  using Error::Error;
};

class TooFewRows : public Error {
 public:
  using Error::Error;
};

class InvalidTestSet : public Error {
 public:
  using Error::Error;
};

class IndexOutOfRange : public Error {
 public:
  using Error::Error;
};

class RhoOutOfRange : public Error {
 public:
  using Error::Error;
};

// projection

class NonFiniteInput : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class InfeasibleTarget : public Error {
 public:
  using Error::Error;
};

class DidNotConverge : public Error {
 public:
  DidNotConverge(int iterations, double residual, const std::string& what)
      : Error(what), iterations_(iterations), residual_(residual) {}
  int iterations() const noexcept { return iterations_; }
  double residual() const noexcept { return residual_; }

 private:
  int iterations_;
  double residual_;
};

/// The constraint map has an affinely degenerate direction: some linear
/// combination `combination()` of the coordinates is constant over the data.
class SingularHessian : public Error {
 public:
  SingularHessian(std::vector<double> combination, const std::string& what)
      : Error(what), combination_(std::move(combination)) {}
  const std::vector<double>& combination() const noexcept { return combination_; }

 private:
  std::vector<double> combination_;
};

class NotConverged : public Error {
 public:
  using Error::Error;
};

class SameVariable : public Error {
 public:
  using Error::Error;
};

// stress

class TauOutOfRange : public Error {
 public:
  using Error::Error;
};

class AlphaOutOfRange : public Error {
 public:
  using Error::Error;
};

class DegenerateColumn : public Error {
 public:
  using Error::Error;
};

class InadmissibleTarget : public Error {
 public:
  InadmissibleTarget(std::size_t variable, double tau, double target, double min, double max);
  std::size_t variable() const noexcept { return variable_; }
  double tau() const noexcept { return tau_; }
  double target() const noexcept { return target_; }
  double min() const noexcept { return min_; }
  double max() const noexcept { return max_; }

 private:
  std::size_t variable_;
  double tau_, target_, min_, max_;
};

// indicators

class TaskMismatch : public Error {
 public:
  using Error::Error;
};

class UnknownClass : public Error {
 public:
  using Error::Error;
};

class EmptyClassMass : public Error {
 public:
  using Error::Error;
};

// sweep

class InvalidConfig : public Error {
 public:
  using Error::Error;
};

class TauNotOnGrid : public Error {
 public:
  using Error::Error;
};

class IndicatorAbsent : public Error {
 public:
  using Error::Error;
};

// harness

class InvalidSpec : public Error {
 public:
  using Error::Error;
};

}  // namespace entproj
