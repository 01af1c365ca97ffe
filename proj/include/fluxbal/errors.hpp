#ifndef FLUXBAL_ERRORS_HPP_
#define FLUXBAL_ERRORS_HPP_

#include <stdexcept>
#include <string>
#include <utility>

namespace fluxbal {

/// Base of every failure raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A state or parameter lies outside the admissible set of a model.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A caller broke a documented precondition (non-unit normal, point off face, ...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

class GeometryError : public Error {
 public:
  using Error::Error;
};

/// Iterative solve did not converge; carries the last iterate.
class SolverError : public Error {
 public:
  SolverError(const std::string& what, double last_iterate)
      : Error(what), last_iterate_(last_iterate) {}
  double last_iterate() const noexcept { return last_iterate_; }

 private:
  double last_iterate_;
};

/// Quadrature could not reach the requested tolerance.
class AccuracyError : public Error {
 public:
  AccuracyError(const std::string& what, double achieved)
      : Error(what + " (achieved error estimate " + std::to_string(achieved) + ")"),
        achieved_(achieved) {}
  double achieved() const noexcept { return achieved_; }

 private:
  double achieved_;
};

/// Configuration failed validation; `path` is the dotted key path.
class ConfigError : public Error {
 public:
  ConfigError(std::string path, const std::string& message)
      : Error(path.empty() ? message : "'" + path + "': " + message), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace fluxbal

#endif  // FLUXBAL_ERRORS_HPP_
