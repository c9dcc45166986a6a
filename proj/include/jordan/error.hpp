#ifndef JORDAN_ERROR_HPP
#define JORDAN_ERROR_HPP

#include <stdexcept>
#include <string>

namespace jordan {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Wrong argument shapes or out-of-range parameters.
class UsageError : public Error {
 public:
  using Error::Error;
};

// Operation needs structure the algebra does not have (e.g. a unit).
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

class NotInvertibleError : public Error {
 public:
  using Error::Error;
};

// Point outside the domain of a closed form or of the invertible set.
class DomainError : public Error {
 public:
  using Error::Error;
};

class InconsistencyError : public Error {
 public:
  using Error::Error;
};

class DegeneracyError : public Error {
 public:
  using Error::Error;
};

class PathError : public Error {
 public:
  using Error::Error;
};

class PreconditionError : public Error {
 public:
  using Error::Error;
};

class InputError : public Error {
 public:
  using Error::Error;
};

class ComponentError : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

class SpecError : public Error {
 public:
  using Error::Error;
};

class SamplingError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace jordan

#endif  // JORDAN_ERROR_HPP
