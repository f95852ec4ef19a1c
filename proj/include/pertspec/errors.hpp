#pragma once

#include <stdexcept>
#include <string>

namespace pertspec {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

/// Raised when elimination meets a pivot below the singularity threshold.
class SingularityError : public Error {
public:
    SingularityError(const std::string& what, double smallest_pivot)
        : Error(what + " (smallest pivot magnitude " + std::to_string(smallest_pivot) + ")"),
          smallest_pivot_(smallest_pivot) {}
    double smallest_pivot() const { return smallest_pivot_; }

private:
    double smallest_pivot_;
};

class UnsupportedKindError : public Error {
public:
    using Error::Error;
};

class NotARootError : public Error {
public:
    using Error::Error;
};

class ResolventUndefinedError : public Error {
public:
    using Error::Error;
};

class BoundaryDegeneracyError : public Error {
public:
    using Error::Error;
};

class QuadratureFailureError : public Error {
public:
    using Error::Error;
};

class DivergenceError : public Error {
public:
    using Error::Error;
};

class ClusterError : public Error {
public:
    using Error::Error;
};

class ConvergenceError : public Error {
public:
    using Error::Error;
};

/// The finite-difference oracle cannot represent the requested problem.
class InapplicableError : public Error {
public:
    using Error::Error;
};

/// Schema violation in a job configuration; `path()` names the offending entry.
class ParseError : public Error {
public:
    ParseError(const std::string& path, const std::string& what)
        : Error(path + ": " + what), path_(path) {}
    const std::string& path() const { return path_; }

private:
    std::string path_;
};

class ValidationError : public Error {
public:
    using Error::Error;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace pertspec
