#pragma once

#include <stdexcept>
#include <string>

namespace terracost {

/// Base class for all terracost errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

class InvalidArgError : public Error {
public:
    explicit InvalidArgError(const std::string& msg) : Error(msg) {}
};

class OutOfBoundsError : public Error {
public:
    explicit OutOfBoundsError(const std::string& msg) : Error(msg) {}
};

class NonTraversableError : public Error {
public:
    explicit NonTraversableError(const std::string& msg) : Error(msg) {}
};

/// Malformed or truncated file content (bad magic, version, lengths).
class FormatError : public Error {
public:
    explicit FormatError(const std::string& msg) : Error(msg) {}
};

/// Underlying I/O failure (open, read, write).
class IoError : public Error {
public:
    explicit IoError(const std::string& msg) : Error(msg) {}
};

class ShapeMismatchError : public Error {
public:
    explicit ShapeMismatchError(const std::string& msg) : Error(msg) {}
};

class DegeneratePathError : public Error {
public:
    explicit DegeneratePathError(const std::string& msg) : Error(msg) {}
};

class EmptyDatasetError : public Error {
public:
    explicit EmptyDatasetError(const std::string& msg) : Error(msg) {}
};

class EmptyWindowError : public Error {
public:
    explicit EmptyWindowError(const std::string& msg) : Error(msg) {}
};

class DivergenceError : public Error {
public:
    explicit DivergenceError(const std::string& msg) : Error(msg) {}
};

class EmptyPathError : public Error {
public:
    explicit EmptyPathError(const std::string& msg) : Error(msg) {}
};

class ResolutionMismatchError : public Error {
public:
    explicit ResolutionMismatchError(const std::string& msg) : Error(msg) {}
};

class UnreachableError : public Error {
public:
    explicit UnreachableError(const std::string& msg) : Error(msg) {}
};

class ZeroTruthError : public Error {
public:
    explicit ZeroTruthError(const std::string& msg) : Error(msg) {}
};

}  // namespace terracost
