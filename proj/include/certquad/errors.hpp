#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace certquad {

/// Base type for everything this library throws on purpose.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed expression source. Carries the byte offset of the offending input.
class SyntaxError : public Error {
public:
    SyntaxError(std::size_t offset, const std::string& what)
        : Error("syntax error at byte " + std::to_string(offset) + ": " + what),
          offset_(offset) {}
    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

/// Identifier that is neither the variable t nor a known function name.
class UnknownIdentifier : public Error {
public:
    UnknownIdentifier(std::size_t offset, const std::string& name)
        : Error("unknown identifier '" + name + "' at byte " + std::to_string(offset)),
          offset_(offset), name_(name) {}
    std::size_t offset() const noexcept { return offset_; }
    const std::string& name() const noexcept { return name_; }

private:
    std::size_t offset_;
    std::string name_;
};

/// Evaluation left the reals: log of a non-positive value, division by zero,
/// a fractional power of a negative base, or a non-finite intermediate.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Symbolic differentiation hit a node without a derivative (abs).
class NonDifferentiable : public Error {
public:
    using Error::Error;
};

/// A point fell outside the interval (or admissible subrange) it belongs to.
class OutOfDomain : public Error {
public:
    using Error::Error;
};

/// Interval endpoints not finite or not strictly ordered.
class InvalidInterval : public Error {
public:
    using Error::Error;
};

/// Partition nodes not strictly ascending or too few of them.
class InvalidPartition : public Error {
public:
    using Error::Error;
};

/// Subinterval count outside the supported range.
class InvalidN : public Error {
public:
    using Error::Error;
};

/// A sup-norm bound must be >= 0.
class NegativeNorm : public Error {
public:
    using Error::Error;
};

/// An explicit evaluation-point list failed validation. Carries the index of
/// the offending subinterval and the admissible range there.
class XiOutOfRange : public Error {
public:
    XiOutOfRange(std::size_t index, double lo, double hi, const std::string& what)
        : Error(what), index_(index), lo_(lo), hi_(hi) {}
    std::size_t index() const noexcept { return index_; }
    double admissible_lo() const noexcept { return lo_; }
    double admissible_hi() const noexcept { return hi_; }

private:
    std::size_t index_;
    double lo_, hi_;
};

/// The reference integrator exhausted its recursion depth.
class OracleNoConvergence : public Error {
public:
    using Error::Error;
};

/// A distribution failed its construction checks (negative density or a CDF
/// that does not run from 0 to 1).
class DistributionError : public Error {
public:
    using Error::Error;
};

}  // namespace certquad
