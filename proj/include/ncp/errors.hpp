#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace ncp {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class InvalidShape : public Error {
public:
    using Error::Error;
};

class ShapeMismatch : public Error {
public:
    using Error::Error;
};

// Raised by state validation. block() is the offending block index, or npos
// when the failure is global (total trace).
class InvalidState : public Error {
public:
    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

    InvalidState(const std::string& what, std::size_t block)
        : Error(what), block_(block) {}

    std::size_t block() const noexcept { return block_; }

private:
    std::size_t block_;
};

// Channel construction or verification failure; deviation() carries the
// measured violation (unitality defect, negative Choi eigenvalue, ...).
class InvalidChannel : public Error {
public:
    InvalidChannel(const std::string& what, double deviation)
        : Error(what), deviation_(deviation) {}

    double deviation() const noexcept { return deviation_; }

private:
    double deviation_;
};

class StatePreservationError : public Error {
public:
    StatePreservationError(const std::string& what, double deviation)
        : Error(what), deviation_(deviation) {}

    double deviation() const noexcept { return deviation_; }

private:
    double deviation_;
};

class ObjectMismatch : public Error {
public:
    using Error::Error;
};

class WellDefinednessError : public Error {
public:
    WellDefinednessError(const std::string& what, double deviation)
        : Error(what), deviation_(deviation) {}

    double deviation() const noexcept { return deviation_; }

private:
    double deviation_;
};

class UnsupportedKind : public Error {
public:
    using Error::Error;
};

class DomainError : public Error {
public:
    using Error::Error;
};

class ScoreNotRepresentable : public Error {
public:
    ScoreNotRepresentable(const std::string& what, std::size_t parameter, double residual)
        : Error(what), parameter_(parameter), residual_(residual) {}

    std::size_t parameter() const noexcept { return parameter_; }
    double residual() const noexcept { return residual_; }

private:
    std::size_t parameter_;
    double residual_;
};

}  // namespace ncp
