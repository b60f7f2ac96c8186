#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace windroute {

/// Failure classes. The CLI maps each class to its own exit code.
enum class ErrorKind { Input, Config, Parse, Numerical, Simulation };

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// Invalid argument to a pure function (coincident points, out-of-range field).
class InputError : public Error {
public:
    explicit InputError(const std::string& what) : Error(ErrorKind::Input, what) {}
};

class ConfigError : public Error {
public:
    explicit ConfigError(const std::string& what) : Error(ErrorKind::Config, what) {}
};

/// Lexical or structural parse failure. `line` is 1-based (0 when not
/// applicable); `offset` is the byte offset into the parsed text.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line, std::size_t offset)
        : Error(ErrorKind::Parse, what), line_(line), offset_(offset) {}
    std::size_t line() const noexcept { return line_; }
    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t line_;
    std::size_t offset_;
};

/// Lexically valid FB group whose code falls in a reserved range.
class FormatError : public ParseError {
public:
    using ParseError::ParseError;
};

class NumericalError : public Error {
public:
    explicit NumericalError(const std::string& what) : Error(ErrorKind::Numerical, what) {}
};

class IllConditionedError : public NumericalError {
public:
    IllConditionedError(const std::string& what, std::size_t site_a, std::size_t site_b)
        : NumericalError(what), site_a_(site_a), site_b_(site_b) {}
    std::size_t site_a() const noexcept { return site_a_; }
    std::size_t site_b() const noexcept { return site_b_; }

private:
    std::size_t site_a_;
    std::size_t site_b_;
};

class ConvergenceError : public NumericalError {
public:
    ConvergenceError(const std::string& what, double gradient_norm)
        : NumericalError(what), gradient_norm_(gradient_norm) {}
    double gradient_norm() const noexcept { return gradient_norm_; }

private:
    double gradient_norm_;
};

class SaddlePointError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Crosswind component at or above airspeed: the track cannot be held.
class InfeasibleTrackError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class SimulationError : public Error {
public:
    explicit SimulationError(const std::string& what) : Error(ErrorKind::Simulation, what) {}
};

class NoFeasibleTrajectoryError : public SimulationError {
public:
    using SimulationError::SimulationError;
};

class SimulationStuckError : public SimulationError {
public:
    using SimulationError::SimulationError;
};

class SimulationTimeoutError : public SimulationError {
public:
    using SimulationError::SimulationError;
};

} // namespace windroute
