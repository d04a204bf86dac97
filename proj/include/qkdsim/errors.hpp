#pragma once

#include <stdexcept>
#include <string>

namespace qkdsim {

/// Base class for runtime failures raised by the simulation layer.
class SimulationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A matrix handed to DensityMatrix violates Hermiticity, unit trace or
/// positive semidefiniteness beyond the structural tolerance.
class InvalidDensityMatrix : public SimulationError {
public:
    using SimulationError::SimulationError;
};

/// The Kraus set does not satisfy sum_i A_i^dag A_i = I within tolerance.
class KrausNotTracePreserving : public SimulationError {
public:
    using SimulationError::SimulationError;
};

/// A measurement outcome with (numerically) zero probability was sampled.
class DegenerateOutcome : public SimulationError {
public:
    using SimulationError::SimulationError;
};

/// Adaptive quadrature exhausted its interval budget before reaching the
/// requested absolute tolerance.
class QuadratureNotConverged : public SimulationError {
public:
    using SimulationError::SimulationError;
};

/// Sifting removed every round; no key material is left to score.
class EmptySiftedKey : public SimulationError {
public:
    using SimulationError::SimulationError;
};

/// Q/G requested with zero gain.
class DivisionByZeroGain : public SimulationError {
public:
    using SimulationError::SimulationError;
};

/// Base class for configuration front-end failures.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Structurally malformed config document (bad line syntax, bad literal).
class ParseError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

/// Well-formed value that violates the range contract of its key.
class ValidationError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

/// Key not present in the documented schema.
class UnknownKey : public ConfigError {
public:
    using ConfigError::ConfigError;
};

} // namespace qkdsim
