#pragma once

#include <stdexcept>
#include <string>

namespace hml {

// Base class for all errors raised by this library. Subclasses exist so
// callers (notably the CLI) can map failure classes to exit codes without
// string matching.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Configuration is malformed or violates a documented precondition.
class ConfigError : public Error {
public:
    using Error::Error;
};

// Contraction ratio outside the admissible range for the requested mode.
class BadRatio : public ConfigError {
public:
    using ConfigError::ConfigError;
};

// First-generation images of the attractor are not separated by the
// required gap.
class SeparationViolation : public ConfigError {
public:
    using ConfigError::ConfigError;
};

// An enumeration would exceed the configured point budget.
class CapExceeded : public ConfigError {
public:
    using ConfigError::ConfigError;
};

// A query asked for generations deeper than the structure holds.
class DepthExceeded : public ConfigError {
public:
    using ConfigError::ConfigError;
};

// A cube does not have enough generations below it for the requested audit.
class InsufficientDepth : public ConfigError {
public:
    using ConfigError::ConfigError;
};

// A ball query found no sample mass.
class EmptyBall : public Error {
public:
    using Error::Error;
};

// A required input artifact is absent.
class MissingInput : public Error {
public:
    using Error::Error;
};

// An input artifact was produced under a different configuration.
class DigestMismatch : public MissingInput {
public:
    using MissingInput::MissingInput;
};

// Statistical preconditions for an estimate failed.
class StatError : public Error {
public:
    using Error::Error;
};

// More than the tolerated fraction of walkers hit the step limit.
class NoAbsorption : public StatError {
public:
    using StatError::StatError;
};

// A sum that must be positive vanished.
class ZeroMass : public StatError {
public:
    using StatError::StatError;
};

// The smallness condition linking the decay rate, the scale step and the
// target exponent does not hold for the requested exponent.
class ConditionFailed : public StatError {
public:
    using StatError::StatError;
};

// Not enough data points for a fit.
class InsufficientData : public StatError {
public:
    using StatError::StatError;
};

} // namespace hml
