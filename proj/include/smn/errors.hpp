#pragma once

#include <stdexcept>
#include <string>

namespace smn {

// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Argument outside the model's domain (distance below 1 m, negative SNR, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

// Bad configuration: scenario schema violations, parameter invariants.
class ConfigError : public Error {
public:
    using Error::Error;
};

// The SINR budget at a given distance is already broken by noise alone.
class DecodeInfeasible : public Error {
public:
    using Error::Error;
};

// A runtime consistency check failed (maps to CLI exit code 3).
class InvariantViolation : public Error {
public:
    using Error::Error;
};

// Zadoff-Chu construction and detection errors.
class InvalidRoot : public DomainError {
public:
    using DomainError::DomainError;
};
class InvalidLength : public DomainError {
public:
    using DomainError::DomainError;
};
class LengthMismatch : public DomainError {
public:
    using DomainError::DomainError;
};
class EmptyCodebook : public DomainError {
public:
    using DomainError::DomainError;
};

// Simulation engine errors.
class PastEvent : public Error {
public:
    using Error::Error;
};
class UnknownNode : public Error {
public:
    using Error::Error;
};
class NotAssociated : public Error {
public:
    using Error::Error;
};
class MeterFailed : public Error {
public:
    using Error::Error;
};

// Metrics errors.
class OutOfOrder : public Error {
public:
    using Error::Error;
};
class AllZero : public Error {
public:
    using Error::Error;
};

// Traffic preset lookup.
class UnknownPreset : public ConfigError {
public:
    using ConfigError::ConfigError;
};

}  // namespace smn
