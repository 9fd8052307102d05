#pragma once

#include <stdexcept>
#include <string>

namespace seeksolve {

/// Base class for every error raised by this library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Dataset files, interchange documents, or table invariants are broken.
class DataError : public Error {
public:
    using Error::Error;
};

/// A header layout cannot be decomposed into a laminar tree.
class StructureError : public Error {
public:
    using Error::Error;
};

/// Task-simplification preconditions violated (e.g. empty seek result).
class SimplifyError : public Error {
public:
    using Error::Error;
};

/// Prompt slot preconditions violated.
class PromptError : public Error {
public:
    using Error::Error;
};

/// A stage response does not carry the expected output marker.
class ParseError : public Error {
public:
    using Error::Error;
};

/// Run configuration is inconsistent or incomplete.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Backend access failed.
class GatewayError : public Error {
public:
    using Error::Error;
};

/// Retryable backend failure (network, timeout, 5xx, 429).
class TransientError : public GatewayError {
public:
    using GatewayError::GatewayError;
};

/// Non-retryable backend failure (other 4xx, malformed response).
class PermanentError : public GatewayError {
public:
    using GatewayError::GatewayError;
};

/// The scripted mock has no response for the requested prompt digest.
class FixtureError : public GatewayError {
public:
    using GatewayError::GatewayError;
};

} // namespace seeksolve
