#pragma once

#include <stdexcept>
#include <string>

namespace arda {

/// Base class for all errors raised by the engine.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Transient failure (network, rate limit); callers may retry.
class RetryableError : public Error {
public:
    explicit RetryableError(const std::string& what) : Error(what) {}
};

/// Malformed schema/plan/fixture document; message carries the location.
class ParseError : public Error {
public:
    explicit ParseError(const std::string& what) : Error(what) {}
};

/// Fixture content does not match its recorded checksum.
class ChecksumError : public Error {
public:
    explicit ChecksumError(const std::string& what) : Error(what) {}
};

}  // namespace arda
