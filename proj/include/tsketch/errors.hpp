#pragma once

#include <stdexcept>
#include <string>

namespace tsketch {

// Every error the library raises derives from Error so callers (and the CLI)
// can map families of failures onto exit codes.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Invalid parameters: ranges, independence degrees, inconsistent flags.
class ConfigError : public Error {
public:
  using Error::Error;
};

/// A configuration whose worst-case counter magnitudes would not fit 128 bits.
class OverflowError : public Error {
public:
  using Error::Error;
};

/// A caller broke an operation precondition (batch too large, odd moment order, ...).
class ContractError : public Error {
public:
  using Error::Error;
};

/// Update outside the admissible universe or count range.
class InputError : public Error {
public:
  using Error::Error;
};

/// Attempt to combine structures built from different randomness or parameters.
class MergeError : public Error {
public:
  using Error::Error;
};

/// Operation not defined for the sketch's stream model (difference of strict sketches).
class ModelError : public Error {
public:
  using Error::Error;
};

/// Recovery failed even after falling back to sparser levels.
class ExtractionError : public Error {
public:
  using Error::Error;
};

/// A statistic could not be computed (empty sample, failed coordinated recovery).
class EstimationError : public Error {
public:
  using Error::Error;
};

/// Malformed or corrupted serialized container.
class FormatError : public Error {
public:
  using Error::Error;
};

} // namespace tsketch
