#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace polforge {

/// Base class for all polforge errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration value (bad dimensions, nonpositive rates, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Vector length or architecture mismatch.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Out-of-range row or record reference.
class ReferenceError : public Error {
 public:
  using Error::Error;
};

/// Malformed proof bytes; carries the offending byte offset when known.
class FormatError : public Error {
 public:
  explicit FormatError(const std::string& msg) : Error(msg), offset_(0) {}
  FormatError(const std::string& msg, std::size_t offset)
      : Error(msg + " (byte offset " + std::to_string(offset) + ")"), offset_(offset) {}
  std::size_t offset() const { return offset_; }

 private:
  std::size_t offset_;
};

/// A recomputed batch hash does not match the committed digest.
class CommitmentError : public Error {
 public:
  CommitmentError(const std::string& msg, std::int64_t step)
      : Error(msg + " at step " + std::to_string(step)), step_(step) {}
  std::int64_t step() const { return step_; }

 private:
  std::int64_t step_;
};

/// The data provider cannot supply a committed row.
class AvailabilityError : public Error {
 public:
  using Error::Error;
};

/// Append-only ledger misuse (e.g. clock regression).
class LedgerError : public Error {
 public:
  using Error::Error;
};

/// Argument outside a calculator's domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Attack construction failed its own postcondition.
class AttackError : public Error {
 public:
  using Error::Error;
};

/// Proof structure invariant violated.
class ProofError : public Error {
 public:
  using Error::Error;
};

}  // namespace polforge
