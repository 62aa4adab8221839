// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>

namespace aad {

/// Base of every error raised by the engine. `step()` is set when the error
/// surfaced inside a generation loop.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;

  [[nodiscard]] std::optional<std::size_t> step() const noexcept { return step_; }
  void set_step(std::size_t step) noexcept { step_ = step; }

 private:
  std::optional<std::size_t> step_;
};

/// Non-finite or otherwise malformed numeric input (NaN logits, NaN samples).
class NumericInputError : public Error {
 public:
  using Error::Error;
};

/// Invalid decoding configuration (negative alpha, temperature <= 0, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// A provider broke its contract: wrong vector length, bad token id.
class ProviderContractError : public Error {
 public:
  using Error::Error;
};

/// Connection-level failure talking to a remote provider. Retryable.
class TransportError : public Error {
 public:
  using Error::Error;
};

/// The remote provider answered with a non-success status.
class RemoteError : public Error {
 public:
  RemoteError(int status, std::string server_message)
      : Error("remote provider returned HTTP " + std::to_string(status) + ": " +
              server_message),
        status_(status),
        server_message_(std::move(server_message)) {}

  [[nodiscard]] int status() const noexcept { return status_; }
  [[nodiscard]] const std::string& server_message() const noexcept {
    return server_message_;
  }

 private:
  int status_;
  std::string server_message_;
};

/// Caller-supplied data violates a precondition (empty question, odd n, ...).
class InputError : public Error {
 public:
  using Error::Error;
};

/// The toy model could not find any known object name in the prompt.
class QuestionParseError : public Error {
 public:
  using Error::Error;
};

/// An evaluation run had to be aborted.
class RunError : public Error {
 public:
  using Error::Error;
};

}  // namespace aad
