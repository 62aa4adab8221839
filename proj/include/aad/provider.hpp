// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "aad/core.hpp"

namespace aad {

/// One forward-pass request. The audio is blank for the audio-free branch.
struct LogitRequest {
  AudioClip audio;
  std::string prompt_text;
  std::vector<TokenId> generated_tokens;
  bool blank = false;

  bool operator==(const LogitRequest&) const = default;
};

/// Throws if the audio is invalid or `blank` is set on a non-silent clip.
void validate(const LogitRequest& request);

enum class ProviderKind { toy, remote };

struct ProviderDescriptor {
  ProviderKind kind = ProviderKind::toy;
  std::size_t vocabulary_size = 0;
  std::string endpoint;                // remote only
  std::vector<std::string> tokens;     // optional token strings, index = id
  std::optional<TokenId> eos_token;

  void validate() const;
};

/// Throws ProviderContractError if any generated token is outside the vocabulary.
void check_token_ids(const LogitRequest& request, std::size_t vocabulary_size);

/// Anything that can answer next-token logit requests.
///
/// Implementations must be deterministic (identical requests give bitwise
/// identical vectors) and safe to call from several threads at once.
class LogitProvider {
 public:
  virtual ~LogitProvider() = default;

  [[nodiscard]] virtual const ProviderDescriptor& descriptor() const noexcept = 0;
  [[nodiscard]] virtual LogitVector next_token_logits(const LogitRequest& request) const = 0;
};

}  // namespace aad
