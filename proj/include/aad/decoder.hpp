// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "aad/core.hpp"
#include "aad/provider.hpp"

namespace aad {

struct StepRecord {
  std::size_t step_index = 0;
  LogitVector with_audio_logits;
  LogitVector without_audio_logits;
  // softmax(aad_combine(with, without, alpha) / T), T = 1 for greedy runs
  ProbabilityVector aad_distribution;
  TokenId chosen_token = 0;
};

enum class StopReason { eos, max_tokens };

[[nodiscard]] std::string_view to_string(StopReason reason) noexcept;

struct GenerationResult {
  std::vector<TokenId> tokens;
  std::string text;
  std::vector<StepRecord> steps;  // empty unless config.record_steps
  StopReason stop_reason = StopReason::max_tokens;
};

struct StepOutcome {
  TokenId token = 0;
  StepRecord record;
};

/// Highest-scoring entry; the lowest id wins ties.
[[nodiscard]] TokenId greedy_token(const LogitVector& scores);

/// Categorical draw from `distribution`. The stream is a pure function of
/// (seed, step), so any step can be replayed on its own.
[[nodiscard]] TokenId sample_token(const ProbabilityVector& distribution, std::uint64_t seed,
                                   std::size_t step);

/// One AAD step: a with-audio and a blank-audio request with identical text,
/// combined and then reduced to a token.
[[nodiscard]] StepOutcome decode_step(const LogitProvider& provider, const AudioClip& audio,
                                      const AudioClip& blank, const GenerationState& state,
                                      const DecodingConfig& config);

/// Convenience overload that builds the blank clip itself.
[[nodiscard]] StepOutcome decode_step(const LogitProvider& provider, const AudioClip& audio,
                                      const GenerationState& state, const DecodingConfig& config);

/// Full autoregressive generation. Errors carry the failing step in Error::step().
[[nodiscard]] GenerationResult generate(const LogitProvider& provider, const AudioClip& audio,
                                        std::string_view prefix, std::string_view question,
                                        const DecodingConfig& config);

/// As above, with the prefix taken from config.prefix_prompt.
[[nodiscard]] GenerationResult generate(const LogitProvider& provider, const AudioClip& audio,
                                        std::string_view question, const DecodingConfig& config);

/// Joins token strings with spaces; punctuation-only tokens attach to the
/// previous token and the end-of-sequence token is dropped. Ids without a
/// known string render as "[id]".
[[nodiscard]] std::string detokenize(const ProviderDescriptor& descriptor,
                                     std::span<const TokenId> tokens);

}  // namespace aad
