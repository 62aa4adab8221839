// SPDX-License-Identifier: Apache-2.0
#include "aad/decoder.hpp"

#include <algorithm>
#include <cctype>
#include <future>
#include <random>

namespace aad {

std::string_view to_string(StopReason reason) noexcept {
  return reason == StopReason::eos ? "eos" : "max_tokens";
}

TokenId greedy_token(const LogitVector& scores) {
  if (scores.size() == 0) {
    throw ProviderContractError("cannot select a token from an empty vector");
  }
  Eigen::Index best = 0;
  for (Eigen::Index i = 1; i < scores.size(); ++i) {
    if (scores[i] > scores[best]) {
      best = i;
    }
  }
  return static_cast<TokenId>(best);
}

TokenId sample_token(const ProbabilityVector& distribution, std::uint64_t seed, std::size_t step) {
  if (distribution.size() == 0) {
    throw ProviderContractError("cannot sample from an empty distribution");
  }
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(step), static_cast<std::uint32_t>(step >> 32)};
  std::mt19937_64 engine(seq);
  // 53 random bits -> uniform in [0, 1); avoids implementation-defined distributions.
  const double u = static_cast<double>(engine() >> 11) * 0x1.0p-53;
  double cumulative = 0.0;
  Eigen::Index last_positive = 0;
  for (Eigen::Index i = 0; i < distribution.size(); ++i) {
    if (distribution[i] <= 0.0) {
      continue;
    }
    last_positive = i;
    cumulative += distribution[i];
    if (u < cumulative) {
      return static_cast<TokenId>(i);
    }
  }
  return static_cast<TokenId>(last_positive);
}

namespace {

LogitVector fetch_checked(const LogitProvider& provider, const LogitRequest& request) {
  LogitVector logits = provider.next_token_logits(request);
  const auto expected = provider.descriptor().vocabulary_size;
  if (static_cast<std::size_t>(logits.size()) != expected) {
    throw ProviderContractError("provider returned " + std::to_string(logits.size()) +
                                " logits for a vocabulary of " + std::to_string(expected));
  }
  validate_logits(logits);
  return logits;
}

}  // namespace

StepOutcome decode_step(const LogitProvider& provider, const AudioClip& audio,
                        const AudioClip& blank, const GenerationState& state,
                        const DecodingConfig& config) {
  const LogitRequest with_request{audio, state.prompt_text, state.generated_tokens, false};
  const LogitRequest blank_request{blank, state.prompt_text, state.generated_tokens, true};

  LogitVector with_audio;
  LogitVector without_audio;
  if (config.parallel_branches) {
    auto pending = std::async(std::launch::async,
                              [&] { return fetch_checked(provider, blank_request); });
    try {
      with_audio = fetch_checked(provider, with_request);
    } catch (...) {
      pending.wait();
      throw;
    }
    without_audio = pending.get();
  } else {
    with_audio = fetch_checked(provider, with_request);
    without_audio = fetch_checked(provider, blank_request);
  }

  const LogitVector combined = aad_combine(with_audio, without_audio, config.alpha);
  StepOutcome outcome;
  outcome.record.aad_distribution = stable_softmax(combined, config.temperature());
  if (const auto* sampled = std::get_if<Sampled>(&config.strategy)) {
    outcome.token = sample_token(outcome.record.aad_distribution, sampled->seed, state.step_index());
  } else {
    outcome.token = greedy_token(combined);
  }
  outcome.record.step_index = state.step_index();
  outcome.record.with_audio_logits = std::move(with_audio);
  outcome.record.without_audio_logits = std::move(without_audio);
  outcome.record.chosen_token = outcome.token;
  return outcome;
}

StepOutcome decode_step(const LogitProvider& provider, const AudioClip& audio,
                        const GenerationState& state, const DecodingConfig& config) {
  return decode_step(provider, audio, make_blank(audio), state, config);
}

GenerationResult generate(const LogitProvider& provider, const AudioClip& audio,
                          std::string_view prefix, std::string_view question,
                          const DecodingConfig& config) {
  config.validate();
  validate(audio);
  const ProviderDescriptor& descriptor = provider.descriptor();

  GenerationState state{assemble_prompt(prefix, question), {}};
  const AudioClip blank = make_blank(audio);
  GenerationResult result;
  while (state.generated_tokens.size() < config.max_new_tokens) {
    StepOutcome outcome;
    try {
      outcome = decode_step(provider, audio, blank, state, config);
    } catch (Error& e) {
      e.set_step(state.step_index());
      throw;
    }
    state.generated_tokens.push_back(outcome.token);
    if (config.record_steps) {
      result.steps.push_back(std::move(outcome.record));
    }
    if (descriptor.eos_token && outcome.token == *descriptor.eos_token) {
      result.stop_reason = StopReason::eos;
      break;
    }
  }
  if (result.stop_reason != StopReason::eos) {
    result.stop_reason = StopReason::max_tokens;
  }
  result.tokens = std::move(state.generated_tokens);
  result.text = detokenize(descriptor, result.tokens);
  return result;
}

GenerationResult generate(const LogitProvider& provider, const AudioClip& audio,
                          std::string_view question, const DecodingConfig& config) {
  return generate(provider, audio, config.prefix_prompt, question, config);
}

std::string detokenize(const ProviderDescriptor& descriptor, std::span<const TokenId> tokens) {
  std::string text;
  for (const TokenId id : tokens) {
    if (descriptor.eos_token && id == *descriptor.eos_token) {
      continue;
    }
    const bool known = id >= 0 && static_cast<std::size_t>(id) < descriptor.tokens.size();
    const std::string piece =
        known ? descriptor.tokens[static_cast<std::size_t>(id)] : "[" + std::to_string(id) + "]";
    const bool punctuation =
        !piece.empty() && std::all_of(piece.begin(), piece.end(), [](unsigned char c) {
          return std::ispunct(c) != 0;
        });
    if (!text.empty() && !punctuation) {
      text += ' ';
    }
    text += piece;
  }
  return text;
}

}  // namespace aad
