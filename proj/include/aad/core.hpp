// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "aad/errors.hpp"

namespace aad {

template <typename Scalar>
using VectorX = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Unnormalized next-token scores, one per vocabulary entry.
using LogitVector = VectorX<double>;
/// Normalized next-token distribution.
using ProbabilityVector = VectorX<double>;

using TokenId = std::int32_t;

/// Prefix that steers the model toward the audio content.
inline constexpr std::string_view kFocusPrompt =
    "Focus on the given audio and answer the following question";
/// Short alternative prefix used in prompt-sensitivity runs.
inline constexpr std::string_view kListenPrompt = "Listen.";

struct AudioClip {
  Eigen::VectorXd samples;
  int sample_rate = 16000;

  [[nodiscard]] Eigen::Index size() const noexcept { return samples.size(); }
  bool operator==(const AudioClip& other) const {
    return sample_rate == other.sample_rate && samples.size() == other.samples.size() &&
           (samples.array() == other.samples.array()).all();
  }
};

/// Throws InputError on sample_rate <= 0, NumericInputError on non-finite samples.
void validate(const AudioClip& audio);

/// Same length and rate as `audio`, every sample exactly zero.
[[nodiscard]] AudioClip make_blank(const AudioClip& audio);

/// `prefix + ' ' + question`, or `question` alone when the prefix is empty.
[[nodiscard]] std::string assemble_prompt(std::string_view prefix, std::string_view question);

struct Greedy {};

struct Sampled {
  std::uint64_t seed = 0;
  double temperature = 1.0;
};

using DecodingStrategy = std::variant<Greedy, Sampled>;

struct DecodingConfig {
  double alpha = 1.0;
  std::size_t max_new_tokens = 64;
  DecodingStrategy strategy = Greedy{};
  std::string prefix_prompt{kFocusPrompt};
  bool record_steps = true;
  // Issue the blank-audio request on a second thread.
  bool parallel_branches = true;

  /// Throws ConfigError if any field is out of range.
  void validate() const;
  [[nodiscard]] double temperature() const noexcept;
  /// One-line human-readable echo, used in reports.
  [[nodiscard]] std::string summary() const;
};

struct GenerationState {
  std::string prompt_text;
  std::vector<TokenId> generated_tokens;

  [[nodiscard]] std::size_t step_index() const noexcept { return generated_tokens.size(); }
};

namespace detail {

template <typename Derived>
void require_finite(const Eigen::MatrixBase<Derived>& values, const char* what) {
  if (!values.allFinite()) {
    throw NumericInputError(std::string(what) + " contains a non-finite value");
  }
}

}  // namespace detail

/// Throws unless `logits` has at least two entries, all finite.
template <typename Derived>
void validate_logits(const Eigen::MatrixBase<Derived>& logits) {
  if (logits.size() < 2) {
    throw ProviderContractError("logit vector must have at least 2 entries, got " +
                                std::to_string(logits.size()));
  }
  detail::require_finite(logits, "logit vector");
}

/// softmax(logits / temperature), evaluated as exp((x - max) / T) / sum.
template <typename Derived>
[[nodiscard]] VectorX<typename Derived::Scalar> stable_softmax(
    const Eigen::MatrixBase<Derived>& logits, typename Derived::Scalar temperature = 1) {
  using Scalar = typename Derived::Scalar;
  if (!(temperature > Scalar(0)) || !std::isfinite(temperature)) {
    throw ConfigError("temperature must be a finite value > 0");
  }
  validate_logits(logits);
  const Scalar peak = logits.maxCoeff();
  VectorX<Scalar> weights = ((logits.array() - peak) / temperature).exp().matrix();
  return weights / weights.sum();
}

/// Contrastive combination (1 + alpha) * with_audio - alpha * without_audio.
///
/// Evaluated as with + alpha * (with - without): algebraically identical, but
/// exact (bitwise) when alpha == 0 or when both vectors are equal.
template <typename DerivedWith, typename DerivedWithout>
[[nodiscard]] VectorX<typename DerivedWith::Scalar> aad_combine(
    const Eigen::MatrixBase<DerivedWith>& with_audio,
    const Eigen::MatrixBase<DerivedWithout>& without_audio,
    typename DerivedWith::Scalar alpha) {
  using Scalar = typename DerivedWith::Scalar;
  static_assert(std::is_same_v<Scalar, typename DerivedWithout::Scalar>,
                "aad_combine requires matching scalar types");
  if (!std::isfinite(alpha) || alpha < Scalar(0)) {
    throw ConfigError("alpha must be finite and >= 0");
  }
  if (with_audio.size() != without_audio.size()) {
    throw ProviderContractError("with-audio and without-audio logits differ in length (" +
                                std::to_string(with_audio.size()) + " vs " +
                                std::to_string(without_audio.size()) + ")");
  }
  detail::require_finite(with_audio, "with-audio logits");
  detail::require_finite(without_audio, "without-audio logits");
  VectorX<Scalar> combined = with_audio + alpha * (with_audio - without_audio);
  detail::require_finite(combined, "combined logits");
  return combined;
}

}  // namespace aad
