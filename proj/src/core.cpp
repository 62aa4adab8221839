// SPDX-License-Identifier: Apache-2.0
#include "aad/core.hpp"

#include <sstream>

namespace aad {

void validate(const AudioClip& audio) {
  if (audio.sample_rate <= 0) {
    throw InputError("sample_rate must be > 0, got " + std::to_string(audio.sample_rate));
  }
  detail::require_finite(audio.samples, "audio");
}

AudioClip make_blank(const AudioClip& audio) {
  return AudioClip{Eigen::VectorXd::Zero(audio.samples.size()), audio.sample_rate};
}

std::string assemble_prompt(std::string_view prefix, std::string_view question) {
  if (question.empty()) {
    throw InputError("question must not be empty");
  }
  if (prefix.empty()) {
    return std::string(question);
  }
  std::string prompt;
  prompt.reserve(prefix.size() + 1 + question.size());
  prompt.append(prefix).append(" ").append(question);
  return prompt;
}

void DecodingConfig::validate() const {
  if (!std::isfinite(alpha) || alpha < 0.0) {
    throw ConfigError("alpha must be >= 0 (got " + std::to_string(alpha) + ")");
  }
  if (max_new_tokens < 1) {
    throw ConfigError("max_new_tokens must be >= 1");
  }
  if (const auto* sampled = std::get_if<Sampled>(&strategy)) {
    if (!std::isfinite(sampled->temperature) || sampled->temperature <= 0.0) {
      throw ConfigError("temperature must be > 0");
    }
  }
}

double DecodingConfig::temperature() const noexcept {
  if (const auto* sampled = std::get_if<Sampled>(&strategy)) {
    return sampled->temperature;
  }
  return 1.0;
}

std::string DecodingConfig::summary() const {
  std::ostringstream out;
  out << "alpha=" << alpha << " max_new_tokens=" << max_new_tokens;
  if (const auto* sampled = std::get_if<Sampled>(&strategy)) {
    out << " strategy=sampled(seed=" << sampled->seed << ",T=" << sampled->temperature << ")";
  } else {
    out << " strategy=greedy";
  }
  out << " prefix=\"" << prefix_prompt << "\"";
  return out.str();
}

}  // namespace aad
