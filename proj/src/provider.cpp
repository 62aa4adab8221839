// SPDX-License-Identifier: Apache-2.0
#include "aad/provider.hpp"

#include "aad/wire.hpp"

namespace aad {

void validate(const LogitRequest& request) {
  validate(request.audio);
  if (request.blank && (request.audio.samples.array() != 0.0).any()) {
    throw ProviderContractError("blank request carries non-zero audio samples");
  }
}

void ProviderDescriptor::validate() const {
  if (vocabulary_size < 2) {
    throw ProviderContractError("vocabulary_size must be >= 2, got " +
                                std::to_string(vocabulary_size));
  }
  if (!tokens.empty() && tokens.size() != vocabulary_size) {
    throw ProviderContractError("descriptor lists " + std::to_string(tokens.size()) +
                                " tokens for a vocabulary of " +
                                std::to_string(vocabulary_size));
  }
  if (eos_token && (*eos_token < 0 || static_cast<std::size_t>(*eos_token) >= vocabulary_size)) {
    throw ProviderContractError("eos token id out of range");
  }
}

void check_token_ids(const LogitRequest& request, std::size_t vocabulary_size) {
  for (const TokenId id : request.generated_tokens) {
    if (id < 0 || static_cast<std::size_t>(id) >= vocabulary_size) {
      throw ProviderContractError("unknown token id " + std::to_string(id) +
                                  " (vocabulary_size " + std::to_string(vocabulary_size) + ")");
    }
  }
}

namespace wire {

using nlohmann::json;

namespace {

template <typename T>
T field(const json& body, const char* key) {
  if (!body.is_object() || !body.contains(key)) {
    throw ProviderContractError(std::string("missing field \"") + key + "\"");
  }
  try {
    return body.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ProviderContractError(std::string("bad field \"") + key + "\": " + e.what());
  }
}

}  // namespace

json to_json(const LogitRequest& request) {
  const auto& samples = request.audio.samples;
  return json{
      {"prompt_text", request.prompt_text},
      {"generated_tokens", request.generated_tokens},
      {"audio",
       {{"sample_rate", request.audio.sample_rate},
        {"samples", std::vector<double>(samples.data(), samples.data() + samples.size())}}},
      {"blank", request.blank},
  };
}

LogitRequest request_from_json(const json& body) {
  LogitRequest request;
  request.prompt_text = field<std::string>(body, "prompt_text");
  request.generated_tokens = field<std::vector<TokenId>>(body, "generated_tokens");
  request.blank = field<bool>(body, "blank");
  const json audio = field<json>(body, "audio");
  request.audio.sample_rate = field<int>(audio, "sample_rate");
  // null (NaN/inf serialize as null) fails the double conversion.
  const auto samples = field<std::vector<double>>(audio, "samples");
  request.audio.samples = Eigen::Map<const Eigen::VectorXd>(samples.data(),
                                                            static_cast<Eigen::Index>(samples.size()));
  validate(request);
  return request;
}

json logits_to_json(const LogitVector& logits) {
  return json{{"vocabulary_size", logits.size()},
              {"logits", std::vector<double>(logits.data(), logits.data() + logits.size())}};
}

LogitVector logits_from_json(const json& body) {
  const auto declared = field<std::size_t>(body, "vocabulary_size");
  const auto values = field<std::vector<double>>(body, "logits");
  if (values.size() != declared) {
    throw ProviderContractError("response declares vocabulary_size " + std::to_string(declared) +
                                " but carries " + std::to_string(values.size()) + " logits");
  }
  LogitVector logits =
      Eigen::Map<const LogitVector>(values.data(), static_cast<Eigen::Index>(values.size()));
  validate_logits(logits);
  return logits;
}

json descriptor_to_json(const ProviderDescriptor& descriptor) {
  json body{{"vocabulary_size", descriptor.vocabulary_size}};
  if (!descriptor.tokens.empty()) {
    body["tokens"] = descriptor.tokens;
  }
  if (descriptor.eos_token) {
    body["eos_token_id"] = *descriptor.eos_token;
  }
  return body;
}

ProviderDescriptor descriptor_from_json(const json& body, std::string endpoint) {
  ProviderDescriptor descriptor;
  descriptor.kind = ProviderKind::remote;
  descriptor.endpoint = std::move(endpoint);
  descriptor.vocabulary_size = field<std::size_t>(body, "vocabulary_size");
  if (body.contains("tokens")) {
    descriptor.tokens = field<std::vector<std::string>>(body, "tokens");
  }
  if (body.contains("eos_token_id")) {
    descriptor.eos_token = field<TokenId>(body, "eos_token_id");
  } else {
    for (std::size_t i = 0; i < descriptor.tokens.size(); ++i) {
      if (descriptor.tokens[i] == "<eos>" || descriptor.tokens[i] == "</s>") {
        descriptor.eos_token = static_cast<TokenId>(i);
        break;
      }
    }
  }
  descriptor.validate();
  return descriptor;
}

json error_to_json(const std::string& message) { return json{{"error", message}}; }

}  // namespace wire
}  // namespace aad
