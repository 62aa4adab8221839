// SPDX-License-Identifier: Apache-2.0
#pragma once

// JSON encoding of the remote logit protocol:
//   POST {endpoint}/v1/logits      LogitRequest  -> {"vocabulary_size", "logits"}
//   GET  {endpoint}/v1/descriptor                -> {"vocabulary_size", "tokens"?}
//   errors (4xx/5xx)                             -> {"error"}

#include <string>

#include <json.hpp>

#include "aad/provider.hpp"

namespace aad::wire {

inline constexpr const char* kLogitsPath = "/v1/logits";
inline constexpr const char* kDescriptorPath = "/v1/descriptor";

[[nodiscard]] nlohmann::json to_json(const LogitRequest& request);
/// Throws ProviderContractError on a schema violation, NumericInputError on
/// non-finite samples.
[[nodiscard]] LogitRequest request_from_json(const nlohmann::json& body);

[[nodiscard]] nlohmann::json logits_to_json(const LogitVector& logits);
/// Checks the declared vocabulary_size against the array length.
[[nodiscard]] LogitVector logits_from_json(const nlohmann::json& body);

[[nodiscard]] nlohmann::json descriptor_to_json(const ProviderDescriptor& descriptor);
/// Builds a remote descriptor. The end-of-sequence id is taken from an
/// optional "eos_token_id" field, else from a "<eos>"/"</s>" entry in tokens.
[[nodiscard]] ProviderDescriptor descriptor_from_json(const nlohmann::json& body,
                                                      std::string endpoint);

[[nodiscard]] nlohmann::json error_to_json(const std::string& message);

}  // namespace aad::wire
