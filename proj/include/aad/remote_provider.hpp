// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <chrono>
#include <string>

#include "aad/provider.hpp"

namespace aad {

struct RemoteOptions {
  std::chrono::milliseconds timeout{30000};
  // Retries apply to transport failures and 503 only; backoff doubles each time.
  int max_retries = 2;
  std::chrono::milliseconds initial_backoff{100};
};

/// One POST /v1/logits round trip (with retries). Returns the served logits
/// verbatim after checking them against the response's own vocabulary_size.
[[nodiscard]] LogitVector remote_logits(const std::string& endpoint, const LogitRequest& request,
                                        const RemoteOptions& options = {});

/// GET /v1/descriptor.
[[nodiscard]] ProviderDescriptor fetch_descriptor(const std::string& endpoint,
                                                  const RemoteOptions& options = {});

class RemoteProvider final : public LogitProvider {
 public:
  RemoteProvider(ProviderDescriptor descriptor, RemoteOptions options = {});

  /// Fetches the descriptor from `endpoint` and builds a provider around it.
  [[nodiscard]] static RemoteProvider connect(const std::string& endpoint,
                                              RemoteOptions options = {});

  [[nodiscard]] const ProviderDescriptor& descriptor() const noexcept override {
    return descriptor_;
  }
  [[nodiscard]] LogitVector next_token_logits(const LogitRequest& request) const override;

 private:
  ProviderDescriptor descriptor_;
  RemoteOptions options_;
};

}  // namespace aad
