// SPDX-License-Identifier: Apache-2.0
#include "aad/remote_provider.hpp"

#include <thread>

#include <httplib.h>

#include "aad/wire.hpp"

namespace aad {

namespace {

struct Endpoint {
  std::string origin;     // scheme://host[:port]
  std::string base_path;  // "" or "/prefix" without trailing slash
};

Endpoint split_endpoint(const std::string& endpoint) {
  const auto scheme_end = endpoint.find("://");
  if (scheme_end == std::string::npos || endpoint.compare(0, scheme_end, "http") != 0) {
    throw InputError("endpoint must be an http:// URL, got \"" + endpoint + "\"");
  }
  const auto path_start = endpoint.find('/', scheme_end + 3);
  Endpoint parts{endpoint.substr(0, path_start), ""};
  if (path_start != std::string::npos) {
    parts.base_path = endpoint.substr(path_start);
    while (!parts.base_path.empty() && parts.base_path.back() == '/') {
      parts.base_path.pop_back();
    }
  }
  return parts;
}

std::string server_message(const httplib::Result& result) {
  try {
    const auto body = nlohmann::json::parse(result->body);
    if (body.is_object() && body.contains("error") && body["error"].is_string()) {
      return body["error"].get<std::string>();
    }
  } catch (const nlohmann::json::exception&) {
  }
  return result->body;
}

template <typename Call>
nlohmann::json with_retries(const std::string& endpoint, const RemoteOptions& options,
                            Call&& call) {
  const Endpoint parts = split_endpoint(endpoint);
  auto backoff = options.initial_backoff;
  for (int attempt = 0;; ++attempt) {
    const bool may_retry = attempt < options.max_retries;
    httplib::Client client(parts.origin);
    const auto seconds = std::chrono::duration_cast<std::chrono::seconds>(options.timeout);
    const auto micros =
        std::chrono::duration_cast<std::chrono::microseconds>(options.timeout - seconds);
    client.set_connection_timeout(seconds.count(), micros.count());
    client.set_read_timeout(seconds.count(), micros.count());
    client.set_write_timeout(seconds.count(), micros.count());

    httplib::Result result = call(client, parts.base_path);
    if (!result) {
      if (may_retry) {
        std::this_thread::sleep_for(backoff);
        backoff *= 2;
        continue;
      }
      throw TransportError("request to " + endpoint + " failed: " +
                           httplib::to_string(result.error()));
    }
    if (result->status == 503 && may_retry) {
      std::this_thread::sleep_for(backoff);
      backoff *= 2;
      continue;
    }
    if (result->status != 200) {
      throw RemoteError(result->status, server_message(result));
    }
    try {
      return nlohmann::json::parse(result->body);
    } catch (const nlohmann::json::exception& e) {
      throw ProviderContractError(std::string("malformed JSON from provider: ") + e.what());
    }
  }
}

}  // namespace

LogitVector remote_logits(const std::string& endpoint, const LogitRequest& request,
                          const RemoteOptions& options) {
  const std::string body = wire::to_json(request).dump();
  const auto response = with_retries(endpoint, options, [&](httplib::Client& client,
                                                            const std::string& base) {
    return client.Post(base + wire::kLogitsPath, body, "application/json");
  });
  return wire::logits_from_json(response);
}

ProviderDescriptor fetch_descriptor(const std::string& endpoint, const RemoteOptions& options) {
  const auto response = with_retries(endpoint, options, [](httplib::Client& client,
                                                           const std::string& base) {
    return client.Get(base + wire::kDescriptorPath);
  });
  return wire::descriptor_from_json(response, endpoint);
}

RemoteProvider::RemoteProvider(ProviderDescriptor descriptor, RemoteOptions options)
    : descriptor_(std::move(descriptor)), options_(options) {
  descriptor_.kind = ProviderKind::remote;
  descriptor_.validate();
  split_endpoint(descriptor_.endpoint);
}

RemoteProvider RemoteProvider::connect(const std::string& endpoint, RemoteOptions options) {
  return RemoteProvider(fetch_descriptor(endpoint, options), options);
}

LogitVector RemoteProvider::next_token_logits(const LogitRequest& request) const {
  validate(request);
  check_token_ids(request, descriptor_.vocabulary_size);
  LogitVector logits = remote_logits(descriptor_.endpoint, request, options_);
  if (static_cast<std::size_t>(logits.size()) != descriptor_.vocabulary_size) {
    throw ProviderContractError("provider returned " + std::to_string(logits.size()) +
                                " logits, descriptor says " +
                                std::to_string(descriptor_.vocabulary_size));
  }
  return logits;
}

}  // namespace aad
