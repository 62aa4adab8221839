// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <atomic>
#include <numeric>
#include <thread>

#include "aad/harness.hpp"
#include "aad/io.hpp"

namespace aad {

AudioClip resolve_audio(const Dataset& dataset, const EvalItem& item) {
  if (const auto* synthetic = std::get_if<SyntheticAudio>(&item.audio)) {
    if (dataset.objects.empty()) {
      throw InputError("synthetic item " + item.id + " needs the dataset's object universe");
    }
    for (const auto& name : synthetic->present) {
      if (std::find(dataset.objects.begin(), dataset.objects.end(), name) == dataset.objects.end()) {
        throw InputError("item " + item.id + " names unknown object \"" + name + "\"");
      }
    }
    return encode_presence(dataset.objects, synthetic->present);
  }
  const auto& path = std::get<AudioPath>(item.audio).path;
  return load_wav(path.is_absolute() ? path : dataset.base_dir / path);
}

namespace {

struct ItemOutcome {
  Verdict verdict = Verdict::unparseable;
  std::optional<std::string> failure;
};

ItemOutcome evaluate_item(const Dataset& dataset, const EvalItem& item,
                          const LogitProvider& provider, const DecodingConfig& config,
                          const AudioResolver& resolver) {
  try {
    const AudioClip audio = resolver(dataset, item);
    const GenerationResult result = generate(provider, audio, item.question, config);
    return {extract_verdict(result.text), std::nullopt};
  } catch (const Error& e) {
    std::string message = e.what();
    if (e.step()) {
      message += " (step " + std::to_string(*e.step()) + ")";
    }
    return {Verdict::unparseable, std::move(message)};
  } catch (const std::exception& e) {
    return {Verdict::unparseable, std::string(e.what())};
  }
}

}  // namespace

EvalReport run_eval(const Dataset& dataset, const LogitProvider& provider,
                    const DecodingConfig& config, const RunOptions& options) {
  if (dataset.items.empty()) {
    throw InputError("dataset \"" + dataset.name + "\" has no items");
  }
  config.validate();

  const std::size_t n = dataset.items.size();
  std::vector<ItemOutcome> outcomes(n);
  std::size_t jobs = options.jobs == 0 ? std::thread::hardware_concurrency() : options.jobs;
  jobs = std::clamp<std::size_t>(jobs, 1, n);

  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      outcomes[i] = evaluate_item(dataset, dataset.items[i], provider, config, options.resolver);
    }
  };
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    pool.reserve(jobs);
    for (std::size_t t = 0; t < jobs; ++t) {
      pool.emplace_back(worker);
    }
  }

  // Aggregate in id order so the report does not depend on item order or scheduling.
  std::vector<std::size_t> by_id(n);
  std::iota(by_id.begin(), by_id.end(), std::size_t{0});
  std::stable_sort(by_id.begin(), by_id.end(), [&](std::size_t a, std::size_t b) {
    return dataset.items[a].id < dataset.items[b].id;
  });

  std::vector<Verdict> predictions;
  std::vector<Label> golds;
  std::vector<ItemFailure> failures;
  predictions.reserve(n);
  golds.reserve(n);
  for (const std::size_t i : by_id) {
    predictions.push_back(outcomes[i].verdict);
    golds.push_back(dataset.items[i].gold);
    if (outcomes[i].failure) {
      failures.push_back({dataset.items[i].id, *outcomes[i].failure});
    }
  }
  if (failures.size() * 100 > n) {
    throw RunError(std::to_string(failures.size()) + " of " + std::to_string(n) +
                   " items failed (limit 1%); first: " + failures.front().id + ": " +
                   failures.front().message);
  }

  EvalReport report = compute_metrics(predictions, golds, dataset.positive_class);
  report.config_echo = config.summary();
  report.failures = std::move(failures);
  return report;
}

bool SweepReport::all_succeeded() const noexcept {
  return std::all_of(rows.begin(), rows.end(), [](const SweepRow& row) { return row.report.has_value(); });
}

SweepReport sweep_alpha(const Dataset& dataset, const LogitProvider& provider,
                        std::span<const double> alphas, std::span<const std::string> prefix_variants,
                        const DecodingConfig& base_config, const RunOptions& options) {
  if (alphas.empty()) {
    throw InputError("sweep needs at least one alpha");
  }
  for (const double alpha : alphas) {
    if (!std::isfinite(alpha) || alpha < 0.0) {
      throw ConfigError("alpha must be >= 0 (got " + std::to_string(alpha) + ")");
    }
  }
  const std::vector<std::string> prefixes =
      prefix_variants.empty() ? std::vector<std::string>{base_config.prefix_prompt}
                              : std::vector<std::string>(prefix_variants.begin(), prefix_variants.end());

  SweepReport sweep{dataset.name, dataset.positive_class, {}};
  for (const double alpha : alphas) {
    for (const auto& prefix : prefixes) {
      DecodingConfig config = base_config;
      config.alpha = alpha;
      config.prefix_prompt = prefix;
      SweepRow row{alpha, prefix, std::nullopt, {}};
      try {
        row.report = run_eval(dataset, provider, config, options);
      } catch (const std::exception& e) {
        row.error = e.what();
      }
      sweep.rows.push_back(std::move(row));
    }
  }
  return sweep;
}

}  // namespace aad
