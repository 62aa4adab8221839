// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "aad/core.hpp"
#include "aad/decoder.hpp"
#include "aad/parser.hpp"
#include "aad/provider.hpp"
#include "aad/toy_provider.hpp"

namespace aad {

enum class Label { yes, no };

[[nodiscard]] std::string_view to_string(Label label) noexcept;
/// Parses "yes"/"no"; throws InputError otherwise.
[[nodiscard]] Label label_from_string(std::string_view text);

struct AudioPath {
  std::filesystem::path path;
  bool operator==(const AudioPath&) const = default;
};

struct SyntheticAudio {
  ObjectSet present;
  bool operator==(const SyntheticAudio&) const = default;
};

using AudioSource = std::variant<AudioPath, SyntheticAudio>;

struct EvalItem {
  std::string id;
  AudioSource audio;
  std::string question;
  Label gold = Label::yes;

  bool operator==(const EvalItem&) const = default;
};

struct Dataset {
  std::string name;
  Label positive_class = Label::no;
  std::vector<EvalItem> items;
  // Label universe; positions define the synthetic clip layout.
  std::vector<std::string> objects;
  // Relative audio paths resolve against this directory.
  std::filesystem::path base_dir;

  bool operator==(const Dataset&) const = default;
};

/// True when the number of gold=yes and gold=no items is equal.
[[nodiscard]] bool is_balanced(const Dataset& dataset);

inline constexpr std::string_view kQuestionTemplatePrefix = "Is there a sound of a ";
[[nodiscard]] std::string make_question(std::string_view object);

// ---------------------------------------------------------------------------
// Negative sampling

enum class SamplingKind { random, adversarial, popular };

[[nodiscard]] std::string_view to_string(SamplingKind kind) noexcept;
[[nodiscard]] SamplingKind sampling_kind_from_string(std::string_view text);

/// Absent objects for one clip. `seed` only matters for random sampling.
///   random      uniform without replacement from the complement
///   adversarial greatest total co-occurrence with `present`
///   popular     greatest global frequency
/// Ranked strategies break ties by name and return objects best-first.
[[nodiscard]] std::vector<std::string> sample_absent_objects(const ToyWorld& world,
                                                             const ObjectSet& present,
                                                             SamplingKind kind, std::size_t k,
                                                             std::uint64_t seed = 0);

/// n_items / 2 clips, each yielding one gold=yes and one gold=no question.
[[nodiscard]] Dataset build_benchmark(const ToyWorld& world, std::size_t n_items,
                                      SamplingKind kind, std::uint64_t seed);

/// Common sound-event labels used to name synthetic objects.
[[nodiscard]] std::span<const std::string_view> object_inventory() noexcept;

/// Seeded world over `n_objects` inventory names with random statistics.
[[nodiscard]] ToyWorld random_world(std::size_t n_objects, std::uint64_t seed);

/// World statistics counted from per-clip annotations: frequency is the number
/// of clips containing an object, co-occurrence the number containing both.
[[nodiscard]] ToyWorld world_from_annotations(std::vector<std::string> objects,
                                              std::span<const ObjectSet> clips);

/// Uniform integer in [0, bound) from a 64-bit engine, by rejection.
[[nodiscard]] std::uint64_t uniform_below(std::mt19937_64& engine, std::uint64_t bound);

// ---------------------------------------------------------------------------
// Metrics

struct ConfusionCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;
  std::size_t tn = 0;
  std::size_t unparseable = 0;
  // Unparseable answers whose gold is the positive class; already counted in fn.
  std::size_t unparseable_positive = 0;

  [[nodiscard]] std::size_t total() const noexcept {
    return tp + fp + (fn - unparseable_positive) + tn + unparseable;
  }
  bool operator==(const ConfusionCounts&) const = default;
};

struct ItemFailure {
  std::string id;
  std::string message;
};

struct EvalReport {
  double accuracy = 0.0;
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
  double yes_rate = 0.0;
  double unparseable_rate = 0.0;
  ConfusionCounts counts;
  std::string config_echo;
  std::vector<ItemFailure> failures;
};

/// Scores verdicts against gold labels. Unparseable answers are wrong for
/// accuracy, count as FN when gold is the positive class and are never
/// credited as TN. Throws InputError on empty or mismatched inputs.
[[nodiscard]] EvalReport compute_metrics(std::span<const Verdict> predictions,
                                         std::span<const Label> golds, Label positive_class);

// ---------------------------------------------------------------------------
// Evaluation

using AudioResolver = std::function<AudioClip(const Dataset&, const EvalItem&)>;

/// Synthetic sources via encode_presence over dataset.objects; paths via load_wav.
[[nodiscard]] AudioClip resolve_audio(const Dataset& dataset, const EvalItem& item);

struct RunOptions {
  // Worker threads; 0 means hardware concurrency.
  std::size_t jobs = 1;
  AudioResolver resolver = resolve_audio;
};

/// generate -> extract_verdict for every item, then compute_metrics.
///
/// Items that fail are recorded and scored unparseable as long as failures
/// stay within 1% of the dataset; beyond that the run throws RunError.
[[nodiscard]] EvalReport run_eval(const Dataset& dataset, const LogitProvider& provider,
                                  const DecodingConfig& config, const RunOptions& options = {});

struct SweepRow {
  double alpha = 0.0;
  std::string prefix;
  std::optional<EvalReport> report;
  std::string error;  // set when report is empty
};

struct SweepReport {
  std::string dataset_name;
  Label positive_class = Label::no;
  std::vector<SweepRow> rows;

  [[nodiscard]] bool all_succeeded() const noexcept;
};

/// One run_eval per (alpha, prefix), alpha-major, in input order. A failing row
/// records its error and the sweep continues.
[[nodiscard]] SweepReport sweep_alpha(const Dataset& dataset, const LogitProvider& provider,
                                      std::span<const double> alphas,
                                      std::span<const std::string> prefix_variants,
                                      const DecodingConfig& base_config,
                                      const RunOptions& options = {});

}  // namespace aad
