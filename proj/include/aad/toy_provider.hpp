// SPDX-License-Identifier: Apache-2.0
#pragma once

// A desk-scale stand-in for an audio-language model with a tunable prior
// toward answering "yes".
//
// Synthetic clips encode object presence positionally: the clip holds one
// fixed-length segment per world object, carrying a tone when the object is
// present and silence otherwise.

#include <array>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "aad/provider.hpp"

namespace aad {

inline constexpr std::array<std::string_view, 8> kToyVocabulary = {
    "yes", "no", ",", "there", "is", "not", "sound", "<eos>"};
inline constexpr TokenId kYesToken = 0;
inline constexpr TokenId kNoToken = 1;
inline constexpr TokenId kEosToken = 7;

inline constexpr double kToyHighLogit = 10.0;
inline constexpr double kToyLowLogit = -10.0;

using ObjectSet = std::set<std::string, std::less<>>;

struct ToyWorld {
  std::vector<std::string> objects;
  Eigen::MatrixXi cooccurrence;  // symmetric, zero diagonal
  Eigen::VectorXi frequency;
  double yes_bias = 1.0;          // b
  double evidence_strength = 0.6; // s
  // Follow the verdict with ", there is sound <eos>".
  bool verbose = false;

  /// World over `names` with all statistics zeroed.
  static ToyWorld with_objects(std::vector<std::string> names);

  void validate() const;
  [[nodiscard]] std::optional<Eigen::Index> index_of(std::string_view name) const;
};

/// The world object named in `prompt`, matched as a whole word. Earliest match
/// wins; at equal positions the longer name wins. Throws QuestionParseError.
[[nodiscard]] std::string find_queried_object(const ToyWorld& world, std::string_view prompt);

/// Step 0: yes = b + s*a, no = 0, rest low, where a is +1/-1 for a present/absent
/// queried object with real audio and 0 for blank audio. Later steps emit the
/// filler (verbose) or <eos>.
[[nodiscard]] LogitVector toy_logits(const ToyWorld& world, const ObjectSet& present,
                                     std::string_view queried_object, const LogitRequest& request);

inline constexpr Eigen::Index kToySegmentLength = 160;

[[nodiscard]] AudioClip encode_presence(const std::vector<std::string>& objects,
                                        const ObjectSet& present, int sample_rate = 16000);
/// Inverse of encode_presence. Throws InputError for clips of the wrong length.
[[nodiscard]] ObjectSet decode_presence(const std::vector<std::string>& objects,
                                        const AudioClip& audio);

class ToyProvider final : public LogitProvider {
 public:
  explicit ToyProvider(ToyWorld world);

  [[nodiscard]] const ProviderDescriptor& descriptor() const noexcept override {
    return descriptor_;
  }
  [[nodiscard]] LogitVector next_token_logits(const LogitRequest& request) const override;
  [[nodiscard]] const ToyWorld& world() const noexcept { return world_; }

 private:
  ToyWorld world_;
  ProviderDescriptor descriptor_;
};

}  // namespace aad
