// SPDX-License-Identifier: Apache-2.0
#include "aad/toy_provider.hpp"

#include <algorithm>
#include <cctype>
#include <numbers>

namespace aad {

ToyWorld ToyWorld::with_objects(std::vector<std::string> names) {
  ToyWorld world;
  const auto n = static_cast<Eigen::Index>(names.size());
  world.objects = std::move(names);
  world.cooccurrence = Eigen::MatrixXi::Zero(n, n);
  world.frequency = Eigen::VectorXi::Zero(n);
  return world;
}

void ToyWorld::validate() const {
  const auto n = static_cast<Eigen::Index>(objects.size());
  if (cooccurrence.rows() != n || cooccurrence.cols() != n || frequency.size() != n) {
    throw InputError("world statistics do not match the object count");
  }
  if (cooccurrence != cooccurrence.transpose()) {
    throw InputError("co-occurrence matrix must be symmetric");
  }
  if ((cooccurrence.diagonal().array() != 0).any() || (cooccurrence.array() < 0).any() ||
      (frequency.array() < 0).any()) {
    throw InputError("co-occurrence needs a zero diagonal and non-negative counts");
  }
  const ObjectSet unique(objects.begin(), objects.end());
  if (unique.size() != objects.size() || unique.count("") != 0) {
    throw InputError("object names must be unique and non-empty");
  }
  if (!std::isfinite(yes_bias) || !std::isfinite(evidence_strength) || evidence_strength < 0) {
    throw InputError("yes_bias must be finite and evidence_strength >= 0");
  }
}

std::optional<Eigen::Index> ToyWorld::index_of(std::string_view name) const {
  const auto it = std::find(objects.begin(), objects.end(), name);
  if (it == objects.end()) {
    return std::nullopt;
  }
  return static_cast<Eigen::Index>(it - objects.begin());
}

namespace {

bool is_word_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) != 0; }

std::string lowercase(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::optional<std::size_t> first_whole_word(std::string_view haystack, std::string_view needle) {
  for (std::size_t pos = haystack.find(needle); pos != std::string_view::npos;
       pos = haystack.find(needle, pos + 1)) {
    const bool left_ok = pos == 0 || !is_word_char(haystack[pos - 1]);
    const std::size_t end = pos + needle.size();
    const bool right_ok = end == haystack.size() || !is_word_char(haystack[end]);
    if (left_ok && right_ok) {
      return pos;
    }
  }
  return std::nullopt;
}

}  // namespace

std::string find_queried_object(const ToyWorld& world, std::string_view prompt) {
  const std::string text = lowercase(prompt);
  const std::string* best = nullptr;
  std::size_t best_pos = 0;
  for (const auto& name : world.objects) {
    const auto pos = first_whole_word(text, lowercase(name));
    if (!pos) {
      continue;
    }
    if (best == nullptr || *pos < best_pos || (*pos == best_pos && name.size() > best->size())) {
      best = &name;
      best_pos = *pos;
    }
  }
  if (best == nullptr) {
    throw QuestionParseError("no known object named in prompt: \"" + std::string(prompt) + "\"");
  }
  return *best;
}

LogitVector toy_logits(const ToyWorld& world, const ObjectSet& present,
                       std::string_view queried_object, const LogitRequest& request) {
  if (!world.index_of(queried_object)) {
    throw InputError("queried object \"" + std::string(queried_object) + "\" is not in the world");
  }
  check_token_ids(request, kToyVocabulary.size());

  LogitVector logits = LogitVector::Constant(kToyVocabulary.size(), kToyLowLogit);
  const std::size_t step = request.generated_tokens.size();
  if (step == 0) {
    double evidence = 0.0;
    if (!request.blank) {
      evidence = present.contains(queried_object) ? 1.0 : -1.0;
    }
    logits[kYesToken] = world.yes_bias + world.evidence_strength * evidence;
    logits[kNoToken] = 0.0;
    return logits;
  }
  if (world.verbose) {
    // ", there is sound <eos>"
    static constexpr std::array<TokenId, 5> kFiller = {2, 3, 4, 6, kEosToken};
    logits[kFiller[std::min(step - 1, kFiller.size() - 1)]] = kToyHighLogit;
  } else {
    logits[kEosToken] = kToyHighLogit;
  }
  return logits;
}

AudioClip encode_presence(const std::vector<std::string>& objects, const ObjectSet& present,
                          int sample_rate) {
  const auto n = static_cast<Eigen::Index>(objects.size());
  AudioClip clip{Eigen::VectorXd::Zero(n * kToySegmentLength), sample_rate};
  constexpr double kToneHz = 440.0;
  constexpr double kAmplitude = 0.5;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!present.contains(objects[static_cast<std::size_t>(i)])) {
      continue;
    }
    for (Eigen::Index t = 0; t < kToySegmentLength; ++t) {
      // quarter-period phase offset keeps the first sample non-zero
      clip.samples[i * kToySegmentLength + t] =
          kAmplitude * std::cos(2.0 * std::numbers::pi * kToneHz * static_cast<double>(t) /
                                static_cast<double>(sample_rate));
    }
  }
  return clip;
}

ObjectSet decode_presence(const std::vector<std::string>& objects, const AudioClip& audio) {
  const auto n = static_cast<Eigen::Index>(objects.size());
  if (audio.size() != n * kToySegmentLength) {
    throw InputError("clip of " + std::to_string(audio.size()) +
                     " samples is not a toy-encoded clip for " + std::to_string(n) + " objects");
  }
  ObjectSet present;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double energy = audio.samples.segment(i * kToySegmentLength, kToySegmentLength).squaredNorm();
    if (energy / static_cast<double>(kToySegmentLength) > 1e-4) {
      present.insert(objects[static_cast<std::size_t>(i)]);
    }
  }
  return present;
}

ToyProvider::ToyProvider(ToyWorld world) : world_(std::move(world)) {
  world_.validate();
  descriptor_.kind = ProviderKind::toy;
  descriptor_.vocabulary_size = kToyVocabulary.size();
  descriptor_.tokens.assign(kToyVocabulary.begin(), kToyVocabulary.end());
  descriptor_.eos_token = kEosToken;
}

LogitVector ToyProvider::next_token_logits(const LogitRequest& request) const {
  validate(request);
  check_token_ids(request, descriptor_.vocabulary_size);
  const std::string queried = find_queried_object(world_, request.prompt_text);
  const ObjectSet present = request.blank ? ObjectSet{} : decode_presence(world_.objects, request.audio);
  return toy_logits(world_, present, queried, request);
}

}  // namespace aad
