// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <array>
#include <cstdio>
#include <numeric>

#include "aad/harness.hpp"

namespace aad {

namespace {

constexpr std::array<std::string_view, 32> kInventory = {
    "dog",      "cat",     "car",      "rain",     "bird",     "siren",   "baby",   "engine",
    "music",    "speech",  "wind",     "water",    "train",    "horn",    "bell",   "clock",
    "door",     "footsteps", "thunder", "applause", "laughter", "whistle", "drum",  "guitar",
    "piano",    "telephone", "hammer",  "sheep",    "cow",      "rooster", "insects", "frog"};

}  // namespace

std::string_view to_string(Label label) noexcept { return label == Label::yes ? "yes" : "no"; }

Label label_from_string(std::string_view text) {
  if (text == "yes") return Label::yes;
  if (text == "no") return Label::no;
  throw InputError("label must be \"yes\" or \"no\", got \"" + std::string(text) + "\"");
}

bool is_balanced(const Dataset& dataset) {
  const auto yes = std::count_if(dataset.items.begin(), dataset.items.end(),
                                 [](const EvalItem& item) { return item.gold == Label::yes; });
  return 2 * static_cast<std::size_t>(yes) == dataset.items.size();
}

std::string make_question(std::string_view object) {
  return std::string(kQuestionTemplatePrefix) + std::string(object) + " in the audio?";
}

std::string_view to_string(SamplingKind kind) noexcept {
  switch (kind) {
    case SamplingKind::random:
      return "random";
    case SamplingKind::adversarial:
      return "adversarial";
    case SamplingKind::popular:
      break;
  }
  return "popular";
}

SamplingKind sampling_kind_from_string(std::string_view text) {
  if (text == "random") return SamplingKind::random;
  if (text == "adversarial") return SamplingKind::adversarial;
  if (text == "popular") return SamplingKind::popular;
  throw InputError("sampling strategy must be random, adversarial or popular");
}

std::uint64_t uniform_below(std::mt19937_64& engine, std::uint64_t bound) {
  if (bound == 0) {
    throw InputError("uniform_below needs a positive bound");
  }
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % bound;
  std::uint64_t draw = 0;
  do {
    draw = engine();
  } while (draw >= limit);
  return draw % bound;
}

std::vector<std::string> sample_absent_objects(const ToyWorld& world, const ObjectSet& present,
                                               SamplingKind kind, std::size_t k,
                                               std::uint64_t seed) {
  std::vector<Eigen::Index> present_idx;
  std::vector<Eigen::Index> candidates;
  for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(world.objects.size()); ++i) {
    (present.contains(world.objects[static_cast<std::size_t>(i)]) ? present_idx : candidates)
        .push_back(i);
  }
  if (k == 0 || k > candidates.size()) {
    throw InputError("cannot sample " + std::to_string(k) + " absent objects from a complement of " +
                     std::to_string(candidates.size()));
  }

  std::vector<std::string> chosen;
  chosen.reserve(k);
  if (kind == SamplingKind::random) {
    std::mt19937_64 engine(seed);
    for (std::size_t i = 0; i < k; ++i) {
      const auto j = i + uniform_below(engine, candidates.size() - i);
      std::swap(candidates[i], candidates[j]);
      chosen.push_back(world.objects[static_cast<std::size_t>(candidates[i])]);
    }
    return chosen;
  }

  Eigen::VectorXi score;
  if (kind == SamplingKind::adversarial) {
    score = Eigen::VectorXi::Zero(static_cast<Eigen::Index>(world.objects.size()));
    for (const auto p : present_idx) {
      score += world.cooccurrence.col(p);
    }
  } else {
    score = world.frequency;
  }
  std::sort(candidates.begin(), candidates.end(), [&](Eigen::Index a, Eigen::Index b) {
    if (score[a] != score[b]) {
      return score[a] > score[b];
    }
    return world.objects[static_cast<std::size_t>(a)] < world.objects[static_cast<std::size_t>(b)];
  });
  for (std::size_t i = 0; i < k; ++i) {
    chosen.push_back(world.objects[static_cast<std::size_t>(candidates[i])]);
  }
  return chosen;
}

Dataset build_benchmark(const ToyWorld& world, std::size_t n_items, SamplingKind kind,
                        std::uint64_t seed) {
  world.validate();
  if (n_items == 0 || n_items % 2 != 0) {
    throw InputError("n_items must be a positive even number, got " + std::to_string(n_items));
  }
  const std::size_t n_objects = world.objects.size();
  if (n_objects < 2) {
    throw InputError("benchmark needs a world with at least 2 objects");
  }

  Dataset dataset;
  dataset.name = std::string(to_string(kind)) + "-" + std::to_string(n_items);
  dataset.positive_class = Label::no;
  dataset.objects = world.objects;
  dataset.items.reserve(n_items);

  std::mt19937_64 engine(seed);
  std::vector<std::size_t> order(n_objects);
  const std::size_t max_present = std::min<std::size_t>(3, n_objects - 1);
  for (std::size_t clip = 0; clip < n_items / 2; ++clip) {
    const std::size_t n_present = 1 + uniform_below(engine, max_present);
    std::iota(order.begin(), order.end(), std::size_t{0});
    ObjectSet present;
    for (std::size_t i = 0; i < n_present; ++i) {
      const auto j = i + uniform_below(engine, n_objects - i);
      std::swap(order[i], order[j]);
      present.insert(world.objects[order[i]]);
    }
    // order[0..n_present) are the present objects in draw order
    const std::string& present_query = world.objects[order[uniform_below(engine, n_present)]];
    const std::string absent_query =
        sample_absent_objects(world, present, kind, 1, engine()).front();

    char id[32];
    std::snprintf(id, sizeof id, "clip%05zu", clip);
    dataset.items.push_back(
        {std::string(id) + "-yes", SyntheticAudio{present}, make_question(present_query), Label::yes});
    dataset.items.push_back(
        {std::string(id) + "-no", SyntheticAudio{present}, make_question(absent_query), Label::no});
  }
  return dataset;
}

std::span<const std::string_view> object_inventory() noexcept { return kInventory; }

ToyWorld random_world(std::size_t n_objects, std::uint64_t seed) {
  std::vector<std::string> names;
  names.reserve(n_objects);
  for (std::size_t i = 0; i < n_objects; ++i) {
    names.push_back(i < kInventory.size() ? std::string(kInventory[i]) : "object" + std::to_string(i));
  }
  ToyWorld world = ToyWorld::with_objects(std::move(names));
  std::mt19937_64 engine(seed);
  const auto n = static_cast<Eigen::Index>(n_objects);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      world.cooccurrence(i, j) = world.cooccurrence(j, i) =
          static_cast<int>(uniform_below(engine, 21));
    }
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    world.frequency[i] = 1 + static_cast<int>(uniform_below(engine, 100));
  }
  return world;
}

ToyWorld world_from_annotations(std::vector<std::string> objects, std::span<const ObjectSet> clips) {
  ToyWorld world = ToyWorld::with_objects(std::move(objects));
  for (const auto& clip : clips) {
    std::vector<Eigen::Index> idx;
    for (const auto& name : clip) {
      const auto i = world.index_of(name);
      if (!i) {
        throw InputError("annotation \"" + name + "\" is not in the label universe");
      }
      idx.push_back(*i);
    }
    for (const auto i : idx) {
      world.frequency[i] += 1;
      for (const auto j : idx) {
        if (i != j) {
          world.cooccurrence(i, j) += 1;
        }
      }
    }
  }
  return world;
}

}  // namespace aad
