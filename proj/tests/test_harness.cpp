// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <random>
#include <sstream>

#include "aad/harness.hpp"
#include "aad/io.hpp"
#include "oracles.hpp"
#include "test_support.hpp"

using namespace aad;

namespace {

ToyWorld dog_cat_car() {
  ToyWorld world = ToyWorld::with_objects({"dog", "cat", "car"});
  world.cooccurrence(0, 1) = world.cooccurrence(1, 0) = 5;
  world.cooccurrence(0, 2) = world.cooccurrence(2, 0) = 1;
  world.frequency << 10, 6, 2;
  return world;
}

ToyWorld random_small_world(std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> size(2, 8);
  ToyWorld world = random_world(size(rng), rng());
  // coarse counts force plenty of ties
  world.cooccurrence = world.cooccurrence.unaryExpr([](int v) { return v % 3; });
  world.frequency = world.frequency.unaryExpr([](int v) { return v % 4; });
  return world;
}

std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("aad_harness_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace

TEST_CASE("sample_absent_objects: examples") {
  const ToyWorld world = dog_cat_car();
  CHECK(sample_absent_objects(world, {"dog"}, SamplingKind::adversarial, 1) ==
        std::vector<std::string>{"cat"});
  CHECK(sample_absent_objects(world, {"dog"}, SamplingKind::popular, 1) ==
        std::vector<std::string>{"cat"});
  CHECK(sample_absent_objects(world, {"dog"}, SamplingKind::adversarial, 2) ==
        std::vector<std::string>{"cat", "car"});
  for (const auto kind : {SamplingKind::random, SamplingKind::adversarial, SamplingKind::popular}) {
    CHECK(sample_absent_objects(world, {"dog", "cat"}, kind, 1, 9) == std::vector<std::string>{"car"});
  }
  CHECK_THROWS_AS((void)sample_absent_objects(world, {"dog", "cat"}, SamplingKind::random, 2), InputError);
  CHECK_THROWS_AS((void)sample_absent_objects(world, {"dog"}, SamplingKind::popular, 0), InputError);
}

TEST_CASE("sample_absent_objects: ties go to the smaller name") {
  ToyWorld world = ToyWorld::with_objects({"zebra", "ant", "moth", "bee"});
  world.frequency << 3, 3, 1, 3;
  CHECK(sample_absent_objects(world, {"moth"}, SamplingKind::popular, 2) ==
        std::vector<std::string>{"ant", "bee"});
  CHECK(sample_absent_objects(world, {}, SamplingKind::adversarial, 4) ==
        std::vector<std::string>{"ant", "bee", "moth", "zebra"});
}

TEST_CASE("sample_absent_objects: random draws uniformly from the complement") {
  const ToyWorld world = random_world(6, 1);
  const ObjectSet present{world.objects[0], world.objects[1]};
  std::map<std::string, int> counts;
  for (std::uint64_t seed = 0; seed < 4000; ++seed) {
    const auto picks = sample_absent_objects(world, present, SamplingKind::random, 2, seed);
    REQUIRE(picks.size() == 2);
    CHECK(picks[0] != picks[1]);
    for (const auto& p : picks) {
      CHECK(present.count(p) == 0);
      ++counts[p];
    }
  }
  CHECK(counts.size() == 4);
  for (const auto& [name, count] : counts) CHECK(std::abs(count - 2000) < 200);
  CHECK(sample_absent_objects(world, present, SamplingKind::random, 3, 77) ==
        sample_absent_objects(world, present, SamplingKind::random, 3, 77));
}

TEST_CASE("sample_absent_objects: ranked strategies match exhaustive search") {
  std::mt19937_64 rng(2024);
  for (int trial = 0; trial < 60; ++trial) {
    const ToyWorld world = random_small_world(rng);
    const std::size_t n = world.objects.size();
    ObjectSet present;
    for (const auto& name : world.objects) {
      if (rng() % 3 == 0 && present.size() + 1 < n) present.insert(name);
    }
    const std::size_t k = 1 + rng() % (n - present.size());
    for (const auto kind : {SamplingKind::adversarial, SamplingKind::popular}) {
      auto got = sample_absent_objects(world, present, kind, k);
      std::sort(got.begin(), got.end());
      CHECK(got == oracle::best_subset(world, present, kind, k));
    }
  }
}

TEST_CASE("build_benchmark: balance, template, determinism") {
  const ToyWorld world = random_world(6, 7);
  const Dataset four = build_benchmark(world, 4, SamplingKind::random, 1);
  CHECK(four.items.size() == 4);
  CHECK(is_balanced(four));
  CHECK(four.positive_class == Label::no);
  CHECK(four.objects == world.objects);

  for (const auto kind : {SamplingKind::random, SamplingKind::adversarial, SamplingKind::popular}) {
    const Dataset a = build_benchmark(world, 200, kind, 7);
    CHECK(a == build_benchmark(world, 200, kind, 7));
    CHECK(is_balanced(a));
    for (const auto& item : a.items) {
      const auto& present = std::get<SyntheticAudio>(item.audio).present;
      CHECK(!present.empty());
      const std::string object = find_queried_object(world, item.question);
      CHECK(item.question == make_question(object));
      CHECK((present.count(object) == 1) == (item.gold == Label::yes));
    }
  }
  CHECK_FALSE(build_benchmark(world, 200, SamplingKind::random, 7) ==
              build_benchmark(world, 200, SamplingKind::random, 8));
  CHECK(make_question("dog") == "Is there a sound of a dog in the audio?");

  CHECK_THROWS_AS((void)build_benchmark(world, 3, SamplingKind::random, 0), InputError);
  CHECK_THROWS_AS((void)build_benchmark(world, 0, SamplingKind::random, 0), InputError);
  CHECK_THROWS_AS((void)build_benchmark(ToyWorld::with_objects({"solo"}), 2, SamplingKind::random, 0),
                  InputError);
}

TEST_CASE("build_benchmark: adversarial negatives maximize co-occurrence") {
  const ToyWorld world = dog_cat_car();
  const Dataset dataset = build_benchmark(world, 20, SamplingKind::adversarial, 3);
  for (const auto& item : dataset.items) {
    if (item.gold != Label::no) continue;
    const auto& present = std::get<SyntheticAudio>(item.audio).present;
    const auto expected = oracle::best_subset(world, present, SamplingKind::adversarial, 1);
    CHECK(find_queried_object(world, item.question) == expected.front());
  }
}

TEST_CASE("world_from_annotations counts clips and pairs") {
  const std::vector<ObjectSet> clips{{"dog", "cat"}, {"dog", "car"}, {"dog", "cat"}, {"rain"}};
  const ToyWorld world = world_from_annotations({"dog", "cat", "car", "rain"}, clips);
  CHECK_NOTHROW(world.validate());
  CHECK(world.frequency == Eigen::Vector4i(3, 2, 1, 1));
  CHECK(world.cooccurrence(0, 1) == 2);
  CHECK(world.cooccurrence(1, 0) == 2);
  CHECK(world.cooccurrence(0, 2) == 1);
  CHECK(world.cooccurrence(3, 0) == 0);
  CHECK(sample_absent_objects(world, {"dog"}, SamplingKind::adversarial, 1) ==
        std::vector<std::string>{"cat"});
  const std::vector<ObjectSet> bad{{"unicorn"}};
  CHECK_THROWS_AS((void)world_from_annotations({"dog"}, bad), InputError);
}

TEST_CASE("compute_metrics: hand-enumerated examples") {
  const std::vector<Verdict> preds{Verdict::no, Verdict::yes, Verdict::yes, Verdict::yes};
  const std::vector<Label> golds{Label::no, Label::no, Label::yes, Label::yes};

  const auto no_pos = compute_metrics(preds, golds, Label::no);
  CHECK(no_pos.counts.tp == 1);
  CHECK(no_pos.counts.fp == 0);
  CHECK(no_pos.counts.fn == 1);
  CHECK(no_pos.counts.tn == 2);
  CHECK(no_pos.precision == 1.0);
  CHECK(no_pos.recall == 0.5);
  CHECK(no_pos.f1 == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(no_pos.accuracy == 0.75);
  CHECK(no_pos.yes_rate == 0.75);

  const auto yes_pos = compute_metrics(preds, golds, Label::yes);
  CHECK(yes_pos.counts.tp == 2);
  CHECK(yes_pos.counts.fp == 1);
  CHECK(yes_pos.counts.fn == 0);
  CHECK(yes_pos.precision == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
  CHECK(yes_pos.recall == 1.0);
  CHECK(yes_pos.f1 == doctest::Approx(0.8).epsilon(1e-12));
  CHECK(yes_pos.accuracy == 0.75);

  const std::vector<Verdict> with_unparsed{Verdict::no, Verdict::unparseable};
  const std::vector<Label> both_no{Label::no, Label::no};
  const auto partial = compute_metrics(with_unparsed, both_no, Label::no);
  CHECK(partial.counts.tp == 1);
  CHECK(partial.counts.fn == 1);
  CHECK(partial.counts.unparseable == 1);
  CHECK(partial.accuracy == 0.5);
  CHECK(partial.unparseable_rate == 0.5);
  CHECK(partial.counts.total() == 2);
}

TEST_CASE("compute_metrics: errors and zero denominators") {
  const std::vector<Verdict> none;
  const std::vector<Label> no_golds;
  CHECK_THROWS_AS((void)compute_metrics(none, no_golds, Label::no), InputError);
  const std::vector<Verdict> one{Verdict::yes};
  const std::vector<Label> two{Label::yes, Label::no};
  CHECK_THROWS_AS((void)compute_metrics(one, two, Label::no), InputError);

  const std::vector<Label> yes_gold{Label::yes};
  const auto empty_pos = compute_metrics(one, yes_gold, Label::no);
  CHECK(empty_pos.precision == 0.0);
  CHECK(empty_pos.recall == 0.0);
  CHECK(empty_pos.f1 == 0.0);
  CHECK(empty_pos.accuracy == 1.0);
}

TEST_CASE("compute_metrics: random vectors against the oracle, symmetry") {
  std::mt19937_64 rng(55);
  for (int trial = 0; trial < 300; ++trial) {
    const std::size_t n = 1 + rng() % 20;
    std::vector<Verdict> preds;
    std::vector<Label> golds;
    const bool allow_unparseable = trial % 2 == 0;
    for (std::size_t i = 0; i < n; ++i) {
      const auto r = rng() % (allow_unparseable ? 3 : 2);
      preds.push_back(r == 0 ? Verdict::yes : r == 1 ? Verdict::no : Verdict::unparseable);
      golds.push_back(rng() % 2 == 0 ? Label::yes : Label::no);
    }
    for (const Label positive : {Label::yes, Label::no}) {
      const auto got = compute_metrics(preds, golds, positive);
      const auto want = oracle::confusion(preds, golds, positive);
      CHECK(got.counts.tp == want.tp);
      CHECK(got.counts.fp == want.fp);
      CHECK(got.counts.fn == want.fn);
      CHECK(got.counts.tn == want.tn);
      CHECK(got.counts.unparseable == want.unparseable);
      CHECK(got.counts.total() == n);
      CHECK(got.accuracy == want.accuracy);
      CHECK(got.precision == want.precision);
      CHECK(got.recall == want.recall);
      CHECK(std::abs(got.f1 - want.f1) < 1e-12);
      CHECK(got.yes_rate == want.yes_rate);
      CHECK(got.unparseable_rate == want.unparseable_rate);
    }
    if (!allow_unparseable) {
      const auto a = compute_metrics(preds, golds, Label::yes).counts;
      const auto b = compute_metrics(preds, golds, Label::no).counts;
      CHECK(a.tp == b.tn);
      CHECK(a.fp == b.fn);
      CHECK(a.fn == b.fp);
      CHECK(a.tn == b.tp);
      CHECK(compute_metrics(preds, golds, Label::yes).accuracy ==
            compute_metrics(preds, golds, Label::no).accuracy);
    }
  }
}

TEST_CASE("run_eval: toy benchmark at alpha 0 and 1") {
  const ToyWorld world = random_world(6, 7);
  const Dataset dataset = build_benchmark(world, 200, SamplingKind::random, 7);
  const ToyProvider toy(ToyWorld::with_objects(world.objects));

  DecodingConfig config;
  config.prefix_prompt = "";
  config.alpha = 0.0;
  RunOptions options;
  options.jobs = 4;
  const auto plain = run_eval(dataset, toy, config, options);
  CHECK(plain.yes_rate == 1.0);
  CHECK(plain.f1 == 0.0);
  CHECK(plain.accuracy == 0.5);

  config.alpha = 1.0;
  const auto contrastive = run_eval(dataset, toy, config, options);
  CHECK(contrastive.f1 == 1.0);
  CHECK(contrastive.accuracy == 1.0);
  CHECK(contrastive.yes_rate == 0.5);
  CHECK(contrastive.config_echo.find("alpha=1") != std::string::npos);

  Dataset empty = dataset;
  empty.items.clear();
  CHECK_THROWS_AS((void)run_eval(empty, toy, config), InputError);
  config.alpha = -0.1;
  CHECK_THROWS_AS((void)run_eval(dataset, toy, config), ConfigError);
}

TEST_CASE("run_eval: report does not depend on item order or worker count") {
  const ToyWorld world = random_world(8, 2);
  ToyWorld model = ToyWorld::with_objects(world.objects);
  model.evidence_strength = 0.4;  // alpha = 1 leaves some hallucinations
  const ToyProvider toy(model);
  Dataset dataset = build_benchmark(world, 60, SamplingKind::popular, 2);
  DecodingConfig config;
  config.alpha = 0.5;
  const auto reference = run_eval(dataset, toy, config);

  std::mt19937_64 rng(9);
  for (int trial = 0; trial < 5; ++trial) {
    std::shuffle(dataset.items.begin(), dataset.items.end(), rng);
    RunOptions options;
    options.jobs = 1 + static_cast<std::size_t>(trial);
    const auto shuffled = run_eval(dataset, toy, config, options);
    CHECK(shuffled.counts == reference.counts);
    CHECK(shuffled.f1 == reference.f1);
    CHECK(shuffled.yes_rate == reference.yes_rate);
  }
}

TEST_CASE("run_eval: per-item failures within 1% are scored unparseable") {
  const ToyWorld world = random_world(6, 4);
  Dataset dataset = build_benchmark(world, 200, SamplingKind::random, 4);
  const ToyProvider toy(ToyWorld::with_objects(world.objects));
  DecodingConfig config;

  dataset.items[0].question = "What is this?";  // toy cannot parse it
  dataset.items[1].question = "Is this loud?";
  const auto report = run_eval(dataset, toy, config);
  CHECK(report.failures.size() == 2);
  CHECK(report.counts.unparseable == 2);
  CHECK(report.unparseable_rate == 0.01);
  CHECK(report.failures[0].id < report.failures[1].id);

  dataset.items[2].question = "Anything?";
  CHECK_THROWS_AS((void)run_eval(dataset, toy, config), RunError);

  dataset.items.resize(2);  // both failing
  CHECK_THROWS_AS((void)run_eval(dataset, toy, config), RunError);
}

TEST_CASE("sweep_alpha: rows, monotone yes-rate, consistency with run_eval") {
  const ToyWorld world = random_world(6, 7);
  const Dataset dataset = build_benchmark(world, 200, SamplingKind::random, 7);
  const ToyProvider toy(ToyWorld::with_objects(world.objects));
  const std::vector<double> alphas{0.0, 0.5, 1.0, 1.5, 2.0};
  const std::vector<std::string> prefixes{std::string(kFocusPrompt)};
  const DecodingConfig base;

  const auto sweep = sweep_alpha(dataset, toy, alphas, prefixes, base);
  REQUIRE(sweep.rows.size() == 5);
  CHECK(sweep.all_succeeded());
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(sweep.rows[i].alpha == alphas[i]);
    if (i > 0) CHECK(sweep.rows[i].report->yes_rate <= sweep.rows[i - 1].report->yes_rate);
  }

  const std::vector<double> zero{0.0};
  const std::vector<std::string> two_prefixes{"", std::string(kFocusPrompt)};
  const auto prompts = sweep_alpha(dataset, toy, zero, two_prefixes, base);
  REQUIRE(prompts.rows.size() == 2);
  CHECK(prompts.rows[0].prefix.empty());
  CHECK(prompts.rows[1].prefix == kFocusPrompt);

  const std::vector<double> one{1.0};
  const auto single = sweep_alpha(dataset, toy, one, prefixes, base);
  DecodingConfig direct = base;
  direct.alpha = 1.0;
  const auto report = run_eval(dataset, toy, direct);
  CHECK(single.rows[0].report->counts == report.counts);
  CHECK(single.rows[0].report->config_echo == report.config_echo);

  const std::vector<double> none;
  CHECK_THROWS_AS((void)sweep_alpha(dataset, toy, none, prefixes, base), InputError);
  const std::vector<double> negative{-1.0};
  CHECK_THROWS_AS((void)sweep_alpha(dataset, toy, negative, prefixes, base), ConfigError);
}

TEST_CASE("sweep_alpha: a failing row does not stop the sweep") {
  const ToyWorld world = random_world(4, 1);
  Dataset dataset = build_benchmark(world, 4, SamplingKind::random, 1);
  const ToyProvider toy(ToyWorld::with_objects(world.objects));
  const std::vector<double> alphas{0.0, 1.0};
  // prefix naming no object is harmless; an unparseable question makes every row fail
  const std::vector<std::string> prefixes{"Listen."};
  for (auto& item : dataset.items) item.question = "Hmm?";
  const auto sweep = sweep_alpha(dataset, toy, alphas, prefixes, DecodingConfig{});
  REQUIRE(sweep.rows.size() == 2);
  CHECK_FALSE(sweep.all_succeeded());
  for (const auto& row : sweep.rows) {
    CHECK_FALSE(row.report.has_value());
    CHECK(!row.error.empty());
  }
}

TEST_CASE("dataset files round trip") {
  const auto dir = temp_dir("dataset");
  Dataset dataset = build_benchmark(random_world(5, 3), 10, SamplingKind::popular, 3);
  dataset.items.push_back({"real-1", AudioPath{"clips/a.wav"}, "Is there a sound of a dog in the audio?",
                           Label::yes});
  save_dataset(dataset, dir / "bench.jsonl");
  CHECK(std::filesystem::exists(dir / "bench.meta.json"));

  const Dataset loaded = load_dataset(dir / "bench.jsonl");
  CHECK(loaded.items == dataset.items);
  CHECK(loaded.name == dataset.name);
  CHECK(loaded.positive_class == Label::no);
  CHECK(loaded.objects == dataset.objects);
  CHECK(loaded.base_dir == dir);

  std::ofstream(dir / "plain.jsonl")
      << R"({"id": "q1", "audio": {"path": "x.wav"}, "question": "Is it raining?", "gold": "yes"})"
      << "\n\n";
  const Dataset plain = load_dataset(dir / "plain.jsonl");
  CHECK(plain.name == "plain");
  CHECK(plain.items.size() == 1);
  CHECK(plain.objects.empty());

  std::ofstream(dir / "bad.jsonl") << R"({"id": "q1", "audio": {}, "question": "x", "gold": "yes"})" << "\n";
  CHECK_THROWS_AS((void)load_dataset(dir / "bad.jsonl"), InputError);
  std::ofstream(dir / "bad2.jsonl") << R"({"id": "q1", "audio": {"path": "a"}, "question": "x", "gold": "maybe"})" << "\n";
  CHECK_THROWS_AS((void)load_dataset(dir / "bad2.jsonl"), InputError);
  CHECK_THROWS_AS((void)load_dataset(dir / "missing.jsonl"), InputError);
}

TEST_CASE("WAV files: float round trip and PCM16") {
  const auto dir = temp_dir("wav");
  AudioClip clip{Eigen::VectorXd(5), 22050};
  clip.samples << 0.0, 0.5, -0.25, 1.0, -1.0;
  save_wav(clip, dir / "f.wav");
  CHECK(load_wav(dir / "f.wav") == clip);

  // hand-built 2-channel 16-bit PCM file
  std::ofstream out(dir / "pcm.wav", std::ios::binary);
  const auto put32 = [&](std::uint32_t v) { out.write(reinterpret_cast<const char*>(&v), 4); };
  const auto put16 = [&](std::uint16_t v) { out.write(reinterpret_cast<const char*>(&v), 2); };
  out.write("RIFF", 4); put32(36 + 8); out.write("WAVEfmt ", 8);
  put32(16); put16(1); put16(2); put32(8000); put32(8000 * 4); put16(4); put16(16);
  out.write("data", 4); put32(8);
  put16(16384); put16(0); put16(static_cast<std::uint16_t>(-32768)); put16(static_cast<std::uint16_t>(-32768));
  out.close();
  const AudioClip pcm = load_wav(dir / "pcm.wav");
  CHECK(pcm.sample_rate == 8000);
  REQUIRE(pcm.size() == 2);
  CHECK(pcm.samples[0] == 0.25);
  CHECK(pcm.samples[1] == -1.0);

  std::ofstream(dir / "junk.wav") << "not audio";
  CHECK_THROWS_AS((void)load_wav(dir / "junk.wav"), InputError);
}

TEST_CASE("resolve_audio") {
  Dataset dataset;
  dataset.objects = {"dog", "cat"};
  const EvalItem item{"a", SyntheticAudio{{"cat"}}, "q", Label::yes};
  CHECK(resolve_audio(dataset, item) == encode_presence(dataset.objects, {"cat"}));
  const EvalItem unknown{"b", SyntheticAudio{{"emu"}}, "q", Label::yes};
  CHECK_THROWS_AS((void)resolve_audio(dataset, unknown), InputError);
  dataset.objects.clear();
  CHECK_THROWS_AS((void)resolve_audio(dataset, item), InputError);
}

TEST_CASE("report writers") {
  SweepReport sweep;
  sweep.dataset_name = "demo";
  EvalReport r;
  r.accuracy = 0.75;
  r.precision = 1.0;
  r.recall = 0.5;
  r.f1 = 2.0 / 3.0;
  r.yes_rate = 0.75;
  sweep.rows.push_back({0.5, "Focus, please", r, {}});
  sweep.rows.push_back({2.0, "", std::nullopt, "boom"});

  std::ostringstream csv;
  write_csv(sweep, csv);
  CHECK(csv.str() ==
        "alpha,prefix,acc,precision,recall,f1,yes_rate,unparseable_rate\n"
        "0.5,\"Focus, please\",0.750000,1.000000,0.500000,0.666667,0.750000,0.000000\n"
        "2,,,,,,,\n");

  std::ostringstream md;
  write_markdown(sweep, md);
  CHECK(md.str().find("| 0.5 | Focus, please | 0.750 | 0.667 |") != std::string::npos);
  CHECK(md.str().find("(none)") != std::string::npos);
  CHECK(md.str().find("Acc 0.500 / F1 0.500") != std::string::npos);
}
