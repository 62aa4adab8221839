// SPDX-License-Identifier: Apache-2.0
#include "cli.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <memory>
#include <optional>
#include <sstream>
#include <thread>

#include <CLI11.hpp>

#include "aad/decoder.hpp"
#include "aad/harness.hpp"
#include "aad/io.hpp"
#include "aad/remote_provider.hpp"
#include "aad/toy_provider.hpp"

namespace aad::cli {

namespace {

/// A bad flag value detected after parsing; maps to the usage exit code.
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct ProviderFlags {
  std::string provider = "toy";
  std::string endpoint;
  double toy_bias = 1.0;
  double toy_strength = 0.6;
  bool toy_verbose = false;
};

struct DecodingFlags {
  double alpha = 1.0;
  std::string prefix{kFocusPrompt};
  std::uint64_t seed = 0;
  std::size_t max_tokens = 64;
  std::string sampling = "greedy";
  double temperature = 1.0;
};

void add_provider_flags(CLI::App& cmd, ProviderFlags& flags) {
  cmd.add_option("--provider", flags.provider, "Logit provider")
      ->check(CLI::IsMember({"toy", "remote"}))
      ->capture_default_str();
  cmd.add_option("--endpoint", flags.endpoint,
                 "Remote provider base URL (falls back to $AAD_ENDPOINT)");
  cmd.add_option("--toy-bias", flags.toy_bias, "Toy model yes-bias b")->capture_default_str();
  cmd.add_option("--toy-strength", flags.toy_strength, "Toy model evidence strength s")
      ->capture_default_str();
  cmd.add_flag("--toy-verbose", flags.toy_verbose, "Toy model answers in a full sentence");
}

void add_decoding_flags(CLI::App& cmd, DecodingFlags& flags, bool with_alpha_and_prefix) {
  if (with_alpha_and_prefix) {
    cmd.add_option("--alpha", flags.alpha, "Contrastive weight alpha (>= 0)")->capture_default_str();
    cmd.add_option("--prefix", flags.prefix, "Prefix prompt (\"\" for none)")->capture_default_str();
  }
  cmd.add_option("--seed", flags.seed, "Seed for all randomness")->capture_default_str();
  cmd.add_option("--max-tokens", flags.max_tokens, "Generation budget per answer")
      ->capture_default_str();
  cmd.add_option("--sampling", flags.sampling, "Token selection")
      ->check(CLI::IsMember({"greedy", "sampled"}))
      ->capture_default_str();
  cmd.add_option("--temperature", flags.temperature, "Temperature for --sampling sampled")
      ->capture_default_str();
}

DecodingConfig make_config(const DecodingFlags& flags) {
  DecodingConfig config;
  config.alpha = flags.alpha;
  config.prefix_prompt = flags.prefix;
  config.max_new_tokens = flags.max_tokens;
  if (flags.sampling == "sampled") {
    config.strategy = Sampled{flags.seed, flags.temperature};
  }
  try {
    config.validate();
  } catch (const ConfigError& e) {
    throw UsageError(std::string("invalid configuration: ") + e.what());
  }
  return config;
}

std::string resolve_endpoint(const ProviderFlags& flags) {
  if (!flags.endpoint.empty()) {
    return flags.endpoint;
  }
  if (const char* env = std::getenv("AAD_ENDPOINT"); env != nullptr && *env != '\0') {
    return env;
  }
  throw UsageError("--provider remote needs --endpoint or AAD_ENDPOINT");
}

std::unique_ptr<LogitProvider> make_provider(const ProviderFlags& flags,
                                             const std::vector<std::string>& objects) {
  if (flags.provider == "remote") {
    return std::make_unique<RemoteProvider>(RemoteProvider::connect(resolve_endpoint(flags)));
  }
  if (objects.empty()) {
    throw InputError("the toy provider needs an object universe (dataset sidecar \"objects\")");
  }
  ToyWorld world = ToyWorld::with_objects(objects);
  world.yes_bias = flags.toy_bias;
  world.evidence_strength = flags.toy_strength;
  world.verbose = flags.toy_verbose;
  return std::make_unique<ToyProvider>(std::move(world));
}

std::vector<std::string> inventory_objects() {
  const auto names = object_inventory();
  return {names.begin(), names.end()};
}

std::size_t resolve_jobs(std::size_t jobs) {
  return jobs == 0 ? std::max(1u, std::thread::hardware_concurrency()) : jobs;
}

void print_failures(const SweepReport& sweep, std::ostream& err) {
  for (const auto& row : sweep.rows) {
    if (!row.report) {
      err << "error: alpha=" << row.alpha << " prefix=\"" << row.prefix << "\": " << row.error << '\n';
      continue;
    }
    for (const auto& failure : row.report->failures) {
      err << "warning: item " << failure.id << " failed: " << failure.message << '\n';
    }
  }
}

void write_report_file(const SweepReport& sweep, const std::string& path) {
  if (path.empty()) {
    return;
  }
  std::ofstream file(path, std::ios::binary);
  if (!file) {
    throw InputError("cannot write report " + path);
  }
  write_csv(sweep, file);
}

AudioClip load_generate_audio(const std::string& source, const std::vector<std::string>& objects) {
  constexpr std::string_view kSynthetic = "synthetic:";
  if (source.rfind(kSynthetic, 0) == 0) {
    ObjectSet present;
    std::stringstream names(source.substr(kSynthetic.size()));
    for (std::string name; std::getline(names, name, ',');) {
      if (name.empty()) continue;
      if (std::find(objects.begin(), objects.end(), name) == objects.end()) {
        throw UsageError("unknown synthetic object \"" + name + "\"");
      }
      present.insert(name);
    }
    return encode_presence(objects, present);
  }
  return load_wav(source);
}

// ---------------------------------------------------------------------------

struct GenerateArgs {
  ProviderFlags provider;
  DecodingFlags decoding;
  std::string audio;
  std::string question;
  bool show_steps = false;
};

int run_generate(const GenerateArgs& args, std::ostream& out) {
  DecodingConfig config = make_config(args.decoding);
  config.record_steps = args.show_steps;
  const auto objects = inventory_objects();
  const auto provider = make_provider(args.provider, objects);
  const AudioClip audio = load_generate_audio(args.audio, objects);
  const GenerationResult result = generate(*provider, audio, args.question, config);

  out << result.text << '\n';
  if (args.show_steps) {
    const auto& tokens = provider->descriptor().tokens;
    out << "\n| step | token | p(token) | with-audio logit | blank-audio logit |\n"
        << "|---:|---|---:|---:|---:|\n";
    for (const auto& step : result.steps) {
      const auto id = step.chosen_token;
      const std::string name = static_cast<std::size_t>(id) < tokens.size()
                                   ? tokens[static_cast<std::size_t>(id)]
                                   : std::to_string(id);
      char row[160];
      std::snprintf(row, sizeof row, "| %zu | %s | %.6f | %.4f | %.4f |\n", step.step_index,
                    name.c_str(), step.aad_distribution[id], step.with_audio_logits[id],
                    step.without_audio_logits[id]);
      out << row;
    }
    out << "\nstop: " << to_string(result.stop_reason) << ", tokens: " << result.tokens.size()
        << '\n';
  }
  return kExitOk;
}

struct EvalArgs {
  ProviderFlags provider;
  DecodingFlags decoding;
  std::string dataset;
  std::string report;
  std::size_t jobs = 0;
  // sweep only
  std::vector<double> alphas{0.0, 0.5, 1.0, 1.5, 2.0};
  std::vector<std::string> prefixes;
};

int run_sweep(const EvalArgs& args, std::span<const double> alphas,
              std::span<const std::string> prefixes, std::ostream& out, std::ostream& err) {
  for (const double alpha : alphas) {
    if (!std::isfinite(alpha) || alpha < 0.0) {
      throw UsageError("alpha must be >= 0, got " + std::to_string(alpha));
    }
  }
  DecodingConfig config = make_config(args.decoding);
  config.record_steps = args.provider.provider == "toy";
  const Dataset dataset = load_dataset(args.dataset);
  const auto provider = make_provider(args.provider, dataset.objects);

  RunOptions options;
  options.jobs = resolve_jobs(args.jobs);
  const SweepReport sweep = sweep_alpha(dataset, *provider, alphas, prefixes, config, options);

  write_report_file(sweep, args.report);
  write_markdown(sweep, out);
  print_failures(sweep, err);
  return sweep.all_succeeded() ? kExitOk : kExitRunError;
}

void add_eval_flags(CLI::App& cmd, EvalArgs& args) {
  cmd.add_option("--dataset", args.dataset, "Dataset (JSON lines)")->required();
  cmd.add_option("--report", args.report, "CSV report output path");
  cmd.add_option("--jobs", args.jobs, "Worker threads (0 = all processors)")->capture_default_str();
  add_provider_flags(cmd, args.provider);
}

struct SynthArgs {
  std::size_t objects = 6;
  std::size_t items = 200;
  std::string strategy = "random";
  std::uint64_t seed = 0;
  std::string out;
};

int run_synth(const SynthArgs& args, std::ostream& out) {
  if (args.objects < 2) {
    throw UsageError("--objects must be >= 2");
  }
  if (args.items == 0 || args.items % 2 != 0) {
    throw UsageError("--items must be a positive even number");
  }
  const ToyWorld world = random_world(args.objects, args.seed);
  Dataset dataset = build_benchmark(world, args.items, sampling_kind_from_string(args.strategy),
                                    args.seed);
  save_dataset(dataset, args.out);
  out << "wrote " << dataset.items.size() << " items (" << args.strategy << ", "
      << args.objects << " objects) to " << args.out << '\n';
  return kExitOk;
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Audio-aware contrastive decoding and hallucination evaluation", "aad"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* generate_cmd = app.add_subcommand("generate", "Answer one question about one clip");
  add_provider_flags(*generate_cmd, gen.provider);
  add_decoding_flags(*generate_cmd, gen.decoding, true);
  generate_cmd->add_option("--audio", gen.audio, "WAV path, or synthetic:obj1,obj2 for the toy")
      ->required();
  generate_cmd->add_option("--question", gen.question, "Question text")->required();
  generate_cmd->add_flag("--steps", gen.show_steps, "Print a per-step table");

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("eval", "Evaluate one configuration on a dataset");
  add_eval_flags(*eval_cmd, eval);
  add_decoding_flags(*eval_cmd, eval.decoding, true);

  EvalArgs sweep;
  auto* sweep_cmd = app.add_subcommand("sweep", "Evaluate every (alpha, prefix) combination");
  add_eval_flags(*sweep_cmd, sweep);
  add_decoding_flags(*sweep_cmd, sweep.decoding, false);
  sweep_cmd->add_option("--alphas", sweep.alphas, "Comma-separated alphas")
      ->delimiter(',')
      ->capture_default_str();
  sweep_cmd->add_option("--prefix", sweep.prefixes, "Prefix prompt variant (repeatable)");

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("synth", "Write a synthetic balanced benchmark");
  synth_cmd->add_option("--objects", synth.objects, "Number of objects in the world")
      ->capture_default_str();
  synth_cmd->add_option("--items", synth.items, "Number of questions (even)")->capture_default_str();
  synth_cmd->add_option("--strategy", synth.strategy, "Absent-object sampling")
      ->check(CLI::IsMember({"random", "adversarial", "popular"}))
      ->capture_default_str();
  synth_cmd->add_option("--seed", synth.seed, "Seed")->capture_default_str();
  synth_cmd->add_option("--out", synth.out, "Output dataset path (.jsonl)")->required();

  std::vector<const char*> argv{"aad"};
  for (const auto& arg : args) {
    argv.push_back(arg.c_str());
  }
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help("", CLI::AppFormatMode::All);
    return kExitUsage;
  }

  try {
    if (generate_cmd->parsed()) {
      return run_generate(gen, out);
    }
    if (eval_cmd->parsed()) {
      const std::vector<double> alphas{eval.decoding.alpha};
      const std::vector<std::string> prefixes{eval.decoding.prefix};
      return run_sweep(eval, alphas, prefixes, out, err);
    }
    if (sweep_cmd->parsed()) {
      std::vector<std::string> prefixes = sweep.prefixes;
      if (prefixes.empty()) {
        prefixes.emplace_back(kFocusPrompt);
      }
      return run_sweep(sweep, sweep.alphas, prefixes, out, err);
    }
    return run_synth(synth, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitRunError;
  }
}

}  // namespace aad::cli
