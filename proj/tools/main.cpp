// tools/main.cpp

// Copyright 2026  The emocascade authors

// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// THIS CODE IS PROVIDED *AS IS* BASIS, WITHOUT WARRANTIES OR CONDITIONS OF ANY
// KIND, EITHER EXPRESS OR IMPLIED, INCLUDING WITHOUT LIMITATION ANY IMPLIED
// WARRANTIES OR CONDITIONS OF TITLE, FITNESS FOR A PARTICULAR PURPOSE,
// MERCHANTABILITY OR NON-INFRINGEMENT.
// See the Apache 2 License for the specific language governing permissions and
// limitations under the License.

#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "emocascade/commands.hpp"

namespace {

using emocascade::ApplyConfigFile;
using emocascade::CascadeMode;
using emocascade::Error;
using emocascade::ModeFromLabel;
using emocascade::RunConfig;
using emocascade::SyntheticSpec;

uint64_t ParseSeedText(const std::string &text) {
  if (text.empty()) throw Error("seed value is empty");
  size_t consumed = 0;
  uint64_t value = 0;
  try {
    value = std::stoull(text, &consumed, 10);
  } catch (const std::exception &) {
    throw Error("cannot parse seed value: " + text);
  }
  if (consumed != text.size()) {
    throw Error("cannot parse seed value: " + text);
  }
  return value;
}

// Options shared by the train/evaluate/ablate/alpha-sweep subcommands,
// together with the CLI option handles needed to apply the precedence
// flag > config file > EMOCASCADE_SEED > default.
struct CommonFlags {
  std::string config_path;
  std::string corpus;
  std::string registry;
  std::string out;
  std::string mode_label = "three-stage";
  double alpha = 0.5;
  uint64_t seed = 42;
  int claimants = 17;
  int jobs = 1;
  int n_states = 6;
  int n_mix = 10;
  int n_emotion_mix = 0;
  int n_speaker_mix = 0;
  int n_supra_mix = 3;
  int max_iters = 20;
  bool adapt_threshold = false;
  int adapt_window = 50;
  std::vector<double> alphas;

  CLI::Option *corpus_opt = nullptr;
  CLI::Option *registry_opt = nullptr;
  CLI::Option *out_opt = nullptr;
  CLI::Option *mode_opt = nullptr;
  CLI::Option *alpha_opt = nullptr;
  CLI::Option *seed_opt = nullptr;
  CLI::Option *claimants_opt = nullptr;
  CLI::Option *jobs_opt = nullptr;
  CLI::Option *n_states_opt = nullptr;
  CLI::Option *n_mix_opt = nullptr;
  CLI::Option *n_emotion_mix_opt = nullptr;
  CLI::Option *n_speaker_mix_opt = nullptr;
  CLI::Option *n_supra_mix_opt = nullptr;
  CLI::Option *max_iters_opt = nullptr;
  CLI::Option *adapt_threshold_opt = nullptr;
  CLI::Option *adapt_window_opt = nullptr;
  CLI::Option *alphas_opt = nullptr;
};

void AddCommonOptions(CLI::App *cmd, CommonFlags &f, bool with_out,
                      bool with_mode, bool with_training, bool with_adapt,
                      bool with_alphas) {
  cmd->add_option("--config", f.config_path,
                  "JSON config file; flags override its values");
  f.corpus_opt = cmd->add_option("--corpus", f.corpus,
                                 "corpus directory (holds manifest.tsv)");
  f.registry_opt = cmd->add_option("--registry", f.registry,
                                   "registry directory (holds registry.json)");
  if (with_out) {
    f.out_opt = cmd->add_option("--out", f.out, "output directory");
  }
  if (with_mode) {
    std::vector<std::string> labels;
    for (CascadeMode mode : emocascade::kAllCascadeModes) {
      labels.push_back(ToLabel(mode));
    }
    f.mode_opt = cmd->add_option("--mode", f.mode_label, "cascade mode")
                     ->check(CLI::IsMember(labels));
  }
  f.alpha_opt = cmd->add_option("--alpha", f.alpha, "fusion weight")
                    ->check(CLI::Range(0.0, 1.0));
  f.seed_opt = cmd->add_option("--seed", f.seed, "random seed");
  f.jobs_opt = cmd->add_option("--jobs", f.jobs, "parallel worker count")
                   ->check(CLI::Range(1, 1024));
  if (with_training) {
    f.claimants_opt =
        cmd->add_option("--claimants-per-gender", f.claimants,
                        "enrolled claimants per gender")
            ->check(CLI::Range(1, 99));
    f.n_states_opt = cmd->add_option("--n-states", f.n_states,
                                     "states per acoustic model")
                         ->check(CLI::Range(1, 64));
    f.n_mix_opt = cmd->add_option("--n-mix", f.n_mix,
                                  "mixture components per state")
                      ->check(CLI::Range(1, 64));
    f.n_emotion_mix_opt =
        cmd->add_option("--n-emotion-mix", f.n_emotion_mix,
                        "mixture components per emotion-model state "
                        "(0 follows --n-mix)")
            ->check(CLI::Range(0, 64));
    f.n_speaker_mix_opt =
        cmd->add_option("--n-speaker-mix", f.n_speaker_mix,
                        "mixture components per claimant-model state "
                        "(0 follows --n-mix)")
            ->check(CLI::Range(0, 64));
    f.n_supra_mix_opt =
        cmd->add_option("--n-supra-mix", f.n_supra_mix,
                        "mixture components per suprasegmental state")
            ->check(CLI::Range(1, 64));
    f.max_iters_opt = cmd->add_option("--max-iters", f.max_iters,
                                      "training iteration cap")
                          ->check(CLI::Range(1, 1000));
  }
  if (with_adapt) {
    f.adapt_threshold_opt =
        cmd->add_flag("--adapt-threshold", f.adapt_threshold,
                      "track the decision threshold over recent scores");
    f.adapt_window_opt = cmd->add_option("--adapt-window", f.adapt_window,
                                         "adaptation window size")
                             ->check(CLI::Range(1, 100000));
  }
  if (with_alphas) {
    f.alphas_opt = cmd->add_option("--alphas", f.alphas,
                                   "fusion weights to sweep")
                       ->check(CLI::Range(0.0, 1.0));
  }
}

// Defaults, then config file, then EMOCASCADE_SEED (when neither flag nor
// file set a seed), then explicit flags.
RunConfig BuildRunConfig(const CommonFlags &f) {
  RunConfig config;
  bool seed_in_file = false;
  if (!f.config_path.empty()) {
    ApplyConfigFile(config, f.config_path, &seed_in_file);
  }
  const bool seed_from_flag = f.seed_opt && f.seed_opt->count() > 0;
  if (!seed_from_flag && !seed_in_file) {
    if (const char *env = std::getenv("EMOCASCADE_SEED")) {
      config.seed = ParseSeedText(env);
    }
  }
  if (f.corpus_opt && f.corpus_opt->count()) config.corpus_dir = f.corpus;
  if (f.registry_opt && f.registry_opt->count()) {
    config.registry_dir = f.registry;
  }
  if (f.out_opt && f.out_opt->count()) config.out_dir = f.out;
  if (f.mode_opt && f.mode_opt->count()) {
    config.mode = ModeFromLabel(f.mode_label);
  }
  if (f.alpha_opt && f.alpha_opt->count()) config.alpha = f.alpha;
  if (seed_from_flag) config.seed = f.seed;
  if (f.claimants_opt && f.claimants_opt->count()) {
    config.claimants_per_gender = f.claimants;
  }
  if (f.jobs_opt && f.jobs_opt->count()) config.jobs = f.jobs;
  if (f.n_states_opt && f.n_states_opt->count()) {
    config.n_states = f.n_states;
  }
  if (f.n_mix_opt && f.n_mix_opt->count()) config.n_mix = f.n_mix;
  if (f.n_emotion_mix_opt && f.n_emotion_mix_opt->count()) {
    config.n_emotion_mix = f.n_emotion_mix;
  }
  if (f.n_speaker_mix_opt && f.n_speaker_mix_opt->count()) {
    config.n_speaker_mix = f.n_speaker_mix;
  }
  if (f.n_supra_mix_opt && f.n_supra_mix_opt->count()) {
    config.n_supra_mix = f.n_supra_mix;
  }
  if (f.max_iters_opt && f.max_iters_opt->count()) {
    config.training.max_iters = f.max_iters;
  }
  if (f.adapt_threshold_opt && f.adapt_threshold_opt->count()) {
    config.adapt_threshold = f.adapt_threshold;
  }
  if (f.adapt_window_opt && f.adapt_window_opt->count()) {
    config.adapt_window = f.adapt_window;
  }
  if (f.alphas_opt && f.alphas_opt->count()) config.alphas = f.alphas;
  return config;
}

// Missing mandatory paths are usage errors (exit 2), whether the path was
// expected from a flag or from the config file.
bool CheckRequiredPaths(const RunConfig &config, bool needs_corpus,
                        bool needs_registry, bool needs_out) {
  if (needs_corpus && config.corpus_dir.empty()) {
    std::cerr << "error: a corpus directory is required (--corpus or config "
                 "file)\n";
    return false;
  }
  if (needs_registry && config.registry_dir.empty()) {
    std::cerr << "error: a registry directory is required (--registry or "
                 "config file)\n";
    return false;
  }
  if (needs_out && config.out_dir.empty()) {
    std::cerr << "error: an output directory is required (--out or config "
                 "file)\n";
    return false;
  }
  return true;
}

}  // namespace

int main(int argc, char **argv) {
  CLI::App app{"three-stage speaker verification cascade"};
  app.require_subcommand(1);

  // synth
  CLI::App *synth = app.add_subcommand(
      "synth", "generate a seeded synthetic corpus (WAV tree + manifest)");
  SyntheticSpec spec;
  std::string synth_out;
  synth->add_option("--out", synth_out, "corpus output directory")
      ->required();
  CLI::Option *synth_seed_opt =
      synth->add_option("--seed", spec.seed, "random seed");
  synth->add_option("--speakers-per-gender", spec.speakers_per_gender,
                    "speakers per gender")
      ->check(CLI::Range(1, 99));
  synth->add_option("--sentences", spec.sentences, "sentences per speaker")
      ->check(CLI::Range(1, 8));
  synth->add_option("--reps", spec.reps_per_sentence,
                    "repetitions per sentence")
      ->check(CLI::Range(1, 9));
  synth->add_option("--duration", spec.utterance_duration_s,
                    "utterance duration in seconds")
      ->check(CLI::PositiveNumber);
  synth->add_option("--class-separation", spec.class_separation,
                    "gender/emotion class separation scale")
      ->check(CLI::NonNegativeNumber);
  synth->add_option("--emotion-spectral-scale", spec.emotion_spectral_scale,
                    "emotion spectral-envelope separation scale")
      ->check(CLI::NonNegativeNumber);

  // train / evaluate / ablate / alpha-sweep
  CLI::App *train = app.add_subcommand(
      "train", "train the model registry and write the archive");
  CommonFlags train_flags;
  AddCommonOptions(train, train_flags, /*with_out=*/false, /*with_mode=*/false,
                   /*with_training=*/true, /*with_adapt=*/false,
                   /*with_alphas=*/false);

  CLI::App *evaluate = app.add_subcommand(
      "evaluate", "score the test split and write reports");
  CommonFlags eval_flags;
  AddCommonOptions(evaluate, eval_flags, /*with_out=*/true, /*with_mode=*/true,
                   /*with_training=*/false, /*with_adapt=*/true,
                   /*with_alphas=*/false);

  CLI::App *ablate = app.add_subcommand(
      "ablate", "compare every cascade mode on the same test split");
  CommonFlags ablate_flags;
  AddCommonOptions(ablate, ablate_flags, /*with_out=*/true,
                   /*with_mode=*/false, /*with_training=*/false,
                   /*with_adapt=*/false, /*with_alphas=*/false);

  CLI::App *sweep = app.add_subcommand(
      "alpha-sweep", "scan fusion weights without retraining");
  CommonFlags sweep_flags;
  AddCommonOptions(sweep, sweep_flags, /*with_out=*/true, /*with_mode=*/false,
                   /*with_training=*/false, /*with_adapt=*/false,
                   /*with_alphas=*/true);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return 2;
  }

  try {
    if (synth->parsed()) {
      if (synth_seed_opt->count() == 0) {
        if (const char *env = std::getenv("EMOCASCADE_SEED")) {
          spec.seed = ParseSeedText(env);
        }
      }
      emocascade::CmdSynth(spec, synth_out, std::cout);
      return 0;
    }
    if (train->parsed()) {
      const RunConfig config = BuildRunConfig(train_flags);
      if (!CheckRequiredPaths(config, true, true, false)) return 2;
      emocascade::CmdTrain(config, std::cout);
      return 0;
    }
    if (evaluate->parsed()) {
      const RunConfig config = BuildRunConfig(eval_flags);
      if (!CheckRequiredPaths(config, true, true, true)) return 2;
      emocascade::CmdEvaluate(config, std::cout);
      return 0;
    }
    if (ablate->parsed()) {
      const RunConfig config = BuildRunConfig(ablate_flags);
      if (!CheckRequiredPaths(config, true, true, true)) return 2;
      emocascade::CmdAblate(config, std::cout);
      return 0;
    }
    if (sweep->parsed()) {
      const RunConfig config = BuildRunConfig(sweep_flags);
      if (!CheckRequiredPaths(config, true, true, true)) return 2;
      emocascade::CmdAlphaSweep(config, std::cout);
      return 0;
    }
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  std::cerr << "error: no subcommand selected\n";
  return 2;
}
