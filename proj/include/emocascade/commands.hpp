// include/emocascade/commands.hpp

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

#ifndef EMOCASCADE_COMMANDS_HPP_
#define EMOCASCADE_COMMANDS_HPP_

#include <ostream>
#include <string>
#include <vector>

#include "emocascade/cascade.hpp"
#include "emocascade/corpus.hpp"

namespace emocascade {

// One run's worth of settings, shared by the train/evaluate/ablate/sweep
// commands.  A JSON config file mirrors these field names; CLI flags override
// file values.
struct RunConfig {
  FeatureConfig feature;
  TrainingConfig training;  // seed field is driven by `seed` below
  int n_states = 6;
  int n_mix = 10;
  int n_emotion_mix = 0;
  int n_speaker_mix = 0;
  int n_supra_mix = 3;
  double alpha = 0.5;
  CascadeMode mode = CascadeMode::kThreeStage;
  uint64_t seed = 42;
  std::string corpus_dir;
  std::string registry_dir;
  std::string out_dir;
  int claimants_per_gender = 17;
  bool imposter_mean_of_logs = true;
  int jobs = 1;
  bool adapt_threshold = false;
  int adapt_window = 50;
  std::vector<double> alphas = {0.0, 0.1, 0.2, 0.3, 0.4, 0.5,
                                0.6, 0.7, 0.8, 0.9, 1.0};
};

// Reads a JSON config file and overwrites the fields it names.  Unknown keys
// are rejected.  Reports whether the file carried an explicit seed so the
// caller can decide whether an environment fallback applies.
void ApplyConfigFile(RunConfig &config, const std::string &path,
                     bool *seed_in_file = nullptr);

// Throws Error when a field violates its range (alpha outside [0, 1],
// nonpositive sizes, an out-of-range sweep point).
void ValidateRunConfig(const RunConfig &config);

// Path helpers shared by the commands and their tests.
std::string RegistryArchivePath(const std::string &registry_dir);
std::string ManifestPath(const std::string &corpus_dir);

// Generates a synthetic corpus under out_dir (WAV tree plus manifest.tsv).
void CmdSynth(const SyntheticSpec &spec, const std::string &out_dir,
              std::ostream &log);

// Trains the full model registry from the corpus Train split and writes the
// archive under the registry directory, logging each model's final training
// log-likelihood.
void CmdTrain(const RunConfig &config, std::ostream &log);

// Scores the corpus Test split in the configured mode and writes report.txt,
// eer_by_emotion.csv, det.csv, trials.tsv and (when the emotion stage ran)
// per-gender confusion CSVs into the output directory.
void CmdEvaluate(const RunConfig &config, std::ostream &log);

// Runs every cascade mode over the same Test split and writes a comparative
// report: per-mode mean equal error rates and the Welch t statistic for each
// mode pair.
void CmdAblate(const RunConfig &config, std::ostream &log);

// Re-scores the emotion stage at each fusion weight in config.alphas without
// retraining and writes alpha_sweep.csv (one row per weight).
void CmdAlphaSweep(const RunConfig &config, std::ostream &log);

}  // namespace emocascade

#endif  // EMOCASCADE_COMMANDS_HPP_
