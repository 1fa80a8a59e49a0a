// include/emocascade/cascade.hpp

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

#ifndef EMOCASCADE_CASCADE_HPP_
#define EMOCASCADE_CASCADE_HPP_

#include <array>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "emocascade/common.hpp"
#include "emocascade/corpus.hpp"
#include "emocascade/features.hpp"
#include "emocascade/hmm.hpp"
#include "emocascade/sphmm.hpp"

namespace emocascade {

struct UnknownClaimant : Error {
  using Error::Error;
};
struct MissingModel : Error {
  using Error::Error;
};
struct IncompleteRegistry : Error {
  using Error::Error;
};
struct InsufficientData : Error {
  using Error::Error;
};
struct EmptyWindow : Error {
  using Error::Error;
};

// Pipeline variants.  ThreeStage runs gender identification, fused emotion
// identification, then verification.  OneStage skips both identification
// stages and scores pooled per-claimant models against a claimant cohort.
// TwoStageGender keeps the gender stage but uses pooled (emotion-independent)
// speaker models; TwoStageEmotion keeps the emotion stage but uses
// gender-independent emotion models.  ThreeStageAllHmm replaces the fused
// emotion stage with its acoustic-only limit.  WorstCase forces a wrong
// gender and a wrong emotion into the verification stage for every trial.
enum class CascadeMode {
  kThreeStage,
  kOneStage,
  kTwoStageGender,
  kTwoStageEmotion,
  kThreeStageAllHmm,
  kWorstCase,
};

inline constexpr int kNumCascadeModes = 6;
inline constexpr std::array<CascadeMode, kNumCascadeModes> kAllCascadeModes = {
    CascadeMode::kThreeStage,       CascadeMode::kOneStage,
    CascadeMode::kTwoStageGender,   CascadeMode::kTwoStageEmotion,
    CascadeMode::kThreeStageAllHmm, CascadeMode::kWorstCase,
};

std::string ToLabel(CascadeMode mode);
CascadeMode ModeFromLabel(const std::string &label);

// Acoustic and prosodic halves of one emotion class model.
struct EmotionModelPair {
  HmmModel acoustic;
  SuprasegmentalModel supra;
  bool operator==(const EmotionModelPair &other) const = default;
};

// Everything the pipeline needs at evaluation time: the trained model banks,
// the fusion weight, the decision threshold, and the configs the models were
// trained under (so an evaluation run can refuse mismatched features).
struct ModelRegistry {
  FeatureConfig feature_config;
  TrainingConfig training_config;
  int n_states = 6;
  int n_mix = 10;
  int n_emotion_mix = 10;
  int n_speaker_mix = 10;
  int n_supra_mix = 3;
  double alpha = 0.5;
  double threshold = 0.0;
  bool imposter_mean_of_logs = true;

  // Sorted claimant ids and each claimant's enrolled gender.
  std::vector<std::string> claimants;
  std::map<std::string, Gender> claimant_gender;

  std::map<Gender, HmmModel> gender_models;
  std::map<std::pair<Gender, Emotion>, EmotionModelPair> emotion_models;
  // Per-claimant models trained separately for each emotion.
  std::map<std::pair<std::string, Emotion>, HmmModel> speaker_models;
  // Per-claimant models trained on all emotions pooled.
  std::map<std::string, HmmModel> pooled_speaker_models;
  // Emotion models trained on both genders pooled.
  std::map<Emotion, EmotionModelPair> gi_emotion_models;

  bool operator==(const ModelRegistry &other) const = default;
};

// Throws IncompleteRegistry when the registry lacks a model bank the given
// mode consults.
void ValidateRegistry(const ModelRegistry &registry, CascadeMode mode);

struct GenderIdResult {
  Gender gender = Gender::kMale;
  std::array<double, kNumGenders> log_scores{};
};

// Argmax of the utterance log-likelihood under the two gender models.
// Ties resolve to Male.
GenderIdResult IdentifyGender(const ModelRegistry &registry,
                              const ObservationSequence &obs);

struct EmotionIdResult {
  Emotion emotion = Emotion::kNeutral;
  std::array<double, kNumEmotions> fused_scores{};
};

// Argmax over the identified gender's emotion models of the fused
// (1 - alpha) * acoustic + alpha * prosodic per-frame score, using the
// registry's fusion weight.  Ties resolve to the earliest emotion in the
// canonical list order.
EmotionIdResult IdentifyEmotion(const ModelRegistry &registry, Gender g_star,
                                const ObservationSequence &obs,
                                const ProsodicSequence &prosodic);

// Verification score for a claimed speaker given the identified gender and
// emotion:
//   term1 = per-frame average log-likelihood of the claimed speaker's model
//           for the identified emotion;
//   term2 = aggregate of the claimed speaker's own models under the five
//           other emotions;
//   term3 = the same aggregate over the cohort of claimants whose gender is
//           opposite to the identified gender (the claimed speaker excluded);
//   score = term1 - term2 - term3.
// The aggregate is the arithmetic mean of the five log scores, or the log of
// the mean probability when the registry disables imposter_mean_of_logs.
double VerifyScore(const ModelRegistry &registry, Gender g_star,
                   Emotion e_star, const std::string &claimed_speaker,
                   const ObservationSequence &obs);

// Accept iff score >= threshold.
Decision Decide(double score, double threshold);

// Arithmetic mean of a window of recent trial scores.
double AdaptThreshold(const std::vector<double> &recent_scores);

struct TrialResult {
  std::string claimed_speaker;
  std::string true_speaker;
  std::optional<Gender> identified_gender;
  std::optional<Emotion> identified_emotion;
  Gender true_gender = Gender::kMale;
  Emotion true_emotion = Emotion::kNeutral;
  double score = 0.0;
  Decision decision = Decision::kReject;
  bool is_target_trial = false;
};

inline constexpr const char *kTrialTsvHeader =
    "claimed_speaker\ttrue_speaker\tidentified_gender\tidentified_emotion\t"
    "true_gender\ttrue_emotion\tscore\tdecision\tis_target_trial";

// One tab-separated line, fields in declaration order; skipped stages print
// "-", the score prints with 17 significant digits, is_target_trial as 0/1.
std::string ToTsvLine(const TrialResult &trial);

// Per-utterance stage outputs (one row per test utterance, before the
// per-claimant trial expansion).
struct UtteranceOutcome {
  std::string utterance_id;
  Gender true_gender = Gender::kMale;
  Emotion true_emotion = Emotion::kNeutral;
  std::optional<Gender> identified_gender;
  std::optional<Emotion> identified_emotion;
};

struct RunOutput {
  std::vector<TrialResult> trials;
  std::vector<UtteranceOutcome> outcomes;
};

// Scores a fixed set of test utterances against a trained registry.  The
// constructor extracts features and evaluates every model bank any of the
// requested modes consults; Run then assembles trials for one mode without
// touching audio again, so mode ablations and fusion-weight sweeps reuse the
// same per-utterance score tables.  Trials appear in manifest order, each
// utterance paired with every claimant in sorted order.
class CascadeRunner {
 public:
  CascadeRunner(const ModelRegistry &registry,
                const std::vector<UtteranceRecord> &test_records,
                const std::vector<CascadeMode> &modes, int jobs = 1);

  // Runs one mode with the registry's fusion weight.
  RunOutput Run(CascadeMode mode) const;
  // Runs one mode with an explicit fusion weight for the emotion stage.
  RunOutput Run(CascadeMode mode, double alpha) const;

  const std::vector<UtteranceRecord> &Records() const { return records_; }

 private:
  struct UtteranceScores {
    std::array<double, kNumGenders> gender_ll{};
    std::array<std::array<double, kNumEmotions>, kNumGenders> emotion_ac{};
    std::array<std::array<double, kNumEmotions>, kNumGenders> emotion_pr{};
    std::array<double, kNumEmotions> gi_emotion_ac{};
    std::array<double, kNumEmotions> gi_emotion_pr{};
    Matrix speaker_avg_ll;        // claimant index x emotion
    std::vector<double> pooled_avg_ll;  // per claimant index
  };

  double CohortAverage(const UtteranceScores &scores, int emotion_idx,
                       std::optional<Gender> cohort_gender,
                       int exclude_claimant) const;

  const ModelRegistry &registry_;
  std::vector<UtteranceRecord> records_;
  std::vector<UtteranceScores> scores_;
  std::vector<Gender> claimant_genders_;  // by claimant index
  bool need_gender_ = false;
  bool need_gd_emotion_ = false;
  bool need_gi_emotion_ = false;
  bool need_speaker_ = false;
  bool need_pooled_ = false;
};

// Convenience wrapper: builds a runner for one mode and returns its trials.
std::vector<TrialResult> RunCascade(const ModelRegistry &registry,
                                    const CorpusManifest &manifest,
                                    CascadeMode mode, int jobs = 1);

// Knobs for training a registry from a manifest's Train split.
struct RegistryConfig {
  FeatureConfig feature;
  TrainingConfig training;
  int n_states = 6;
  int n_mix = 10;
  // Mixture count for the shared gender-dependent and gender-independent
  // emotion models; 0 means follow n_mix.
  int n_emotion_mix = 0;
  // Mixture count for the per-claimant per-emotion models; 0 follows n_mix.
  int n_speaker_mix = 0;
  int n_supra_mix = 3;
  double alpha = 0.5;
  bool imposter_mean_of_logs = true;
  int claimants_per_gender = 17;
  int jobs = 1;
};

// Trains every model bank (gender, gender-dependent emotion, per-emotion
// speaker, pooled speaker, gender-independent emotion) on the Train split,
// holding out the highest repetition index as a development slice, then
// calibrates the decision threshold at the equal error rate of the full
// pipeline on that slice.  Deterministic for a fixed manifest and config.
// When final_lls is given it receives one (model key, final training
// log-likelihood) entry per model in a fixed order.
ModelRegistry TrainRegistry(
    const CorpusManifest &manifest, const RegistryConfig &config,
    std::vector<std::pair<std::string, double>> *final_lls = nullptr);

}  // namespace emocascade

#endif  // EMOCASCADE_CASCADE_HPP_
