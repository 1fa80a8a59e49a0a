// src/cascade.cpp

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

#include "emocascade/cascade.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <set>

#include "emocascade/eval.hpp"
#include "emocascade/parallel.hpp"

namespace emocascade {
namespace {

constexpr int kNumImposterEmotions = kNumEmotions - 1;

Gender Opposite(Gender g) {
  return g == Gender::kMale ? Gender::kFemale : Gender::kMale;
}

Emotion NextEmotion(Emotion e) {
  return kAllEmotions[(static_cast<size_t>(e) + 1) % kNumEmotions];
}

// First index with the strictly largest value, so earlier entries win ties.
template <size_t N>
int ArgmaxIndex(const std::array<double, N> &values) {
  int best = 0;
  for (size_t i = 1; i < N; ++i) {
    if (values[i] > values[best]) best = static_cast<int>(i);
  }
  return best;
}

// Combines the five imposter-emotion log scores: their arithmetic mean, or
// the log of the mean probability when mean_of_logs is disabled.
double AggregateImposter(std::span<const double> logs, bool mean_of_logs) {
  if (mean_of_logs) {
    double sum = 0.0;
    for (double v : logs) sum += v;
    return sum / static_cast<double>(logs.size());
  }
  return LogSumExp(logs) - std::log(static_cast<double>(logs.size()));
}

std::string FormatScore(double value) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", value);
  return buf;
}

}  // namespace

std::string ToLabel(CascadeMode mode) {
  switch (mode) {
    case CascadeMode::kThreeStage:
      return "three-stage";
    case CascadeMode::kOneStage:
      return "one-stage";
    case CascadeMode::kTwoStageGender:
      return "two-stage-gender";
    case CascadeMode::kTwoStageEmotion:
      return "two-stage-emotion";
    case CascadeMode::kThreeStageAllHmm:
      return "three-stage-all-hmm";
    case CascadeMode::kWorstCase:
      return "worst-case";
  }
  throw Error("invalid cascade mode value");
}

CascadeMode ModeFromLabel(const std::string &label) {
  for (CascadeMode mode : kAllCascadeModes) {
    if (ToLabel(mode) == label) return mode;
  }
  throw Error("unknown cascade mode: " + label);
}

void ValidateRegistry(const ModelRegistry &registry, CascadeMode mode) {
  const std::string where = "mode " + ToLabel(mode);
  if (registry.claimants.empty()) {
    throw IncompleteRegistry(where + ": registry has no claimants");
  }
  for (const std::string &c : registry.claimants) {
    if (!registry.claimant_gender.count(c)) {
      throw IncompleteRegistry(where + ": no enrolled gender for claimant " +
                               c);
    }
  }

  const bool needs_gender = mode == CascadeMode::kThreeStage ||
                            mode == CascadeMode::kTwoStageGender ||
                            mode == CascadeMode::kThreeStageAllHmm;
  const bool needs_gd_emotion = mode == CascadeMode::kThreeStage ||
                                mode == CascadeMode::kThreeStageAllHmm;
  const bool needs_gi_emotion = mode == CascadeMode::kTwoStageEmotion;
  const bool needs_speaker = mode == CascadeMode::kThreeStage ||
                             mode == CascadeMode::kThreeStageAllHmm ||
                             mode == CascadeMode::kTwoStageEmotion ||
                             mode == CascadeMode::kWorstCase;
  const bool needs_pooled = mode == CascadeMode::kOneStage ||
                            mode == CascadeMode::kTwoStageGender;

  if (needs_gender) {
    for (Gender g : kAllGenders) {
      if (!registry.gender_models.count(g)) {
        throw IncompleteRegistry(where + ": missing gender model " +
                                 ToLabel(g));
      }
    }
  }
  if (needs_gd_emotion) {
    for (Gender g : kAllGenders) {
      for (Emotion e : kAllEmotions) {
        if (!registry.emotion_models.count({g, e})) {
          throw IncompleteRegistry(where + ": missing emotion model " +
                                   ToLabel(g) + "/" + ToLabel(e));
        }
      }
    }
  }
  if (needs_gi_emotion) {
    for (Emotion e : kAllEmotions) {
      if (!registry.gi_emotion_models.count(e)) {
        throw IncompleteRegistry(
            where + ": missing gender-independent emotion model " +
            ToLabel(e));
      }
    }
  }
  if (needs_speaker) {
    for (const std::string &c : registry.claimants) {
      for (Emotion e : kAllEmotions) {
        if (!registry.speaker_models.count({c, e})) {
          throw IncompleteRegistry(where + ": missing speaker model " + c +
                                   "/" + ToLabel(e));
        }
      }
    }
  }
  if (needs_pooled) {
    for (const std::string &c : registry.claimants) {
      if (!registry.pooled_speaker_models.count(c)) {
        throw IncompleteRegistry(where + ": missing pooled speaker model " +
                                 c);
      }
    }
  }
}

GenderIdResult IdentifyGender(const ModelRegistry &registry,
                              const ObservationSequence &obs) {
  GenderIdResult result;
  for (int g = 0; g < kNumGenders; ++g) {
    const auto it = registry.gender_models.find(kAllGenders[g]);
    if (it == registry.gender_models.end()) {
      throw MissingModel("missing gender model " +
                         std::string(ToLabel(kAllGenders[g])));
    }
    result.log_scores[g] = LogForward(it->second, obs);
  }
  result.gender = kAllGenders[ArgmaxIndex(result.log_scores)];
  return result;
}

EmotionIdResult IdentifyEmotion(const ModelRegistry &registry, Gender g_star,
                                const ObservationSequence &obs,
                                const ProsodicSequence &prosodic) {
  EmotionIdResult result;
  for (int e = 0; e < kNumEmotions; ++e) {
    const auto it = registry.emotion_models.find({g_star, kAllEmotions[e]});
    if (it == registry.emotion_models.end()) {
      throw MissingModel("missing emotion model " + std::string(ToLabel(g_star)) +
                         "/" + ToLabel(kAllEmotions[e]));
    }
    const double acoustic = HmmScorer(it->second.acoustic).AvgLogForward(obs);
    const double pros = LogProbSupra(it->second.supra, prosodic);
    result.fused_scores[e] = Fuse(registry.alpha, acoustic, pros);
  }
  result.emotion = kAllEmotions[ArgmaxIndex(result.fused_scores)];
  return result;
}

double VerifyScore(const ModelRegistry &registry, Gender g_star,
                   Emotion e_star, const std::string &claimed_speaker,
                   const ObservationSequence &obs) {
  if (!registry.claimant_gender.count(claimed_speaker)) {
    throw UnknownClaimant("claimed speaker is not enrolled: " +
                          claimed_speaker);
  }
  const auto avg_ll = [&](const std::string &speaker, Emotion e) {
    const auto it = registry.speaker_models.find({speaker, e});
    if (it == registry.speaker_models.end()) {
      throw MissingModel("missing speaker model " + speaker + "/" +
                         ToLabel(e));
    }
    return HmmScorer(it->second).AvgLogForward(obs);
  };

  // Cohort: claimants of the gender opposite the identified one, the claimed
  // speaker excluded; falls back to all other claimants when that set is
  // empty.
  const Gender cohort_gender = Opposite(g_star);
  std::vector<std::string> cohort;
  for (const std::string &c : registry.claimants) {
    if (c == claimed_speaker) continue;
    if (registry.claimant_gender.at(c) == cohort_gender) cohort.push_back(c);
  }
  if (cohort.empty()) {
    for (const std::string &c : registry.claimants) {
      if (c != claimed_speaker) cohort.push_back(c);
    }
  }
  if (cohort.empty()) {
    throw InsufficientData("no cohort claimants available for " +
                           claimed_speaker);
  }

  const double term1 = avg_ll(claimed_speaker, e_star);
  std::vector<double> own;
  std::vector<double> cohort_avgs;
  own.reserve(kNumImposterEmotions);
  cohort_avgs.reserve(kNumImposterEmotions);
  for (Emotion e : kAllEmotions) {
    if (e == e_star) continue;
    own.push_back(avg_ll(claimed_speaker, e));
    double sum = 0.0;
    for (const std::string &c : cohort) sum += avg_ll(c, e);
    cohort_avgs.push_back(sum / static_cast<double>(cohort.size()));
  }
  const double term2 = AggregateImposter(own, registry.imposter_mean_of_logs);
  const double term3 =
      AggregateImposter(cohort_avgs, registry.imposter_mean_of_logs);
  return term1 - term2 - term3;
}

Decision Decide(double score, double threshold) {
  return score >= threshold ? Decision::kAccept : Decision::kReject;
}

double AdaptThreshold(const std::vector<double> &recent_scores) {
  if (recent_scores.empty()) {
    throw EmptyWindow("threshold adaptation window is empty");
  }
  double sum = 0.0;
  for (double s : recent_scores) sum += s;
  return sum / static_cast<double>(recent_scores.size());
}

std::string ToTsvLine(const TrialResult &trial) {
  std::string line = trial.claimed_speaker;
  line += '\t';
  line += trial.true_speaker;
  line += '\t';
  line += trial.identified_gender ? ToLabel(*trial.identified_gender) : "-";
  line += '\t';
  line += trial.identified_emotion ? ToLabel(*trial.identified_emotion) : "-";
  line += '\t';
  line += ToLabel(trial.true_gender);
  line += '\t';
  line += ToLabel(trial.true_emotion);
  line += '\t';
  line += FormatScore(trial.score);
  line += '\t';
  line += ToLabel(trial.decision);
  line += '\t';
  line += trial.is_target_trial ? '1' : '0';
  return line;
}

CascadeRunner::CascadeRunner(const ModelRegistry &registry,
                             const std::vector<UtteranceRecord> &test_records,
                             const std::vector<CascadeMode> &modes, int jobs)
    : registry_(registry), records_(test_records) {
  for (CascadeMode mode : modes) {
    ValidateRegistry(registry, mode);
    switch (mode) {
      case CascadeMode::kThreeStage:
      case CascadeMode::kThreeStageAllHmm:
        need_gender_ = true;
        need_gd_emotion_ = true;
        need_speaker_ = true;
        break;
      case CascadeMode::kTwoStageGender:
        need_gender_ = true;
        need_pooled_ = true;
        break;
      case CascadeMode::kTwoStageEmotion:
        need_gi_emotion_ = true;
        need_speaker_ = true;
        break;
      case CascadeMode::kOneStage:
        need_pooled_ = true;
        break;
      case CascadeMode::kWorstCase:
        need_speaker_ = true;
        break;
    }
  }

  const int n_claimants = static_cast<int>(registry.claimants.size());
  claimant_genders_.reserve(n_claimants);
  for (const std::string &c : registry.claimants) {
    claimant_genders_.push_back(registry.claimant_gender.at(c));
  }

  // Scorers are built once up front; their scoring methods use only local
  // buffers, so worker threads can share them.
  std::vector<std::unique_ptr<HmmScorer>> gender_scorers(kNumGenders);
  std::vector<std::unique_ptr<HmmScorer>> gd_acoustic(kNumGenders *
                                                      kNumEmotions);
  std::vector<std::unique_ptr<SupraScorer>> gd_supra(kNumGenders *
                                                     kNumEmotions);
  std::vector<std::unique_ptr<HmmScorer>> gi_acoustic(kNumEmotions);
  std::vector<std::unique_ptr<SupraScorer>> gi_supra(kNumEmotions);
  std::vector<std::unique_ptr<HmmScorer>> speaker_scorers;
  std::vector<std::unique_ptr<HmmScorer>> pooled_scorers;

  if (need_gender_) {
    for (int g = 0; g < kNumGenders; ++g) {
      gender_scorers[g] = std::make_unique<HmmScorer>(
          registry.gender_models.at(kAllGenders[g]));
    }
  }
  if (need_gd_emotion_) {
    for (int g = 0; g < kNumGenders; ++g) {
      for (int e = 0; e < kNumEmotions; ++e) {
        const EmotionModelPair &pair =
            registry.emotion_models.at({kAllGenders[g], kAllEmotions[e]});
        gd_acoustic[g * kNumEmotions + e] =
            std::make_unique<HmmScorer>(pair.acoustic);
        gd_supra[g * kNumEmotions + e] =
            std::make_unique<SupraScorer>(pair.supra);
      }
    }
  }
  if (need_gi_emotion_) {
    for (int e = 0; e < kNumEmotions; ++e) {
      const EmotionModelPair &pair =
          registry.gi_emotion_models.at(kAllEmotions[e]);
      gi_acoustic[e] = std::make_unique<HmmScorer>(pair.acoustic);
      gi_supra[e] = std::make_unique<SupraScorer>(pair.supra);
    }
  }
  if (need_speaker_) {
    speaker_scorers.resize(static_cast<size_t>(n_claimants) * kNumEmotions);
    for (int ci = 0; ci < n_claimants; ++ci) {
      for (int e = 0; e < kNumEmotions; ++e) {
        speaker_scorers[static_cast<size_t>(ci) * kNumEmotions + e] =
            std::make_unique<HmmScorer>(registry.speaker_models.at(
                {registry.claimants[ci], kAllEmotions[e]}));
      }
    }
  }
  if (need_pooled_) {
    pooled_scorers.resize(n_claimants);
    for (int ci = 0; ci < n_claimants; ++ci) {
      pooled_scorers[ci] = std::make_unique<HmmScorer>(
          registry.pooled_speaker_models.at(registry.claimants[ci]));
    }
  }

  scores_.resize(records_.size());
  ParallelFor(static_cast<int>(records_.size()), jobs, [&](int i) {
    const WavData wav = ReadWav(records_[i].audio_path);
    const ObservationSequence acoustic = ExtractAcoustic(
        wav.samples, wav.sample_rate, registry_.feature_config);
    const ProsodicSequence prosodic = ExtractProsodic(
        wav.samples, wav.sample_rate, registry_.feature_config);
    UtteranceScores &sc = scores_[i];
    if (need_gender_) {
      for (int g = 0; g < kNumGenders; ++g) {
        sc.gender_ll[g] = gender_scorers[g]->LogForward(acoustic);
      }
    }
    if (need_gd_emotion_) {
      for (int g = 0; g < kNumGenders; ++g) {
        for (int e = 0; e < kNumEmotions; ++e) {
          sc.emotion_ac[g][e] =
              gd_acoustic[g * kNumEmotions + e]->AvgLogForward(acoustic);
          sc.emotion_pr[g][e] =
              gd_supra[g * kNumEmotions + e]->LogProb(prosodic);
        }
      }
    }
    if (need_gi_emotion_) {
      for (int e = 0; e < kNumEmotions; ++e) {
        sc.gi_emotion_ac[e] = gi_acoustic[e]->AvgLogForward(acoustic);
        sc.gi_emotion_pr[e] = gi_supra[e]->LogProb(prosodic);
      }
    }
    if (need_speaker_) {
      sc.speaker_avg_ll = Matrix(n_claimants, kNumEmotions, 0.0);
      for (int ci = 0; ci < n_claimants; ++ci) {
        for (int e = 0; e < kNumEmotions; ++e) {
          sc.speaker_avg_ll(ci, e) =
              speaker_scorers[static_cast<size_t>(ci) * kNumEmotions + e]
                  ->AvgLogForward(acoustic);
        }
      }
    }
    if (need_pooled_) {
      sc.pooled_avg_ll.resize(n_claimants);
      for (int ci = 0; ci < n_claimants; ++ci) {
        sc.pooled_avg_ll[ci] = pooled_scorers[ci]->AvgLogForward(acoustic);
      }
    }
  });
}

double CascadeRunner::CohortAverage(const UtteranceScores &scores,
                                    int emotion_idx,
                                    std::optional<Gender> cohort_gender,
                                    int exclude_claimant) const {
  const int n = static_cast<int>(claimant_genders_.size());
  double sum = 0.0;
  int count = 0;
  for (int ci = 0; ci < n; ++ci) {
    if (ci == exclude_claimant) continue;
    if (cohort_gender && claimant_genders_[ci] != *cohort_gender) continue;
    sum += emotion_idx < 0 ? scores.pooled_avg_ll[ci]
                           : scores.speaker_avg_ll(ci, emotion_idx);
    ++count;
  }
  if (count == 0) {
    if (cohort_gender) {
      return CohortAverage(scores, emotion_idx, std::nullopt,
                           exclude_claimant);
    }
    throw InsufficientData("no cohort claimants available");
  }
  return sum / count;
}

RunOutput CascadeRunner::Run(CascadeMode mode) const {
  return Run(mode, registry_.alpha);
}

RunOutput CascadeRunner::Run(CascadeMode mode, double alpha) const {
  ValidateRegistry(registry_, mode);
  const int n_claimants = static_cast<int>(registry_.claimants.size());
  const bool mean_of_logs = registry_.imposter_mean_of_logs;

  RunOutput out;
  out.trials.reserve(records_.size() * n_claimants);
  out.outcomes.reserve(records_.size());

  // Identified-emotion verification score against one claimant: the
  // claimant's model for the identified emotion, minus the aggregate of the
  // claimant's other-emotion models, minus the same aggregate over the
  // cohort averages.
  const auto emotion_dependent_score =
      [&](const UtteranceScores &sc, int ci, int e_star,
          std::optional<Gender> cohort_gender) {
        const double term1 = sc.speaker_avg_ll(ci, e_star);
        std::array<double, kNumImposterEmotions> own{};
        std::array<double, kNumImposterEmotions> cohort{};
        int k = 0;
        for (int e = 0; e < kNumEmotions; ++e) {
          if (e == e_star) continue;
          own[k] = sc.speaker_avg_ll(ci, e);
          cohort[k] = CohortAverage(sc, e, cohort_gender, ci);
          ++k;
        }
        return term1 - AggregateImposter(own, mean_of_logs) -
               AggregateImposter(cohort, mean_of_logs);
      };

  for (size_t i = 0; i < records_.size(); ++i) {
    const UtteranceRecord &rec = records_[i];
    const UtteranceScores &sc = scores_[i];

    std::optional<Gender> g_star;
    std::optional<Emotion> e_star;
    switch (mode) {
      case CascadeMode::kThreeStage:
      case CascadeMode::kThreeStageAllHmm: {
        g_star = kAllGenders[ArgmaxIndex(sc.gender_ll)];
        const double a = mode == CascadeMode::kThreeStageAllHmm ? 0.0 : alpha;
        const int gi = static_cast<int>(*g_star);
        std::array<double, kNumEmotions> fused{};
        for (int e = 0; e < kNumEmotions; ++e) {
          fused[e] = Fuse(a, sc.emotion_ac[gi][e], sc.emotion_pr[gi][e]);
        }
        e_star = kAllEmotions[ArgmaxIndex(fused)];
        break;
      }
      case CascadeMode::kTwoStageGender:
        g_star = kAllGenders[ArgmaxIndex(sc.gender_ll)];
        break;
      case CascadeMode::kTwoStageEmotion: {
        std::array<double, kNumEmotions> fused{};
        for (int e = 0; e < kNumEmotions; ++e) {
          fused[e] = Fuse(alpha, sc.gi_emotion_ac[e], sc.gi_emotion_pr[e]);
        }
        e_star = kAllEmotions[ArgmaxIndex(fused)];
        break;
      }
      case CascadeMode::kOneStage:
        break;
      case CascadeMode::kWorstCase:
        g_star = Opposite(rec.gender);
        e_star = NextEmotion(rec.emotion);
        break;
    }
    out.outcomes.push_back(
        {rec.utterance_id, rec.gender, rec.emotion, g_star, e_star});

    for (int ci = 0; ci < n_claimants; ++ci) {
      double score = 0.0;
      switch (mode) {
        case CascadeMode::kThreeStage:
        case CascadeMode::kThreeStageAllHmm:
        case CascadeMode::kWorstCase:
          score = emotion_dependent_score(sc, ci, static_cast<int>(*e_star),
                                          Opposite(*g_star));
          break;
        case CascadeMode::kTwoStageEmotion:
          score = emotion_dependent_score(sc, ci, static_cast<int>(*e_star),
                                          std::nullopt);
          break;
        case CascadeMode::kTwoStageGender: {
          const double term1 = sc.pooled_avg_ll[ci];
          const double cohort = CohortAverage(sc, -1, *g_star, ci);
          score = term1 - 2.0 * cohort;
          break;
        }
        case CascadeMode::kOneStage: {
          const double term1 = sc.pooled_avg_ll[ci];
          const double cohort = CohortAverage(sc, -1, std::nullopt, ci);
          score = term1 - 2.0 * cohort;
          break;
        }
      }
      TrialResult trial;
      trial.claimed_speaker = registry_.claimants[ci];
      trial.true_speaker = rec.speaker_id;
      trial.identified_gender = g_star;
      trial.identified_emotion = e_star;
      trial.true_gender = rec.gender;
      trial.true_emotion = rec.emotion;
      trial.score = score;
      trial.decision = Decide(score, registry_.threshold);
      trial.is_target_trial = registry_.claimants[ci] == rec.speaker_id;
      out.trials.push_back(std::move(trial));
    }
  }
  return out;
}

std::vector<TrialResult> RunCascade(const ModelRegistry &registry,
                                    const CorpusManifest &manifest,
                                    CascadeMode mode, int jobs) {
  CascadeRunner runner(registry, manifest.records, {mode}, jobs);
  return runner.Run(mode).trials;
}

namespace {

// One model-training work item; exactly one of the result slots is filled
// depending on which bank the key belongs to.
struct TrainJob {
  enum class Kind {
    kGender,
    kGdEmotion,
    kSpeaker,
    kPooled,
    kGiEmotion,
  };
  Kind kind = Kind::kGender;
  std::string seed_key;
  std::vector<int> pool;  // indices into the extracted feature arrays
  Gender gender = Gender::kMale;
  Emotion emotion = Emotion::kNeutral;
  std::string speaker;

  HmmModel hmm;
  SuprasegmentalModel supra;
  double final_ll = 0.0;
};

}  // namespace

ModelRegistry TrainRegistry(
    const CorpusManifest &manifest, const RegistryConfig &config,
    std::vector<std::pair<std::string, double>> *final_lls) {
  if (config.claimants_per_gender < 1) {
    throw InsufficientData("claimants_per_gender must be at least 1");
  }
  RecordFilter train_filter;
  train_filter.split = Split::kTrain;
  const CorpusManifest train_manifest = FilterRecords(manifest, train_filter);
  const std::vector<UtteranceRecord> &train_all = train_manifest.records;
  if (train_all.empty()) {
    throw InsufficientData("manifest has no training utterances");
  }

  // The highest repetition index becomes a held-out development slice for
  // threshold calibration.  A single-repetition corpus has nothing to hold
  // out, so calibration falls back to the training utterances themselves.
  int min_rep = train_all.front().rep_idx;
  int max_rep = train_all.front().rep_idx;
  for (const UtteranceRecord &rec : train_all) {
    min_rep = std::min(min_rep, rec.rep_idx);
    max_rep = std::max(max_rep, rec.rep_idx);
  }
  const bool have_dev = max_rep > min_rep;
  std::vector<UtteranceRecord> train_pool;
  std::vector<UtteranceRecord> dev_records;
  for (const UtteranceRecord &rec : train_all) {
    if (have_dev && rec.rep_idx == max_rep) {
      dev_records.push_back(rec);
    } else {
      train_pool.push_back(rec);
    }
  }
  if (!have_dev) dev_records = train_pool;

  // Claimants: the first claimants_per_gender speaker ids per gender, in
  // sorted order.
  std::map<Gender, std::set<std::string>> speakers_by_gender;
  for (const UtteranceRecord &rec : train_pool) {
    speakers_by_gender[rec.gender].insert(rec.speaker_id);
  }
  ModelRegistry registry;
  for (Gender g : kAllGenders) {
    const auto it = speakers_by_gender.find(g);
    const int available =
        it == speakers_by_gender.end() ? 0 : static_cast<int>(it->second.size());
    if (available < config.claimants_per_gender) {
      throw InsufficientData(
          "gender " + std::string(ToLabel(g)) + " has " +
          std::to_string(available) +
          " training speakers; " + std::to_string(config.claimants_per_gender) +
          " claimants requested");
    }
    int taken = 0;
    for (const std::string &id : it->second) {
      if (taken >= config.claimants_per_gender) break;
      registry.claimants.push_back(id);
      registry.claimant_gender[id] = g;
      ++taken;
    }
  }
  std::sort(registry.claimants.begin(), registry.claimants.end());

  registry.feature_config = config.feature;
  registry.training_config = config.training;
  registry.n_states = config.n_states;
  registry.n_mix = config.n_mix;
  const int emotion_mix =
      config.n_emotion_mix > 0 ? config.n_emotion_mix : config.n_mix;
  registry.n_emotion_mix = emotion_mix;
  const int speaker_mix =
      config.n_speaker_mix > 0 ? config.n_speaker_mix : config.n_mix;
  registry.n_speaker_mix = speaker_mix;
  registry.n_supra_mix = config.n_supra_mix;
  registry.alpha = config.alpha;
  registry.imposter_mean_of_logs = config.imposter_mean_of_logs;

  // Extract features once per training utterance.
  const int n_train = static_cast<int>(train_pool.size());
  std::vector<ObservationSequence> acoustic(n_train);
  std::vector<ProsodicSequence> prosodic(n_train);
  ParallelFor(n_train, config.jobs, [&](int i) {
    const WavData wav = ReadWav(train_pool[i].audio_path);
    acoustic[i] =
        ExtractAcoustic(wav.samples, wav.sample_rate, config.feature);
    prosodic[i] =
        ExtractProsodic(wav.samples, wav.sample_rate, config.feature);
  });

  // Assemble the per-model training pools.
  std::map<Gender, std::vector<int>> gender_pool;
  std::map<std::pair<Gender, Emotion>, std::vector<int>> gd_pool;
  std::map<Emotion, std::vector<int>> gi_pool;
  std::map<std::string, std::vector<int>> claimant_pool;
  std::map<std::pair<std::string, Emotion>, std::vector<int>> claimant_emotion_pool;
  for (int i = 0; i < n_train; ++i) {
    const UtteranceRecord &rec = train_pool[i];
    gender_pool[rec.gender].push_back(i);
    gd_pool[{rec.gender, rec.emotion}].push_back(i);
    gi_pool[rec.emotion].push_back(i);
    if (registry.claimant_gender.count(rec.speaker_id)) {
      claimant_pool[rec.speaker_id].push_back(i);
      claimant_emotion_pool[{rec.speaker_id, rec.emotion}].push_back(i);
    }
  }

  std::vector<TrainJob> jobs;
  for (Gender g : kAllGenders) {
    TrainJob job;
    job.kind = TrainJob::Kind::kGender;
    job.seed_key = "gender/" + std::string(ToLabel(g));
    job.gender = g;
    job.pool = gender_pool[g];
    jobs.push_back(std::move(job));
  }
  for (Gender g : kAllGenders) {
    for (Emotion e : kAllEmotions) {
      TrainJob job;
      job.kind = TrainJob::Kind::kGdEmotion;
      job.seed_key = "emotion/" + std::string(ToLabel(g)) + "/" + ToLabel(e);
      job.gender = g;
      job.emotion = e;
      job.pool = gd_pool[{g, e}];
      jobs.push_back(std::move(job));
    }
  }
  for (const std::string &c : registry.claimants) {
    for (Emotion e : kAllEmotions) {
      TrainJob job;
      job.kind = TrainJob::Kind::kSpeaker;
      job.seed_key = "speaker/" + c + "/" + std::string(ToLabel(e));
      job.speaker = c;
      job.emotion = e;
      job.pool = claimant_emotion_pool[{c, e}];
      jobs.push_back(std::move(job));
    }
  }
  for (const std::string &c : registry.claimants) {
    TrainJob job;
    job.kind = TrainJob::Kind::kPooled;
    job.seed_key = "pooled/" + c;
    job.speaker = c;
    job.pool = claimant_pool[c];
    jobs.push_back(std::move(job));
  }
  for (Emotion e : kAllEmotions) {
    TrainJob job;
    job.kind = TrainJob::Kind::kGiEmotion;
    job.seed_key = "gi_emotion/" + std::string(ToLabel(e));
    job.emotion = e;
    job.pool = gi_pool[e];
    jobs.push_back(std::move(job));
  }
  for (const TrainJob &job : jobs) {
    if (job.pool.empty()) {
      throw InsufficientData("no training utterances for model " +
                             job.seed_key);
    }
  }

  ParallelFor(static_cast<int>(jobs.size()), config.jobs, [&](int j) {
    TrainJob &job = jobs[j];
    TrainingConfig model_config = config.training;
    model_config.seed = MixSeed(config.training.seed, Fnv1a(job.seed_key));
    std::vector<ObservationSequence> utterances;
    utterances.reserve(job.pool.size());
    for (int idx : job.pool) utterances.push_back(acoustic[idx]);
    TrainStats stats;
    const bool emotion_model = job.kind == TrainJob::Kind::kGdEmotion ||
                               job.kind == TrainJob::Kind::kGiEmotion;
    int mix = emotion_model ? emotion_mix : config.n_mix;
    if (job.kind == TrainJob::Kind::kSpeaker) mix = speaker_mix;
    job.hmm = BaumWelch(utterances, config.n_states, mix, model_config,
                        &stats);
    job.final_ll = stats.iteration_ll.empty() ? kLogZero
                                              : stats.iteration_ll.back();
    if (job.kind == TrainJob::Kind::kGdEmotion ||
        job.kind == TrainJob::Kind::kGiEmotion) {
      std::vector<std::pair<ObservationSequence, ProsodicSequence>> pairs;
      pairs.reserve(job.pool.size());
      for (int idx : job.pool) {
        pairs.emplace_back(acoustic[idx], prosodic[idx]);
      }
      job.supra = TrainSuprasegmental(job.hmm, pairs, config.n_supra_mix,
                                      model_config);
    }
  });

  if (final_lls) {
    final_lls->clear();
    for (const TrainJob &job : jobs) {
      final_lls->emplace_back(job.seed_key, job.final_ll);
    }
  }
  for (TrainJob &job : jobs) {
    switch (job.kind) {
      case TrainJob::Kind::kGender:
        registry.gender_models[job.gender] = std::move(job.hmm);
        break;
      case TrainJob::Kind::kGdEmotion:
        registry.emotion_models[{job.gender, job.emotion}] = {
            std::move(job.hmm), std::move(job.supra)};
        break;
      case TrainJob::Kind::kSpeaker:
        registry.speaker_models[{job.speaker, job.emotion}] =
            std::move(job.hmm);
        break;
      case TrainJob::Kind::kPooled:
        registry.pooled_speaker_models[job.speaker] = std::move(job.hmm);
        break;
      case TrainJob::Kind::kGiEmotion:
        registry.gi_emotion_models[job.emotion] = {std::move(job.hmm),
                                                   std::move(job.supra)};
        break;
    }
  }

  // Calibrate the decision threshold at the equal error rate of the full
  // pipeline on the development slice.
  registry.threshold = 0.0;
  CascadeRunner dev_runner(registry, dev_records,
                           {CascadeMode::kThreeStage}, config.jobs);
  const RunOutput dev_out = dev_runner.Run(CascadeMode::kThreeStage);
  ScoreSet dev_scores;
  for (const TrialResult &trial : dev_out.trials) {
    if (trial.is_target_trial) {
      dev_scores.target_scores.push_back(trial.score);
    } else {
      dev_scores.nontarget_scores.push_back(trial.score);
    }
  }
  if (dev_scores.target_scores.empty() ||
      dev_scores.nontarget_scores.empty()) {
    throw InsufficientData(
        "development slice yields no target or no nontarget trials");
  }
  registry.threshold = EerWithThreshold(dev_scores).threshold;
  return registry;
}

}  // namespace emocascade
