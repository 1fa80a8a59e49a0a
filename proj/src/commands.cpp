// src/commands.cpp

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

#include "emocascade/commands.hpp"

#include <array>
#include <cstdio>
#include <deque>
#include <filesystem>
#include <fstream>

#include "emocascade/eval.hpp"
#include "emocascade/registry_io.hpp"
#include "json.hpp"

namespace emocascade {
namespace {

using nlohmann::json;

std::string Num(double value, const char *fmt = "%.9g") {
  char buf[64];
  std::snprintf(buf, sizeof(buf), fmt, value);
  return buf;
}

std::string Percent(double value) { return Num(value, "%.2f"); }

void WriteTextFile(const std::string &path, const std::string &content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << content;
  if (!out) throw IoError("failed writing: " + path);
}

ScoreSet SplitScores(const std::vector<TrialResult> &trials) {
  ScoreSet scores;
  for (const TrialResult &t : trials) {
    if (t.is_target_trial) {
      scores.target_scores.push_back(t.score);
    } else {
      scores.nontarget_scores.push_back(t.score);
    }
  }
  return scores;
}

// Equal error rate per true emotion of the probe utterance, in canonical
// emotion order.
std::array<double, kNumEmotions> PerEmotionEer(
    const std::vector<TrialResult> &trials) {
  std::array<double, kNumEmotions> eers{};
  for (int e = 0; e < kNumEmotions; ++e) {
    ScoreSet scores;
    for (const TrialResult &t : trials) {
      if (t.true_emotion != kAllEmotions[e]) continue;
      if (t.is_target_trial) {
        scores.target_scores.push_back(t.score);
      } else {
        scores.nontarget_scores.push_back(t.score);
      }
    }
    eers[e] = Eer(scores);
  }
  return eers;
}

SummaryStats MeanEer(const std::array<double, kNumEmotions> &eers) {
  return ComputeSummaryStats({eers.begin(), eers.end()});
}

bool HasGenderStage(CascadeMode mode) {
  return mode == CascadeMode::kThreeStage ||
         mode == CascadeMode::kThreeStageAllHmm ||
         mode == CascadeMode::kTwoStageGender;
}

bool HasEmotionStage(CascadeMode mode) {
  return mode == CascadeMode::kThreeStage ||
         mode == CascadeMode::kThreeStageAllHmm ||
         mode == CascadeMode::kTwoStageEmotion;
}

struct StageAccuracy {
  int correct = 0;
  int total = 0;
  double Rate() const { return total == 0 ? 0.0 : 100.0 * correct / total; }
};

StageAccuracy GenderAccuracy(const std::vector<UtteranceOutcome> &outcomes) {
  StageAccuracy acc;
  for (const UtteranceOutcome &o : outcomes) {
    if (!o.identified_gender) continue;
    ++acc.total;
    if (*o.identified_gender == o.true_gender) ++acc.correct;
  }
  return acc;
}

StageAccuracy EmotionAccuracy(const std::vector<UtteranceOutcome> &outcomes) {
  StageAccuracy acc;
  for (const UtteranceOutcome &o : outcomes) {
    if (!o.identified_emotion) continue;
    ++acc.total;
    if (*o.identified_emotion == o.true_emotion) ++acc.correct;
  }
  return acc;
}

std::string ConfusionCsv(const Matrix &confusion) {
  std::string csv = "true_emotion";
  for (Emotion e : kAllEmotions) {
    csv += ',';
    csv += ToLabel(e);
  }
  csv += '\n';
  for (int r = 0; r < confusion.rows; ++r) {
    csv += ToLabel(kAllEmotions[r]);
    for (int c = 0; c < confusion.cols; ++c) {
      csv += ',';
      csv += Num(confusion(r, c));
    }
    csv += '\n';
  }
  return csv;
}

// Emotion confusion matrix for utterances of one true gender.
Matrix GenderConfusion(const std::vector<UtteranceOutcome> &outcomes,
                       Gender gender) {
  std::vector<std::string> truth;
  std::vector<std::string> predicted;
  for (const UtteranceOutcome &o : outcomes) {
    if (o.true_gender != gender || !o.identified_emotion) continue;
    truth.push_back(ToLabel(o.true_emotion));
    predicted.push_back(ToLabel(*o.identified_emotion));
  }
  std::vector<std::string> order;
  for (Emotion e : kAllEmotions) order.push_back(ToLabel(e));
  return ConfusionMatrix(truth, predicted, order);
}

ModelRegistry LoadArchiveFor(const RunConfig &config) {
  if (config.registry_dir.empty()) {
    throw Error("registry directory is required");
  }
  ModelRegistry registry = LoadRegistry(RegistryArchivePath(config.registry_dir));
  if (!(registry.feature_config == config.feature)) {
    throw Error(
        "feature config mismatch: the registry archive was trained with a "
        "different feature configuration than this run requests");
  }
  return registry;
}

CorpusManifest LoadCorpusFor(const RunConfig &config) {
  if (config.corpus_dir.empty()) throw Error("corpus directory is required");
  return LoadManifest(ManifestPath(config.corpus_dir));
}

std::vector<UtteranceRecord> TestRecords(const CorpusManifest &manifest) {
  RecordFilter filter;
  filter.split = Split::kTest;
  std::vector<UtteranceRecord> records =
      FilterRecords(manifest, filter).records;
  if (records.empty()) throw Error("corpus has no test utterances");
  return records;
}

void EnsureOutDir(const RunConfig &config) {
  if (config.out_dir.empty()) throw Error("output directory is required");
  std::filesystem::create_directories(config.out_dir);
}

std::string JoinPath(const std::string &dir, const std::string &name) {
  return (std::filesystem::path(dir) / name).string();
}

// Re-derives accept/reject decisions with a threshold that tracks the mean
// of the most recent scores, in trial order.
void AdaptDecisions(std::vector<TrialResult> &trials, double initial_threshold,
                    int window, double *final_threshold) {
  double threshold = initial_threshold;
  std::deque<double> recent;
  for (TrialResult &trial : trials) {
    trial.decision = Decide(trial.score, threshold);
    recent.push_back(trial.score);
    if (static_cast<int>(recent.size()) > window) recent.pop_front();
    threshold = AdaptThreshold({recent.begin(), recent.end()});
  }
  *final_threshold = threshold;
}

}  // namespace

void ApplyConfigFile(RunConfig &config, const std::string &path,
                     bool *seed_in_file) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open config file: " + path);
  json doc;
  try {
    doc = json::parse(in);
  } catch (const std::exception &e) {
    throw Error("cannot parse config file " + path + ": " + e.what());
  }
  if (seed_in_file) *seed_in_file = false;
  try {
    for (const auto &[key, value] : doc.items()) {
      if (key == "alpha") {
        config.alpha = value.get<double>();
      } else if (key == "mode") {
        config.mode = ModeFromLabel(value.get<std::string>());
      } else if (key == "seed") {
        config.seed = value.get<uint64_t>();
        if (seed_in_file) *seed_in_file = true;
      } else if (key == "corpus") {
        config.corpus_dir = value.get<std::string>();
      } else if (key == "registry") {
        config.registry_dir = value.get<std::string>();
      } else if (key == "out") {
        config.out_dir = value.get<std::string>();
      } else if (key == "claimants_per_gender") {
        config.claimants_per_gender = value.get<int>();
      } else if (key == "imposter_mean_of_logs") {
        config.imposter_mean_of_logs = value.get<bool>();
      } else if (key == "jobs") {
        config.jobs = value.get<int>();
      } else if (key == "adapt_threshold") {
        config.adapt_threshold = value.get<bool>();
      } else if (key == "adapt_window") {
        config.adapt_window = value.get<int>();
      } else if (key == "alphas") {
        config.alphas = value.get<std::vector<double>>();
      } else if (key == "n_states") {
        config.n_states = value.get<int>();
      } else if (key == "n_mix") {
        config.n_mix = value.get<int>();
      } else if (key == "n_emotion_mix") {
        config.n_emotion_mix = value.get<int>();
      } else if (key == "n_speaker_mix") {
        config.n_speaker_mix = value.get<int>();
      } else if (key == "n_supra_mix") {
        config.n_supra_mix = value.get<int>();
      } else if (key == "feature") {
        for (const auto &[fkey, fvalue] : value.items()) {
          if (fkey == "preemphasis_coeff") {
            config.feature.preemphasis_coeff = fvalue.get<double>();
          } else if (fkey == "frame_len_ms") {
            config.feature.frame_len_ms = fvalue.get<double>();
          } else if (fkey == "frame_hop_ms") {
            config.feature.frame_hop_ms = fvalue.get<double>();
          } else if (fkey == "n_mel_filters") {
            config.feature.n_mel_filters = fvalue.get<int>();
          } else if (fkey == "n_cepstra") {
            config.feature.n_cepstra = fvalue.get<int>();
          } else if (fkey == "pitch_min_hz") {
            config.feature.pitch_min_hz = fvalue.get<double>();
          } else if (fkey == "pitch_max_hz") {
            config.feature.pitch_max_hz = fvalue.get<double>();
          } else {
            throw Error("unknown config key: feature." + fkey);
          }
        }
      } else if (key == "training") {
        for (const auto &[tkey, tvalue] : value.items()) {
          if (tkey == "max_iters") {
            config.training.max_iters = tvalue.get<int>();
          } else if (tkey == "ll_rel_tol") {
            config.training.ll_rel_tol = tvalue.get<double>();
          } else if (tkey == "variance_floor_scale") {
            config.training.variance_floor_scale = tvalue.get<double>();
          } else {
            throw Error("unknown config key: training." + tkey);
          }
        }
      } else {
        throw Error("unknown config key: " + key);
      }
    }
  } catch (const Error &) {
    throw;
  } catch (const std::exception &e) {
    throw Error("bad value in config file " + path + ": " + e.what());
  }
}

void ValidateRunConfig(const RunConfig &config) {
  if (!(config.alpha >= 0.0 && config.alpha <= 1.0)) {
    throw Error("alpha must lie in [0, 1]");
  }
  for (double a : config.alphas) {
    if (!(a >= 0.0 && a <= 1.0)) {
      throw Error("every sweep fusion weight must lie in [0, 1]");
    }
  }
  if (config.alphas.empty()) throw Error("alpha sweep list is empty");
  if (config.n_states < 1) throw Error("n_states must be at least 1");
  if (config.n_mix < 1) throw Error("n_mix must be at least 1");
  if (config.n_emotion_mix < 0) {
    throw Error("n_emotion_mix must be at least 1, or 0 to follow n_mix");
  }
  if (config.n_speaker_mix < 0) {
    throw Error("n_speaker_mix must be at least 1, or 0 to follow n_mix");
  }
  if (config.n_supra_mix < 1) throw Error("n_supra_mix must be at least 1");
  if (config.claimants_per_gender < 1) {
    throw Error("claimants_per_gender must be at least 1");
  }
  if (config.jobs < 1) throw Error("jobs must be at least 1");
  if (config.adapt_window < 1) throw Error("adapt_window must be at least 1");
  if (config.training.max_iters < 1) {
    throw Error("training.max_iters must be at least 1");
  }
  if (config.feature.frame_len_ms <= 0.0 || config.feature.frame_hop_ms <= 0.0) {
    throw Error("frame length and hop must be positive");
  }
  if (config.feature.n_mel_filters < 1 || config.feature.n_cepstra < 1) {
    throw Error("mel filter and cepstrum counts must be positive");
  }
}

std::string RegistryArchivePath(const std::string &registry_dir) {
  return JoinPath(registry_dir, "registry.json");
}

std::string ManifestPath(const std::string &corpus_dir) {
  return JoinPath(corpus_dir, "manifest.tsv");
}

void CmdSynth(const SyntheticSpec &spec, const std::string &out_dir,
              std::ostream &log) {
  if (out_dir.empty()) throw Error("output directory is required");
  const CorpusManifest manifest = GenerateSynthetic(spec, out_dir);
  log << "generated " << manifest.records.size() << " utterances under "
      << out_dir << "\n";
}

void CmdTrain(const RunConfig &config, std::ostream &log) {
  ValidateRunConfig(config);
  if (config.registry_dir.empty()) {
    throw Error("registry directory is required");
  }
  const CorpusManifest manifest = LoadCorpusFor(config);

  RegistryConfig reg_config;
  reg_config.feature = config.feature;
  reg_config.training = config.training;
  reg_config.training.seed = config.seed;
  reg_config.n_states = config.n_states;
  reg_config.n_mix = config.n_mix;
  reg_config.n_emotion_mix = config.n_emotion_mix;
  reg_config.n_speaker_mix = config.n_speaker_mix;
  reg_config.n_supra_mix = config.n_supra_mix;
  reg_config.alpha = config.alpha;
  reg_config.imposter_mean_of_logs = config.imposter_mean_of_logs;
  reg_config.claimants_per_gender = config.claimants_per_gender;
  reg_config.jobs = config.jobs;

  std::vector<std::pair<std::string, double>> final_lls;
  const ModelRegistry registry =
      TrainRegistry(manifest, reg_config, &final_lls);
  for (const auto &[key, ll] : final_lls) {
    log << "trained " << key << "  final log-likelihood " << Num(ll, "%.6f")
        << "\n";
  }
  log << "decision threshold " << Num(registry.threshold) << "\n";

  std::filesystem::create_directories(config.registry_dir);
  const std::string archive = RegistryArchivePath(config.registry_dir);
  SaveRegistry(registry, archive);
  log << "archive written: " << archive << "\n";
}

void CmdEvaluate(const RunConfig &config, std::ostream &log) {
  ValidateRunConfig(config);
  EnsureOutDir(config);
  const ModelRegistry registry = LoadArchiveFor(config);
  const CorpusManifest manifest = LoadCorpusFor(config);
  const std::vector<UtteranceRecord> test_records = TestRecords(manifest);

  CascadeRunner runner(registry, test_records, {config.mode}, config.jobs);
  RunOutput out = runner.Run(config.mode, config.alpha);

  double threshold = registry.threshold;
  if (config.adapt_threshold) {
    AdaptDecisions(out.trials, registry.threshold, config.adapt_window,
                   &threshold);
  }

  const std::array<double, kNumEmotions> eers = PerEmotionEer(out.trials);
  const SummaryStats mean_eer = MeanEer(eers);
  const StageAccuracy gender_acc = GenderAccuracy(out.outcomes);
  const StageAccuracy emotion_acc = EmotionAccuracy(out.outcomes);

  int n_target = 0;
  int n_accept = 0;
  for (const TrialResult &t : out.trials) {
    if (t.is_target_trial) ++n_target;
    if (t.decision == Decision::kAccept) ++n_accept;
  }
  const int n_trials = static_cast<int>(out.trials.size());

  std::string report;
  report += "speaker verification report\n";
  report += "===========================\n";
  report += "mode: " + ToLabel(config.mode) + "\n";
  report += "fusion weight alpha: " + Num(config.alpha, "%.4g") + "\n";
  report += "decision threshold: " + Num(registry.threshold) + "\n";
  if (config.adapt_threshold) {
    report += "threshold adaptation: on (window " +
              std::to_string(config.adapt_window) + ", final threshold " +
              Num(threshold) + ")\n";
  } else {
    report += "threshold adaptation: off\n";
  }
  report += "claimants: " + std::to_string(registry.claimants.size()) + "\n";
  report += "test utterances: " + std::to_string(test_records.size()) + "\n";
  report += "trials: " + std::to_string(n_trials) + " target=" +
            std::to_string(n_target) + " nontarget=" +
            std::to_string(n_trials - n_target) + "\n";
  if (config.mode == CascadeMode::kWorstCase) {
    report +=
        "NOTE: worst-case mode: the verification stage received the wrong\n"
        "gender and a wrong emotion for every trial.\n";
  }
  if (config.mode == CascadeMode::kWorstCase) {
    report += "stage 1 (gender): forced wrong\n";
    report += "stage 2 (emotion): forced wrong\n";
  } else {
    if (HasGenderStage(config.mode)) {
      report += "stage 1 (gender): accuracy " + Percent(gender_acc.Rate()) +
                "% (" + std::to_string(gender_acc.correct) + "/" +
                std::to_string(gender_acc.total) + ")\n";
    } else {
      report += "stage 1 (gender): skipped\n";
    }
    if (HasEmotionStage(config.mode)) {
      report += "stage 2 (emotion): accuracy " + Percent(emotion_acc.Rate()) +
                "% (" + std::to_string(emotion_acc.correct) + "/" +
                std::to_string(emotion_acc.total) + ")\n";
    } else {
      report += "stage 2 (emotion): skipped\n";
    }
  }
  report += "\nper-emotion equal error rate (%):\n";
  for (int e = 0; e < kNumEmotions; ++e) {
    report += "  " + std::string(ToLabel(kAllEmotions[e])) + ": " +
              Percent(eers[e]) + "\n";
  }
  report += "  average: " + Percent(mean_eer.mean) + " (sd " +
            Percent(mean_eer.sd) + ")\n";
  report += "\ndecisions: accept=" + std::to_string(n_accept) +
            " reject=" + std::to_string(n_trials - n_accept) + "\n";
  WriteTextFile(JoinPath(config.out_dir, "report.txt"), report);

  std::string eer_csv = "emotion,eer_percent\n";
  for (int e = 0; e < kNumEmotions; ++e) {
    eer_csv += std::string(ToLabel(kAllEmotions[e])) + "," + Num(eers[e]) +
               "\n";
  }
  WriteTextFile(JoinPath(config.out_dir, "eer_by_emotion.csv"), eer_csv);

  ExportDet(ComputeDetCurve(SplitScores(out.trials)),
            JoinPath(config.out_dir, "det.csv"));

  std::string trials_tsv = std::string(kTrialTsvHeader) + "\n";
  for (const TrialResult &t : out.trials) trials_tsv += ToTsvLine(t) + "\n";
  WriteTextFile(JoinPath(config.out_dir, "trials.tsv"), trials_tsv);

  if (HasEmotionStage(config.mode)) {
    WriteTextFile(JoinPath(config.out_dir, "confusion_male.csv"),
                  ConfusionCsv(GenderConfusion(out.outcomes, Gender::kMale)));
    WriteTextFile(
        JoinPath(config.out_dir, "confusion_female.csv"),
        ConfusionCsv(GenderConfusion(out.outcomes, Gender::kFemale)));
  }

  log << "mode " << ToLabel(config.mode) << ": mean EER "
      << Percent(mean_eer.mean) << "% over " << kNumEmotions
      << " emotions; outputs in " << config.out_dir << "\n";
}

void CmdAblate(const RunConfig &config, std::ostream &log) {
  ValidateRunConfig(config);
  EnsureOutDir(config);
  const ModelRegistry registry = LoadArchiveFor(config);
  const CorpusManifest manifest = LoadCorpusFor(config);
  const std::vector<UtteranceRecord> test_records = TestRecords(manifest);

  const std::vector<CascadeMode> modes(kAllCascadeModes.begin(),
                                       kAllCascadeModes.end());
  CascadeRunner runner(registry, test_records, modes, config.jobs);

  std::array<std::array<double, kNumEmotions>, kNumCascadeModes> eers{};
  std::array<SummaryStats, kNumCascadeModes> stats{};
  for (int m = 0; m < kNumCascadeModes; ++m) {
    const RunOutput out = runner.Run(kAllCascadeModes[m], config.alpha);
    eers[m] = PerEmotionEer(out.trials);
    stats[m] = MeanEer(eers[m]);
  }

  std::string report;
  report += "cascade mode comparison\n";
  report += "=======================\n";
  report += "fusion weight alpha: " + Num(config.alpha, "%.4g") + "\n\n";
  report += "mean equal error rate (%) over per-emotion values:\n";
  for (int m = 0; m < kNumCascadeModes; ++m) {
    report += "  " + ToLabel(kAllCascadeModes[m]) + ": " +
              Percent(stats[m].mean) + " (sd " + Percent(stats[m].sd) + ")\n";
  }
  report += "\npairwise Welch t statistics over per-emotion EERs:\n";
  std::string pair_csv = "mode_a,mode_b,t\n";
  for (int a = 0; a < kNumCascadeModes; ++a) {
    for (int b = a + 1; b < kNumCascadeModes; ++b) {
      const double t =
          TwoSampleT({eers[a].begin(), eers[a].end()},
                     {eers[b].begin(), eers[b].end()});
      report += "  " + ToLabel(kAllCascadeModes[a]) + " vs " +
                ToLabel(kAllCascadeModes[b]) + ": t = " + Num(t, "%.4f") +
                "\n";
      pair_csv += ToLabel(kAllCascadeModes[a]) + "," +
                  ToLabel(kAllCascadeModes[b]) + "," + Num(t) + "\n";
    }
  }
  WriteTextFile(JoinPath(config.out_dir, "ablate_report.txt"), report);

  std::string mode_csv = "mode,mean_eer,sd_eer\n";
  for (int m = 0; m < kNumCascadeModes; ++m) {
    mode_csv += ToLabel(kAllCascadeModes[m]) + "," + Num(stats[m].mean) + "," +
                Num(stats[m].sd) + "\n";
  }
  WriteTextFile(JoinPath(config.out_dir, "mode_mean_eer.csv"), mode_csv);

  log << "compared " << kNumCascadeModes << " modes; outputs in "
      << config.out_dir << "\n";
}

void CmdAlphaSweep(const RunConfig &config, std::ostream &log) {
  ValidateRunConfig(config);
  EnsureOutDir(config);
  const ModelRegistry registry = LoadArchiveFor(config);
  const CorpusManifest manifest = LoadCorpusFor(config);
  const std::vector<UtteranceRecord> test_records = TestRecords(manifest);

  CascadeRunner runner(registry, test_records, {CascadeMode::kThreeStage},
                       config.jobs);
  std::string csv = "alpha,mean_eer\n";
  for (double alpha : config.alphas) {
    const RunOutput out = runner.Run(CascadeMode::kThreeStage, alpha);
    const SummaryStats stats = MeanEer(PerEmotionEer(out.trials));
    csv += Num(alpha) + "," + Num(stats.mean) + "\n";
    log << "alpha " << Num(alpha) << ": mean EER " << Percent(stats.mean)
        << "%\n";
  }
  WriteTextFile(JoinPath(config.out_dir, "alpha_sweep.csv"), csv);
  log << "sweep written to " << JoinPath(config.out_dir, "alpha_sweep.csv")
      << "\n";
}

}  // namespace emocascade
