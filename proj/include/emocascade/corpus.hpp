// include/emocascade/corpus.hpp

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

#ifndef EMOCASCADE_CORPUS_HPP_
#define EMOCASCADE_CORPUS_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "emocascade/common.hpp"

namespace emocascade {

struct MissingFile : Error {
  using Error::Error;
};
struct MalformedRecord : Error {
  using Error::Error;
};
struct DuplicateUtterance : Error {
  using Error::Error;
};
struct InvalidSpec : Error {
  using Error::Error;
};

// One utterance of the corpus.  The split is pinned to the sentence index:
// sentences 1..4 train, sentences 5..8 test.
struct UtteranceRecord {
  std::string utterance_id;
  std::string speaker_id;
  Gender gender = Gender::kMale;
  Emotion emotion = Emotion::kNeutral;
  int sentence_idx = 1;
  int rep_idx = 1;
  Split split = Split::kTrain;
  std::string audio_path;
};

struct CorpusManifest {
  std::vector<UtteranceRecord> records;
  int sample_rate_hz = 16000;
  std::vector<std::string> emotions;
  int speakers_per_gender = 0;
};

// Parameters of the synthetic corpus generator.
struct SyntheticSpec {
  uint64_t seed = 42;
  int speakers_per_gender = 20;
  int sentences = 8;
  int reps_per_sentence = 9;
  double utterance_duration_s = 3.0;
  // 1.0 keeps the full distance between gender/emotion/speaker classes;
  // 0.0 collapses every class onto the same distribution.
  double class_separation = 1.0;
  // Scales only the spectral side of the emotion differences (tilt and
  // breathiness).  At 0.0 emotions differ in prosody alone.
  double emotion_spectral_scale = 1.0;
};

// Decoded mono WAV audio.
struct WavData {
  int sample_rate = 0;
  std::vector<double> samples;
};

// Reads a 16-bit PCM mono WAV file.  Samples are scaled to [-1, 1).
WavData ReadWav(const std::string &path);

// Writes a 16-bit PCM mono WAV file; samples are clamped to [-1, 1].
void WriteWav(const std::string &path, const std::vector<double> &samples,
              int sample_rate);

// Loads a tab-separated manifest (fields: utterance_id, speaker_id, gender,
// emotion, sentence_idx, rep_idx, split, audio_path; lines starting with '#'
// ignored).  Relative audio paths are resolved against the manifest's
// directory, and each referenced file must exist.
CorpusManifest LoadManifest(const std::string &path);

// Record count bookkeeping without audio synthesis: the manifest that
// GenerateSynthetic would produce, with audio paths filled in but no files
// written.  Useful for arithmetic checks and dry planning.
CorpusManifest PlanSynthetic(const SyntheticSpec &spec,
                             const std::string &out_dir);

// Generates the synthetic corpus under out_dir: WAV files in out_dir/wav and
// a manifest.tsv next to them.  Audio is a harmonic pulse source with
// formant resonators and a spectral tilt filter; gender sets the base pitch
// band, emotion sets pitch modulation, energy, speaking rate and tilt, and
// each speaker carries small fixed pitch/formant/tilt offsets.  Deterministic
// for a fixed spec.seed.  The returned manifest holds resolved audio paths.
CorpusManifest GenerateSynthetic(const SyntheticSpec &spec,
                                 const std::string &out_dir);

// Field-wise record predicate; unset fields match everything.
struct RecordFilter {
  std::optional<Gender> gender;
  std::optional<Emotion> emotion;
  std::optional<Split> split;
  std::optional<std::string> speaker;
};

// Keeps the records matching the filter, preserving order and manifest
// metadata.
CorpusManifest FilterRecords(const CorpusManifest &manifest,
                             const RecordFilter &filter);

// Synthesizes the audio of one record without touching the file system.
// Exposed for tests; GenerateSynthetic uses the same routine.
std::vector<double> SynthesizeUtterance(const SyntheticSpec &spec,
                                        const UtteranceRecord &record,
                                        int sample_rate);

}  // namespace emocascade

#endif  // EMOCASCADE_CORPUS_HPP_
