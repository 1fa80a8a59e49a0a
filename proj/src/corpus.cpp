// src/corpus.cpp

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

#include "emocascade/corpus.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

namespace emocascade {

namespace fs = std::filesystem;

namespace {

constexpr double kPi = 3.14159265358979323846;

// ---------------------------------------------------------------------------
// WAV I/O

void PutU16(std::string &buf, uint16_t v) {
  buf.push_back(static_cast<char>(v & 0xff));
  buf.push_back(static_cast<char>((v >> 8) & 0xff));
}

void PutU32(std::string &buf, uint32_t v) {
  buf.push_back(static_cast<char>(v & 0xff));
  buf.push_back(static_cast<char>((v >> 8) & 0xff));
  buf.push_back(static_cast<char>((v >> 16) & 0xff));
  buf.push_back(static_cast<char>((v >> 24) & 0xff));
}

uint32_t GetU32(const std::string &buf, size_t pos) {
  return static_cast<uint8_t>(buf[pos]) |
         (static_cast<uint8_t>(buf[pos + 1]) << 8) |
         (static_cast<uint8_t>(buf[pos + 2]) << 16) |
         (static_cast<uint8_t>(buf[pos + 3]) << 24);
}

uint16_t GetU16(const std::string &buf, size_t pos) {
  return static_cast<uint16_t>(static_cast<uint8_t>(buf[pos]) |
                               (static_cast<uint8_t>(buf[pos + 1]) << 8));
}

// ---------------------------------------------------------------------------
// Synthesis parameters

// Vowel templates: first three formants in Hz.
constexpr double kVowelFormants[5][3] = {
    {730.0, 1090.0, 2440.0},
    {530.0, 1840.0, 2480.0},
    {390.0, 1990.0, 2550.0},
    {570.0, 840.0, 2410.0},
    {440.0, 1020.0, 2240.0}};

// Loudness compensation per vowel.  The resonator cascade plus spectral
// tilt passes low formants far more readily than high ones; these offsets
// equalize steady-state output power so per-frame energy reflects the
// intended segment gains rather than vowel identity.
constexpr double kVowelGainDb[2][5] = {{-3.0, 9.5, 8.1, -9.4, -5.2},
                                       {-1.0, 6.2, 8.1, -8.6, -4.7}};

// Per-emotion deviations from the neutral voice.  pitch_scale multiplies the
// base pitch; mod_depth/mod_rate shape the pitch modulation; energy_db
// offsets loudness; rate stretches durations (>1 slower); tilt darkens (+)
// or brightens (-) the spectrum; jitter destabilizes per-segment pitch;
// breath scales the aspiration noise; amp_mod adds slow loudness wobble;
// f1_shift/f2_shift displace the two lower formant targets, modelling the
// articulatory posture that accompanies each emotion.  Every trait follows a
// first-harmonic profile around the six emotions, with phases staggered per
// trait: neighbouring emotions differ mildly in every trait at once, while
// emotions three steps apart differ most.  This keeps the pairwise contrast
// budget even across the circle instead of concentrating it in a few pairs.
struct EmotionParams {
  double pitch_scale;
  double mod_depth;
  double mod_rate_hz;
  double energy_db;
  double rate;
  double tilt;
  double jitter;
  double breath;
  double amp_mod_depth;
  double amp_mod_rate_hz;
  double f1_shift;
  double f2_shift;
};

constexpr EmotionParams kNeutralParams = {1.00, 0.010, 5.0,  0.0, 1.00, 0.00,
                                          0.000, 1.0,  0.00, 0.0, 0.00, 0.00};

const EmotionParams &EmotionTable(Emotion e) {
  static const EmotionParams table[kNumEmotions] = {
      // Neutral: lowered pitch, soft, bright
      {0.947, 0.0236, 5.35, -2.13, 1.109, 0.025, 0.0172, 1.093, 0.00, 0.0,
       0.0450, 0.0000},
      // Anger: strong vibrato, fast, bright
      {1.019, 0.0307, 7.77, -1.56, 0.754, 0.034, 0.0114, 1.046, 0.00, 0.0,
       0.0225, 0.0338},
      // Sadness: raised pitch, steady, fastest
      {1.072, 0.0281, 8.41, 0.57, 0.680, 0.009, 0.0072, 1.173, 0.00, 0.0,
       -0.0225, 0.0338},
      // Happiness: raised pitch, loud, brisk, breathy
      {1.053, 0.0184, 6.65, 2.13, 0.902, -0.025, 0.0088, 1.347, 0.00, 0.0,
       -0.0450, 0.0000},
      // Disgust: slack vibrato, slow, dark, breathy
      {0.981, 0.0113, 4.23, 1.56, 1.327, -0.034, 0.0146, 1.394, 0.00, 0.0,
       -0.0225, -0.0338},
      // Fear: lowered pitch, jittery, slowest
      {0.928, 0.0190, 4.60, -0.57, 1.471, 0.010, 0.0188, 1.150, 0.00, 0.0,
       0.0225, -0.0338}};
  return table[static_cast<int>(e)];
}

// Gender pitch bands at full class separation.
constexpr double kMalePitchCenter = 120.0;
constexpr double kMalePitchBand = 10.0;
constexpr double kFemalePitchCenter = 220.0;
constexpr double kFemalePitchBand = 13.0;
constexpr double kNeutralPitch = 160.0;
constexpr double kFemaleFormantShift = 0.30;
// Female emotion articulation displaces formant targets further than male;
// the wider harmonic spacing of a higher-pitched voice samples the spectral
// envelope more coarsely, so an equal relative displacement is less audible.
constexpr double kFemaleEmotionSpectralGain = 1.7;

// Speaker trait spreads.  These carry speaker identity and are kept at full
// strength regardless of class separation; only the gender/emotion class
// structure collapses when class_separation shrinks.  Each speaker owns a
// cell of a fixed palette in the plane of the two lower formant scales, so
// voices keep a guaranteed mutual spacing, plus a private third-formant
// scale and spectral tilt.
constexpr double kSpeakerFormantSpread = 0.065;
constexpr double kSpeakerFormantDither = 0.015;
constexpr double kSpeakerF3Spread = 0.10;
constexpr double kSpeakerTiltSpread = 0.10;
constexpr double kSpeakerPitchDither = 0.015;
// Residual spacing of per-speaker base pitch when the gender bands collapse.
constexpr double kSpeakerPitchFloorHz = 8.0;
constexpr int kSpeakerPalette[8][2] = {{-1, -1}, {-1, 0}, {-1, 1}, {0, -1},
                                       {0, 1},   {1, -1}, {1, 0},  {1, 1}};

// Within-speaker utterance-to-utterance variation (never scaled down).
constexpr double kUttPitchJitter = 0.012;
constexpr double kUttEnergyJitterDb = 0.75;
constexpr double kUttRateJitter = 0.03;
constexpr double kSegDurJitter = 0.07;
constexpr double kSegGainJitterDb = 0.5;
constexpr double kSegGapJitter = 0.15;
constexpr double kSegPitchJitterBase = 0.01;
// Coarticulation: each segment realizes its formant targets imperfectly.
constexpr double kSegFormantJitter = 0.02;

constexpr double kMasterGain = 30.0;
constexpr double kBreathAmp = 0.004;
// Consonant-like noise bursts between voiced segments.  Burst spectra are
// drawn fresh per gap and bypass the vocal tract colouring, so these frames
// are common ground across speakers, emotions, and genders.
constexpr double kBurstAmp = 0.05;
constexpr double kBurstBandwidthHz = 500.0;
constexpr double kBurstMinHz = 350.0;
constexpr double kBurstMaxHz = 3600.0;
constexpr double kBurstFraction = 0.3;
// Shared recording-channel noise.  Loud enough that spectral valleys bottom
// out at a common level, which caps the likelihood penalty a badly matched
// model can accumulate, the way band energies saturate in real channels.
constexpr double kFloorNoiseAmp = 1.5e-4;
constexpr double kEnvelopeEdgeMs = 12.0;

struct Segment {
  int vowel = 0;
  double dur_ms = 0.0;
  double pitch_mult = 1.0;
  double gap_ms = 0.0;
};

// The fixed sentence templates.  Derived from the sentence index alone, so
// every corpus shares the same eight sentences.
std::vector<Segment> SentenceTemplate(int sentence_idx) {
  Rng rng(MixSeed(0x53454e54454e4345ULL, static_cast<uint64_t>(sentence_idx)));
  const int n = 5 + (sentence_idx * 3) % 4;
  std::vector<Segment> segments(n);
  for (Segment &seg : segments) {
    seg.vowel = rng.UniformInt(5);
    seg.dur_ms = rng.Uniform(140.0, 280.0);
    seg.pitch_mult = rng.Uniform(0.92, 1.10);
    seg.gap_ms = rng.Uniform(25.0, 65.0);
  }
  return segments;
}

// Two-pole resonator tuned by center frequency and bandwidth.
class Resonator {
 public:
  void Set(double freq_hz, double bw_hz, double sample_rate) {
    const double r = std::exp(-kPi * bw_hz / sample_rate);
    a1_ = 2.0 * r * std::cos(2.0 * kPi * freq_hz / sample_rate);
    a2_ = -r * r;
    b0_ = 1.0 - r;
  }
  double Step(double x) {
    const double y = b0_ * x + a1_ * z1_ + a2_ * z2_;
    z2_ = z1_;
    z1_ = y;
    return y;
  }

 private:
  double b0_ = 1.0, a1_ = 0.0, a2_ = 0.0;
  double z1_ = 0.0, z2_ = 0.0;
};

int SpeakerIndex(const std::string &speaker_id) {
  // Speaker ids look like M07/F12; the numeric tail is the index.
  int v = 0;
  for (char c : speaker_id) {
    if (c >= '0' && c <= '9') v = v * 10 + (c - '0');
  }
  return v;
}

void ValidateSpec(const SyntheticSpec &spec) {
  if (spec.speakers_per_gender < 1 || spec.speakers_per_gender > 99) {
    throw InvalidSpec("speakers_per_gender must lie in 1..99");
  }
  if (spec.sentences < 1 || spec.sentences > 8) {
    throw InvalidSpec("sentences must lie in 1..8");
  }
  if (spec.reps_per_sentence < 1 || spec.reps_per_sentence > 9) {
    throw InvalidSpec("reps_per_sentence must lie in 1..9");
  }
  if (!(spec.utterance_duration_s > 0.0)) {
    throw InvalidSpec("utterance_duration_s must be positive");
  }
  if (spec.class_separation < 0.0) {
    throw InvalidSpec("class_separation must be non-negative");
  }
  if (spec.emotion_spectral_scale < 0.0) {
    throw InvalidSpec("emotion_spectral_scale must be non-negative");
  }
}

std::string JoinPath(const std::string &dir, const std::string &leaf) {
  return (fs::path(dir) / leaf).string();
}

}  // namespace

WavData ReadWav(const std::string &path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw MissingFile("cannot open WAV file: " + path);
  std::string buf((std::istreambuf_iterator<char>(in)),
                  std::istreambuf_iterator<char>());
  if (buf.size() < 44 || buf.compare(0, 4, "RIFF") != 0 ||
      buf.compare(8, 4, "WAVE") != 0) {
    throw IoError("not a RIFF/WAVE file: " + path);
  }
  WavData wav;
  int channels = 0, bits = 0;
  bool have_fmt = false;
  size_t pos = 12;
  while (pos + 8 <= buf.size()) {
    const std::string id = buf.substr(pos, 4);
    const uint32_t size = GetU32(buf, pos + 4);
    const size_t body = pos + 8;
    if (body + size > buf.size()) {
      throw IoError("truncated WAV chunk in " + path);
    }
    if (id == "fmt ") {
      if (size < 16) throw IoError("malformed fmt chunk in " + path);
      const uint16_t format = GetU16(buf, body);
      channels = GetU16(buf, body + 2);
      wav.sample_rate = static_cast<int>(GetU32(buf, body + 4));
      bits = GetU16(buf, body + 14);
      if (format != 1) throw IoError("only PCM WAV is supported: " + path);
      have_fmt = true;
    } else if (id == "data") {
      if (!have_fmt) throw IoError("data chunk before fmt in " + path);
      if (channels != 1 || bits != 16) {
        throw IoError("only 16-bit mono WAV is supported: " + path);
      }
      const size_t n = size / 2;
      wav.samples.resize(n);
      for (size_t i = 0; i < n; ++i) {
        const int16_t s = static_cast<int16_t>(GetU16(buf, body + 2 * i));
        wav.samples[i] = s / 32768.0;
      }
      return wav;
    }
    pos = body + size + (size & 1);
  }
  throw IoError("WAV file has no data chunk: " + path);
}

void WriteWav(const std::string &path, const std::vector<double> &samples,
              int sample_rate) {
  std::string buf;
  buf.reserve(44 + samples.size() * 2);
  const uint32_t data_size = static_cast<uint32_t>(samples.size() * 2);
  buf.append("RIFF");
  PutU32(buf, 36 + data_size);
  buf.append("WAVE");
  buf.append("fmt ");
  PutU32(buf, 16);
  PutU16(buf, 1);  // PCM
  PutU16(buf, 1);  // mono
  PutU32(buf, static_cast<uint32_t>(sample_rate));
  PutU32(buf, static_cast<uint32_t>(sample_rate * 2));
  PutU16(buf, 2);   // block align
  PutU16(buf, 16);  // bits per sample
  buf.append("data");
  PutU32(buf, data_size);
  for (double x : samples) {
    const double clamped = std::clamp(x, -1.0, 1.0);
    const int v = static_cast<int>(std::lround(clamped * 32767.0));
    PutU16(buf, static_cast<uint16_t>(std::clamp(v, -32768, 32767)));
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open for writing: " + path);
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  if (!out) throw IoError("write failed: " + path);
}

CorpusManifest LoadManifest(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw MissingFile("cannot open manifest: " + path);
  const fs::path base_dir = fs::path(path).parent_path();

  CorpusManifest manifest;
  for (Emotion e : kAllEmotions) manifest.emotions.push_back(ToLabel(e));

  std::set<std::string> keys;
  std::set<std::string> male_speakers, female_speakers;
  std::string line;
  int line_no = 0;
  auto malformed = [&line_no](const std::string &why) {
    return MalformedRecord("manifest line " + std::to_string(line_no) + ": " +
                           why);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> fields;
    size_t start = 0;
    while (true) {
      const size_t tab = line.find('\t', start);
      if (tab == std::string::npos) {
        fields.push_back(line.substr(start));
        break;
      }
      fields.push_back(line.substr(start, tab - start));
      start = tab + 1;
    }
    if (fields.size() != 8) {
      throw malformed("expected 8 tab-separated fields, found " +
                      std::to_string(fields.size()));
    }
    UtteranceRecord rec;
    rec.utterance_id = fields[0];
    rec.speaker_id = fields[1];
    if (rec.utterance_id.empty() || rec.speaker_id.empty()) {
      throw malformed("empty utterance or speaker id");
    }
    try {
      rec.gender = GenderFromLabel(fields[2]);
      rec.emotion = EmotionFromLabel(fields[3]);
      rec.split = SplitFromLabel(fields[6]);
    } catch (const Error &e) {
      throw malformed(e.what());
    }
    auto parse_int = [&malformed](const std::string &s, const char *what) {
      int v = 0;
      const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (ec != std::errc() || ptr != s.data() + s.size()) {
        throw malformed(std::string("cannot parse ") + what + ": " + s);
      }
      return v;
    };
    rec.sentence_idx = parse_int(fields[4], "sentence_idx");
    rec.rep_idx = parse_int(fields[5], "rep_idx");
    if (rec.sentence_idx < 1 || rec.sentence_idx > 8) {
      throw malformed("sentence_idx out of range 1..8");
    }
    if (rec.rep_idx < 1 || rec.rep_idx > 9) {
      throw malformed("rep_idx out of range 1..9");
    }
    const Split expected =
        rec.sentence_idx <= 4 ? Split::kTrain : Split::kTest;
    if (rec.split != expected) {
      throw malformed("split does not match sentence_idx (sentences 1..4 "
                      "train, 5..8 test)");
    }
    if (fields[7].empty()) throw malformed("empty audio path");
    fs::path audio(fields[7]);
    if (audio.is_relative()) audio = base_dir / audio;
    rec.audio_path = audio.string();
    if (!fs::exists(audio)) {
      throw MissingFile("manifest line " + std::to_string(line_no) +
                        ": audio file not found: " + rec.audio_path);
    }

    const std::string key = rec.speaker_id + "|" + ToLabel(rec.emotion) +
                            "|s" + std::to_string(rec.sentence_idx) + "|r" +
                            std::to_string(rec.rep_idx);
    if (!keys.insert(key).second) {
      throw DuplicateUtterance("duplicate utterance key: " + key);
    }
    (rec.gender == Gender::kMale ? male_speakers : female_speakers)
        .insert(rec.speaker_id);
    manifest.records.push_back(std::move(rec));
  }
  manifest.speakers_per_gender = static_cast<int>(
      std::max(male_speakers.size(), female_speakers.size()));
  return manifest;
}

CorpusManifest PlanSynthetic(const SyntheticSpec &spec,
                             const std::string &out_dir) {
  ValidateSpec(spec);
  CorpusManifest manifest;
  manifest.speakers_per_gender = spec.speakers_per_gender;
  for (Emotion e : kAllEmotions) manifest.emotions.push_back(ToLabel(e));
  char speaker_id[16];
  for (Gender g : kAllGenders) {
    for (int s = 1; s <= spec.speakers_per_gender; ++s) {
      std::snprintf(speaker_id, sizeof(speaker_id), "%c%02d",
                    g == Gender::kMale ? 'M' : 'F', s);
      for (Emotion e : kAllEmotions) {
        for (int sent = 1; sent <= spec.sentences; ++sent) {
          for (int rep = 1; rep <= spec.reps_per_sentence; ++rep) {
            UtteranceRecord rec;
            rec.speaker_id = speaker_id;
            rec.gender = g;
            rec.emotion = e;
            rec.sentence_idx = sent;
            rec.rep_idx = rep;
            rec.split = sent <= 4 ? Split::kTrain : Split::kTest;
            rec.utterance_id = rec.speaker_id + std::string("_") +
                               ToLabel(e) + "_s" + std::to_string(sent) +
                               "_r" + std::to_string(rep);
            rec.audio_path =
                JoinPath(out_dir, "wav/" + rec.utterance_id + ".wav");
            manifest.records.push_back(std::move(rec));
          }
        }
      }
    }
  }
  return manifest;
}

std::vector<double> SynthesizeUtterance(const SyntheticSpec &spec,
                                        const UtteranceRecord &record,
                                        int sample_rate) {
  const double s = spec.class_separation;
  const double ess = spec.emotion_spectral_scale;
  const double sr = static_cast<double>(sample_rate);

  // Fixed speaker traits, derived from the speaker id so every utterance of
  // a speaker shares them.
  Rng speaker_rng(MixSeed(spec.seed, Fnv1a("speaker/" + record.speaker_id)));
  const int speaker_idx = SpeakerIndex(record.speaker_id);
  const int n_speakers = spec.speakers_per_gender;
  double position = n_speakers > 1
                        ? -1.0 + 2.0 * (speaker_idx - 1) / (n_speakers - 1)
                        : 0.0;
  position += std::clamp(kSpeakerPitchDither * speaker_rng.Normal(), -0.08,
                         0.08);
  const bool female = record.gender == Gender::kFemale;
  const double center = female ? kFemalePitchCenter : kMalePitchCenter;
  const double band = female ? kFemalePitchBand : kMalePitchBand;
  const double speaker_band =
      kSpeakerPitchFloorHz + s * (band - kSpeakerPitchFloorHz);
  const double base_f0 = kNeutralPitch + s * (center - kNeutralPitch) +
                         position * speaker_band;
  const int cell = (speaker_idx - 1) % 8;
  const double gender_shift = s * (female ? kFemaleFormantShift : 0.0);
  const double f1_scale =
      1.0 + gender_shift + kSpeakerFormantSpread * kSpeakerPalette[cell][0] +
      kSpeakerFormantDither * speaker_rng.Uniform(-1.0, 1.0);
  const double f2_scale =
      1.0 + gender_shift + kSpeakerFormantSpread * kSpeakerPalette[cell][1] +
      kSpeakerFormantDither * speaker_rng.Uniform(-1.0, 1.0);
  const double f3_scale =
      1.0 + gender_shift + kSpeakerF3Spread * speaker_rng.Uniform(-1.0, 1.0);
  const double speaker_tilt =
      kSpeakerTiltSpread * speaker_rng.Uniform(-1.0, 1.0);

  // Emotion profile, interpolated from neutral by the class separation, with
  // spectral components additionally scaled by emotion_spectral_scale.
  const EmotionParams &target = EmotionTable(record.emotion);
  EmotionParams emo;
  emo.pitch_scale =
      kNeutralParams.pitch_scale + s * (target.pitch_scale - 1.0);
  emo.mod_depth = kNeutralParams.mod_depth +
                  s * (target.mod_depth - kNeutralParams.mod_depth);
  emo.mod_rate_hz = kNeutralParams.mod_rate_hz +
                    s * (target.mod_rate_hz - kNeutralParams.mod_rate_hz);
  emo.energy_db = s * target.energy_db;
  emo.rate = 1.0 + s * (target.rate - 1.0);
  emo.tilt = s * ess * target.tilt;
  emo.jitter = s * target.jitter;
  emo.breath = 1.0 + s * ess * (target.breath - 1.0);
  emo.amp_mod_depth = s * target.amp_mod_depth;
  emo.amp_mod_rate_hz = target.amp_mod_rate_hz;
  const double spectral_gain = female ? kFemaleEmotionSpectralGain : 1.0;
  emo.f1_shift = s * ess * target.f1_shift * spectral_gain;
  emo.f2_shift = s * ess * target.f2_shift * spectral_gain;

  // Per-utterance variation.
  Rng rng(MixSeed(spec.seed, Fnv1a(record.utterance_id)));
  const double f0_utt =
      1.0 + kUttPitchJitter * std::clamp(rng.Normal(), -3.0, 3.0);
  const double energy_db_utt = kUttEnergyJitterDb * rng.Normal();
  const double rate_utt =
      std::clamp(1.0 + kUttRateJitter * rng.Normal(), 0.75, 1.3);
  double pulse_phase = rng.Uniform();
  double vib_phase = rng.Uniform(0.0, 2.0 * kPi);
  const double amp_phase = rng.Uniform(0.0, 2.0 * kPi);

  // Segment plan.
  std::vector<Segment> plan = SentenceTemplate(record.sentence_idx);
  double nominal_ms = 0.0;
  for (const Segment &seg : plan) nominal_ms += seg.dur_ms + seg.gap_ms;
  const double fit = 1000.0 * spec.utterance_duration_s / nominal_ms;
  const double stretch = emo.rate * rate_utt;
  struct LiveSegment {
    int vowel;
    double dur_ms, gap_ms, f0, gain, f1_jit, f2_jit;
  };
  std::vector<LiveSegment> live;
  live.reserve(plan.size());
  for (const Segment &seg : plan) {
    LiveSegment ls;
    ls.vowel = seg.vowel;
    ls.f1_jit = 1.0 + kSegFormantJitter * std::clamp(rng.Normal(), -2.5, 2.5);
    ls.f2_jit = 1.0 + kSegFormantJitter * std::clamp(rng.Normal(), -2.5, 2.5);
    const double dur_jit =
        1.0 + kSegDurJitter * std::clamp(rng.Normal(), -2.5, 2.5);
    const double gap_jit =
        1.0 + kSegGapJitter * std::clamp(rng.Normal(), -2.5, 2.5);
    ls.dur_ms = std::max(40.0, seg.dur_ms * fit * stretch * dur_jit);
    ls.gap_ms = std::max(10.0, seg.gap_ms * fit * stretch * gap_jit);
    const double seg_pitch_jit =
        1.0 + (kSegPitchJitterBase + emo.jitter) *
                  std::clamp(rng.Normal(), -2.5, 2.5);
    ls.f0 = base_f0 * emo.pitch_scale * seg.pitch_mult * f0_utt *
            seg_pitch_jit;
    const double gain_db = emo.energy_db + energy_db_utt +
                           kVowelGainDb[female ? 1 : 0][ls.vowel] +
                           kSegGainJitterDb * rng.Normal();
    ls.gain = std::pow(10.0, gain_db / 20.0);
    live.push_back(ls);
  }

  std::vector<double> out;
  out.reserve(static_cast<size_t>(
      sr * (spec.utterance_duration_s * stretch + 1.0)));

  Resonator f1, f2, f3;
  double tilt_state = 0.0;
  const double tilt_a =
      std::clamp(0.70 + speaker_tilt + emo.tilt, 0.05, 0.97);
  const int edge = static_cast<int>(kEnvelopeEdgeMs * sr / 1000.0);
  double t_global = 0.0;
  const double dt = 1.0 / sr;

  for (const LiveSegment &seg : live) {
    f1.Set(kVowelFormants[seg.vowel][0] * f1_scale * (1.0 + emo.f1_shift) *
               seg.f1_jit,
           80.0, sr);
    f2.Set(kVowelFormants[seg.vowel][1] * f2_scale * (1.0 + emo.f2_shift) *
               seg.f2_jit,
           120.0, sr);
    f3.Set(kVowelFormants[seg.vowel][2] * f3_scale, 160.0, sr);
    const int n_seg = static_cast<int>(std::lround(seg.dur_ms * sr / 1000.0));
    const int n_gap = static_cast<int>(std::lround(seg.gap_ms * sr / 1000.0));
    for (int i = 0; i < n_seg; ++i) {
      double env = 1.0;
      if (i < edge) {
        env = 0.5 - 0.5 * std::cos(kPi * i / edge);
      } else if (n_seg - 1 - i < edge) {
        env = 0.5 - 0.5 * std::cos(kPi * (n_seg - 1 - i) / edge);
      }
      const double vib = 1.0 + emo.mod_depth * std::sin(vib_phase);
      const double f0_inst = std::clamp(seg.f0 * vib, 50.0, 480.0);
      vib_phase += 2.0 * kPi * emo.mod_rate_hz * dt;
      pulse_phase += f0_inst * dt;
      double excite = 0.0;
      if (pulse_phase >= 1.0) {
        pulse_phase -= 1.0;
        // Normalizing by pulse rate keeps power comparable across pitches.
        excite = kMasterGain * std::sqrt(kNeutralPitch / f0_inst);
      }
      double amp = 1.0;
      if (emo.amp_mod_depth > 0.0) {
        amp += emo.amp_mod_depth *
               std::sin(2.0 * kPi * emo.amp_mod_rate_hz * t_global +
                        amp_phase);
      }
      const double breath = kBreathAmp * emo.breath * rng.Normal();
      const double src = (excite + breath) * env * seg.gain * amp;
      double y = f3.Step(f2.Step(f1.Step(src)));
      tilt_state = (1.0 - tilt_a) * y + tilt_a * tilt_state;
      out.push_back(tilt_state + kFloorNoiseAmp * rng.Normal());
      t_global += dt;
    }
    Resonator burst;
    burst.Set(rng.Uniform(kBurstMinHz, kBurstMaxHz), kBurstBandwidthHz, sr);
    const double burst_amp = kBurstAmp;
    const int n_burst = static_cast<int>(kBurstFraction * n_gap);
    for (int i = 0; i < n_gap; ++i) {
      double y = f3.Step(f2.Step(f1.Step(0.0)));
      tilt_state = (1.0 - tilt_a) * y + tilt_a * tilt_state;
      double b = 0.0;
      if (i < n_burst) b = burst.Step(burst_amp * rng.Normal());
      out.push_back(tilt_state + b + kFloorNoiseAmp * rng.Normal());
      t_global += dt;
    }
  }
  for (double &x : out) x = std::clamp(x, -0.999, 0.999);
  return out;
}

CorpusManifest GenerateSynthetic(const SyntheticSpec &spec,
                                 const std::string &out_dir) {
  CorpusManifest manifest = PlanSynthetic(spec, out_dir);
  std::error_code ec;
  fs::create_directories(fs::path(out_dir) / "wav", ec);
  if (ec) throw IoError("cannot create output directory: " + out_dir);

  std::string manifest_text =
      "# utterance_id\tspeaker_id\tgender\temotion\tsentence_idx\trep_idx\t"
      "split\taudio_path\n";
  for (const UtteranceRecord &rec : manifest.records) {
    const std::vector<double> audio =
        SynthesizeUtterance(spec, rec, manifest.sample_rate_hz);
    WriteWav(rec.audio_path, audio, manifest.sample_rate_hz);
    manifest_text += rec.utterance_id + "\t" + rec.speaker_id + "\t" +
                     ToLabel(rec.gender) + "\t" + ToLabel(rec.emotion) +
                     "\t" + std::to_string(rec.sentence_idx) + "\t" +
                     std::to_string(rec.rep_idx) + "\t" +
                     ToLabel(rec.split) + "\twav/" + rec.utterance_id +
                     ".wav\n";
  }
  const std::string manifest_path = JoinPath(out_dir, "manifest.tsv");
  std::ofstream out(manifest_path);
  if (!out) throw IoError("cannot open for writing: " + manifest_path);
  out << manifest_text;
  if (!out) throw IoError("write failed: " + manifest_path);
  return manifest;
}

CorpusManifest FilterRecords(const CorpusManifest &manifest,
                             const RecordFilter &filter) {
  CorpusManifest result;
  result.sample_rate_hz = manifest.sample_rate_hz;
  result.emotions = manifest.emotions;
  result.speakers_per_gender = manifest.speakers_per_gender;
  for (const UtteranceRecord &rec : manifest.records) {
    if (filter.gender && rec.gender != *filter.gender) continue;
    if (filter.emotion && rec.emotion != *filter.emotion) continue;
    if (filter.split && rec.split != *filter.split) continue;
    if (filter.speaker && rec.speaker_id != *filter.speaker) continue;
    result.records.push_back(rec);
  }
  return result;
}

}  // namespace emocascade
