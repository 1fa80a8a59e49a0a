// include/emocascade/common.hpp

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

#ifndef EMOCASCADE_COMMON_HPP_
#define EMOCASCADE_COMMON_HPP_

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace emocascade {

// Base class for every error thrown by this library.  The CLI maps these to
// exit code 1 with a one line diagnostic.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// File system level failure: unreadable, unwritable, or truncated files.
struct IoError : Error {
  using Error::Error;
};

enum class Gender { kMale = 0, kFemale = 1 };
enum class Emotion {
  kNeutral = 0,
  kAnger = 1,
  kSadness = 2,
  kHappiness = 3,
  kDisgust = 4,
  kFear = 5
};
enum class Split { kTrain = 0, kTest = 1 };
enum class Decision { kReject = 0, kAccept = 1 };

constexpr int kNumGenders = 2;
constexpr int kNumEmotions = 6;

constexpr std::array<Gender, 2> kAllGenders = {Gender::kMale, Gender::kFemale};
constexpr std::array<Emotion, 6> kAllEmotions = {
    Emotion::kNeutral,   Emotion::kAnger,   Emotion::kSadness,
    Emotion::kHappiness, Emotion::kDisgust, Emotion::kFear};

const char *ToLabel(Gender g);
const char *ToLabel(Emotion e);
const char *ToLabel(Split s);
const char *ToLabel(Decision d);

// Parse a label produced by the matching ToLabel overload.  Throws Error on
// anything else.
Gender GenderFromLabel(std::string_view label);
Emotion EmotionFromLabel(std::string_view label);
Split SplitFromLabel(std::string_view label);

// Dense row major matrix of doubles.  Feature sequences store one frame per
// row; model parameters store one mixture component or state per row.
struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  Matrix() = default;
  Matrix(int r, int c, double fill = 0.0)
      : rows(r), cols(c), data(static_cast<size_t>(r) * c, fill) {}

  double &operator()(int r, int c) {
    return data[static_cast<size_t>(r) * cols + c];
  }
  double operator()(int r, int c) const {
    return data[static_cast<size_t>(r) * cols + c];
  }
  std::span<double> Row(int r) {
    return {data.data() + static_cast<size_t>(r) * cols,
            static_cast<size_t>(cols)};
  }
  std::span<const double> Row(int r) const {
    return {data.data() + static_cast<size_t>(r) * cols,
            static_cast<size_t>(cols)};
  }
  bool operator==(const Matrix &other) const = default;
};

// Sequence of acoustic feature vectors for one utterance, one frame per row.
struct ObservationSequence {
  Matrix frames;
  double frame_len_ms = 0.0;
  double frame_hop_ms = 0.0;

  int Length() const { return frames.rows; }
  int Dim() const { return frames.cols; }
};

// Sequence of prosodic feature vectors for one utterance.  Framing is
// identical to the acoustic sequence extracted from the same audio, so the
// two sequences always have the same number of rows.
struct ProsodicSequence {
  Matrix frames;
  double frame_len_ms = 0.0;
  double frame_hop_ms = 0.0;

  int Length() const { return frames.rows; }
  int Dim() const { return frames.cols; }
};

// 64 bit FNV-1a hash, used to derive independent random substreams from
// string identifiers.
uint64_t Fnv1a(std::string_view s);

// Mixes a base seed with a salt (typically Fnv1a of an identifier) into a new
// seed via a splitmix64 round, so substreams are decorrelated.
uint64_t MixSeed(uint64_t base, uint64_t salt);

// Deterministic random number generator.  All randomness in the library goes
// through this class so results are reproducible across platforms.
class Rng {
 public:
  explicit Rng(uint64_t seed) : gen_(seed) {}

  // Raw 64 bit draw.
  uint64_t Next() { return gen_(); }

  // Uniform double in [0, 1) with 53 bits of precision.
  double Uniform() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  // Uniform double in [lo, hi).
  double Uniform(double lo, double hi) { return lo + (hi - lo) * Uniform(); }

  // Uniform integer in [0, n).  n must be positive.
  int UniformInt(int n);

  // Standard normal deviate via the Box-Muller transform.  Uses two uniform
  // draws per call so the stream layout is easy to reason about.
  double Normal();

  // Normal deviate with the given mean and standard deviation.
  double Normal(double mean, double stddev) {
    return mean + stddev * Normal();
  }

 private:
  // mt19937_64 has a portable, fully specified output sequence.
  std::mt19937_64 gen_;
};

constexpr double kLogZero = -std::numeric_limits<double>::infinity();

// log(exp(a) + exp(b)) without overflow; handles -inf operands.
double LogAdd(double a, double b);

// log(sum_i exp(v[i])) without overflow.  Returns -inf for an all--inf input.
double LogSumExp(std::span<const double> v);

}  // namespace emocascade

#endif  // EMOCASCADE_COMMON_HPP_
