// src/common.cpp

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

#include "emocascade/common.hpp"

#include <algorithm>

namespace emocascade {

const char *ToLabel(Gender g) {
  return g == Gender::kMale ? "Male" : "Female";
}

const char *ToLabel(Emotion e) {
  switch (e) {
    case Emotion::kNeutral:
      return "Neutral";
    case Emotion::kAnger:
      return "Anger";
    case Emotion::kSadness:
      return "Sadness";
    case Emotion::kHappiness:
      return "Happiness";
    case Emotion::kDisgust:
      return "Disgust";
    case Emotion::kFear:
      return "Fear";
  }
  return "Neutral";
}

const char *ToLabel(Split s) {
  return s == Split::kTrain ? "Train" : "Test";
}

const char *ToLabel(Decision d) {
  return d == Decision::kAccept ? "Accept" : "Reject";
}

Gender GenderFromLabel(std::string_view label) {
  if (label == "Male") return Gender::kMale;
  if (label == "Female") return Gender::kFemale;
  throw Error("unknown gender label: " + std::string(label));
}

Emotion EmotionFromLabel(std::string_view label) {
  for (Emotion e : kAllEmotions) {
    if (label == ToLabel(e)) return e;
  }
  throw Error("unknown emotion label: " + std::string(label));
}

Split SplitFromLabel(std::string_view label) {
  if (label == "Train") return Split::kTrain;
  if (label == "Test") return Split::kTest;
  throw Error("unknown split label: " + std::string(label));
}

uint64_t Fnv1a(std::string_view s) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

uint64_t MixSeed(uint64_t base, uint64_t salt) {
  uint64_t z = base + 0x9e3779b97f4a7c15ULL * (salt | 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

int Rng::UniformInt(int n) {
  if (n <= 0) throw Error("UniformInt requires a positive bound");
  // Rejection sampling to avoid modulo bias.
  const uint64_t bound = static_cast<uint64_t>(n);
  const uint64_t limit = std::numeric_limits<uint64_t>::max() -
                         std::numeric_limits<uint64_t>::max() % bound;
  uint64_t x = gen_();
  while (x >= limit) x = gen_();
  return static_cast<int>(x % bound);
}

double Rng::Normal() {
  // Guard against log(0); the smallest uniform draw maps to a large but
  // finite deviate.
  double u1 = Uniform();
  if (u1 <= 0.0) u1 = 0x1.0p-53;
  const double u2 = Uniform();
  const double two_pi = 2.0 * 3.14159265358979323846;
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(two_pi * u2);
}

double LogAdd(double a, double b) {
  if (a == kLogZero) return b;
  if (b == kLogZero) return a;
  if (a < b) std::swap(a, b);
  return a + std::log1p(std::exp(b - a));
}

double LogSumExp(std::span<const double> v) {
  double max_val = kLogZero;
  for (double x : v) max_val = std::max(max_val, x);
  if (max_val == kLogZero) return kLogZero;
  double sum = 0.0;
  for (double x : v) sum += std::exp(x - max_val);
  return max_val + std::log(sum);
}

}  // namespace emocascade
