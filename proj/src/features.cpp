// src/features.cpp

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

#include "emocascade/features.hpp"

#include <algorithm>
#include <cmath>

namespace emocascade {

namespace {

constexpr double kPi = 3.14159265358979323846;

// Filterbank outputs are floored before the log so silence stays finite.
constexpr double kEnergyFloor = 1e-10;

// Normalized autocorrelation peak needed to call a frame voiced.
constexpr double kVoicingThreshold = 0.3;

// Energy step treated as "steady" by the speaking rate proxy: 3 dB of power
// expressed in natural log units, 3/10 * ln(10).
constexpr double kRateEnergyStep = 0.6907755278982137;

int FrameLenSamples(double sample_rate, const FeatureConfig &config) {
  return static_cast<int>(std::lround(config.frame_len_ms * sample_rate /
                                      1000.0));
}

int FrameHopSamples(double sample_rate, const FeatureConfig &config) {
  return static_cast<int>(std::lround(config.frame_hop_ms * sample_rate /
                                      1000.0));
}

int NextPow2(int n) {
  int p = 1;
  while (p < n) p *= 2;
  return p;
}

double FrameLogEnergy(std::span<const double> frame) {
  double energy = 0.0;
  for (double x : frame) energy += x * x;
  return std::log(std::max(energy, kEnergyFloor));
}

}  // namespace

std::vector<double> Preemphasize(std::span<const double> samples,
                                 double coeff) {
  std::vector<double> out(samples.size());
  if (samples.empty()) return out;
  out[0] = samples[0];
  for (size_t n = 1; n < samples.size(); ++n) {
    out[n] = samples[n] - coeff * samples[n - 1];
  }
  return out;
}

std::vector<double> HammingWindow(int len) {
  std::vector<double> w(len, 1.0);
  if (len < 2) return w;
  for (int k = 0; k < len; ++k) {
    w[k] = 0.54 - 0.46 * std::cos(2.0 * kPi * k / (len - 1));
  }
  return w;
}

Matrix FrameAndWindow(std::span<const double> samples, double sample_rate,
                      const FeatureConfig &config) {
  const int len = FrameLenSamples(sample_rate, config);
  const int hop = FrameHopSamples(sample_rate, config);
  if (static_cast<int>(samples.size()) < len) {
    throw TooShort("signal shorter than one analysis frame");
  }
  const int num_frames =
      1 + static_cast<int>((samples.size() - len) / static_cast<size_t>(hop));
  const std::vector<double> window = HammingWindow(len);
  Matrix frames(num_frames, len);
  for (int t = 0; t < num_frames; ++t) {
    const size_t start = static_cast<size_t>(t) * hop;
    for (int k = 0; k < len; ++k) {
      frames(t, k) = samples[start + k] * window[k];
    }
  }
  return frames;
}

void Fft(std::vector<std::complex<double>> &data) {
  const size_t n = data.size();
  if (n < 2) return;
  // Bit reversal permutation.
  for (size_t i = 1, j = 0; i < n; ++i) {
    size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(data[i], data[j]);
  }
  // Iterative Cooley-Tukey butterflies.
  for (size_t len = 2; len <= n; len <<= 1) {
    const double angle = -2.0 * kPi / static_cast<double>(len);
    const std::complex<double> wlen(std::cos(angle), std::sin(angle));
    for (size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (size_t k = 0; k < len / 2; ++k) {
        const std::complex<double> u = data[i + k];
        const std::complex<double> v = data[i + k + len / 2] * w;
        data[i + k] = u + v;
        data[i + k + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
}

std::vector<double> MagnitudeSpectrum(std::span<const double> frame) {
  const int n_fft = NextPow2(static_cast<int>(frame.size()));
  std::vector<std::complex<double>> buf(n_fft, {0.0, 0.0});
  for (size_t k = 0; k < frame.size(); ++k) buf[k] = {frame[k], 0.0};
  Fft(buf);
  std::vector<double> mag(n_fft / 2 + 1);
  for (int k = 0; k <= n_fft / 2; ++k) mag[k] = std::abs(buf[k]);
  return mag;
}

double MelScale(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }

double InvMelScale(double mel) {
  return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
}

Matrix BuildMelFilterbank(int n_filters, int n_fft, double sample_rate) {
  const int n_bins = n_fft / 2 + 1;
  const double mel_max = MelScale(sample_rate / 2.0);
  // n_filters triangles need n_filters + 2 edge points on the mel axis.
  std::vector<double> edges(n_filters + 2);
  for (int i = 0; i < n_filters + 2; ++i) {
    edges[i] = mel_max * i / (n_filters + 1);
  }
  Matrix fb(n_filters, n_bins);
  for (int k = 0; k < n_bins; ++k) {
    const double mel_k = MelScale(k * sample_rate / n_fft);
    for (int i = 0; i < n_filters; ++i) {
      const double lo = edges[i];
      const double mid = edges[i + 1];
      const double hi = edges[i + 2];
      double w = 0.0;
      if (mel_k >= lo && mel_k <= mid && mid > lo) {
        w = (mel_k - lo) / (mid - lo);
      } else if (mel_k > mid && mel_k <= hi && hi > mid) {
        w = (hi - mel_k) / (hi - mid);
      }
      fb(i, k) = w;
    }
  }
  return fb;
}

std::vector<double> Mfcc(std::span<const double> frame,
                         const FeatureConfig &config) {
  // The frame length in samples together with frame_len_ms pins the sample
  // rate, so the config alone is enough to place the filterbank.
  const double sample_rate =
      1000.0 * static_cast<double>(frame.size()) / config.frame_len_ms;
  const std::vector<double> mag = MagnitudeSpectrum(frame);
  const int n_fft = 2 * (static_cast<int>(mag.size()) - 1);
  const Matrix fb =
      BuildMelFilterbank(config.n_mel_filters, n_fft, sample_rate);
  std::vector<double> log_mel(config.n_mel_filters);
  for (int i = 0; i < config.n_mel_filters; ++i) {
    double acc = 0.0;
    for (size_t k = 0; k < mag.size(); ++k) acc += fb(i, static_cast<int>(k)) * mag[k];
    log_mel[i] = std::log(std::max(acc, kEnergyFloor));
  }
  std::vector<double> out(config.n_cepstra + 1);
  const int n = config.n_mel_filters;
  for (int k = 0; k < config.n_cepstra; ++k) {
    double acc = 0.0;
    for (int j = 0; j < n; ++j) {
      acc += log_mel[j] * std::cos(kPi * k * (j + 0.5) / n);
    }
    out[k] = acc;
  }
  out[config.n_cepstra] = FrameLogEnergy(frame);
  return out;
}

ObservationSequence ExtractAcoustic(std::span<const double> samples,
                                    double sample_rate,
                                    const FeatureConfig &config) {
  const std::vector<double> emphasized =
      Preemphasize(samples, config.preemphasis_coeff);
  const Matrix frames = FrameAndWindow(emphasized, sample_rate, config);
  ObservationSequence seq;
  seq.frame_len_ms = config.frame_len_ms;
  seq.frame_hop_ms = config.frame_hop_ms;
  seq.frames = Matrix(frames.rows, config.n_cepstra + 1);
  for (int t = 0; t < frames.rows; ++t) {
    const std::vector<double> coeffs = Mfcc(frames.Row(t), config);
    for (int d = 0; d < seq.frames.cols; ++d) seq.frames(t, d) = coeffs[d];
  }
  return seq;
}

ProsodicSequence ExtractProsodic(std::span<const double> samples,
                                 double sample_rate,
                                 const FeatureConfig &config) {
  const int len = FrameLenSamples(sample_rate, config);
  const int hop = FrameHopSamples(sample_rate, config);
  if (static_cast<int>(samples.size()) < len) {
    throw TooShort("signal shorter than one analysis frame");
  }
  const int num_frames =
      1 + static_cast<int>((samples.size() - len) / static_cast<size_t>(hop));

  const int lag_min =
      std::max(1, static_cast<int>(std::floor(sample_rate /
                                              config.pitch_max_hz)));
  const int lag_max =
      std::min(len - 2, static_cast<int>(std::ceil(sample_rate /
                                                   config.pitch_min_hz)));
  const double band_mid_hz = 0.5 * (config.pitch_min_hz + config.pitch_max_hz);

  std::vector<double> log_energy(num_frames);
  std::vector<double> pitch_hz(num_frames);
  std::vector<double> voiced(num_frames);

  double last_voiced_hz = band_mid_hz;
  for (int t = 0; t < num_frames; ++t) {
    const double *x = samples.data() + static_cast<size_t>(t) * hop;
    double r0 = 0.0;
    for (int k = 0; k < len; ++k) r0 += x[k] * x[k];
    log_energy[t] = std::log(std::max(r0, kEnergyFloor));

    double best_r = 0.0;
    int best_lag = 0;
    if (r0 > kEnergyFloor && lag_max > lag_min) {
      for (int lag = lag_min; lag <= lag_max; ++lag) {
        double r = 0.0;
        for (int k = 0; k + lag < len; ++k) r += x[k] * x[k + lag];
        if (r > best_r) {
          best_r = r;
          best_lag = lag;
        }
      }
    }
    if (best_lag > 0 && best_r / r0 >= kVoicingThreshold) {
      // Parabolic interpolation around the peak for sub-sample lag accuracy.
      double refined = best_lag;
      if (best_lag > lag_min && best_lag < lag_max) {
        auto corr_at = [&](int lag) {
          double r = 0.0;
          for (int k = 0; k + lag < len; ++k) r += x[k] * x[k + lag];
          return r;
        };
        const double rl = corr_at(best_lag - 1);
        const double rr = corr_at(best_lag + 1);
        const double denom = rl - 2.0 * best_r + rr;
        if (std::abs(denom) > 1e-30) {
          const double delta = 0.5 * (rl - rr) / denom;
          if (std::abs(delta) <= 1.0) refined += delta;
        }
      }
      double f0 = sample_rate / refined;
      f0 = std::clamp(f0, config.pitch_min_hz, config.pitch_max_hz);
      pitch_hz[t] = f0;
      voiced[t] = 1.0;
      last_voiced_hz = f0;
    } else {
      pitch_hz[t] = last_voiced_hz;
      voiced[t] = 0.0;
    }
  }

  ProsodicSequence seq;
  seq.frame_len_ms = config.frame_len_ms;
  seq.frame_hop_ms = config.frame_hop_ms;
  seq.frames = Matrix(num_frames, 5);
  int run_length = 1;
  for (int t = 0; t < num_frames; ++t) {
    double delta;
    if (num_frames == 1) {
      delta = 0.0;
    } else if (t == 0) {
      delta = log_energy[1] - log_energy[0];
    } else if (t == num_frames - 1) {
      delta = log_energy[t] - log_energy[t - 1];
    } else {
      delta = 0.5 * (log_energy[t + 1] - log_energy[t - 1]);
    }
    if (t > 0) {
      if (std::abs(log_energy[t] - log_energy[t - 1]) <= kRateEnergyStep) {
        ++run_length;
      } else {
        run_length = 1;
      }
    }
    seq.frames(t, 0) = std::log(pitch_hz[t]);
    seq.frames(t, 1) = voiced[t];
    seq.frames(t, 2) = log_energy[t];
    seq.frames(t, 3) = delta;
    seq.frames(t, 4) = 1.0 / run_length;
  }
  return seq;
}

}  // namespace emocascade
