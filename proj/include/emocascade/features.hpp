// include/emocascade/features.hpp

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

#ifndef EMOCASCADE_FEATURES_HPP_
#define EMOCASCADE_FEATURES_HPP_

#include <complex>
#include <span>
#include <vector>

#include "emocascade/common.hpp"

namespace emocascade {

// Raised when a signal is shorter than one analysis frame.
struct TooShort : Error {
  using Error::Error;
};

// Front end configuration shared by acoustic and prosodic extraction.
struct FeatureConfig {
  double preemphasis_coeff = 0.97;
  double frame_len_ms = 30.0;
  double frame_hop_ms = 10.0;
  int n_mel_filters = 24;
  int n_cepstra = 12;
  double pitch_min_hz = 60.0;
  double pitch_max_hz = 400.0;

  bool operator==(const FeatureConfig &other) const = default;
};

// First order high pass filter: y[0] = x[0], y[n] = x[n] - coeff * x[n-1].
std::vector<double> Preemphasize(std::span<const double> samples,
                                 double coeff);

// Hamming window of length len: w[k] = 0.54 - 0.46 * cos(2*pi*k / (len-1)).
std::vector<double> HammingWindow(int len);

// Slices the signal into overlapping frames (frame_len_ms long, every
// frame_hop_ms) and multiplies each by a Hamming window.  The trailing
// partial frame is dropped.  Returns a T x K matrix, one frame per row.
// Throws TooShort if the signal does not cover a single frame.
Matrix FrameAndWindow(std::span<const double> samples, double sample_rate,
                      const FeatureConfig &config);

// In-place radix-2 FFT; the length of `data` must be a power of two.
void Fft(std::vector<std::complex<double>> &data);

// Magnitude spectrum of a frame, zero padded to the next power of two.
// Returns n_fft/2 + 1 bins.
std::vector<double> MagnitudeSpectrum(std::span<const double> frame);

// Mel scale and its inverse: mel(f) = 2595 * log10(1 + f / 700).
double MelScale(double hz);
double InvMelScale(double mel);

// Triangular mel filterbank with n_filters filters spanning 0..sample_rate/2.
// Returns an n_filters x (n_fft/2 + 1) weight matrix.
Matrix BuildMelFilterbank(int n_filters, int n_fft, double sample_rate);

// MFCC vector of one windowed frame: magnitude spectrum, mel filterbank, log
// of floored filter energies, DCT-II, first n_cepstra coefficients, then the
// log frame energy appended as the last component.  The sample rate is
// inferred from the frame length and config.frame_len_ms.
std::vector<double> Mfcc(std::span<const double> frame,
                         const FeatureConfig &config);

// Full acoustic pipeline: preemphasize, frame and window, MFCC per frame.
ObservationSequence ExtractAcoustic(std::span<const double> samples,
                                    double sample_rate,
                                    const FeatureConfig &config);

// Prosodic pipeline over the same framing as ExtractAcoustic (without
// preemphasis or windowing).  Per frame: log-pitch from an autocorrelation
// peak restricted to the [pitch_min_hz, pitch_max_hz] band, voicing flag,
// log-energy, delta-log-energy (central difference), and a speaking rate
// proxy equal to the reciprocal of the run length of frames whose energy
// stays within 3 dB of the previous frame.
ProsodicSequence ExtractProsodic(std::span<const double> samples,
                                 double sample_rate,
                                 const FeatureConfig &config);

}  // namespace emocascade

#endif  // EMOCASCADE_FEATURES_HPP_
