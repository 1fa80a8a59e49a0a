// include/emocascade/hmm.hpp

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

#ifndef EMOCASCADE_HMM_HPP_
#define EMOCASCADE_HMM_HPP_

#include <cstdint>
#include <span>
#include <vector>

#include "emocascade/common.hpp"

namespace emocascade {

struct DimensionMismatch : Error {
  using Error::Error;
};
struct EmptySequence : Error {
  using Error::Error;
};
struct EmptyTrainingSet : Error {
  using Error::Error;
};
struct SequenceTooShort : Error {
  using Error::Error;
};
struct EmptyPool : Error {
  using Error::Error;
};

// Diagonal-covariance Gaussian mixture.  One row per component.
struct GaussianMixture {
  std::vector<double> weights;
  Matrix means;
  Matrix variances;

  int NumComponents() const { return static_cast<int>(weights.size()); }
  int Dim() const { return means.cols; }
  bool operator==(const GaussianMixture &other) const = default;
};

// Left-to-right continuous-density HMM.  Transitions allow only self loops
// and single forward steps; the entry distribution puts all mass on state 0.
struct HmmModel {
  int n_states = 0;
  std::vector<double> initial;
  Matrix transitions;
  std::vector<GaussianMixture> emissions;

  bool operator==(const HmmModel &other) const = default;
};

// Knobs shared by every expectation-maximization loop in the library.
struct TrainingConfig {
  int max_iters = 20;
  double ll_rel_tol = 1e-5;
  double variance_floor_scale = 1e-3;
  uint64_t seed = 42;

  bool operator==(const TrainingConfig &other) const = default;
};

// log sum_m w_m * N(x; mu_m, diag var_m), computed with log-sum-exp.
// Throws DimensionMismatch when x does not match the mixture dimension.
double GmmLogPdf(const GaussianMixture &mixture, std::span<const double> x);

// Precomputed evaluator for a GaussianMixture; use when scoring many frames
// against the same mixture.
class GmmScorer {
 public:
  explicit GmmScorer(const GaussianMixture &mixture);

  int Dim() const { return d_; }
  int NumComponents() const { return m_; }

  // Same value as GmmLogPdf up to floating point rounding.
  double LogPdf(std::span<const double> x) const;

  // Per component log densities (including log weight), for mixture
  // responsibilities during training.
  void ComponentLogPdf(std::span<const double> x,
                       std::span<double> out) const;

 private:
  int m_ = 0;
  int d_ = 0;
  std::vector<double> gconst_;
  std::vector<double> half_inv_var_;
  std::vector<double> means_;
};

struct ViterbiResult {
  std::vector<int> path;
  double log_prob = kLogZero;
};

// Precomputed evaluator for an HmmModel: log-domain forward and Viterbi.
class HmmScorer {
 public:
  explicit HmmScorer(const HmmModel &model);

  int NumStates() const { return n_states_; }
  int Dim() const { return states_.empty() ? 0 : states_[0].Dim(); }

  // log P(O | model) via the log-domain forward recursion, summed over all
  // end states.
  double LogForward(const ObservationSequence &obs) const;

  // LogForward divided by the number of frames.
  double AvgLogForward(const ObservationSequence &obs) const {
    if (obs.Length() == 0) throw EmptySequence("empty observation sequence");
    return LogForward(obs) / obs.Length();
  }

  // Most likely legal state path and its log probability.  Ties prefer the
  // lower predecessor state, so results are deterministic.
  ViterbiResult Viterbi(const ObservationSequence &obs) const;

 private:
  void CheckObs(const ObservationSequence &obs) const;

  int n_states_ = 0;
  std::vector<double> log_initial_;
  Matrix log_trans_;
  std::vector<GmmScorer> states_;
};

// Convenience wrappers constructing a scorer per call.
double LogForward(const HmmModel &model, const ObservationSequence &obs);
ViterbiResult Viterbi(const HmmModel &model, const ObservationSequence &obs);

// K-means with deterministic seeded initialization.  Assignment ties break
// toward the lowest cluster index; empty clusters are reseeded from the
// point farthest from its assigned centroid.
struct KMeansResult {
  Matrix centroids;
  std::vector<int> assignment;
};
KMeansResult KMeans(const Matrix &points, int k, uint64_t seed);

// Fits a diagonal Gaussian mixture to pooled frames: k-means initialization
// followed by EM with variance flooring.  The effective component count is
// min(n_mix, number of pooled frames).  Throws EmptyPool on an empty pool.
GaussianMixture FitGmm(const Matrix &pool, int n_mix,
                       const TrainingConfig &config, uint64_t seed);

// Per-iteration diagnostics from BaumWelch.  iteration_ll[i] is the total
// log-likelihood of the training set under the parameters entering
// iteration i; the EM guarantee makes it non-decreasing.
struct TrainStats {
  std::vector<double> iteration_ll;
};

// Trains a left-to-right HMM: uniform temporal segmentation, per-state
// k-means initialization, then expectation-maximization with variance
// flooring.  Deterministic for a fixed config.seed.
HmmModel BaumWelch(const std::vector<ObservationSequence> &utterances,
                   int n_states, int n_mix, const TrainingConfig &config,
                   TrainStats *stats = nullptr);

// Draws an observation sequence of length num_frames from the model.
// Deterministic per seed.
ObservationSequence Sample(const HmmModel &model, int num_frames,
                           uint64_t seed);

}  // namespace emocascade

#endif  // EMOCASCADE_HMM_HPP_
