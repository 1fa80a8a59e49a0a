// include/emocascade/sphmm.hpp

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

#ifndef EMOCASCADE_SPHMM_HPP_
#define EMOCASCADE_SPHMM_HPP_

#include <utility>
#include <vector>

#include "emocascade/common.hpp"
#include "emocascade/hmm.hpp"

namespace emocascade {

struct NonFiniteInput : Error {
  using Error::Error;
};

// Two-state suprasegmental layer sitting on top of a trained acoustic HMM.
// Conventional states are condensed into two suprasegmental states with an
// upper-triangular transition matrix; a third, utterance-level state models
// whole-utterance prosodic statistics.
struct SuprasegmentalModel {
  Matrix transitions;                            // 2x2, lower left is zero
  std::vector<GaussianMixture> state_emissions;  // frame-level, one per state
  GaussianMixture utterance_emission;            // utterance statistics
  std::vector<int> state_grouping;               // conventional -> supra index

  bool operator==(const SuprasegmentalModel &other) const = default;
};

// Utterance-level prosodic statistics consumed by the utterance state:
// mean and variance of log-pitch, mean and variance of log-energy, voiced
// fraction, and total duration in seconds.
std::vector<double> UtteranceStats(const ProsodicSequence &prosodic);

// Number of suprasegmental mixture components used when none is specified.
constexpr int kDefaultSupraMix = 3;

// Trains the suprasegmental layer on top of a trained acoustic model.  Each
// training pair holds the acoustic and prosodic sequences of one utterance
// (identical frame counts).  The acoustic sequences are Viterbi aligned to
// the acoustic model; prosodic frames pooled per suprasegmental state fit
// the state mixtures, aligned state bigrams estimate the transitions, and
// per-utterance statistics fit the utterance state.  A state that receives
// no frames falls back to the global prosodic pool with a warning on stderr.
SuprasegmentalModel TrainSuprasegmental(
    const HmmModel &acoustic,
    const std::vector<std::pair<ObservationSequence, ProsodicSequence>>
        &pairs,
    int n_supra_mix, const TrainingConfig &config);

// Per-frame normalized log-likelihood of a prosodic sequence: forward pass
// over the two-state chain plus the utterance state's log-density, divided
// by the frame count so the value is commensurate with per-frame acoustic
// scores.
double LogProbSupra(const SuprasegmentalModel &model,
                    const ProsodicSequence &prosodic);

// Precomputed evaluator for scoring many utterances against one model.
class SupraScorer {
 public:
  explicit SupraScorer(const SuprasegmentalModel &model);
  double LogProb(const ProsodicSequence &prosodic) const;

 private:
  double log_b_[2][2];
  std::vector<GmmScorer> states_;
  GmmScorer utterance_;
};

// Weighted combination of a per-frame acoustic log-likelihood and a
// per-frame prosodic log-likelihood:
// (1 - alpha) * log_acoustic + alpha * log_prosodic.
// Throws NonFiniteInput unless both inputs are finite, and Error when alpha
// lies outside [0, 1].
double Fuse(double alpha, double log_acoustic, double log_prosodic);

}  // namespace emocascade

#endif  // EMOCASCADE_SPHMM_HPP_
