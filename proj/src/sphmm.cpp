// src/sphmm.cpp

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

#include "emocascade/sphmm.hpp"

#include <cmath>
#include <iostream>

namespace emocascade {

namespace {

double SafeLog(double p) { return p > 0.0 ? std::log(p) : kLogZero; }

}  // namespace

std::vector<double> UtteranceStats(const ProsodicSequence &prosodic) {
  const int T = prosodic.Length();
  if (T == 0) throw EmptySequence("empty prosodic sequence");
  double pitch_mean = 0.0, pitch_var = 0.0;
  double energy_mean = 0.0, energy_var = 0.0;
  double voiced = 0.0;
  for (int t = 0; t < T; ++t) {
    pitch_mean += prosodic.frames(t, 0);
    voiced += prosodic.frames(t, 1);
    energy_mean += prosodic.frames(t, 2);
  }
  pitch_mean /= T;
  energy_mean /= T;
  voiced /= T;
  for (int t = 0; t < T; ++t) {
    const double dp = prosodic.frames(t, 0) - pitch_mean;
    const double de = prosodic.frames(t, 2) - energy_mean;
    pitch_var += dp * dp;
    energy_var += de * de;
  }
  pitch_var /= T;
  energy_var /= T;
  const double duration_s = T * prosodic.frame_hop_ms / 1000.0;
  return {pitch_mean, pitch_var, energy_mean, energy_var, voiced, duration_s};
}

SuprasegmentalModel TrainSuprasegmental(
    const HmmModel &acoustic,
    const std::vector<std::pair<ObservationSequence, ProsodicSequence>>
        &pairs,
    int n_supra_mix, const TrainingConfig &config) {
  if (pairs.empty()) {
    throw EmptyTrainingSet("suprasegmental training requires utterances");
  }
  const int n_states = acoustic.n_states;
  SuprasegmentalModel model;
  model.state_grouping.resize(n_states);
  // The first half of the conventional states (rounding up) condenses into
  // suprasegmental state 0, the rest into state 1.
  const int split = (n_states + 1) / 2;
  for (int s = 0; s < n_states; ++s) {
    model.state_grouping[s] = s < split ? 0 : 1;
  }

  const HmmScorer scorer(acoustic);
  const int dim = pairs[0].second.Dim();
  size_t pool_rows[2] = {0, 0};
  double bigram[2][2] = {{0.0, 0.0}, {0.0, 0.0}};
  std::vector<std::vector<int>> supra_paths;
  supra_paths.reserve(pairs.size());
  for (const auto &[obs, prosodic] : pairs) {
    if (obs.Length() != prosodic.Length()) {
      throw DimensionMismatch(
          "acoustic and prosodic sequences must share frame counts");
    }
    const ViterbiResult aligned = scorer.Viterbi(obs);
    std::vector<int> supra(aligned.path.size());
    for (size_t t = 0; t < aligned.path.size(); ++t) {
      supra[t] = model.state_grouping[aligned.path[t]];
      ++pool_rows[supra[t]];
      if (t > 0) bigram[supra[t - 1]][supra[t]] += 1.0;
    }
    supra_paths.push_back(std::move(supra));
  }

  // Frame pools per suprasegmental state, with a global pool as fallback.
  Matrix pools[2] = {Matrix(static_cast<int>(pool_rows[0]), dim),
                     Matrix(static_cast<int>(pool_rows[1]), dim)};
  int fill[2] = {0, 0};
  size_t total_rows = pool_rows[0] + pool_rows[1];
  Matrix global_pool(static_cast<int>(total_rows), dim);
  int global_fill = 0;
  for (size_t u = 0; u < pairs.size(); ++u) {
    const ProsodicSequence &prosodic = pairs[u].second;
    for (int t = 0; t < prosodic.Length(); ++t) {
      const int g = supra_paths[u][t];
      for (int d = 0; d < dim; ++d) {
        pools[g](fill[g], d) = prosodic.frames(t, d);
        global_pool(global_fill, d) = prosodic.frames(t, d);
      }
      ++fill[g];
      ++global_fill;
    }
  }

  model.state_emissions.resize(2);
  for (int g = 0; g < 2; ++g) {
    if (pools[g].rows == 0) {
      std::cerr << "warning: suprasegmental state " << g
                << " received no aligned frames; using the global prosodic"
                   " pool\n";
      model.state_emissions[g] =
          FitGmm(global_pool, n_supra_mix, config,
                 MixSeed(config.seed, 1000 + static_cast<uint64_t>(g)));
    } else {
      model.state_emissions[g] =
          FitGmm(pools[g], n_supra_mix, config,
                 MixSeed(config.seed, 1000 + static_cast<uint64_t>(g)));
    }
  }

  model.transitions = Matrix(2, 2, 0.0);
  const double row0 = bigram[0][0] + bigram[0][1];
  if (row0 > 0.0) {
    model.transitions(0, 0) = bigram[0][0] / row0;
    model.transitions(0, 1) = bigram[0][1] / row0;
  } else {
    model.transitions(0, 0) = 1.0;
  }
  model.transitions(1, 1) = 1.0;

  Matrix stats(static_cast<int>(pairs.size()), 6);
  for (size_t u = 0; u < pairs.size(); ++u) {
    const std::vector<double> s = UtteranceStats(pairs[u].second);
    for (int d = 0; d < 6; ++d) stats(static_cast<int>(u), d) = s[d];
  }
  model.utterance_emission =
      FitGmm(stats, n_supra_mix, config, MixSeed(config.seed, 1002));
  return model;
}

SupraScorer::SupraScorer(const SuprasegmentalModel &model)
    : states_{GmmScorer(model.state_emissions[0]),
              GmmScorer(model.state_emissions[1])},
      utterance_(model.utterance_emission) {
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      log_b_[i][j] = SafeLog(model.transitions(i, j));
    }
  }
}

double SupraScorer::LogProb(const ProsodicSequence &prosodic) const {
  const int T = prosodic.Length();
  if (T == 0) throw EmptySequence("empty prosodic sequence");
  if (prosodic.Dim() != states_[0].Dim()) {
    throw DimensionMismatch("prosodic dimension does not match the model");
  }
  // Forward pass over the two-state chain; entry mass sits on state 0.
  double a0 = states_[0].LogPdf(prosodic.frames.Row(0));
  double a1 = kLogZero;
  for (int t = 1; t < T; ++t) {
    const double e0 = states_[0].LogPdf(prosodic.frames.Row(t));
    const double e1 = states_[1].LogPdf(prosodic.frames.Row(t));
    const double n0 = a0 + log_b_[0][0] + e0;
    const double n1 = LogAdd(a1 + log_b_[1][1], a0 + log_b_[0][1]) + e1;
    a0 = n0;
    a1 = n1;
  }
  const double chain = LogAdd(a0, a1);
  const std::vector<double> stats = UtteranceStats(prosodic);
  const double utterance_ll = utterance_.LogPdf(stats);
  return (chain + utterance_ll) / T;
}

double LogProbSupra(const SuprasegmentalModel &model,
                    const ProsodicSequence &prosodic) {
  return SupraScorer(model).LogProb(prosodic);
}

double Fuse(double alpha, double log_acoustic, double log_prosodic) {
  if (alpha < 0.0 || alpha > 1.0) {
    throw Error("fusion weight must lie in [0, 1]");
  }
  if (!std::isfinite(log_acoustic) || !std::isfinite(log_prosodic)) {
    throw NonFiniteInput("fusion requires finite log-likelihoods");
  }
  return (1.0 - alpha) * log_acoustic + alpha * log_prosodic;
}

}  // namespace emocascade
