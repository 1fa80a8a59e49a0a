// src/hmm.cpp

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

#include "emocascade/hmm.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace emocascade {

namespace {

constexpr double kLog2Pi = 1.8378770664093453;

// Occupancy below this keeps the previous parameters instead of dividing by
// a vanishing count.
constexpr double kMinOccupancy = 1e-8;

constexpr double kAbsVarianceFloor = 1e-12;

// Per-dimension population variance of a frame pool, used for the variance
// floor.
std::vector<double> PoolVariance(const Matrix &pool) {
  std::vector<double> mean(pool.cols, 0.0);
  std::vector<double> var(pool.cols, 0.0);
  for (int r = 0; r < pool.rows; ++r) {
    for (int c = 0; c < pool.cols; ++c) mean[c] += pool(r, c);
  }
  for (int c = 0; c < pool.cols; ++c) mean[c] /= pool.rows;
  for (int r = 0; r < pool.rows; ++r) {
    for (int c = 0; c < pool.cols; ++c) {
      const double d = pool(r, c) - mean[c];
      var[c] += d * d;
    }
  }
  for (int c = 0; c < pool.cols; ++c) var[c] /= pool.rows;
  return var;
}

std::vector<double> VarianceFloor(const Matrix &pool, double scale) {
  std::vector<double> floor_vec = PoolVariance(pool);
  for (double &v : floor_vec) v = std::max(scale * v, kAbsVarianceFloor);
  return floor_vec;
}

double SquaredDistance(std::span<const double> a, std::span<const double> b) {
  double acc = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

// Builds an initial mixture from a k-means clustering of the pool.
GaussianMixture MixtureFromClusters(const Matrix &pool,
                                    const KMeansResult &clusters,
                                    std::span<const double> var_floor) {
  const int k = clusters.centroids.rows;
  const int dim = pool.cols;
  GaussianMixture mix;
  mix.weights.assign(k, 0.0);
  mix.means = clusters.centroids;
  mix.variances = Matrix(k, dim, 0.0);
  std::vector<int> counts(k, 0);
  for (int r = 0; r < pool.rows; ++r) {
    const int c = clusters.assignment[r];
    ++counts[c];
    for (int d = 0; d < dim; ++d) {
      const double diff = pool(r, d) - clusters.centroids(c, d);
      mix.variances(c, d) += diff * diff;
    }
  }
  for (int c = 0; c < k; ++c) {
    mix.weights[c] = static_cast<double>(std::max(counts[c], 1)) / pool.rows;
    for (int d = 0; d < dim; ++d) {
      double v = counts[c] > 0 ? mix.variances(c, d) / counts[c] : 0.0;
      mix.variances(c, d) = std::max(v, var_floor[d]);
    }
  }
  const double wsum =
      std::accumulate(mix.weights.begin(), mix.weights.end(), 0.0);
  for (double &w : mix.weights) w /= wsum;
  return mix;
}

// One EM pass over a frame pool for a standalone mixture.  Returns the
// pool log-likelihood under the parameters entering the pass.
double GmmEmStep(const Matrix &pool, std::span<const double> var_floor,
                 GaussianMixture *mix) {
  const int m = mix->NumComponents();
  const int dim = mix->Dim();
  const GmmScorer scorer(*mix);
  std::vector<double> comp(m);
  std::vector<double> occ(m, 0.0);
  Matrix sum_x(m, dim, 0.0);
  Matrix sum_x2(m, dim, 0.0);
  double total_ll = 0.0;
  for (int r = 0; r < pool.rows; ++r) {
    const auto x = pool.Row(r);
    scorer.ComponentLogPdf(x, comp);
    const double ll = LogSumExp(comp);
    total_ll += ll;
    for (int c = 0; c < m; ++c) {
      const double resp = std::exp(comp[c] - ll);
      occ[c] += resp;
      for (int d = 0; d < dim; ++d) {
        sum_x(c, d) += resp * x[d];
        sum_x2(c, d) += resp * x[d] * x[d];
      }
    }
  }
  double occ_total = std::accumulate(occ.begin(), occ.end(), 0.0);
  if (occ_total <= 0.0) return total_ll;
  for (int c = 0; c < m; ++c) {
    if (occ[c] < kMinOccupancy) continue;
    mix->weights[c] = occ[c] / occ_total;
    for (int d = 0; d < dim; ++d) {
      const double mean = sum_x(c, d) / occ[c];
      double var = sum_x2(c, d) / occ[c] - mean * mean;
      mix->means(c, d) = mean;
      mix->variances(c, d) = std::max(var, var_floor[d]);
    }
  }
  const double wsum =
      std::accumulate(mix->weights.begin(), mix->weights.end(), 0.0);
  for (double &w : mix->weights) w /= wsum;
  return total_ll;
}

}  // namespace

double GmmLogPdf(const GaussianMixture &mixture, std::span<const double> x) {
  if (static_cast<int>(x.size()) != mixture.Dim()) {
    throw DimensionMismatch("GmmLogPdf: vector dimension does not match");
  }
  const int m = mixture.NumComponents();
  std::vector<double> terms(m, kLogZero);
  for (int c = 0; c < m; ++c) {
    double log_n = 0.0;
    for (int d = 0; d < mixture.Dim(); ++d) {
      const double var = mixture.variances(c, d);
      const double diff = x[d] - mixture.means(c, d);
      log_n += -0.5 * (kLog2Pi + std::log(var) + diff * diff / var);
    }
    terms[c] = (mixture.weights[c] > 0.0 ? std::log(mixture.weights[c])
                                         : kLogZero) +
               log_n;
  }
  return LogSumExp(terms);
}

GmmScorer::GmmScorer(const GaussianMixture &mixture)
    : m_(mixture.NumComponents()), d_(mixture.Dim()) {
  gconst_.resize(m_);
  half_inv_var_.resize(static_cast<size_t>(m_) * d_);
  means_.resize(static_cast<size_t>(m_) * d_);
  for (int c = 0; c < m_; ++c) {
    double g = mixture.weights[c] > 0.0 ? std::log(mixture.weights[c])
                                        : kLogZero;
    for (int d = 0; d < d_; ++d) {
      const double var = mixture.variances(c, d);
      g += -0.5 * (kLog2Pi + std::log(var));
      half_inv_var_[static_cast<size_t>(c) * d_ + d] = 0.5 / var;
      means_[static_cast<size_t>(c) * d_ + d] = mixture.means(c, d);
    }
    gconst_[c] = g;
  }
}

void GmmScorer::ComponentLogPdf(std::span<const double> x,
                                std::span<double> out) const {
  if (static_cast<int>(x.size()) != d_) {
    throw DimensionMismatch("GmmScorer: vector dimension does not match");
  }
  for (int c = 0; c < m_; ++c) {
    const double *mu = means_.data() + static_cast<size_t>(c) * d_;
    const double *hiv = half_inv_var_.data() + static_cast<size_t>(c) * d_;
    double acc = 0.0;
    for (int d = 0; d < d_; ++d) {
      const double diff = x[d] - mu[d];
      acc += hiv[d] * diff * diff;
    }
    out[c] = gconst_[c] - acc;
  }
}

double GmmScorer::LogPdf(std::span<const double> x) const {
  constexpr int kStackComponents = 64;
  if (m_ <= kStackComponents) {
    double buf[kStackComponents];
    std::span<double> comp(buf, static_cast<size_t>(m_));
    ComponentLogPdf(x, comp);
    return LogSumExp(comp);
  }
  std::vector<double> comp(m_);
  ComponentLogPdf(x, comp);
  return LogSumExp(comp);
}

HmmScorer::HmmScorer(const HmmModel &model) : n_states_(model.n_states) {
  log_initial_.resize(n_states_);
  for (int j = 0; j < n_states_; ++j) {
    log_initial_[j] =
        model.initial[j] > 0.0 ? std::log(model.initial[j]) : kLogZero;
  }
  log_trans_ = Matrix(n_states_, n_states_, kLogZero);
  for (int i = 0; i < n_states_; ++i) {
    for (int j = 0; j < n_states_; ++j) {
      if (model.transitions(i, j) > 0.0) {
        log_trans_(i, j) = std::log(model.transitions(i, j));
      }
    }
  }
  states_.reserve(n_states_);
  for (const GaussianMixture &mix : model.emissions) {
    states_.emplace_back(mix);
  }
}

void HmmScorer::CheckObs(const ObservationSequence &obs) const {
  if (obs.Length() == 0) throw EmptySequence("empty observation sequence");
  if (obs.Dim() != Dim()) {
    throw DimensionMismatch("observation dimension does not match emissions");
  }
}

double HmmScorer::LogForward(const ObservationSequence &obs) const {
  CheckObs(obs);
  const int T = obs.Length();
  std::vector<double> prev(n_states_), cur(n_states_);
  for (int j = 0; j < n_states_; ++j) {
    prev[j] = log_initial_[j] + states_[j].LogPdf(obs.frames.Row(0));
  }
  for (int t = 1; t < T; ++t) {
    for (int j = 0; j < n_states_; ++j) {
      // Left-to-right: predecessors are only j itself and j-1.
      double acc = prev[j] + log_trans_(j, j);
      if (j > 0) acc = LogAdd(acc, prev[j - 1] + log_trans_(j - 1, j));
      cur[j] = acc + states_[j].LogPdf(obs.frames.Row(t));
    }
    std::swap(prev, cur);
  }
  return LogSumExp(prev);
}

ViterbiResult HmmScorer::Viterbi(const ObservationSequence &obs) const {
  CheckObs(obs);
  const int T = obs.Length();
  Matrix delta(T, n_states_, kLogZero);
  std::vector<int> back(static_cast<size_t>(T) * n_states_, 0);
  for (int j = 0; j < n_states_; ++j) {
    delta(0, j) = log_initial_[j] + states_[j].LogPdf(obs.frames.Row(0));
  }
  for (int t = 1; t < T; ++t) {
    for (int j = 0; j < n_states_; ++j) {
      // Ties prefer the self loop (the lower predecessor wins only on a
      // strict improvement).
      double best = delta(t - 1, j) + log_trans_(j, j);
      int arg = j;
      if (j > 0) {
        const double from_prev = delta(t - 1, j - 1) + log_trans_(j - 1, j);
        if (from_prev > best) {
          best = from_prev;
          arg = j - 1;
        }
      }
      delta(t, j) = best + states_[j].LogPdf(obs.frames.Row(t));
      back[static_cast<size_t>(t) * n_states_ + j] = arg;
    }
  }
  ViterbiResult result;
  result.path.resize(T);
  int best_state = 0;
  double best = delta(T - 1, 0);
  for (int j = 1; j < n_states_; ++j) {
    if (delta(T - 1, j) > best) {
      best = delta(T - 1, j);
      best_state = j;
    }
  }
  result.log_prob = best;
  result.path[T - 1] = best_state;
  for (int t = T - 1; t > 0; --t) {
    result.path[t - 1] =
        back[static_cast<size_t>(t) * n_states_ + result.path[t]];
  }
  return result;
}

double LogForward(const HmmModel &model, const ObservationSequence &obs) {
  return HmmScorer(model).LogForward(obs);
}

ViterbiResult Viterbi(const HmmModel &model, const ObservationSequence &obs) {
  return HmmScorer(model).Viterbi(obs);
}

KMeansResult KMeans(const Matrix &points, int k, uint64_t seed) {
  if (points.rows == 0) throw EmptyPool("k-means on an empty point set");
  k = std::min(k, points.rows);
  const int dim = points.cols;
  Rng rng(seed);

  // Seeded draw of k distinct rows as initial centroids.
  std::vector<int> order(points.rows);
  std::iota(order.begin(), order.end(), 0);
  for (int i = points.rows - 1; i > 0; --i) {
    std::swap(order[i], order[rng.UniformInt(i + 1)]);
  }
  KMeansResult result;
  result.centroids = Matrix(k, dim);
  for (int c = 0; c < k; ++c) {
    for (int d = 0; d < dim; ++d) {
      result.centroids(c, d) = points(order[c], d);
    }
  }
  result.assignment.assign(points.rows, 0);

  constexpr int kMaxIters = 50;
  for (int iter = 0; iter < kMaxIters; ++iter) {
    bool changed = false;
    std::vector<double> dist_to_centroid(points.rows, 0.0);
    for (int r = 0; r < points.rows; ++r) {
      int best_c = 0;
      double best_d = SquaredDistance(points.Row(r), result.centroids.Row(0));
      for (int c = 1; c < k; ++c) {
        const double d = SquaredDistance(points.Row(r),
                                         result.centroids.Row(c));
        if (d < best_d) {
          best_d = d;
          best_c = c;
        }
      }
      dist_to_centroid[r] = best_d;
      if (result.assignment[r] != best_c) {
        result.assignment[r] = best_c;
        changed = true;
      }
    }
    // Reseed any empty cluster from the farthest point.
    std::vector<int> counts(k, 0);
    for (int a : result.assignment) ++counts[a];
    for (int c = 0; c < k; ++c) {
      if (counts[c] > 0) continue;
      int far = 0;
      for (int r = 1; r < points.rows; ++r) {
        if (dist_to_centroid[r] > dist_to_centroid[far]) far = r;
      }
      --counts[result.assignment[far]];
      result.assignment[far] = c;
      counts[c] = 1;
      dist_to_centroid[far] = 0.0;
      changed = true;
    }
    if (!changed && iter > 0) break;
    Matrix sums(k, dim, 0.0);
    for (int r = 0; r < points.rows; ++r) {
      for (int d = 0; d < dim; ++d) {
        sums(result.assignment[r], d) += points(r, d);
      }
    }
    for (int c = 0; c < k; ++c) {
      if (counts[c] == 0) continue;
      for (int d = 0; d < dim; ++d) {
        result.centroids(c, d) = sums(c, d) / counts[c];
      }
    }
  }
  return result;
}

GaussianMixture FitGmm(const Matrix &pool, int n_mix,
                       const TrainingConfig &config, uint64_t seed) {
  if (pool.rows == 0) throw EmptyPool("FitGmm on an empty pool");
  const std::vector<double> var_floor =
      VarianceFloor(pool, config.variance_floor_scale);
  const int m = std::min(n_mix, pool.rows);
  const KMeansResult clusters = KMeans(pool, m, seed);
  GaussianMixture mix = MixtureFromClusters(pool, clusters, var_floor);
  double prev_ll = -std::numeric_limits<double>::max();
  for (int iter = 0; iter < config.max_iters; ++iter) {
    const double ll = GmmEmStep(pool, var_floor, &mix);
    if (iter > 0 &&
        (ll - prev_ll) / std::max(std::abs(prev_ll), 1e-12) <
            config.ll_rel_tol) {
      break;
    }
    prev_ll = ll;
  }
  return mix;
}

HmmModel BaumWelch(const std::vector<ObservationSequence> &utterances,
                   int n_states, int n_mix, const TrainingConfig &config,
                   TrainStats *stats) {
  if (utterances.empty()) {
    throw EmptyTrainingSet("Baum-Welch requires at least one sequence");
  }
  const int dim = utterances[0].Dim();
  size_t total_frames = 0;
  for (const ObservationSequence &u : utterances) {
    if (u.Length() < n_states) {
      throw SequenceTooShort(
          "sequence shorter than the number of states");
    }
    if (u.Dim() != dim) {
      throw DimensionMismatch("inconsistent feature dimension");
    }
    total_frames += static_cast<size_t>(u.Length());
  }

  // Pool every frame once for the global variance floor.
  Matrix all_frames(static_cast<int>(total_frames), dim);
  {
    int row = 0;
    for (const ObservationSequence &u : utterances) {
      for (int t = 0; t < u.Length(); ++t) {
        for (int d = 0; d < dim; ++d) all_frames(row, d) = u.frames(t, d);
        ++row;
      }
    }
  }
  const std::vector<double> var_floor =
      VarianceFloor(all_frames, config.variance_floor_scale);

  // Initialization: uniform temporal segmentation, then per-state k-means.
  HmmModel model;
  model.n_states = n_states;
  model.initial.assign(n_states, 0.0);
  model.initial[0] = 1.0;
  model.transitions = Matrix(n_states, n_states, 0.0);
  model.emissions.resize(n_states);

  std::vector<double> self_steps(n_states, 0.0);
  std::vector<double> out_steps(n_states, 0.0);
  for (int j = 0; j < n_states; ++j) {
    int pool_rows = 0;
    for (const ObservationSequence &u : utterances) {
      const int lo = j * u.Length() / n_states;
      const int hi = (j + 1) * u.Length() / n_states;
      pool_rows += hi - lo;
    }
    Matrix pool(pool_rows, dim);
    int row = 0;
    for (const ObservationSequence &u : utterances) {
      const int lo = j * u.Length() / n_states;
      const int hi = (j + 1) * u.Length() / n_states;
      for (int t = lo; t < hi; ++t) {
        for (int d = 0; d < dim; ++d) pool(row, d) = u.frames(t, d);
        ++row;
      }
      self_steps[j] += hi - lo - 1;
      if (j < n_states - 1) out_steps[j] += 1;
    }
    const int m = std::min(n_mix, pool.rows);
    const KMeansResult clusters =
        KMeans(pool, m, MixSeed(config.seed, static_cast<uint64_t>(j)));
    model.emissions[j] = MixtureFromClusters(pool, clusters, var_floor);
  }
  for (int i = 0; i < n_states; ++i) {
    if (i == n_states - 1) {
      model.transitions(i, i) = 1.0;
      continue;
    }
    const double tot = self_steps[i] + out_steps[i];
    if (tot <= 0.0) {
      model.transitions(i, i) = 0.5;
      model.transitions(i, i + 1) = 0.5;
    } else {
      model.transitions(i, i) = self_steps[i] / tot;
      model.transitions(i, i + 1) = out_steps[i] / tot;
    }
  }

  // Expectation-maximization.
  double prev_ll = -std::numeric_limits<double>::max();
  for (int iter = 0; iter < config.max_iters; ++iter) {
    std::vector<GmmScorer> scorers;
    scorers.reserve(n_states);
    for (const GaussianMixture &mix : model.emissions) {
      scorers.emplace_back(mix);
    }
    Matrix log_trans(n_states, n_states, kLogZero);
    for (int i = 0; i < n_states; ++i) {
      for (int j = 0; j < n_states; ++j) {
        if (model.transitions(i, j) > 0.0) {
          log_trans(i, j) = std::log(model.transitions(i, j));
        }
      }
    }

    std::vector<double> occ(n_states, 0.0);
    std::vector<std::vector<double>> occ_m(n_states);
    std::vector<Matrix> sum_x(n_states), sum_x2(n_states);
    for (int j = 0; j < n_states; ++j) {
      const int m = model.emissions[j].NumComponents();
      occ_m[j].assign(m, 0.0);
      sum_x[j] = Matrix(m, dim, 0.0);
      sum_x2[j] = Matrix(m, dim, 0.0);
    }
    std::vector<double> trans_self(n_states, 0.0);
    std::vector<double> trans_fwd(n_states, 0.0);
    double total_ll = 0.0;

    for (const ObservationSequence &u : utterances) {
      const int T = u.Length();
      // Cached per-frame per-state component log densities.
      std::vector<std::vector<double>> comp(
          static_cast<size_t>(T) * n_states);
      Matrix emis(T, n_states);
      for (int t = 0; t < T; ++t) {
        for (int j = 0; j < n_states; ++j) {
          auto &c = comp[static_cast<size_t>(t) * n_states + j];
          c.resize(model.emissions[j].NumComponents());
          scorers[j].ComponentLogPdf(u.frames.Row(t), c);
          emis(t, j) = LogSumExp(c);
        }
      }
      Matrix alpha(T, n_states, kLogZero);
      Matrix beta(T, n_states, kLogZero);
      alpha(0, 0) = emis(0, 0);
      for (int t = 1; t < T; ++t) {
        for (int j = 0; j < n_states; ++j) {
          double acc = alpha(t - 1, j) + log_trans(j, j);
          if (j > 0) {
            acc = LogAdd(acc, alpha(t - 1, j - 1) + log_trans(j - 1, j));
          }
          alpha(t, j) = acc + emis(t, j);
        }
      }
      for (int j = 0; j < n_states; ++j) beta(T - 1, j) = 0.0;
      for (int t = T - 2; t >= 0; --t) {
        for (int j = 0; j < n_states; ++j) {
          double acc = log_trans(j, j) + emis(t + 1, j) + beta(t + 1, j);
          if (j + 1 < n_states) {
            acc = LogAdd(acc, log_trans(j, j + 1) + emis(t + 1, j + 1) +
                                  beta(t + 1, j + 1));
          }
          beta(t, j) = acc;
        }
      }
      const double ll = LogSumExp(alpha.Row(T - 1));
      total_ll += ll;

      for (int t = 0; t < T; ++t) {
        for (int j = 0; j < n_states; ++j) {
          const double log_gamma = alpha(t, j) + beta(t, j) - ll;
          if (log_gamma == kLogZero) continue;
          const double gamma = std::exp(log_gamma);
          occ[j] += gamma;
          const auto &c = comp[static_cast<size_t>(t) * n_states + j];
          const auto x = u.frames.Row(t);
          for (size_t m = 0; m < c.size(); ++m) {
            const double resp = std::exp(log_gamma + c[m] - emis(t, j));
            if (resp <= 0.0) continue;
            occ_m[j][m] += resp;
            for (int d = 0; d < dim; ++d) {
              sum_x[j](static_cast<int>(m), d) += resp * x[d];
              sum_x2[j](static_cast<int>(m), d) += resp * x[d] * x[d];
            }
          }
        }
      }
      for (int t = 0; t + 1 < T; ++t) {
        for (int i = 0; i < n_states; ++i) {
          if (alpha(t, i) == kLogZero) continue;
          trans_self[i] += std::exp(alpha(t, i) + log_trans(i, i) +
                                    emis(t + 1, i) + beta(t + 1, i) - ll);
          if (i + 1 < n_states) {
            trans_fwd[i] += std::exp(alpha(t, i) + log_trans(i, i + 1) +
                                     emis(t + 1, i + 1) + beta(t + 1, i + 1) -
                                     ll);
          }
        }
      }
    }

    if (stats != nullptr) stats->iteration_ll.push_back(total_ll);
    if (iter > 0 &&
        (total_ll - prev_ll) / std::max(std::abs(prev_ll), 1e-12) <
            config.ll_rel_tol) {
      break;
    }
    prev_ll = total_ll;

    // M-step.
    for (int i = 0; i + 1 < n_states; ++i) {
      const double tot = trans_self[i] + trans_fwd[i];
      if (tot > kMinOccupancy) {
        model.transitions(i, i) = trans_self[i] / tot;
        model.transitions(i, i + 1) = trans_fwd[i] / tot;
      }
    }
    for (int j = 0; j < n_states; ++j) {
      if (occ[j] < kMinOccupancy) continue;
      GaussianMixture &mix = model.emissions[j];
      for (int m = 0; m < mix.NumComponents(); ++m) {
        if (occ_m[j][m] < kMinOccupancy) continue;
        mix.weights[m] = occ_m[j][m] / occ[j];
        for (int d = 0; d < dim; ++d) {
          const double mean = sum_x[j](m, d) / occ_m[j][m];
          double var = sum_x2[j](m, d) / occ_m[j][m] - mean * mean;
          mix.means(m, d) = mean;
          mix.variances(m, d) = std::max(var, var_floor[d]);
        }
      }
      const double wsum =
          std::accumulate(mix.weights.begin(), mix.weights.end(), 0.0);
      for (double &w : mix.weights) w /= wsum;
    }
  }
  return model;
}

ObservationSequence Sample(const HmmModel &model, int num_frames,
                           uint64_t seed) {
  Rng rng(seed);
  const int dim = model.emissions.empty() ? 0 : model.emissions[0].Dim();
  ObservationSequence seq;
  seq.frame_len_ms = 30.0;
  seq.frame_hop_ms = 10.0;
  seq.frames = Matrix(num_frames, dim);

  auto pick = [&rng](std::span<const double> probs) {
    const double u = rng.Uniform();
    double acc = 0.0;
    for (size_t i = 0; i < probs.size(); ++i) {
      acc += probs[i];
      if (u < acc) return static_cast<int>(i);
    }
    return static_cast<int>(probs.size()) - 1;
  };

  int state = pick(model.initial);
  for (int t = 0; t < num_frames; ++t) {
    if (t > 0) state = pick(model.transitions.Row(state));
    const GaussianMixture &mix = model.emissions[state];
    const int m = pick(mix.weights);
    for (int d = 0; d < dim; ++d) {
      seq.frames(t, d) =
          mix.means(m, d) + std::sqrt(mix.variances(m, d)) * rng.Normal();
    }
  }
  return seq;
}

}  // namespace emocascade
