// src/eval.cpp

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

#include "emocascade/eval.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>

namespace emocascade {

namespace {

void CheckScores(const ScoreSet &scores) {
  if (scores.target_scores.empty() || scores.nontarget_scores.empty()) {
    throw EmptyScores("EER needs both target and nontarget scores");
  }
}

}  // namespace

DetCurve ComputeDetCurve(const ScoreSet &scores) {
  CheckScores(scores);
  std::vector<double> thresholds;
  thresholds.reserve(scores.target_scores.size() +
                     scores.nontarget_scores.size() + 1);
  thresholds.insert(thresholds.end(), scores.target_scores.begin(),
                    scores.target_scores.end());
  thresholds.insert(thresholds.end(), scores.nontarget_scores.begin(),
                    scores.nontarget_scores.end());
  std::sort(thresholds.begin(), thresholds.end());
  thresholds.erase(std::unique(thresholds.begin(), thresholds.end()),
                   thresholds.end());
  // One threshold above every score so the (miss=1, fa=0) corner appears.
  thresholds.push_back(thresholds.back() + 1.0);

  std::vector<double> sorted_targets = scores.target_scores;
  std::vector<double> sorted_nontargets = scores.nontarget_scores;
  std::sort(sorted_targets.begin(), sorted_targets.end());
  std::sort(sorted_nontargets.begin(), sorted_nontargets.end());
  const double n_t = static_cast<double>(sorted_targets.size());
  const double n_n = static_cast<double>(sorted_nontargets.size());

  DetCurve curve;
  curve.points.reserve(thresholds.size());
  for (double t : thresholds) {
    DetPoint p;
    p.threshold = t;
    const auto below = std::lower_bound(sorted_targets.begin(),
                                        sorted_targets.end(), t) -
                       sorted_targets.begin();
    p.miss = static_cast<double>(below) / n_t;
    const auto at_or_above = sorted_nontargets.end() -
                             std::lower_bound(sorted_nontargets.begin(),
                                              sorted_nontargets.end(), t);
    p.false_alarm = static_cast<double>(at_or_above) / n_n;
    curve.points.push_back(p);
  }
  return curve;
}

double Eer(const ScoreSet &scores) { return EerWithThreshold(scores).eer_percent; }

EerPoint EerWithThreshold(const ScoreSet &scores) {
  const DetCurve curve = ComputeDetCurve(scores);
  // diff = miss - false_alarm starts at -1 and ends at +1, so a sign change
  // always exists.
  for (size_t k = 0; k + 1 < curve.points.size(); ++k) {
    const double d0 = curve.points[k].miss - curve.points[k].false_alarm;
    const double d1 =
        curve.points[k + 1].miss - curve.points[k + 1].false_alarm;
    if (d0 > 0.0 || d1 < 0.0) continue;
    if (d1 == d0) {
      return {100.0 * curve.points[k].miss, curve.points[k].threshold};
    }
    const double frac = -d0 / (d1 - d0);
    const double rate =
        curve.points[k].miss +
        frac * (curve.points[k + 1].miss - curve.points[k].miss);
    const double threshold =
        curve.points[k].threshold +
        frac * (curve.points[k + 1].threshold - curve.points[k].threshold);
    return {100.0 * rate, threshold};
  }
  // Unreachable given the sweep extremes; keep a defensive fallback.
  return {100.0 * curve.points.back().miss, curve.points.back().threshold};
}

Matrix ConfusionMatrix(const std::vector<std::string> &truth,
                       const std::vector<std::string> &predicted,
                       const std::vector<std::string> &label_order) {
  if (truth.size() != predicted.size()) {
    throw LengthMismatch("label lists differ in length");
  }
  std::map<std::string, int> index;
  for (size_t i = 0; i < label_order.size(); ++i) {
    index[label_order[i]] = static_cast<int>(i);
  }
  const int n = static_cast<int>(label_order.size());
  Matrix counts(n, n, 0.0);
  std::vector<double> row_totals(n, 0.0);
  for (size_t i = 0; i < truth.size(); ++i) {
    const auto t = index.find(truth[i]);
    const auto p = index.find(predicted[i]);
    if (t == index.end()) throw UnknownLabel("unknown label: " + truth[i]);
    if (p == index.end()) throw UnknownLabel("unknown label: " + predicted[i]);
    counts(t->second, p->second) += 1.0;
    row_totals[t->second] += 1.0;
  }
  Matrix percent(n, n, 0.0);
  for (int i = 0; i < n; ++i) {
    if (row_totals[i] <= 0.0) continue;
    for (int j = 0; j < n; ++j) {
      percent(i, j) = 100.0 * counts(i, j) / row_totals[i];
    }
  }
  return percent;
}

SummaryStats ComputeSummaryStats(const std::vector<double> &values) {
  if (values.empty()) throw EmptyValues("summary of an empty list");
  SummaryStats stats;
  for (double v : values) stats.mean += v;
  stats.mean /= static_cast<double>(values.size());
  double acc = 0.0;
  for (double v : values) {
    const double d = v - stats.mean;
    acc += d * d;
  }
  stats.sd = std::sqrt(acc / static_cast<double>(values.size()));
  return stats;
}

double TwoSampleT(const std::vector<double> &a, const std::vector<double> &b) {
  if (a.size() < 2 || b.size() < 2) {
    throw TooFewSamples("the t statistic needs at least two samples per list");
  }
  auto mean_and_sample_var = [](const std::vector<double> &v) {
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double acc = 0.0;
    for (double x : v) {
      const double d = x - mean;
      acc += d * d;
    }
    return std::pair<double, double>(mean,
                                     acc / static_cast<double>(v.size() - 1));
  };
  const auto [mean_a, var_a] = mean_and_sample_var(a);
  const auto [mean_b, var_b] = mean_and_sample_var(b);
  return (mean_a - mean_b) /
         std::sqrt(var_a / static_cast<double>(a.size()) +
                   var_b / static_cast<double>(b.size()));
}

void ExportDet(const DetCurve &curve, const std::string &path) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open for writing: " + path);
  out << "threshold,false_alarm,miss\n";
  char line[128];
  for (const DetPoint &p : curve.points) {
    std::snprintf(line, sizeof(line), "%.9g,%.9g,%.9g\n", p.threshold,
                  p.false_alarm, p.miss);
    out << line;
  }
  if (!out) throw IoError("write failed: " + path);
}

}  // namespace emocascade
