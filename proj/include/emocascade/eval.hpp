// include/emocascade/eval.hpp

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

#ifndef EMOCASCADE_EVAL_HPP_
#define EMOCASCADE_EVAL_HPP_

#include <string>
#include <vector>

#include "emocascade/common.hpp"

namespace emocascade {

struct EmptyScores : Error {
  using Error::Error;
};
struct LengthMismatch : Error {
  using Error::Error;
};
struct UnknownLabel : Error {
  using Error::Error;
};
struct EmptyValues : Error {
  using Error::Error;
};
struct TooFewSamples : Error {
  using Error::Error;
};

// Verification trial scores split into genuine (target) and imposter
// (nontarget) trials.
struct ScoreSet {
  std::vector<double> target_scores;
  std::vector<double> nontarget_scores;
};

struct DetPoint {
  double threshold = 0.0;
  double false_alarm = 0.0;
  double miss = 0.0;
};

// Detection error trade-off curve: thresholds strictly increasing, false
// alarm rate non-increasing, miss rate non-decreasing.
struct DetCurve {
  std::vector<DetPoint> points;
};

// Sweeps thresholds over the sorted unique scores (plus one point above the
// maximum so both extremes appear).  At each threshold t: miss = fraction of
// target scores < t, false alarm = fraction of nontarget scores >= t,
// matching the inclusive accept rule used for verification decisions.
DetCurve ComputeDetCurve(const ScoreSet &scores);

// Equal error rate in percent: the crossing of the miss and false alarm
// curves, located by linear interpolation between the two sweep points
// bracketing the sign change of (miss - false alarm).
double Eer(const ScoreSet &scores);

// Equal error rate together with the interpolated threshold at the crossing,
// for calibrating an operating point on held-out scores.
struct EerPoint {
  double eer_percent = 0.0;
  double threshold = 0.0;
};
EerPoint EerWithThreshold(const ScoreSet &scores);

// Row-stochastic percentage confusion matrix over the given label order:
// entry (i, j) is the percentage of true-class-i items predicted as class j.
Matrix ConfusionMatrix(const std::vector<std::string> &truth,
                       const std::vector<std::string> &predicted,
                       const std::vector<std::string> &label_order);

// Mean and population standard deviation (divisor n).
struct SummaryStats {
  double mean = 0.0;
  double sd = 0.0;
};
SummaryStats ComputeSummaryStats(const std::vector<double> &values);

// Welch's t statistic with sample variances (divisor n-1):
// t = (mean_a - mean_b) / sqrt(s2_a/n_a + s2_b/n_b).
double TwoSampleT(const std::vector<double> &a, const std::vector<double> &b);

// Writes "threshold,false_alarm,miss" lines after a header, 9 significant
// digits per value.
void ExportDet(const DetCurve &curve, const std::string &path);

}  // namespace emocascade

#endif  // EMOCASCADE_EVAL_HPP_
