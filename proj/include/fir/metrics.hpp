#pragma once

#include <string>
#include <vector>

#include "fir/response.hpp"
#include "fir/types.hpp"

namespace fir {

// Triangular pseudo ground truth: linear 0->peak over [0, apex], linear
// peak->0 over [apex, T-1].
ScalarResponse pseudo_ground_truth_triangle(int apex, int num_frames, double peak_value);

// Halfway point between t1 and t2, rounded half up. OneSided unless the
// estimate is TwoSided.
int apex_frame(const TransitionEstimate& tr);

double mae(const ScalarResponse& pred, const ScalarResponse& truth);

// Pearson correlation; 0 with *zero_variance set when either side is
// constant.
double pcc(const ScalarResponse& pred, const ScalarResponse& truth,
           bool* zero_variance = nullptr);

// ICC(3,1): two-way mixed model, single measure, consistency, with
// {pred, truth} as the two raters and frames as targets.
double icc(const ScalarResponse& pred, const ScalarResponse& truth);

struct SequenceEval {
  std::string sequence_id;
  double mae = 0.0;
  double pcc = 0.0;
  double icc = 0.0;
};

struct EvalReport {
  double mae = 0.0;  // means of the per-sequence values
  double pcc = 0.0;
  double icc = 0.0;
  std::vector<SequenceEval> per_sequence;
};

EvalReport aggregate_eval(std::vector<SequenceEval> rows);

}  // namespace fir
