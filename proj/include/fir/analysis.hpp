#pragma once

#include <string>
#include <vector>

#include "fir/response.hpp"
#include "fir/sequence.hpp"
#include "fir/types.hpp"

namespace fir {

// Temporal annotation of one action-unit activation: neutral, onset, apex,
// offset, back to neutral.
struct AUEvent {
  std::string au_id;
  int ne_start = 0;
  int onset = 0;
  int apex = 0;
  int offset = 0;
  int ne_end = 0;

  // BadEvent unless ne_start <= onset < apex <= offset <= ne_end < T.
  void validate(int num_frames) const;
};

// 0 on [ne_start, onset], linear 0->1 on [onset, apex], 1 on [apex, offset],
// linear 1->0 on [offset, ne_end], 0 outside.
ScalarResponse au_approx_response(const AUEvent& ev, int num_frames);

// Zeroes the floor((1-keep_fraction)*N) smallest weights, lower point index
// first on ties; surviving weights are untouched.
WeightVector threshold_weights(const WeightVector& w, double keep_fraction);

struct AuIntensityResult {
  IntensityResult base;                 // full-weight result against the AU course
  WeightVector thresholded_weights;
  ScalarResponse final_thresholded;
  ScalarResponse final_thresholded_norm;
  double mse_full = 0.0;         // ||approx - final_norm||^2
  double mse_thresholded = 0.0;  // ||approx - final_thresholded_norm||^2
};

// Runs the intensity pipeline with the AU course as the given approximated
// response (no transition detection), then re-combines with thresholded
// weights.
AuIntensityResult au_intensity(const Sequence& seq, const AUEvent& ev,
                               const ResponseConfig& config, double keep_fraction = 0.25);

struct MergeStep {
  int node_a = 0;  // smaller node id of the merged pair
  int node_b = 0;
  double height = 0.0;  // increase in total within-cluster sum of squares
  int size = 0;         // size of the merged cluster
};

struct ClusterResult {
  int k = 0;
  std::vector<int> labels;           // cluster id in [0,k) per input row
  std::vector<MergeStep> merge_tree; // S-1 merges; leaves are 0..S-1, merge i creates node S+i
  std::vector<std::vector<double>> mean_weights;  // k x N
  std::vector<std::vector<double>> mean_shapes;   // k x (d*N), empty without shapes
};

// Agglomerative clustering with Ward's minimum-variance criterion
// (Lance-Williams update, squared euclidean). Labels come from cutting the
// tree at k and are renumbered so the cluster containing the lowest row
// index is 0. Optional apex shapes (point-major flattened, one per row)
// produce per-cluster mean shapes.
ClusterResult ward_cluster(const std::vector<std::vector<double>>& rows, int k,
                           const std::vector<std::vector<double>>* apex_shapes = nullptr);

}  // namespace fir
