#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "fir/sequence.hpp"
#include "fir/types.hpp"

namespace fir {

enum class DerivativeKernel { CentralDiff, ForwardDiff };

enum class TransitionMode { TwoSided, RiseOnly, FallOnly };

// Frames where the face switches between neutral and the expression.
// TwoSided iff both t1 (neutral->expression) and t2 (expression->neutral)
// were found; one-sided estimates carry only the matching frame.
struct TransitionEstimate {
  std::optional<int> t1;
  std::optional<int> t2;
  TransitionMode mode = TransitionMode::TwoSided;

  bool operator==(const TransitionEstimate&) const = default;
};

// N per-landmark response rows over T frames. A row is identically zero and
// flagged degenerate iff its landmark never moves.
struct ResponseMatrix {
  int num_points = 0;
  int num_frames = 0;
  std::vector<double> values;               // row-major N x T
  std::vector<std::uint8_t> degenerate;

  ResponseMatrix() = default;
  ResponseMatrix(int n, int t)
      : num_points(n),
        num_frames(t),
        values(static_cast<std::size_t>(n) * t, 0.0),
        degenerate(n, 0) {}

  std::span<const double> row(int i) const {
    return {values.data() + static_cast<std::size_t>(i) * num_frames,
            static_cast<std::size_t>(num_frames)};
  }
  std::span<double> row(int i) {
    return {values.data() + static_cast<std::size_t>(i) * num_frames,
            static_cast<std::size_t>(num_frames)};
  }
};

// Peak search mechanics for transition detection. Maxima are searched on a
// gaussian-smoothed copy of the series; each accepted maximum is then
// localized on the raw series by the centroid of the surrounding bump.
struct PeakOptions {
  double smooth_sigma = 3.0;
  int locate_window = 8;
};

struct ResponseConfig {
  DerivativeKernel kernel = DerivativeKernel::CentralDiff;
  // Gaussian pre-smoothing of each response row before the derivative.
  double sigma = 2.0;
  // Stage-1 transition detection on the merged derivative of all rows.
  double peak_sigma = 3.0;
  double min_prominence = 0.15;
  int min_separation = 0;  // <=0 selects max(3, T/10)
  int peak_window = 8;
  // Detection is then repeated on the top-ranked rows only; their merged
  // derivative is much cleaner, so thresholds tighten and smoothing relaxes.
  int refine_passes = 2;
  double refine_fraction = 0.25;
  double refine_peak_sigma = 1.5;
  double refine_min_prominence = 0.3;
  int refine_peak_window = 5;

  bool median_excludes_degenerate = true;
  bool fallback_enabled = true;

  std::optional<int> reference_point;            // overrides Sequence::nose_index
  std::optional<ScalarResponse> external_approx; // provided course, skips detection
};

struct IntensityResult {
  ScalarResponse final;       // weighted sum of oriented rows
  ScalarResponse final_norm;  // same, min-max scaled to [0,1]
  WeightVector weights;
  std::vector<double> distances;      // per-point distance to the approximated course
  std::vector<std::uint8_t> flipped;  // per-point orientation choice
  ResponseMatrix oriented;            // rows scaled to [0,1]
  ScalarResponse approx;
  std::optional<TransitionEstimate> transitions;  // absent with external approx / fallback
  bool low_confidence = false;                    // fallback path was taken
};

// Projects the point's trajectory onto its dominant principal axis and
// returns per-frame signed displacement from frame 0 (exactly 0 at t=0).
// A never-moving point yields the all-zero response and sets *degenerate.
ScalarResponse local_pca_response(const Sequence& seq, int point, bool* degenerate = nullptr);

ResponseMatrix response_matrix(const Sequence& seq);

// Per-row derivative (optionally gaussian-presmoothed, replicate padding),
// absolute values merged per frame by the median over rows.
ScalarResponse derivative_response(const ResponseMatrix& m, DerivativeKernel kernel,
                                   double sigma = 0.0, bool exclude_degenerate = true);

// Finds the transition frames as the strongest local maxima of the merged
// derivative. min_separation <= 0 selects max(3, T/10). When only a single
// maximum qualifies, `starts_low` decides RiseOnly (true / unset) vs
// FallOnly. Throws NoTransition when nothing qualifies.
TransitionEstimate detect_transitions(const ScalarResponse& r_delta, int min_separation,
                                      double min_prominence, const PeakOptions& opts = {},
                                      std::optional<bool> starts_low = std::nullopt);

// 0 for t <= t1, 1 for t1 < t < t2, 0 for t >= t2.
ScalarResponse box_response(int t1, int t2, int num_frames);

// RiseOnly: 0 up to and including edge, then 1. FallOnly: 1 before edge,
// 0 from edge on.
ScalarResponse one_sided_box(TransitionMode mode, int edge, int num_frames);

ScalarResponse box_for(const TransitionEstimate& tr, int num_frames);

// Min-max scales the row and its negation to [0,1] and returns whichever is
// closer (L2) to the approximated course; ties keep the un-negated one.
// Constant rows come back as all zeros.
ScalarResponse orient_and_scale(std::span<const double> row, const ScalarResponse& approx,
                                bool* flipped = nullptr);

// W_i = 1 - D_i / max_j D_j with D_i the L2 distance of oriented row i to
// the approximated course; all ones when every distance is zero.
WeightVector rank_weights(const ResponseMatrix& oriented, const ScalarResponse& approx,
                          std::vector<double>* distances = nullptr);

ScalarResponse final_response(const ResponseMatrix& oriented, const WeightVector& weights);

// Min-max scaled copy; a constant series maps to all zeros.
ScalarResponse minmax_normalized(const ScalarResponse& r);

std::vector<double> gaussian_smooth(std::span<const double> v, double sigma);

// Full pipeline: center, per-point responses, transition detection (or the
// externally supplied course), orientation, ranking, weighted combination.
IntensityResult estimate_intensity(const Sequence& seq, const ResponseConfig& config);

}  // namespace fir
