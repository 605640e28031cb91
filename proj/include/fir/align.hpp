#pragma once

#include <utility>
#include <vector>

#include "fir/sequence.hpp"
#include "fir/types.hpp"

namespace fir {

// Monotone frame correspondence between a source response and the template.
// Starts at (0,0), ends at (T_src-1, T_tpl-1), each step advances source,
// template, or both by exactly one.
struct WarpPath {
  std::vector<std::pair<int, int>> pairs;

  // BadPath unless the structural invariants hold for the given lengths.
  void validate(int src_len, int tpl_len) const;
};

enum class TransitionChoice { First, SecondFlipped };

struct AlignmentResult {
  ScalarResponse warped;  // source resampled onto template time
  WarpPath path;
  double cost = 0.0;
  TransitionChoice chosen_transition = TransitionChoice::First;
  int window = 0;  // transition window length used by select_transition
  double window_error_first = 0.0;
  double window_error_second = 0.0;
};

// Smoothed symmetric trapezoid: linear 0->1 over the first transition_len
// frames, plateau at 1, mirrored fall, then a centered moving average of
// width `smoothing` re-clamped to [0,1].
ScalarResponse make_template(int total_len, int transition_len, int smoothing = 5);

// Data-driven variant: per-frame median of the responses (each linearly
// resampled to total_len), symmetrized, smoothed, scaled to [0,1].
ScalarResponse make_template_from_responses(const std::vector<ScalarResponse>& responses,
                                            int total_len, int smoothing = 5);

// Classic dynamic-programming alignment with squared-difference cost and
// steps {(1,0),(0,1),(1,1)}. The warped response takes the mean of all
// source frames matched to each template frame.
AlignmentResult dtw_align(const ScalarResponse& src, const ScalarResponse& tpl);

// Compares the warped response against the template over the first and last
// `window` frames and keeps the closer transition; ties pick First. When the
// second transition wins, downstream consumers must reverse the frame order
// of that window (SecondFlipped).
AlignmentResult select_transition(AlignmentResult res, const ScalarResponse& tpl,
                                  int window = 30);

// The selected transition window of the warped response, reversed when the
// second transition was chosen so it always runs neutral -> expression.
std::vector<double> selected_window(const AlignmentResult& res, int window);

// Applies the warp to a full sequence: each template frame averages its
// matched source frames; target_len != template length resamples linearly
// in template time.
Sequence warp_sequence(const Sequence& seq, const WarpPath& path, int target_len);

// (1/S) * sum_k ||r_k - tpl||^2 over the first `window` frames.
double alignment_mse(const std::vector<ScalarResponse>& aligned, const ScalarResponse& tpl,
                     int window);

}  // namespace fir
