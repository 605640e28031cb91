#pragma once

#include <vector>

#include "fir/sequence.hpp"
#include "fir/types.hpp"

namespace fir {

struct GlobalPcaResult {
  ScalarResponse response;        // min-max scaled projection, oriented
  std::vector<double> direction;  // unit vector in flattened (point-major) frame space
  bool flipped = false;
  int iterations = 0;
};

// Whole-frame PCA baseline: frames flattened to d*N vectors, mean-centered,
// dominant direction by power iteration (all-ones start, tolerance 1e-10,
// at most 10000 iterations), projection min-max scaled and oriented towards
// `reference` the same way local rows are oriented. Throws ZeroVariance when
// every frame is identical.
GlobalPcaResult global_pca(const Sequence& centered, const ScalarResponse& reference);

ScalarResponse global_pca_response(const Sequence& centered, const ScalarResponse& reference);

}  // namespace fir
