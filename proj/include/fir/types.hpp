#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace fir {

// Role of a one-dimensional response series.
enum class ResponseKind {
  Local,        // per-landmark principal-axis displacement
  Derivative,   // merged |derivative| series
  Approximated, // idealized 0/1 target course
  Final,        // weight-combined response
  Template,     // canonical trapezoid used for alignment
  Aligned,      // response warped onto template time
  GlobalPca,    // whole-frame PCA baseline
};

struct ScalarResponse {
  std::vector<double> values;
  ResponseKind kind = ResponseKind::Local;

  ScalarResponse() = default;
  ScalarResponse(std::vector<double> v, ResponseKind k) : values(std::move(v)), kind(k) {}

  std::size_t size() const { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }
  std::span<const double> span() const { return values; }
};

struct WeightVector {
  std::vector<double> weights;

  std::size_t size() const { return weights.size(); }
  double operator[](std::size_t i) const { return weights[i]; }
};

}  // namespace fir
