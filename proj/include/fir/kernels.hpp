#pragma once

#include <cstddef>
#include <span>
#include <string_view>

// Vector arithmetic primitives used by the response pipeline's inner loops.
// A scalar reference implementation always exists; AVX2 (x86-64) and NEON
// (aarch64) variants are selected once at startup based on what the CPU
// supports. set_backend() overrides the choice, which the equivalence tests
// use to compare SIMD results against the scalar reference.

namespace fir::kernels {

enum class Backend { Scalar, Avx2, Neon };

struct MinMax {
  double min;
  double max;
};

struct Ops {
  double (*dot)(const double*, const double*, std::size_t);
  double (*l2sq)(const double*, const double*, std::size_t);
  double (*sum)(const double*, std::size_t);
  void (*axpy)(double, const double*, double*, std::size_t);
  MinMax (*minmax)(const double*, std::size_t);
  void (*scale_unit)(const double*, double, double, bool, double*, std::size_t);
};

Backend active_backend();
std::string_view backend_name();

// Requests a backend; returns the one actually installed (falls back to
// Scalar when the requested one is not compiled in or not supported).
Backend set_backend(Backend b);

const Ops& scalar_ops();
const Ops* avx2_ops();  // nullptr when unavailable
const Ops* neon_ops();  // nullptr when unavailable

const Ops& ops();

inline double dot(std::span<const double> a, std::span<const double> b) {
  return ops().dot(a.data(), b.data(), a.size());
}

// Squared euclidean distance between two equal-length vectors.
inline double l2sq(std::span<const double> a, std::span<const double> b) {
  return ops().l2sq(a.data(), b.data(), a.size());
}

inline double sum(std::span<const double> a) { return ops().sum(a.data(), a.size()); }

// y += alpha * x
inline void axpy(double alpha, std::span<const double> x, std::span<double> y) {
  ops().axpy(alpha, x.data(), y.data(), x.size());
}

// min/max of a non-empty vector
inline MinMax minmax(std::span<const double> a) { return ops().minmax(a.data(), a.size()); }

// out[i] = (a[i] - ref) / range, or (ref - a[i]) / range when negate is set.
// Division keeps the endpoints exact: the element equal to ref maps to 0 and
// the one `range` away maps to 1.
inline void scale_unit(std::span<const double> a, double ref, double range, bool negate,
                       std::span<double> out) {
  ops().scale_unit(a.data(), ref, range, negate, out.data(), a.size());
}

}  // namespace fir::kernels
