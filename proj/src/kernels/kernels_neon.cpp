#if defined(FIR_HAVE_NEON)

#include <arm_neon.h>

#include "fir/kernels.hpp"

namespace fir::kernels {

namespace {

double dot_neon(const double* a, const double* b, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) acc = vfmaq_f64(acc, vld1q_f64(a + i), vld1q_f64(b + i));
  double s = vaddvq_f64(acc);
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

double l2sq_neon(const double* a, const double* b, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    float64x2_t d = vsubq_f64(vld1q_f64(a + i), vld1q_f64(b + i));
    acc = vfmaq_f64(acc, d, d);
  }
  double s = vaddvq_f64(acc);
  for (; i < n; ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

double sum_neon(const double* a, std::size_t n) {
  float64x2_t acc = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) acc = vaddq_f64(acc, vld1q_f64(a + i));
  double s = vaddvq_f64(acc);
  for (; i < n; ++i) s += a[i];
  return s;
}

void axpy_neon(double alpha, const double* x, double* y, std::size_t n) {
  const float64x2_t va = vdupq_n_f64(alpha);
  std::size_t i = 0;
  for (; i + 2 <= n; i += 2) {
    vst1q_f64(y + i, vfmaq_f64(vld1q_f64(y + i), va, vld1q_f64(x + i)));
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

MinMax minmax_neon(const double* a, std::size_t n) {
  MinMax mm{a[0], a[0]};
  std::size_t i = 0;
  if (n >= 2) {
    float64x2_t vmin = vld1q_f64(a);
    float64x2_t vmax = vmin;
    for (i = 2; i + 2 <= n; i += 2) {
      float64x2_t v = vld1q_f64(a + i);
      vmin = vminq_f64(vmin, v);
      vmax = vmaxq_f64(vmax, v);
    }
    mm.min = vminvq_f64(vmin);
    mm.max = vmaxvq_f64(vmax);
  }
  for (; i < n; ++i) {
    if (a[i] < mm.min) mm.min = a[i];
    if (a[i] > mm.max) mm.max = a[i];
  }
  return mm;
}

void scale_unit_neon(const double* a, double ref, double range, bool negate, double* out,
                     std::size_t n) {
  const float64x2_t vref = vdupq_n_f64(ref);
  const float64x2_t vrange = vdupq_n_f64(range);
  std::size_t i = 0;
  if (negate) {
    for (; i + 2 <= n; i += 2)
      vst1q_f64(out + i, vdivq_f64(vsubq_f64(vref, vld1q_f64(a + i)), vrange));
    for (; i < n; ++i) out[i] = (ref - a[i]) / range;
  } else {
    for (; i + 2 <= n; i += 2)
      vst1q_f64(out + i, vdivq_f64(vsubq_f64(vld1q_f64(a + i), vref), vrange));
    for (; i < n; ++i) out[i] = (a[i] - ref) / range;
  }
}

constexpr Ops kNeonOps{dot_neon, l2sq_neon, sum_neon, axpy_neon, minmax_neon, scale_unit_neon};

}  // namespace

const Ops* neon_ops() { return &kNeonOps; }

}  // namespace fir::kernels

#endif  // FIR_HAVE_NEON
