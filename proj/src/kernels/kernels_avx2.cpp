#if defined(FIR_HAVE_AVX2)

#include <immintrin.h>

#include "fir/kernels.hpp"

namespace fir::kernels {

namespace {

inline double hsum(__m256d v) {
  __m128d lo = _mm256_castpd256_pd128(v);
  __m128d hi = _mm256_extractf128_pd(v, 1);
  lo = _mm_add_pd(lo, hi);
  __m128d sh = _mm_unpackhi_pd(lo, lo);
  return _mm_cvtsd_f64(_mm_add_sd(lo, sh));
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    acc = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc);
  }
  double s = hsum(acc);
  for (; i < n; ++i) s += a[i] * b[i];
  return s;
}

double l2sq_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i));
    acc = _mm256_fmadd_pd(d, d, acc);
  }
  double s = hsum(acc);
  for (; i < n; ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

double sum_avx2(const double* a, std::size_t n) {
  __m256d acc = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) acc = _mm256_add_pd(acc, _mm256_loadu_pd(a + i));
  double s = hsum(acc);
  for (; i < n; ++i) s += a[i];
  return s;
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
  const __m256d va = _mm256_set1_pd(alpha);
  std::size_t i = 0;
  for (; i + 4 <= n; i += 4) {
    __m256d r = _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i));
    _mm256_storeu_pd(y + i, r);
  }
  for (; i < n; ++i) y[i] += alpha * x[i];
}

MinMax minmax_avx2(const double* a, std::size_t n) {
  if (n < 4) {
    MinMax mm{a[0], a[0]};
    for (std::size_t i = 1; i < n; ++i) {
      if (a[i] < mm.min) mm.min = a[i];
      if (a[i] > mm.max) mm.max = a[i];
    }
    return mm;
  }
  __m256d vmin = _mm256_loadu_pd(a);
  __m256d vmax = vmin;
  std::size_t i = 4;
  for (; i + 4 <= n; i += 4) {
    __m256d v = _mm256_loadu_pd(a + i);
    vmin = _mm256_min_pd(vmin, v);
    vmax = _mm256_max_pd(vmax, v);
  }
  if (i < n) {
    // one overlapping tail block keeps everything branch-light
    __m256d v = _mm256_loadu_pd(a + n - 4);
    vmin = _mm256_min_pd(vmin, v);
    vmax = _mm256_max_pd(vmax, v);
  }
  alignas(32) double lo[4], hi[4];
  _mm256_store_pd(lo, vmin);
  _mm256_store_pd(hi, vmax);
  MinMax mm{lo[0], hi[0]};
  for (int k = 1; k < 4; ++k) {
    if (lo[k] < mm.min) mm.min = lo[k];
    if (hi[k] > mm.max) mm.max = hi[k];
  }
  return mm;
}

void scale_unit_avx2(const double* a, double ref, double range, bool negate, double* out,
                     std::size_t n) {
  const __m256d vref = _mm256_set1_pd(ref);
  const __m256d vrange = _mm256_set1_pd(range);
  std::size_t i = 0;
  if (negate) {
    for (; i + 4 <= n; i += 4) {
      __m256d d = _mm256_sub_pd(vref, _mm256_loadu_pd(a + i));
      _mm256_storeu_pd(out + i, _mm256_div_pd(d, vrange));
    }
    for (; i < n; ++i) out[i] = (ref - a[i]) / range;
  } else {
    for (; i + 4 <= n; i += 4) {
      __m256d d = _mm256_sub_pd(_mm256_loadu_pd(a + i), vref);
      _mm256_storeu_pd(out + i, _mm256_div_pd(d, vrange));
    }
    for (; i < n; ++i) out[i] = (a[i] - ref) / range;
  }
}

constexpr Ops kAvx2Ops{dot_avx2, l2sq_avx2, sum_avx2, axpy_avx2, minmax_avx2, scale_unit_avx2};

bool cpu_has_avx2() {
#if defined(__GNUC__) || defined(__clang__)
  return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
  return false;
#endif
}

}  // namespace

const Ops* avx2_ops() {
  static const Ops* ops = cpu_has_avx2() ? &kAvx2Ops : nullptr;
  return ops;
}

}  // namespace fir::kernels

#endif  // FIR_HAVE_AVX2
