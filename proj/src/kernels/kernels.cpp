#include "fir/kernels.hpp"

namespace fir::kernels {

namespace {

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i] * b[i];
  return acc;
}

double l2sq_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double d = a[i] - b[i];
    acc += d * d;
  }
  return acc;
}

double sum_scalar(const double* a, std::size_t n) {
  double acc = 0.0;
  for (std::size_t i = 0; i < n; ++i) acc += a[i];
  return acc;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

MinMax minmax_scalar(const double* a, std::size_t n) {
  MinMax mm{a[0], a[0]};
  for (std::size_t i = 1; i < n; ++i) {
    if (a[i] < mm.min) mm.min = a[i];
    if (a[i] > mm.max) mm.max = a[i];
  }
  return mm;
}

void scale_unit_scalar(const double* a, double ref, double range, bool negate, double* out,
                       std::size_t n) {
  if (negate) {
    for (std::size_t i = 0; i < n; ++i) out[i] = (ref - a[i]) / range;
  } else {
    for (std::size_t i = 0; i < n; ++i) out[i] = (a[i] - ref) / range;
  }
}

constexpr Ops kScalarOps{dot_scalar, l2sq_scalar, sum_scalar,
                         axpy_scalar, minmax_scalar, scale_unit_scalar};

struct Active {
  const Ops* ops;
  Backend backend;
};

Active pick_default() {
  if (const Ops* o = avx2_ops()) return {o, Backend::Avx2};
  if (const Ops* o = neon_ops()) return {o, Backend::Neon};
  return {&kScalarOps, Backend::Scalar};
}

Active& active() {
  static Active a = pick_default();
  return a;
}

}  // namespace

const Ops& scalar_ops() { return kScalarOps; }

#if !defined(FIR_HAVE_AVX2)
const Ops* avx2_ops() { return nullptr; }
#endif
#if !defined(FIR_HAVE_NEON)
const Ops* neon_ops() { return nullptr; }
#endif

const Ops& ops() { return *active().ops; }

Backend active_backend() { return active().backend; }

std::string_view backend_name() {
  switch (active_backend()) {
    case Backend::Avx2: return "avx2";
    case Backend::Neon: return "neon";
    case Backend::Scalar: break;
  }
  return "scalar";
}

Backend set_backend(Backend b) {
  Active& a = active();
  switch (b) {
    case Backend::Avx2:
      if (const Ops* o = avx2_ops()) {
        a = {o, Backend::Avx2};
        return b;
      }
      break;
    case Backend::Neon:
      if (const Ops* o = neon_ops()) {
        a = {o, Backend::Neon};
        return b;
      }
      break;
    case Backend::Scalar:
      break;
  }
  a = {&kScalarOps, Backend::Scalar};
  return Backend::Scalar;
}

}  // namespace fir::kernels
