#include "fir/baseline.hpp"

#include <cmath>

#include "fir/errors.hpp"
#include "fir/kernels.hpp"
#include "fir/response.hpp"

namespace fir {

GlobalPcaResult global_pca(const Sequence& centered, const ScalarResponse& reference) {
  const int T = centered.num_frames();
  const int dn = centered.dim() * centered.num_points();
  if (static_cast<int>(reference.size()) != T)
    fail(Errc::LengthMismatch, "reference response length != num_frames");

  // frames as rows, mean-centered over time
  std::vector<double> x(static_cast<std::size_t>(T) * dn);
  for (int t = 0; t < T; ++t) {
    const std::vector<double> f = centered.frame(t);
    std::copy(f.begin(), f.end(), x.begin() + static_cast<std::size_t>(t) * dn);
  }
  for (int j = 0; j < dn; ++j) {
    double mean = 0.0;
    for (int t = 0; t < T; ++t) mean += x[static_cast<std::size_t>(t) * dn + j];
    mean /= T;
    for (int t = 0; t < T; ++t) x[static_cast<std::size_t>(t) * dn + j] -= mean;
  }
  double total = 0.0;
  for (double v : x) total += v * v;
  if (total == 0.0) fail(Errc::ZeroVariance, "all frames identical in sequence " + centered.id);

  auto row = [&](int t) {
    return std::span<const double>(x.data() + static_cast<std::size_t>(t) * dn,
                                   static_cast<std::size_t>(dn));
  };

  GlobalPcaResult result;
  std::vector<double> v(dn, 1.0 / std::sqrt(static_cast<double>(dn)));
  std::vector<double> w(dn);
  constexpr double kTol = 1e-10;
  constexpr int kMaxIter = 10000;
  for (int it = 0; it < kMaxIter; ++it) {
    // w = (X^T X) v without forming the covariance
    std::fill(w.begin(), w.end(), 0.0);
    for (int t = 0; t < T; ++t) kernels::axpy(kernels::dot(row(t), v), row(t), w);
    double norm = std::sqrt(kernels::dot(w, w));
    if (norm == 0.0) {
      // start vector landed exactly orthogonal to the data; restart from the
      // highest-variance coordinate axis
      int best = 0;
      double best_var = -1.0;
      for (int j = 0; j < dn; ++j) {
        double acc = 0.0;
        for (int t = 0; t < T; ++t) {
          const double x = row(t)[j];
          acc += x * x;
        }
        if (acc > best_var) {
          best_var = acc;
          best = j;
        }
      }
      std::fill(w.begin(), w.end(), 0.0);
      w[best] = 1.0;
      norm = 1.0;
    }
    for (int j = 0; j < dn; ++j) w[j] /= norm;
    result.iterations = it + 1;
    const double diff = std::sqrt(kernels::l2sq(w, v));
    v = w;
    if (diff < kTol) break;
  }
  result.direction = v;

  std::vector<double> proj(T);
  for (int t = 0; t < T; ++t) proj[t] = kernels::dot(row(t), v);
  const auto mm = kernels::minmax(proj);
  ScalarResponse out(std::vector<double>(T, 0.0), ResponseKind::GlobalPca);
  if (mm.max > mm.min) {
    std::vector<double> hat(T), neg(T);
    kernels::scale_unit(proj, mm.min, mm.max - mm.min, false, hat);
    kernels::scale_unit(proj, mm.max, mm.max - mm.min, true, neg);
    const double d_hat = kernels::l2sq(hat, reference.values);
    const double d_neg = kernels::l2sq(neg, reference.values);
    if (d_hat <= d_neg) {
      out.values = std::move(hat);
    } else {
      out.values = std::move(neg);
      result.flipped = true;
    }
  }
  result.response = std::move(out);
  return result;
}

ScalarResponse global_pca_response(const Sequence& centered, const ScalarResponse& reference) {
  return global_pca(centered, reference).response;
}

}  // namespace fir
