#include "fir/response.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fir/errors.hpp"
#include "fir/kernels.hpp"

namespace fir {

namespace {

constexpr double kDegenerateRelTol = 1e-12;

// Dominant eigenvector of a symmetric d x d matrix, d in {1,2,3}. The sign
// is canonicalized so the largest-magnitude component is positive.
void dominant_axis(const double c[3][3], int d, double v[3]) {
  v[0] = 1.0;
  v[1] = 0.0;
  v[2] = 0.0;
  if (d == 1) return;

  double scale = 0.0;
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) scale = std::max(scale, std::abs(c[i][j]));
  if (scale == 0.0) return;

  auto pick_diag_axis = [&] {
    int best = 0;
    for (int i = 1; i < d; ++i)
      if (c[i][i] > c[best][best]) best = i;
    v[0] = v[1] = v[2] = 0.0;
    v[best] = 1.0;
  };

  if (d == 2) {
    const double a = c[0][0], b = c[0][1], e = c[1][1];
    if (std::abs(b) <= 1e-15 * scale) {
      pick_diag_axis();
      return;
    }
    const double half = (a - e) / 2.0;
    const double lam = (a + e) / 2.0 + std::hypot(half, b);
    // two algebraic forms of the eigenvector; the larger one is better
    // conditioned
    const double u0[2] = {lam - e, b};
    const double u1[2] = {b, lam - a};
    const double n0 = u0[0] * u0[0] + u0[1] * u0[1];
    const double n1 = u1[0] * u1[0] + u1[1] * u1[1];
    const double* u = n0 >= n1 ? u0 : u1;
    const double n = std::sqrt(std::max(n0, n1));
    v[0] = u[0] / n;
    v[1] = u[1] / n;
  } else {
    const double off = c[0][1] * c[0][1] + c[0][2] * c[0][2] + c[1][2] * c[1][2];
    if (off <= (1e-15 * scale) * (1e-15 * scale) * 3.0) {
      pick_diag_axis();
      return;
    }
    // trigonometric eigenvalues of a real symmetric 3x3
    const double q = (c[0][0] + c[1][1] + c[2][2]) / 3.0;
    const double p2 = (c[0][0] - q) * (c[0][0] - q) + (c[1][1] - q) * (c[1][1] - q) +
                      (c[2][2] - q) * (c[2][2] - q) + 2.0 * off;
    const double p = std::sqrt(p2 / 6.0);
    double b[3][3];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) b[i][j] = (c[i][j] - (i == j ? q : 0.0)) / p;
    const double detb = b[0][0] * (b[1][1] * b[2][2] - b[1][2] * b[2][1]) -
                        b[0][1] * (b[1][0] * b[2][2] - b[1][2] * b[2][0]) +
                        b[0][2] * (b[1][0] * b[2][1] - b[1][1] * b[2][0]);
    const double r = std::clamp(detb / 2.0, -1.0, 1.0);
    const double phi = std::acos(r) / 3.0;
    const double lam = q + 2.0 * p * std::cos(phi);

    double m[3][3];
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) m[i][j] = c[i][j] - (i == j ? lam : 0.0);
    // the eigenvector is orthogonal to two independent rows of (C - lam I)
    double best[3] = {0.0, 0.0, 0.0};
    double best_norm = 0.0;
    const int pairs[3][2] = {{0, 1}, {0, 2}, {1, 2}};
    for (const auto& pr : pairs) {
      const double* r0 = m[pr[0]];
      const double* r1 = m[pr[1]];
      const double cx[3] = {r0[1] * r1[2] - r0[2] * r1[1], r0[2] * r1[0] - r0[0] * r1[2],
                            r0[0] * r1[1] - r0[1] * r1[0]};
      const double n = cx[0] * cx[0] + cx[1] * cx[1] + cx[2] * cx[2];
      if (n > best_norm) {
        best_norm = n;
        best[0] = cx[0];
        best[1] = cx[1];
        best[2] = cx[2];
      }
    }
    if (best_norm <= (1e-14 * scale * scale) * (1e-14 * scale * scale)) {
      // repeated dominant eigenvalue; any axis in the eigenplane works
      pick_diag_axis();
      return;
    }
    const double n = std::sqrt(best_norm);
    for (int i = 0; i < 3; ++i) v[i] = best[i] / n;
  }

  int big = 0;
  for (int i = 1; i < d; ++i)
    if (std::abs(v[i]) > std::abs(v[big])) big = i;
  if (v[big] < 0.0)
    for (int i = 0; i < d; ++i) v[i] = -v[i];
}

double median_destructive(std::vector<double>& v) {
  const std::size_t n = v.size();
  const std::size_t mid = n / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  const double hi = v[mid];
  if (n % 2 == 1) return hi;
  const double lo = *std::max_element(v.begin(), v.begin() + mid);
  return (lo + hi) / 2.0;
}

struct PeakCandidate {
  int frame = 0;
  double prominence = 0.0;
};

// Local maxima of v (plateaus count once, at their middle) with topographic
// prominence: the drop to the highest of the two bounding saddles, where each
// side is scanned until a strictly higher value or the series end.
std::vector<PeakCandidate> local_maxima(const std::vector<double>& v) {
  std::vector<PeakCandidate> peaks;
  const int n = static_cast<int>(v.size());
  int i = 1;
  while (i < n - 1) {
    if (v[i] > v[i - 1]) {
      int j = i;
      while (j + 1 < n && v[j + 1] == v[i]) ++j;
      if (j + 1 < n && v[j + 1] < v[i]) {
        const int mid = (i + j) / 2;
        double left_min = v[i];
        for (int k = i - 1; k >= 0; --k) {
          if (v[k] > v[mid]) break;
          left_min = std::min(left_min, v[k]);
        }
        double right_min = v[j];
        for (int k = j + 1; k < n; ++k) {
          if (v[k] > v[mid]) break;
          right_min = std::min(right_min, v[k]);
        }
        peaks.push_back({mid, v[mid] - std::max(left_min, right_min)});
      }
      i = j + 1;
    } else {
      ++i;
    }
  }
  return peaks;
}

int resolve_separation(int min_separation, int num_frames) {
  return min_separation > 0 ? min_separation : std::max(3, num_frames / 10);
}

// At most the two strongest maxima, localized on the raw series via the
// centroid of the bump above the window minimum.
std::vector<int> find_transition_candidates(const std::vector<double>& raw, int min_separation,
                                            double min_prominence, const PeakOptions& opts) {
  const int n = static_cast<int>(raw.size());
  const std::vector<double> smooth = gaussian_smooth(raw, opts.smooth_sigma);
  const double vmax = *std::max_element(smooth.begin(), smooth.end());
  if (!(vmax > 0.0)) return {};

  std::vector<PeakCandidate> peaks = local_maxima(smooth);
  std::erase_if(peaks, [&](const PeakCandidate& p) {
    return p.prominence < min_prominence * vmax;
  });
  std::sort(peaks.begin(), peaks.end(), [](const PeakCandidate& a, const PeakCandidate& b) {
    if (a.prominence != b.prominence) return a.prominence > b.prominence;
    return a.frame < b.frame;
  });

  const int sep = resolve_separation(min_separation, n);
  std::vector<int> kept;
  for (const PeakCandidate& p : peaks) {
    bool ok = true;
    for (int q : kept)
      if (std::abs(p.frame - q) < sep) ok = false;
    if (ok) kept.push_back(p.frame);
    if (kept.size() == 2) break;
  }
  if (kept.empty()) return {};

  std::vector<int> refined;
  for (std::size_t idx = 0; idx < kept.size(); ++idx) {
    int w = opts.locate_window;
    if (kept.size() == 2) {
      const int gap = std::abs(kept[0] - kept[1]);
      w = std::min(w, std::max(1, (gap - 1) / 2));
    }
    const int p = kept[idx];
    const int a = std::max(0, p - w);
    const int b = std::min(n - 1, p + w);
    double lo = raw[a];
    for (int t = a; t <= b; ++t) lo = std::min(lo, raw[t]);
    double mass = 0.0, moment = 0.0;
    for (int t = a; t <= b; ++t) {
      const double m = raw[t] - lo;
      mass += m;
      moment += m * t;
    }
    refined.push_back(mass > 0.0 ? static_cast<int>(std::llround(moment / mass)) : p);
  }
  if (refined.size() == 2) {
    if (refined[0] > refined[1]) std::swap(refined[0], refined[1]);
    if (refined[0] == refined[1]) {
      refined = kept;  // centroids collided; keep the raw maxima
      std::sort(refined.begin(), refined.end());
    }
  }
  return refined;
}

TransitionEstimate estimate_from_candidates(const std::vector<int>& cands,
                                            std::optional<bool> starts_low) {
  TransitionEstimate tr;
  if (cands.size() >= 2) {
    tr.t1 = cands[0];
    tr.t2 = cands[1];
    tr.mode = TransitionMode::TwoSided;
  } else if (starts_low.value_or(true)) {
    tr.t1 = cands[0];
    tr.mode = TransitionMode::RiseOnly;
  } else {
    tr.t2 = cands[0];
    tr.mode = TransitionMode::FallOnly;
  }
  return tr;
}

ResponseMatrix orient_matrix(const ResponseMatrix& m, const ScalarResponse& approx,
                             std::vector<std::uint8_t>* flipped) {
  ResponseMatrix out(m.num_points, m.num_frames);
  out.degenerate = m.degenerate;
  if (flipped) flipped->assign(m.num_points, 0);
  for (int i = 0; i < m.num_points; ++i) {
    bool flip = false;
    const ScalarResponse o = orient_and_scale(m.row(i), approx, &flip);
    std::copy(o.values.begin(), o.values.end(), out.row(i).begin());
    if (flipped) (*flipped)[i] = flip ? 1 : 0;
  }
  return out;
}

// Decides whether the sequence starts in the neutral pose: orient the rows
// against a rise at `edge` and test whether the consensus (per-frame median
// of oriented rows) starts below its mid level.
bool sequence_starts_low(const ResponseMatrix& m, int edge) {
  const int T = m.num_frames;
  const ScalarResponse rise = one_sided_box(TransitionMode::RiseOnly, edge, T);
  ResponseMatrix oriented = orient_matrix(m, rise, nullptr);
  std::vector<double> proxy(T, 0.0), column;
  for (int t = 0; t < T; ++t) {
    column.clear();
    for (int i = 0; i < m.num_points; ++i)
      if (!oriented.degenerate[i]) column.push_back(oriented.row(i)[t]);
    if (column.empty()) return true;
    proxy[t] = median_destructive(column);
  }
  const auto mm = kernels::minmax(proxy);
  if (mm.max == mm.min) return true;
  const int head = std::max(1, T / 10);
  const double head_mean = kernels::sum(std::span<const double>(proxy.data(), head)) / head;
  return head_mean < (mm.min + mm.max) / 2.0;
}

ResponseMatrix submatrix(const ResponseMatrix& m, const std::vector<int>& rows) {
  ResponseMatrix out(static_cast<int>(rows.size()), m.num_frames);
  for (std::size_t k = 0; k < rows.size(); ++k) {
    const auto src = m.row(rows[k]);
    std::copy(src.begin(), src.end(), out.row(static_cast<int>(k)).begin());
    out.degenerate[k] = m.degenerate[rows[k]];
  }
  return out;
}

}  // namespace

ScalarResponse local_pca_response(const Sequence& seq, int point, bool* degenerate) {
  const int T = seq.num_frames();
  const int d = seq.dim();
  if (point < 0 || point >= seq.num_points()) fail(Errc::BadIndex, "point index out of range");
  if (degenerate) *degenerate = false;

  double max_abs = 0.0, max_dev = 0.0;
  for (int c = 0; c < d; ++c) {
    const auto s = seq.series(point, c);
    for (int t = 0; t < T; ++t) {
      max_abs = std::max(max_abs, std::abs(s[t]));
      max_dev = std::max(max_dev, std::abs(s[t] - s[0]));
    }
  }
  ScalarResponse out(std::vector<double>(T, 0.0), ResponseKind::Local);
  if (max_dev <= kDegenerateRelTol * max_abs) {
    if (degenerate) *degenerate = true;
    return out;
  }

  std::vector<double> buf(static_cast<std::size_t>(d) * T);
  double* cent[3] = {nullptr, nullptr, nullptr};
  for (int c = 0; c < d; ++c) {
    cent[c] = buf.data() + static_cast<std::size_t>(c) * T;
    const auto s = seq.series(point, c);
    const double mean = kernels::sum(s) / T;
    for (int t = 0; t < T; ++t) cent[c][t] = s[t] - mean;
  }
  double cov[3][3] = {};
  for (int a = 0; a < d; ++a)
    for (int b = a; b < d; ++b) {
      const double v = kernels::ops().dot(cent[a], cent[b], static_cast<std::size_t>(T)) / (T - 1);
      cov[a][b] = v;
      cov[b][a] = v;
    }
  double axis[3];
  dominant_axis(cov, d, axis);

  for (int c = 0; c < d; ++c) kernels::axpy(axis[c], seq.series(point, c), out.values);
  const double origin = out.values[0];
  for (double& v : out.values) v -= origin;
  out.values[0] = 0.0;
  return out;
}

ResponseMatrix response_matrix(const Sequence& seq) {
  ResponseMatrix m(seq.num_points(), seq.num_frames());
  for (int i = 0; i < seq.num_points(); ++i) {
    bool degen = false;
    const ScalarResponse r = local_pca_response(seq, i, &degen);
    std::copy(r.values.begin(), r.values.end(), m.row(i).begin());
    m.degenerate[i] = degen ? 1 : 0;
  }
  return m;
}

std::vector<double> gaussian_smooth(std::span<const double> v, double sigma) {
  std::vector<double> out(v.begin(), v.end());
  if (!(sigma > 0.0) || v.size() < 2) return out;
  // replicate padding makes radii beyond the series length pointless
  const int radius = static_cast<int>(
      std::min(std::ceil(3.0 * sigma), static_cast<double>(v.size())));
  std::vector<double> g(2 * radius + 1);
  double norm = 0.0;
  for (int k = -radius; k <= radius; ++k) {
    g[k + radius] = std::exp(-0.5 * (k / sigma) * (k / sigma));
    norm += g[k + radius];
  }
  for (double& w : g) w /= norm;
  const int n = static_cast<int>(v.size());
  for (int t = 0; t < n; ++t) {
    double acc = 0.0;
    for (int k = -radius; k <= radius; ++k) {
      const int idx = std::clamp(t + k, 0, n - 1);
      acc += g[k + radius] * v[idx];
    }
    out[t] = acc;
  }
  return out;
}

ScalarResponse derivative_response(const ResponseMatrix& m, DerivativeKernel kernel, double sigma,
                                   bool exclude_degenerate) {
  const int T = m.num_frames;
  if (T < 2) fail(Errc::ShapeError, "derivative needs at least 2 frames");

  std::vector<std::vector<double>> deriv_rows;
  for (int i = 0; i < m.num_points; ++i) {
    if (exclude_degenerate && m.degenerate[i]) continue;
    std::vector<double> buf = gaussian_smooth(m.row(i), sigma);
    std::vector<double> dv(T);
    if (kernel == DerivativeKernel::CentralDiff) {
      for (int t = 0; t < T; ++t) {
        const double next = buf[std::min(t + 1, T - 1)];
        const double prev = buf[std::max(t - 1, 0)];
        dv[t] = std::abs((next - prev) / 2.0);
      }
    } else {
      for (int t = 0; t < T; ++t) dv[t] = std::abs(buf[std::min(t + 1, T - 1)] - buf[t]);
    }
    deriv_rows.push_back(std::move(dv));
  }

  ScalarResponse out(std::vector<double>(T, 0.0), ResponseKind::Derivative);
  if (deriv_rows.empty()) return out;
  std::vector<double> column(deriv_rows.size());
  for (int t = 0; t < T; ++t) {
    for (std::size_t r = 0; r < deriv_rows.size(); ++r) column[r] = deriv_rows[r][t];
    out.values[t] = median_destructive(column);
  }
  return out;
}

TransitionEstimate detect_transitions(const ScalarResponse& r_delta, int min_separation,
                                      double min_prominence, const PeakOptions& opts,
                                      std::optional<bool> starts_low) {
  if (r_delta.size() < 3) fail(Errc::ShapeError, "derivative series too short");
  const std::vector<int> cands =
      find_transition_candidates(r_delta.values, min_separation, min_prominence, opts);
  if (cands.empty()) fail(Errc::NoTransition, "no qualifying derivative maxima");
  return estimate_from_candidates(cands, starts_low);
}

ScalarResponse box_response(int t1, int t2, int num_frames) {
  if (!(0 <= t1 && t1 < t2 && t2 <= num_frames - 1))
    fail(Errc::BadBounds, "need 0 <= t1 < t2 <= T-1, got t1=" + std::to_string(t1) +
                              " t2=" + std::to_string(t2) + " T=" + std::to_string(num_frames));
  ScalarResponse out(std::vector<double>(num_frames, 0.0), ResponseKind::Approximated);
  for (int t = t1 + 1; t < t2; ++t) out.values[t] = 1.0;
  return out;
}

ScalarResponse one_sided_box(TransitionMode mode, int edge, int num_frames) {
  if (edge < 0 || edge > num_frames - 1) fail(Errc::BadBounds, "edge frame out of range");
  ScalarResponse out(std::vector<double>(num_frames, 0.0), ResponseKind::Approximated);
  if (mode == TransitionMode::RiseOnly) {
    for (int t = edge + 1; t < num_frames; ++t) out.values[t] = 1.0;
  } else if (mode == TransitionMode::FallOnly) {
    for (int t = 0; t < edge; ++t) out.values[t] = 1.0;
  } else {
    fail(Errc::BadBounds, "one_sided_box needs RiseOnly or FallOnly");
  }
  return out;
}

ScalarResponse box_for(const TransitionEstimate& tr, int num_frames) {
  switch (tr.mode) {
    case TransitionMode::TwoSided: return box_response(*tr.t1, *tr.t2, num_frames);
    case TransitionMode::RiseOnly: return one_sided_box(tr.mode, *tr.t1, num_frames);
    case TransitionMode::FallOnly: return one_sided_box(tr.mode, *tr.t2, num_frames);
  }
  fail(Errc::Internal, "bad transition mode");
}

ScalarResponse orient_and_scale(std::span<const double> row, const ScalarResponse& approx,
                                bool* flipped) {
  if (row.size() != approx.size()) fail(Errc::LengthMismatch, "row/approx length mismatch");
  if (flipped) *flipped = false;
  ScalarResponse out(std::vector<double>(row.size(), 0.0), ResponseKind::Local);
  const auto mm = kernels::minmax(row);
  if (mm.max == mm.min) return out;

  std::vector<double> hat(row.size()), neg(row.size());
  const double range = mm.max - mm.min;
  kernels::scale_unit(row, mm.min, range, false, hat);
  kernels::scale_unit(row, mm.max, range, true, neg);
  const double d_hat = kernels::l2sq(hat, approx.values);
  const double d_neg = kernels::l2sq(neg, approx.values);
  if (d_hat <= d_neg) {
    out.values = std::move(hat);
  } else {
    out.values = std::move(neg);
    if (flipped) *flipped = true;
  }
  return out;
}

WeightVector rank_weights(const ResponseMatrix& oriented, const ScalarResponse& approx,
                          std::vector<double>* distances) {
  if (oriented.num_frames != static_cast<int>(approx.size()))
    fail(Errc::LengthMismatch, "matrix/approx length mismatch");
  const int n = oriented.num_points;
  std::vector<double> dist(n);
  double dmax = 0.0;
  for (int i = 0; i < n; ++i) {
    dist[i] = std::sqrt(kernels::l2sq(oriented.row(i), approx.values));
    dmax = std::max(dmax, dist[i]);
  }
  WeightVector w;
  w.weights.resize(n);
  for (int i = 0; i < n; ++i) w.weights[i] = dmax == 0.0 ? 1.0 : 1.0 - dist[i] / dmax;
  if (distances) *distances = std::move(dist);
  return w;
}

ScalarResponse final_response(const ResponseMatrix& oriented, const WeightVector& weights) {
  if (static_cast<int>(weights.size()) != oriented.num_points)
    fail(Errc::LengthMismatch, "weights/matrix size mismatch");
  ScalarResponse out(std::vector<double>(oriented.num_frames, 0.0), ResponseKind::Final);
  for (int i = 0; i < oriented.num_points; ++i)
    kernels::axpy(weights[i], oriented.row(i), out.values);
  return out;
}

ScalarResponse minmax_normalized(const ScalarResponse& r) {
  ScalarResponse out(std::vector<double>(r.size(), 0.0), r.kind);
  if (r.values.empty()) return out;
  const auto mm = kernels::minmax(r.values);
  if (mm.max == mm.min) return out;
  kernels::scale_unit(r.values, mm.min, mm.max - mm.min, false, out.values);
  return out;
}

IntensityResult estimate_intensity(const Sequence& seq, const ResponseConfig& config) {
  const Sequence centered = center_sequence(seq, config.reference_point);
  const ResponseMatrix matrix = response_matrix(centered);
  const int T = matrix.num_frames;
  const int N = matrix.num_points;

  IntensityResult res;
  bool uniform_weights = false;

  if (config.external_approx) {
    if (static_cast<int>(config.external_approx->size()) != T)
      fail(Errc::LengthMismatch, "external approximated response length != num_frames");
    res.approx = *config.external_approx;
    res.approx.kind = ResponseKind::Approximated;
  } else {
    const ScalarResponse r_delta = derivative_response(matrix, config.kernel, config.sigma,
                                                       config.median_excludes_degenerate);
    const PeakOptions stage1{config.peak_sigma, config.peak_window};
    std::vector<int> cands = find_transition_candidates(r_delta.values, config.min_separation,
                                                        config.min_prominence, stage1);
    if (cands.empty()) {
      if (!config.fallback_enabled)
        fail(Errc::NoTransition, "no qualifying derivative maxima in sequence " + seq.id);
      res.approx = one_sided_box(TransitionMode::RiseOnly, 0, T);
      res.low_confidence = true;
      uniform_weights = true;
    } else {
      TransitionEstimate tr = estimate_from_candidates(
          cands, cands.size() == 1 ? std::optional<bool>(sequence_starts_low(matrix, cands[0]))
                                   : std::nullopt);
      // Re-detect on the strongest rows only: ranking against the first-pass
      // course isolates the landmarks that actually carry the motion, and
      // their merged derivative localizes the transitions far more sharply.
      const PeakOptions stage2{config.refine_peak_sigma, config.refine_peak_window};
      for (int pass = 0; pass < config.refine_passes; ++pass) {
        const ScalarResponse box = box_for(tr, T);
        const WeightVector w = rank_weights(orient_matrix(matrix, box, nullptr), box);
        std::vector<int> order(N);
        for (int i = 0; i < N; ++i) order[i] = i;
        std::stable_sort(order.begin(), order.end(),
                         [&](int a, int b) { return w[a] > w[b]; });
        const int keep = std::min(N, std::max(3, static_cast<int>(std::ceil(
                                                     N * config.refine_fraction))));
        std::vector<int> top;
        for (int i = 0; i < keep; ++i)
          if (!matrix.degenerate[order[i]]) top.push_back(order[i]);
        if (top.empty()) break;
        const ResponseMatrix sub = submatrix(matrix, top);
        const ScalarResponse rd2 = derivative_response(sub, config.kernel, config.sigma,
                                                       config.median_excludes_degenerate);
        const std::vector<int> cands2 = find_transition_candidates(
            rd2.values, config.min_separation, config.refine_min_prominence, stage2);
        if (cands2.empty()) break;
        const TransitionEstimate tr2 = estimate_from_candidates(
            cands2, cands2.size() == 1
                        ? std::optional<bool>(sequence_starts_low(matrix, cands2[0]))
                        : std::nullopt);
        if (tr2 == tr) break;
        tr = tr2;
      }
      res.approx = box_for(tr, T);
      res.transitions = tr;
    }
  }

  res.oriented = orient_matrix(matrix, res.approx, &res.flipped);
  res.weights = rank_weights(res.oriented, res.approx, &res.distances);
  if (uniform_weights) res.weights.weights.assign(N, 1.0);
  res.final = final_response(res.oriented, res.weights);
  res.final_norm = minmax_normalized(res.final);
  return res;
}

}  // namespace fir
