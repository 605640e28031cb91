#include "fir/align.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "fir/errors.hpp"
#include "fir/kernels.hpp"

namespace fir {

namespace {

std::vector<double> moving_average(const std::vector<double>& v, int width) {
  if (width <= 1) return v;
  const int n = static_cast<int>(v.size());
  const int half = width / 2;
  std::vector<double> out(n);
  for (int t = 0; t < n; ++t) {
    const int a = std::max(0, t - half);
    const int b = std::min(n - 1, t + half);
    double acc = 0.0;
    for (int k = a; k <= b; ++k) acc += v[k];
    out[t] = acc / (b - a + 1);
  }
  return out;
}

std::vector<double> resample_linear(const std::vector<double>& v, int target_len) {
  const int n = static_cast<int>(v.size());
  if (target_len == n) return v;
  std::vector<double> out(target_len);
  if (target_len == 1) {
    out[0] = v[0];
    return out;
  }
  for (int j = 0; j < target_len; ++j) {
    const double u = static_cast<double>(j) * (n - 1) / (target_len - 1);
    const int lo = static_cast<int>(u);
    const int hi = std::min(lo + 1, n - 1);
    const double frac = u - lo;
    out[j] = v[lo] * (1.0 - frac) + v[hi] * frac;
  }
  return out;
}

double window_error(std::span<const double> a, std::span<const double> b) {
  return kernels::l2sq(a, b);
}

}  // namespace

void WarpPath::validate(int src_len, int tpl_len) const {
  if (pairs.empty()) fail(Errc::BadPath, "empty warp path");
  if (pairs.front() != std::pair<int, int>(0, 0)) fail(Errc::BadPath, "path must start at (0,0)");
  if (pairs.back() != std::pair<int, int>(src_len - 1, tpl_len - 1))
    fail(Errc::BadPath, "path must end at (T_src-1, T_tpl-1)");
  for (std::size_t k = 1; k < pairs.size(); ++k) {
    const int ds = pairs[k].first - pairs[k - 1].first;
    const int dt = pairs[k].second - pairs[k - 1].second;
    const bool ok = (ds == 0 || ds == 1) && (dt == 0 || dt == 1) && (ds + dt > 0);
    if (!ok) fail(Errc::BadPath, "invalid step at position " + std::to_string(k));
  }
}

ScalarResponse make_template(int total_len, int transition_len, int smoothing) {
  if (transition_len < 2 || total_len <= 2 * transition_len || smoothing < 0)
    fail(Errc::BadShapeParams, "need total_len > 2*transition_len, transition_len >= 2");
  std::vector<double> v(total_len, 1.0);
  for (int t = 0; t < transition_len; ++t) {
    const double ramp = static_cast<double>(t) / (transition_len - 1);
    v[t] = ramp;
    v[total_len - 1 - t] = ramp;
  }
  v = moving_average(v, smoothing);
  for (double& x : v) x = std::clamp(x, 0.0, 1.0);
  return {std::move(v), ResponseKind::Template};
}

ScalarResponse make_template_from_responses(const std::vector<ScalarResponse>& responses,
                                            int total_len, int smoothing) {
  if (responses.empty()) fail(Errc::EmptySet, "no responses to build a template from");
  if (total_len < 4 || smoothing < 0) fail(Errc::BadShapeParams, "bad template parameters");
  std::vector<std::vector<double>> resampled;
  resampled.reserve(responses.size());
  for (const ScalarResponse& r : responses) {
    if (r.size() < 2) fail(Errc::ShapeError, "response too short");
    resampled.push_back(resample_linear(r.values, total_len));
  }
  std::vector<double> v(total_len);
  std::vector<double> column(resampled.size());
  for (int t = 0; t < total_len; ++t) {
    for (std::size_t k = 0; k < resampled.size(); ++k) column[k] = resampled[k][t];
    std::nth_element(column.begin(), column.begin() + column.size() / 2, column.end());
    double med = column[column.size() / 2];
    if (column.size() % 2 == 0) {
      const double lo = *std::max_element(column.begin(), column.begin() + column.size() / 2);
      med = (lo + med) / 2.0;
    }
    v[t] = med;
  }
  for (int t = 0; t < total_len / 2; ++t) {
    const double m = (v[t] + v[total_len - 1 - t]) / 2.0;
    v[t] = m;
    v[total_len - 1 - t] = m;
  }
  v = moving_average(v, smoothing);
  const auto mm = kernels::minmax(v);
  if (mm.max > mm.min) {
    std::vector<double> scaled(v.size());
    kernels::scale_unit(v, mm.min, mm.max - mm.min, false, scaled);
    v = std::move(scaled);
  }
  return {std::move(v), ResponseKind::Template};
}

AlignmentResult dtw_align(const ScalarResponse& src, const ScalarResponse& tpl) {
  const int n = static_cast<int>(src.size());
  const int m = static_cast<int>(tpl.size());
  if (n < 2 || m < 2) fail(Errc::ShapeError, "dtw needs lengths >= 2");

  constexpr double kInf = std::numeric_limits<double>::infinity();
  std::vector<double> cost(static_cast<std::size_t>(n) * m, kInf);
  std::vector<std::uint8_t> step(static_cast<std::size_t>(n) * m, 0);  // 1=diag 2=src 3=tpl
  auto at = [m](int i, int j) { return static_cast<std::size_t>(i) * m + j; };

  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < m; ++j) {
      const double d = src[i] - tpl[j];
      const double local = d * d;
      if (i == 0 && j == 0) {
        cost[at(0, 0)] = local;
        continue;
      }
      double best = kInf;
      std::uint8_t how = 0;
      if (i > 0 && j > 0 && cost[at(i - 1, j - 1)] < best) {
        best = cost[at(i - 1, j - 1)];
        how = 1;
      }
      if (i > 0 && cost[at(i - 1, j)] < best) {
        best = cost[at(i - 1, j)];
        how = 2;
      }
      if (j > 0 && cost[at(i, j - 1)] < best) {
        best = cost[at(i, j - 1)];
        how = 3;
      }
      cost[at(i, j)] = best + local;
      step[at(i, j)] = how;
    }
  }

  AlignmentResult res;
  res.cost = cost[at(n - 1, m - 1)];
  int i = n - 1, j = m - 1;
  std::vector<std::pair<int, int>> rev;
  rev.emplace_back(i, j);
  while (i != 0 || j != 0) {
    switch (step[at(i, j)]) {
      case 1: --i; --j; break;
      case 2: --i; break;
      case 3: --j; break;
      default: fail(Errc::Internal, "broken dtw backtrack");
    }
    rev.emplace_back(i, j);
  }
  res.path.pairs.assign(rev.rbegin(), rev.rend());

  std::vector<double> sums(m, 0.0);
  std::vector<int> counts(m, 0);
  for (const auto& [si, tj] : res.path.pairs) {
    sums[tj] += src[si];
    counts[tj] += 1;
  }
  std::vector<double> warped(m);
  for (int u = 0; u < m; ++u) warped[u] = sums[u] / counts[u];
  res.warped = {std::move(warped), ResponseKind::Aligned};
  return res;
}

AlignmentResult select_transition(AlignmentResult res, const ScalarResponse& tpl, int window) {
  const int m = static_cast<int>(tpl.size());
  if (static_cast<int>(res.warped.size()) != m)
    fail(Errc::LengthMismatch, "warped/template length mismatch");
  if (window < 1 || window > m) fail(Errc::BadBounds, "window out of range");

  const std::span<const double> w(res.warped.values);
  const std::span<const double> t(tpl.values);
  res.window = window;
  res.window_error_first = window_error(w.first(window), t.first(window));
  res.window_error_second = window_error(w.last(window), t.last(window));
  res.chosen_transition = res.window_error_second < res.window_error_first
                              ? TransitionChoice::SecondFlipped
                              : TransitionChoice::First;
  return res;
}

std::vector<double> selected_window(const AlignmentResult& res, int window) {
  const int m = static_cast<int>(res.warped.size());
  if (window < 1 || window > m) fail(Errc::BadBounds, "window out of range");
  std::vector<double> out(static_cast<std::size_t>(window));
  if (res.chosen_transition == TransitionChoice::First) {
    std::copy_n(res.warped.values.begin(), window, out.begin());
  } else {
    std::copy_n(res.warped.values.rbegin(), window, out.begin());
  }
  return out;
}

Sequence warp_sequence(const Sequence& seq, const WarpPath& path, int target_len) {
  const int tpl_len = path.pairs.empty() ? 0 : path.pairs.back().second + 1;
  path.validate(seq.num_frames(), tpl_len);
  if (target_len < 2) fail(Errc::BadPath, "target_len must be >= 2");

  const int d = seq.dim();
  const int N = seq.num_points();
  // mean of matched source frames per template frame
  std::vector<double> acc(static_cast<std::size_t>(tpl_len) * N * d, 0.0);
  std::vector<int> counts(tpl_len, 0);
  for (const auto& [si, tj] : path.pairs) {
    counts[tj] += 1;
    for (int p = 0; p < N; ++p)
      for (int c = 0; c < d; ++c)
        acc[(static_cast<std::size_t>(tj) * N + p) * d + c] += seq.at(c, p, si);
  }
  for (int u = 0; u < tpl_len; ++u)
    for (int k = 0; k < N * d; ++k)
      acc[static_cast<std::size_t>(u) * N * d + k] /= counts[u];

  Sequence out(d, N, target_len);
  out.id = seq.id;
  out.subject = seq.subject;
  out.label = seq.label;
  out.nose_index = seq.nose_index;
  for (int j = 0; j < target_len; ++j) {
    double u = static_cast<double>(j) * (tpl_len - 1) / (target_len - 1);
    const int lo = static_cast<int>(u);
    const int hi = std::min(lo + 1, tpl_len - 1);
    const double frac = u - lo;
    for (int p = 0; p < N; ++p)
      for (int c = 0; c < d; ++c) {
        const double a = acc[(static_cast<std::size_t>(lo) * N + p) * d + c];
        const double b = acc[(static_cast<std::size_t>(hi) * N + p) * d + c];
        out.set(c, p, j, a * (1.0 - frac) + b * frac);
      }
  }
  return out;
}

double alignment_mse(const std::vector<ScalarResponse>& aligned, const ScalarResponse& tpl,
                     int window) {
  if (aligned.empty()) fail(Errc::EmptySet, "no aligned responses");
  if (window < 1 || window > static_cast<int>(tpl.size()))
    fail(Errc::BadBounds, "window out of range");
  const std::span<const double> t(tpl.values.data(), static_cast<std::size_t>(window));
  double acc = 0.0;
  for (const ScalarResponse& r : aligned) {
    if (static_cast<int>(r.size()) < window)
      fail(Errc::LengthMismatch, "aligned response shorter than window");
    acc += kernels::l2sq(std::span<const double>(r.values.data(), t.size()), t);
  }
  return acc / static_cast<double>(aligned.size());
}

}  // namespace fir
