#include "fir/metrics.hpp"

#include <cmath>

#include "fir/errors.hpp"
#include "fir/kernels.hpp"

namespace fir {

ScalarResponse pseudo_ground_truth_triangle(int apex, int num_frames, double peak_value) {
  if (apex < 0 || apex > num_frames - 1) fail(Errc::BadApex, "apex frame out of range");
  if (!(peak_value > 0.0)) fail(Errc::BadApex, "peak_value must be positive");
  ScalarResponse out(std::vector<double>(num_frames, 0.0), ResponseKind::Approximated);
  for (int t = 0; t < num_frames; ++t) {
    if (t <= apex)
      out.values[t] = apex == 0 ? peak_value : peak_value * t / apex;
    else
      out.values[t] = peak_value * (num_frames - 1 - t) / (num_frames - 1 - apex);
  }
  return out;
}

int apex_frame(const TransitionEstimate& tr) {
  if (tr.mode != TransitionMode::TwoSided || !tr.t1 || !tr.t2)
    fail(Errc::OneSided, "apex undefined for one-sided transitions");
  return static_cast<int>(std::floor((*tr.t1 + *tr.t2) / 2.0 + 0.5));
}

double mae(const ScalarResponse& pred, const ScalarResponse& truth) {
  if (pred.size() != truth.size()) fail(Errc::LengthMismatch, "mae length mismatch");
  double acc = 0.0;
  for (std::size_t t = 0; t < pred.size(); ++t) acc += std::abs(pred[t] - truth[t]);
  return acc / static_cast<double>(pred.size());
}

double pcc(const ScalarResponse& pred, const ScalarResponse& truth, bool* zero_variance) {
  if (pred.size() != truth.size()) fail(Errc::LengthMismatch, "pcc length mismatch");
  const std::size_t n = pred.size();
  if (zero_variance) *zero_variance = false;
  const double mp = kernels::sum(pred.values) / n;
  const double mt = kernels::sum(truth.values) / n;
  double spp = 0.0, stt = 0.0, spt = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    const double a = pred[t] - mp;
    const double b = truth[t] - mt;
    spp += a * a;
    stt += b * b;
    spt += a * b;
  }
  if (spp == 0.0 || stt == 0.0) {
    if (zero_variance) *zero_variance = true;
    return 0.0;
  }
  return spt / std::sqrt(spp * stt);
}

double icc(const ScalarResponse& pred, const ScalarResponse& truth) {
  if (pred.size() != truth.size()) fail(Errc::LengthMismatch, "icc length mismatch");
  const std::size_t n = pred.size();
  if (n < 2) fail(Errc::DegenerateAnova, "icc needs at least 2 frames");
  constexpr double k = 2.0;

  const double mp = kernels::sum(pred.values) / n;
  const double mt = kernels::sum(truth.values) / n;
  const double grand = (mp + mt) / 2.0;

  double ss_total = 0.0, ss_rows = 0.0;
  for (std::size_t t = 0; t < n; ++t) {
    const double row_mean = (pred[t] + truth[t]) / 2.0;
    ss_rows += (row_mean - grand) * (row_mean - grand);
    ss_total += (pred[t] - grand) * (pred[t] - grand) + (truth[t] - grand) * (truth[t] - grand);
  }
  ss_rows *= k;
  const double ss_cols = n * ((mp - grand) * (mp - grand) + (mt - grand) * (mt - grand));
  const double ss_err = ss_total - ss_rows - ss_cols;

  const double bms = ss_rows / (n - 1);
  const double ems = ss_err / ((n - 1) * (k - 1));
  const double denom = bms + (k - 1.0) * ems;
  if (denom == 0.0) fail(Errc::DegenerateAnova, "zero between-target and residual variance");
  return (bms - ems) / denom;
}

EvalReport aggregate_eval(std::vector<SequenceEval> rows) {
  EvalReport report;
  report.per_sequence = std::move(rows);
  const std::size_t n = report.per_sequence.size();
  if (n == 0) return report;
  for (const SequenceEval& e : report.per_sequence) {
    report.mae += e.mae;
    report.pcc += e.pcc;
    report.icc += e.icc;
  }
  report.mae /= static_cast<double>(n);
  report.pcc /= static_cast<double>(n);
  report.icc /= static_cast<double>(n);
  return report;
}

}  // namespace fir
