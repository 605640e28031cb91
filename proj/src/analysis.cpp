#include "fir/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

#include "fir/errors.hpp"
#include "fir/kernels.hpp"

namespace fir {

void AUEvent::validate(int num_frames) const {
  const bool ordered = ne_start <= onset && onset < apex && apex <= offset && offset <= ne_end;
  if (!ordered || ne_start < 0 || ne_end > num_frames - 1)
    fail(Errc::BadEvent, "bad AU event bounds for " + au_id);
}

ScalarResponse au_approx_response(const AUEvent& ev, int num_frames) {
  ev.validate(num_frames);
  ScalarResponse out(std::vector<double>(num_frames, 0.0), ResponseKind::Approximated);
  for (int t = 0; t < num_frames; ++t) {
    double v = 0.0;
    if (t <= ev.onset || t >= ev.ne_end) {  // ne_start <= onset, so this covers both flats
      v = 0.0;
    } else if (t < ev.apex) {
      v = static_cast<double>(t - ev.onset) / (ev.apex - ev.onset);
    } else if (t <= ev.offset) {
      v = 1.0;
    } else {
      v = static_cast<double>(ev.ne_end - t) / (ev.ne_end - ev.offset);
    }
    out.values[t] = v;
  }
  return out;
}

WeightVector threshold_weights(const WeightVector& w, double keep_fraction) {
  if (!(keep_fraction > 0.0 && keep_fraction <= 1.0))
    fail(Errc::BadBounds, "keep_fraction must be in (0,1]");
  const int n = static_cast<int>(w.size());
  const int zero_count = static_cast<int>(std::floor((1.0 - keep_fraction) * n));
  WeightVector out = w;
  if (zero_count <= 0) return out;

  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    if (w[a] != w[b]) return w[a] < w[b];
    return a < b;
  });
  for (int i = 0; i < zero_count; ++i) out.weights[order[i]] = 0.0;
  return out;
}

AuIntensityResult au_intensity(const Sequence& seq, const AUEvent& ev,
                               const ResponseConfig& config, double keep_fraction) {
  AuIntensityResult res;
  ResponseConfig cfg = config;
  cfg.external_approx = au_approx_response(ev, seq.num_frames());
  res.base = estimate_intensity(seq, cfg);
  res.thresholded_weights = threshold_weights(res.base.weights, keep_fraction);
  res.final_thresholded = final_response(res.base.oriented, res.thresholded_weights);
  res.final_thresholded_norm = minmax_normalized(res.final_thresholded);
  res.mse_full = kernels::l2sq(res.base.final_norm.values, res.base.approx.values);
  res.mse_thresholded =
      kernels::l2sq(res.final_thresholded_norm.values, res.base.approx.values);
  return res;
}

namespace {

struct Cluster {
  int node = 0;  // dendrogram node id
  int size = 0;
  std::vector<int> members;
};

}  // namespace

ClusterResult ward_cluster(const std::vector<std::vector<double>>& rows, int k,
                           const std::vector<std::vector<double>>* apex_shapes) {
  const int s = static_cast<int>(rows.size());
  if (k < 1 || k > s) fail(Errc::BadK, "need 1 <= k <= number of rows");
  const std::size_t n = rows.empty() ? 0 : rows[0].size();
  for (const auto& r : rows) {
    if (r.size() != n) fail(Errc::ShapeError, "ragged weight rows");
    for (double v : r)
      if (!std::isfinite(v)) fail(Errc::ValueError, "non-finite weight row entry");
  }
  if (apex_shapes && static_cast<int>(apex_shapes->size()) != s)
    fail(Errc::ShapeError, "apex shape count != row count");

  ClusterResult result;
  result.k = k;
  result.labels.assign(s, 0);

  std::vector<Cluster> active(s);
  for (int i = 0; i < s; ++i) active[i] = {i, 1, {i}};

  // Ward merge cost between active clusters, updated by Lance-Williams.
  std::vector<std::vector<double>> dist(s, std::vector<double>(s, 0.0));
  for (int i = 0; i < s; ++i)
    for (int j = i + 1; j < s; ++j) {
      const double d = 0.5 * kernels::l2sq(rows[i], rows[j]);
      dist[i][j] = d;
      dist[j][i] = d;
    }

  double prev_height = -std::numeric_limits<double>::infinity();
  const int merges = s - 1;
  for (int step = 0; step < merges; ++step) {
    const int m = static_cast<int>(active.size());
    int bi = -1, bj = -1;
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m; ++i)
      for (int j = i + 1; j < m; ++j)
        if (dist[i][j] < best) {
          best = dist[i][j];
          bi = i;
          bj = j;
        }

    if (best < prev_height - 1e-9 * std::max(1.0, std::abs(prev_height)))
      fail(Errc::Internal, "ward merge heights decreased");
    prev_height = std::max(prev_height, best);

    MergeStep ms;
    ms.node_a = std::min(active[bi].node, active[bj].node);
    ms.node_b = std::max(active[bi].node, active[bj].node);
    ms.height = best;
    ms.size = active[bi].size + active[bj].size;
    result.merge_tree.push_back(ms);

    // Lance-Williams for Ward on merge costs
    const double a = active[bi].size, b = active[bj].size;
    for (int c = 0; c < m; ++c) {
      if (c == bi || c == bj) continue;
      const double cc = active[c].size;
      dist[bi][c] = dist[c][bi] =
          ((a + cc) * dist[bi][c] + (b + cc) * dist[bj][c] - cc * dist[bi][bj]) / (a + b + cc);
    }
    active[bi].node = s + step;
    active[bi].size += active[bj].size;
    active[bi].members.insert(active[bi].members.end(), active[bj].members.begin(),
                              active[bj].members.end());

    active.erase(active.begin() + bj);
    for (int i = 0; i < m; ++i) dist[i].erase(dist[i].begin() + bj);
    dist.erase(dist.begin() + bj);

    if (static_cast<int>(active.size()) == k) {
      // canonical labels: order clusters by their smallest member index
      std::vector<int> mins;
      mins.reserve(active.size());
      for (const Cluster& c : active) mins.push_back(*std::min_element(c.members.begin(),
                                                                       c.members.end()));
      std::vector<int> order(active.size());
      std::iota(order.begin(), order.end(), 0);
      std::sort(order.begin(), order.end(), [&](int x, int y) { return mins[x] < mins[y]; });
      for (std::size_t label = 0; label < order.size(); ++label)
        for (int member : active[order[label]].members)
          result.labels[member] = static_cast<int>(label);
    }
  }
  if (k == s) std::iota(result.labels.begin(), result.labels.end(), 0);

  result.mean_weights.assign(k, std::vector<double>(n, 0.0));
  std::vector<int> counts(k, 0);
  for (int i = 0; i < s; ++i) {
    counts[result.labels[i]] += 1;
    for (std::size_t j = 0; j < n; ++j) result.mean_weights[result.labels[i]][j] += rows[i][j];
  }
  for (int c = 0; c < k; ++c)
    for (std::size_t j = 0; j < n; ++j) result.mean_weights[c][j] /= counts[c];

  if (apex_shapes) {
    const std::size_t sn = apex_shapes->empty() ? 0 : (*apex_shapes)[0].size();
    result.mean_shapes.assign(k, std::vector<double>(sn, 0.0));
    for (int i = 0; i < s; ++i) {
      if ((*apex_shapes)[i].size() != sn) fail(Errc::ShapeError, "ragged apex shapes");
      for (std::size_t j = 0; j < sn; ++j)
        result.mean_shapes[result.labels[i]][j] += (*apex_shapes)[i][j];
    }
    for (int c = 0; c < k; ++c)
      for (std::size_t j = 0; j < sn; ++j) result.mean_shapes[c][j] /= counts[c];
  }
  return result;
}

}  // namespace fir
