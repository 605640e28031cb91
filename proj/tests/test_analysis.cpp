#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "fir/analysis.hpp"
#include "fir/errors.hpp"
#include "fir/metrics.hpp"
#include "fir/synth.hpp"
#include "helpers.hpp"
#include "oracles.hpp"

using namespace fir;

namespace {

AUEvent make_event(const std::string& id, int ne_start, int onset, int apex, int offset,
                   int ne_end) {
  AUEvent e;
  e.au_id = id;
  e.ne_start = ne_start;
  e.onset = onset;
  e.apex = apex;
  e.offset = offset;
  e.ne_end = ne_end;
  return e;
}

// blink: short small pulse on points 1,2; chin: long large course on 3..7
struct TwoAuSuite {
  Sequence seq;
  AUEvent blink;
  AUEvent chin;
  std::vector<int> blink_points{1, 2};
  std::vector<int> chin_points{3, 4, 5, 6, 7};
};

TwoAuSuite make_two_au_suite(std::uint64_t seed, double sigma) {
  synth::SynthSpec spec;
  spec.id = "two_au";
  spec.dim = 2;
  spec.num_points = 20;
  spec.num_frames = 100;
  spec.noise_sigma = sigma;
  spec.seed = seed;

  TwoAuSuite suite;
  suite.blink = make_event("AU45", 10, 14, 17, 20, 24);
  suite.chin = make_event("AU17", 30, 40, 55, 75, 90);

  synth::Rng dirs(seed ^ 0xabcdef1234567890ULL);
  for (int p : suite.blink_points) {
    synth::Mover m;
    m.point = p;
    double nx = dirs.normal(), ny = dirs.normal();
    const double norm = std::hypot(nx, ny);
    m.displacement = {6.0 * nx / norm, 6.0 * ny / norm};
    m.profile.type = synth::ProfileType::AuShaped;
    m.profile.ne_start = suite.blink.ne_start;
    m.profile.t1 = suite.blink.onset;
    m.profile.apex = suite.blink.apex;
    m.profile.t2 = suite.blink.offset;
    m.profile.ne_end = suite.blink.ne_end;
    spec.movers.push_back(std::move(m));
  }
  for (int p : suite.chin_points) {
    synth::Mover m;
    m.point = p;
    double nx = dirs.normal(), ny = dirs.normal();
    const double norm = std::hypot(nx, ny);
    m.displacement = {14.0 * nx / norm, 14.0 * ny / norm};
    m.profile.type = synth::ProfileType::AuShaped;
    m.profile.ne_start = suite.chin.ne_start;
    m.profile.t1 = suite.chin.onset;
    m.profile.apex = suite.chin.apex;
    m.profile.t2 = suite.chin.offset;
    m.profile.ne_end = suite.chin.ne_end;
    spec.movers.push_back(std::move(m));
  }
  suite.seq = synth::generate(spec).first;
  return suite;
}

std::vector<int> top_indices(const WeightVector& w, int count) {
  std::vector<int> order(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) order[i] = static_cast<int>(i);
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return w[a] > w[b]; });
  order.resize(count);
  std::sort(order.begin(), order.end());
  return order;
}

}  // namespace

TEST_CASE("au course interpolates between the temporal labels") {
  const ScalarResponse r = au_approx_response(make_event("AU1", 0, 2, 4, 6, 8), 9);
  const std::vector<double> expect = {0, 0, 0, 0.5, 1, 1, 1, 0.5, 0};
  CHECK(r.values == expect);

  // one-frame ramp
  const ScalarResponse step = au_approx_response(make_event("AU1", 0, 2, 3, 6, 8), 9);
  CHECK(step.values[2] == 0.0);
  CHECK(step.values[3] == 1.0);

  CHECK_THROWS_AS(au_approx_response(make_event("AU1", 5, 4, 6, 7, 8), 9), Error);
  CHECK_THROWS_AS(au_approx_response(make_event("AU1", 0, 2, 2, 6, 8), 9), Error);
}

TEST_CASE("au course is 1 exactly on the apex plateau and 0 outside the event") {
  oracle::Rng rng(41);
  for (int rep = 0; rep < 100; ++rep) {
    const int t_len = 30 + rng.uniform_int(0, 50);
    const int ne_start = rng.uniform_int(0, 5);
    const int onset = ne_start + rng.uniform_int(0, 4);
    const int apex = onset + 1 + rng.uniform_int(0, 5);
    const int offset = apex + rng.uniform_int(0, 6);
    const int ne_end = offset + 1 + rng.uniform_int(0, 5);
    if (ne_end > t_len - 1) continue;
    const AUEvent e = make_event("AUx", ne_start, onset, apex, offset, ne_end);
    const ScalarResponse r = au_approx_response(e, t_len);
    for (int t = 0; t < t_len; ++t) {
      if (t >= apex && t <= offset) CHECK(r.values[t] == 1.0);
      if (t <= ne_start || t >= ne_end) CHECK(r.values[t] == 0.0);
      CHECK(r.values[t] >= 0.0);
      CHECK(r.values[t] <= 1.0);
    }
  }
  // offset == ne_end collapses the fall ramp; the event still ends at zero
  const ScalarResponse edge = au_approx_response(make_event("AUy", 0, 2, 4, 8, 8), 9);
  CHECK(edge.values[8] == 0.0);
  CHECK(edge.values[7] == 1.0);
}

TEST_CASE("two overlapping events produce independent courses") {
  const AUEvent a = make_event("AU17", 0, 2, 6, 10, 14);
  const AUEvent b = make_event("AU45", 4, 5, 6, 7, 8);
  const ScalarResponse ra = au_approx_response(a, 20);
  const ScalarResponse rb = au_approx_response(b, 20);
  CHECK(ra.values != rb.values);
  CHECK(ra.values == au_approx_response(a, 20).values);  // b never affected a
}

TEST_CASE("weight thresholding zeroes the smallest quartile complement") {
  WeightVector w;
  oracle::Rng rng(6);
  for (int i = 0; i < 68; ++i) w.weights.push_back(rng.uniform(0.0, 1.0));
  const WeightVector kept = threshold_weights(w, 0.25);
  int nonzero = 0;
  for (double v : kept.weights) nonzero += v > 0.0;
  CHECK(nonzero == 17);

  const WeightVector all = threshold_weights(w, 1.0);
  CHECK(all.weights == w.weights);

  WeightVector equal;
  equal.weights.assign(68, 0.5);
  const WeightVector tied = threshold_weights(equal, 0.25);
  for (int i = 0; i < 51; ++i) CHECK(tied.weights[i] == 0.0);
  for (int i = 51; i < 68; ++i) CHECK(tied.weights[i] == 0.5);
}

TEST_CASE("thresholding preserves surviving weights and their order") {
  oracle::Rng rng(7);
  for (int rep = 0; rep < 300; ++rep) {
    const int n = 2 + rep % 40;
    WeightVector w;
    for (int i = 0; i < n; ++i) w.weights.push_back(rng.uniform(0.0, 1.0));
    const double keep = rng.uniform(0.05, 1.0);
    const WeightVector out = threshold_weights(w, keep);
    REQUIRE(out.size() == w.size());
    int zeroed = 0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      CHECK(out[i] <= w[i]);
      if (out[i] == 0.0 && w[i] > 0.0) ++zeroed;
      if (out[i] != 0.0) CHECK(out[i] == w[i]);
    }
    CHECK(zeroed <= static_cast<int>(std::floor((1.0 - keep) * n)));
    // surviving weights dominate every zeroed weight
    double max_zeroed = -1.0, min_kept = 2.0;
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (out[i] == 0.0)
        max_zeroed = std::max(max_zeroed, w[i]);
      else
        min_kept = std::min(min_kept, out[i]);
    }
    if (max_zeroed >= 0.0 && min_kept <= 1.0) CHECK(min_kept >= max_zeroed);
  }
}

TEST_CASE("per-AU responses disentangle simultaneous activations") {
  int both_ok = 0;
  for (std::uint64_t seed = 40; seed < 60; ++seed) {
    const TwoAuSuite suite = make_two_au_suite(seed, 0.5);
    const ResponseConfig cfg;

    const AuIntensityResult blink = au_intensity(suite.seq, suite.blink, cfg, 0.25);
    const AuIntensityResult chin = au_intensity(suite.seq, suite.chin, cfg, 0.25);

    const double blink_pcc = pcc(blink.final_thresholded_norm, blink.base.approx);
    const double chin_pcc = pcc(chin.final_thresholded_norm, chin.base.approx);
    const bool blink_points_ok =
        top_indices(blink.base.weights, 2) == suite.blink_points;
    const bool chin_points_ok = top_indices(chin.base.weights, 5) == suite.chin_points;
    if (blink_pcc >= 0.9 && chin_pcc >= 0.9 && blink_points_ok && chin_points_ok) ++both_ok;
  }
  CHECK(both_ok >= 19);
}

TEST_CASE("whole-sequence event on a clean trapezoid leaves only shape mismatch") {
  synth::SynthSpec spec = synth::default_suite_spec(5);
  spec.noise_sigma = 0.0;
  const auto [seq, truth] = synth::generate(spec);
  // ramps of the event bracket the true smooth transitions
  const AUEvent ev = make_event("AUfull", 0, 15, 25, 55, 65);
  const AuIntensityResult r = au_intensity(seq, ev, ResponseConfig{}, 0.25);
  CHECK(r.mse_thresholded < 0.5);
  CHECK(r.mse_full < 0.5);
}

TEST_CASE("deleting the other AU's landmarks does not change a noiseless AU response") {
  const TwoAuSuite suite = make_two_au_suite(11, 0.0);
  const ResponseConfig cfg;
  const AuIntensityResult blink_full = au_intensity(suite.seq, suite.blink, cfg, 0.25);

  // rebuild the sequence without the chin landmarks
  const int keep_n = suite.seq.num_points() - static_cast<int>(suite.chin_points.size());
  Sequence reduced(suite.seq.dim(), keep_n, suite.seq.num_frames());
  reduced.id = "reduced";
  reduced.nose_index = 0;
  int dst = 0;
  for (int p = 0; p < suite.seq.num_points(); ++p) {
    if (std::find(suite.chin_points.begin(), suite.chin_points.end(), p) !=
        suite.chin_points.end())
      continue;
    for (int t = 0; t < suite.seq.num_frames(); ++t)
      for (int c = 0; c < suite.seq.dim(); ++c) reduced.set(c, dst, t, suite.seq.at(c, p, t));
    ++dst;
  }
  const AuIntensityResult blink_reduced = au_intensity(reduced, suite.blink, cfg, 0.25);
  CHECK(testutil::max_abs_diff(blink_full.base.final_norm.values,
                               blink_reduced.base.final_norm.values) < 1e-6);
}

TEST_CASE("trivial clusterings") {
  std::vector<std::vector<double>> rows = {{0.0, 0.0}, {5.0, 5.0}, {9.0, 0.0}};
  const ClusterResult each = ward_cluster(rows, 3);
  CHECK(each.labels == std::vector<int>{0, 1, 2});

  std::vector<std::vector<double>> two_groups = {{0.0, 0.0}, {10.0, 10.0}, {0.0, 0.0},
                                                 {10.0, 10.0}, {0.0, 0.0}};
  const ClusterResult split = ward_cluster(two_groups, 2);
  CHECK(split.labels == std::vector<int>{0, 1, 0, 1, 0});
  CHECK(split.mean_weights[0] == std::vector<double>{0.0, 0.0});
  CHECK(split.mean_weights[1] == std::vector<double>{10.0, 10.0});

  CHECK_THROWS_AS(ward_cluster(rows, 0), Error);
  CHECK_THROWS_AS(ward_cluster(rows, 4), Error);
}

TEST_CASE("merge trees match the brute-force agglomeration") {
  oracle::Rng rng(12);
  for (int rep = 0; rep < 40; ++rep) {
    const int s = 2 + rep % 7;
    const int n = 2 + rep % 4;
    std::vector<std::vector<double>> rows(s, std::vector<double>(n));
    for (auto& r : rows)
      for (double& v : r) v = rng.uniform(-2.0, 2.0);
    const ClusterResult got = ward_cluster(rows, 1);
    const std::vector<oracle::WardMerge> expect = oracle::ward_bruteforce(rows);
    REQUIRE(got.merge_tree.size() == expect.size());
    for (std::size_t k = 0; k < expect.size(); ++k) {
      CHECK(got.merge_tree[k].node_a == expect[k].node_a);
      CHECK(got.merge_tree[k].node_b == expect[k].node_b);
      CHECK(testutil::close_rel(got.merge_tree[k].height, expect[k].height, 1e-9));
    }
  }
}

TEST_CASE("ward heights never decrease") {
  oracle::Rng rng(13);
  for (int rep = 0; rep < 100; ++rep) {
    const int s = 3 + rep % 20;
    std::vector<std::vector<double>> rows(s, std::vector<double>(4));
    for (auto& r : rows)
      for (double& v : r) v = rng.uniform(0.0, 1.0);
    const ClusterResult cr = ward_cluster(rows, 1);
    for (std::size_t k = 1; k < cr.merge_tree.size(); ++k)
      CHECK(cr.merge_tree[k].height >= cr.merge_tree[k - 1].height - 1e-9);
  }
}

TEST_CASE("clustering separates three tight gaussians") {
  oracle::Rng rng(14);
  int good = 0;
  for (int rep = 0; rep < 20; ++rep) {
    const int per = 20;
    std::vector<std::vector<double>> rows;
    std::vector<int> truth;
    const double centers[3][2] = {{0.0, 0.0}, {0.6, 0.0}, {0.0, 0.6}};
    for (int c = 0; c < 3; ++c)
      for (int i = 0; i < per; ++i) {
        rows.push_back({centers[c][0] + 0.02 * rng.normal(),
                        centers[c][1] + 0.02 * rng.normal()});
        truth.push_back(c);
      }
    const ClusterResult cr = ward_cluster(rows, 3);
    if (oracle::adjusted_rand_index(cr.labels, truth) >= 0.95) ++good;
  }
  CHECK(good == 20);
}

TEST_CASE("row permutation only renames cluster labels") {
  oracle::Rng rng(15);
  std::vector<std::vector<double>> rows;
  for (int i = 0; i < 12; ++i)
    rows.push_back({rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0), rng.uniform(0.0, 1.0)});
  const ClusterResult base = ward_cluster(rows, 3);

  std::vector<int> perm(12);
  for (int i = 0; i < 12; ++i) perm[i] = i;
  for (int i = 11; i > 0; --i) std::swap(perm[i], perm[rng.uniform_int(0, i)]);
  std::vector<std::vector<double>> shuffled(12);
  for (int i = 0; i < 12; ++i) shuffled[i] = rows[perm[i]];
  const ClusterResult moved = ward_cluster(shuffled, 3);

  std::vector<int> moved_on_original(12);
  for (int i = 0; i < 12; ++i) moved_on_original[perm[i]] = moved.labels[i];
  CHECK(oracle::adjusted_rand_index(base.labels, moved_on_original) == 1.0);
}

TEST_CASE("mean shapes average the member apex shapes") {
  std::vector<std::vector<double>> rows = {{0.0}, {0.1}, {10.0}, {10.1}};
  std::vector<std::vector<double>> shapes = {{1.0, 2.0}, {3.0, 4.0}, {10.0, 20.0}, {30.0, 40.0}};
  const ClusterResult cr = ward_cluster(rows, 2, &shapes);
  CHECK(cr.labels == std::vector<int>{0, 0, 1, 1});
  CHECK(cr.mean_shapes[0] == std::vector<double>{2.0, 3.0});
  CHECK(cr.mean_shapes[1] == std::vector<double>{20.0, 30.0});
}
