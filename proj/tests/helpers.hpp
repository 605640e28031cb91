#pragma once

#include <string>
#include <vector>

#include "fir/sequence.hpp"
#include "fir/types.hpp"
#include "oracles.hpp"

namespace testutil {

// points[p][t] is a d-vector
inline fir::Sequence make_sequence(const std::vector<std::vector<std::vector<double>>>& points,
                                   int nose = -1) {
  const int n = static_cast<int>(points.size());
  const int t = static_cast<int>(points[0].size());
  const int d = static_cast<int>(points[0][0].size());
  fir::Sequence seq(d, n, t);
  seq.id = "test";
  if (nose >= 0) seq.nose_index = nose;
  for (int p = 0; p < n; ++p)
    for (int f = 0; f < t; ++f)
      for (int c = 0; c < d; ++c) seq.set(c, p, f, points[p][f][c]);
  return seq;
}

inline fir::Sequence random_sequence(oracle::Rng& rng, int d, int n, int t) {
  fir::Sequence seq(d, n, t);
  seq.id = "rand";
  seq.nose_index = 0;
  for (int p = 0; p < n; ++p)
    for (int f = 0; f < t; ++f)
      for (int c = 0; c < d; ++c) seq.set(c, p, f, rng.uniform(-50.0, 50.0));
  return seq;
}

inline fir::ScalarResponse make_response(std::vector<double> v,
                                         fir::ResponseKind k = fir::ResponseKind::Local) {
  return fir::ScalarResponse(std::move(v), k);
}

inline bool close(double a, double b, double tol) { return std::abs(a - b) <= tol; }

inline bool close_rel(double a, double b, double tol) {
  return std::abs(a - b) <= tol * std::max({1.0, std::abs(a), std::abs(b)});
}

inline double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
  return m;
}

inline fir::Sequence reverse_time(const fir::Sequence& seq) {
  fir::Sequence out(seq.dim(), seq.num_points(), seq.num_frames());
  out.id = seq.id;
  out.nose_index = seq.nose_index;
  const int t = seq.num_frames();
  for (int p = 0; p < seq.num_points(); ++p)
    for (int f = 0; f < t; ++f)
      for (int c = 0; c < seq.dim(); ++c) out.set(c, p, f, seq.at(c, p, t - 1 - f));
  return out;
}

std::string temp_dir(const std::string& tag);

}  // namespace testutil
