#include "fir/sequence.hpp"

#include <cmath>
#include <string>

#include "fir/errors.hpp"

namespace fir {

Sequence::Sequence(int dim, int num_points, int num_frames)
    : dim_(dim), num_points_(num_points), num_frames_(num_frames) {
  if (dim < 2 || dim > 3) fail(Errc::ShapeError, "dim must be 2 or 3, got " + std::to_string(dim));
  if (num_points < 1) fail(Errc::ShapeError, "num_points must be >= 1");
  if (num_frames < 2) fail(Errc::ShapeError, "num_frames must be >= 2");
  data_.assign(static_cast<std::size_t>(dim) * num_points * num_frames, 0.0);
}

std::vector<double> Sequence::frame(int t) const {
  std::vector<double> out(static_cast<std::size_t>(dim_) * num_points_);
  for (int p = 0; p < num_points_; ++p)
    for (int c = 0; c < dim_; ++c) out[static_cast<std::size_t>(p) * dim_ + c] = at(c, p, t);
  return out;
}

void Sequence::validate() const {
  if (data_.size() != static_cast<std::size_t>(dim_) * num_points_ * num_frames_)
    fail(Errc::ShapeError, "tensor size does not match dim*num_points*num_frames");
  for (double v : data_)
    if (!std::isfinite(v)) fail(Errc::ValueError, "non-finite coordinate in sequence " + id);
  if (nose_index && (*nose_index < 0 || *nose_index >= num_points_))
    fail(Errc::ShapeError, "nose_index out of range in sequence " + id);
}

Sequence center_sequence(const Sequence& seq, std::optional<int> reference) {
  const std::optional<int> ref = reference ? reference : seq.nose_index;
  if (!ref) fail(Errc::MissingReference, "no nose_index and no reference point supplied");
  if (*ref < 0 || *ref >= seq.num_points())
    fail(Errc::BadIndex, "reference point " + std::to_string(*ref) + " out of range");

  Sequence out = seq;
  const int T = seq.num_frames();
  for (int c = 0; c < seq.dim(); ++c) {
    std::span<const double> refs = seq.series(*ref, c);
    for (int p = 0; p < seq.num_points(); ++p) {
      std::span<double> s = out.series(p, c);
      for (int t = 0; t < T; ++t) s[t] -= refs[t];
    }
  }
  return out;
}

}  // namespace fir
