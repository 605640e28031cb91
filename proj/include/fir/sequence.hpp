#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace fir {

// One tracked landmark recording: d-dimensional coordinates for num_points
// landmarks over num_frames frames. Storage keeps each (point, axis) series
// contiguous over frames so the per-point reductions run on flat spans.
// Instances are immutable by convention once filled; every operation takes
// a const Sequence and returns a new one.
class Sequence {
 public:
  Sequence() = default;
  Sequence(int dim, int num_points, int num_frames);

  std::string id;
  std::string subject;
  std::string label;
  std::optional<int> nose_index;

  int dim() const { return dim_; }
  int num_points() const { return num_points_; }
  int num_frames() const { return num_frames_; }

  double at(int axis, int point, int frame) const {
    return data_[index(axis, point, frame)];
  }
  void set(int axis, int point, int frame, double v) { data_[index(axis, point, frame)] = v; }

  // Frame series of one coordinate axis of one point, length num_frames.
  std::span<const double> series(int point, int axis) const {
    return {data_.data() + index(axis, point, 0), static_cast<std::size_t>(num_frames_)};
  }
  std::span<double> series(int point, int axis) {
    return {data_.data() + index(axis, point, 0), static_cast<std::size_t>(num_frames_)};
  }

  // One frame flattened point-major: p0.x p0.y [p0.z] p1.x ...
  std::vector<double> frame(int t) const;

  // Throws ShapeError / ValueError when the invariants do not hold.
  void validate() const;

 private:
  std::size_t index(int axis, int point, int frame) const {
    return (static_cast<std::size_t>(point) * dim_ + axis) * num_frames_ + frame;
  }

  int dim_ = 0;
  int num_points_ = 0;
  int num_frames_ = 0;
  std::vector<double> data_;
};

// Translates every frame so the reference point sits exactly at the origin.
// `reference` overrides seq.nose_index; MissingReference when neither is set.
Sequence center_sequence(const Sequence& seq, std::optional<int> reference = std::nullopt);

}  // namespace fir
