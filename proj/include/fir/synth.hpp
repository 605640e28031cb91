#pragma once

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "fir/sequence.hpp"
#include "fir/types.hpp"

namespace fir::synth {

// Deterministic random source with a fully pinned algorithm so emitted files
// are reproducible across platforms: std::mt19937_64 (bit-exact per the
// standard) with uniform doubles taken as (x >> 11) * 2^-53 and normals from
// the Box-Muller transform (pairs cached).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  double uniform();  // [0, 1)
  double uniform(double lo, double hi);
  double normal();
  // integer in [lo, hi] via floor(uniform() * span); span must be small
  // against 2^53 which always holds here
  int uniform_int(int lo, int hi);

 private:
  std::mt19937_64 gen_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

enum class ProfileType { Trapezoid, Rise, Fall, Box, AuShaped };

// Intensity course of a moving point. Trapezoid/Rise/Fall use smoothstep
// ramps of width `ramp` centered on the transition frames, so the derivative
// peaks exactly at t1/t2. Box has hard 0/1 edges. AuShaped is the linear
// neutral-onset-apex-offset-neutral course.
struct Profile {
  ProfileType type = ProfileType::Trapezoid;
  int t1 = 0;    // rise center (Trapezoid, Rise, Box) or onset (AuShaped)
  int t2 = 0;    // fall center (Trapezoid, Fall, Box) or offset (AuShaped)
  int ramp = 10;
  int apex = 0;     // AuShaped only
  int ne_start = 0; // AuShaped only
  int ne_end = 0;   // AuShaped only

  std::vector<double> sample(int num_frames) const;
};

struct Mover {
  int point = 0;
  std::vector<double> displacement;  // length d, magnitude > 0
  Profile profile;
};

enum class OutlierMode { JumpEveryFrame, BurstFrames };

struct Outlier {
  int point = 0;
  OutlierMode mode = OutlierMode::JumpEveryFrame;
  int burst_begin = 0;  // BurstFrames: inclusive frame range
  int burst_end = 0;
  double magnitude = 0.0;
};

struct SynthSpec {
  std::string id = "synth";
  int dim = 3;
  int num_points = 20;
  int num_frames = 100;
  int nose_index = 0;
  double noise_sigma = 0.0;
  double base_extent = 100.0;  // base positions drawn uniformly from [0, extent]^d
  // The reference landmark is emitted without tracking noise by default so
  // per-frame centering does not fold a second noise source into every
  // other point.
  bool reference_noise_free = true;
  std::vector<Mover> movers;
  std::vector<Outlier> outliers;
  std::uint64_t seed = 0;
};

struct GroundTruth {
  ScalarResponse intensity;  // generating profile of the first mover
  std::optional<int> t1;
  std::optional<int> t2;
  std::vector<int> moving_set;
  std::vector<int> static_set;
  std::vector<int> outlier_set;
};

std::pair<Sequence, GroundTruth> generate(const SynthSpec& spec);

// Applies corruptions to an existing sequence; every untouched (point,
// frame) cell is preserved bit-exactly.
Sequence corrupt(const Sequence& seq, const std::vector<Outlier>& outliers, std::uint64_t seed);

// The standard benchmark recipe: N=20, 5 movers of magnitude 10 in random
// directions, trapezoid course (t1=20, t2=60, ramp 10), noise sigma 2,
// T=100. Mover choice and directions derive from the seed.
SynthSpec default_suite_spec(std::uint64_t seed);

// One-transition variants of the suite (transition centered at frame 50).
SynthSpec rise_only_suite_spec(std::uint64_t seed);
SynthSpec fall_only_suite_spec(std::uint64_t seed);

// Suite where every non-reference landmark follows the expression with a
// seed-dependent magnitude in [5, 15]; used to probe how corrupted points
// rank against genuinely tracked ones.
SynthSpec tracked_face_spec(std::uint64_t seed);

std::string spec_to_json(const SynthSpec& spec);
SynthSpec spec_from_json_file(const std::string& path);

}  // namespace fir::synth
