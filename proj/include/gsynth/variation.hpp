#pragma once

#include <array>
#include <string>
#include <cstdint>
#include <string_view>

#include "gsynth/common.hpp"
#include "gsynth/ranges.hpp"

namespace gsynth {

/// Counter-based generator. Output i is splitmix64_mix(seed + (i + 1) * 0x9E3779B97F4A7C15),
/// so the stream is a pure function of (seed, counter) on every platform.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t next_u64();
  /// Uniform in [0, 1) with 53 random bits.
  double uniform01();
  /// Uniform in [lo, hi]; returns lo exactly when lo == hi.
  double uniform(double lo, double hi);
  double uniform(const ParamRange& r) { return uniform(r.lo, r.hi); }

  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t seed_;
  std::uint64_t counter_ = 0;
};

/// splitmix64 finalizer.
std::uint64_t mix64(std::uint64_t z);

/// 64-bit FNV-1a over raw bytes, optionally continuing from `state`.
std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t state = 0xcbf29ce484222325ULL);

/// Seed for one recording: mix64(FNV-1a-64(le64(master_seed) | gesture_name | 0x00 |
/// le64(variant_index) | camera_id | 0x00)).
std::uint64_t derive_seed(std::uint64_t master_seed, std::string_view gesture_name,
                          std::int64_t variant_index, std::string_view camera_id);

/// One sampled draw of all variation parameters.
struct VariantParams {
  int variant_index = 0;
  std::uint64_t seed = 0;
  double speed_offset = 0.0;            // cm/s
  Vec3 position_offset = Vec3::Zero();  // cm
  std::array<double, 5> finger_spacing_offsets{};   // deg, thumb..pinky
  std::array<double, 5> finger_rotation_offsets{};  // deg
  Vec3 hand_orientation_offset = Vec3::Zero();      // deg
  double chromaticity_coeff = 1.0;
  double depth_min = 20.0;  // cm
  double depth_max = 150.0; // cm

  friend bool operator==(const VariantParams&, const VariantParams&) = default;
};

/// Draws every field uniformly from its condition-scaled range. Draw order is
/// fixed: speed, position x/y/z, finger spacing x5, finger rotation x5, hand
/// orientation x3, chromaticity, depth_min, depth_max. Every draw is consumed
/// regardless of the range, so changing one parameter's condition leaves all
/// other fields bit-identical for the same seed.
VariantParams sample_variant(const VariationConfig& cfg, const ConditionMap& conditions,
                             std::uint64_t seed, int variant_index);

}  // namespace gsynth
