#include "gsynth/variation.hpp"

#include <algorithm>

namespace gsynth {

namespace {
constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ULL;

void append_le64(std::string& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}
}  // namespace

std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t fnv1a64(std::string_view bytes, std::uint64_t state) {
  for (unsigned char c : bytes) {
    state ^= c;
    state *= 0x100000001B3ULL;
  }
  return state;
}

std::uint64_t CounterRng::next_u64() {
  ++counter_;
  return mix64(seed_ + counter_ * kGamma);
}

double CounterRng::uniform01() {
  return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double CounterRng::uniform(double lo, double hi) {
  const double u = uniform01();
  return std::min(lo + (hi - lo) * u, hi);
}

std::uint64_t derive_seed(std::uint64_t master_seed, std::string_view gesture_name,
                          std::int64_t variant_index, std::string_view camera_id) {
  std::string buf;
  buf.reserve(18 + gesture_name.size() + camera_id.size());
  append_le64(buf, master_seed);
  buf.append(gesture_name);
  buf.push_back('\0');
  append_le64(buf, static_cast<std::uint64_t>(variant_index));
  buf.append(camera_id);
  buf.push_back('\0');
  return mix64(fnv1a64(buf));
}

VariantParams sample_variant(const VariationConfig& cfg, const ConditionMap& conditions,
                             std::uint64_t seed, int variant_index) {
  const VariationConfig r = cfg.scaled(conditions);
  CounterRng rng(seed);
  VariantParams v;
  v.variant_index = variant_index;
  v.seed = seed;
  v.speed_offset = rng.uniform(r.speed_offset);
  for (int i = 0; i < 3; ++i) v.position_offset[i] = rng.uniform(r.position_offset[i]);
  for (auto& a : v.finger_spacing_offsets) a = rng.uniform(r.finger_spacing);
  for (auto& a : v.finger_rotation_offsets) a = rng.uniform(r.finger_rotation);
  for (int i = 0; i < 3; ++i) v.hand_orientation_offset[i] = rng.uniform(r.hand_orientation);
  v.chromaticity_coeff = rng.uniform(r.chromaticity_coeff);
  v.depth_min = rng.uniform(r.depth_min);
  v.depth_max = rng.uniform(r.depth_max);
  return v;
}

}  // namespace gsynth
