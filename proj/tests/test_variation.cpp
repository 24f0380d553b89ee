#include <doctest.h>

#include <cmath>

#include "gsynth/errors.hpp"
#include "gsynth/ranges.hpp"
#include "gsynth/variation.hpp"

using namespace gsynth;

TEST_SUITE("variation") {

TEST_CASE("scale_range keeps the center and rescales the width") {
  const ParamRange speed{0.0, 50.0};
  CHECK(scale_range(speed, RangeCondition::Low) == ParamRange{12.5, 37.5});
  CHECK(scale_range(speed, RangeCondition::Median) == speed);
  CHECK(scale_range(speed, RangeCondition::High) == ParamRange{-25.0, 75.0});
  const ParamRange flat{3.0, 3.0};
  CHECK(scale_range(flat, RangeCondition::High) == flat);
}

TEST_CASE("condition and parameter names parse") {
  CHECK(parse_range_condition("low") == RangeCondition::Low);
  CHECK(parse_range_condition("HIGH") == std::nullopt);
  CHECK(parse_variation_param("speed") == VariationParam::SpeedOffset);
  CHECK(parse_variation_param("position") == VariationParam::PositionOffset);
  CHECK(parse_variation_param("finger_spacing") == VariationParam::FingerSpacing);
  for (auto p : kAllVariationParams) CHECK(parse_variation_param(to_string(p)) == p);
}

TEST_CASE("fnv1a64 reference values") {
  CHECK(fnv1a64("") == 14695981039346656037ULL);
  CHECK(fnv1a64("a") == 12638187200555641996ULL);
}

TEST_CASE("derive_seed golden vectors from an independent implementation") {
  CHECK(derive_seed(0, "swipe_right", 0, "depth0") == 484810895217554690ULL);
  CHECK(derive_seed(0, "swipe_right", 1, "depth0") == 13920003982200606103ULL);
  CHECK(derive_seed(42, "peace_sign", 7, "ir1") == 638114242078489730ULL);
  CHECK(derive_seed(0, "swipe_right", 0, "depth0") == derive_seed(0, "swipe_right", 0, "depth0"));
  CHECK(derive_seed(0, "swipe_right", 0, "depth0") != derive_seed(0, "swipe_right", 0, "depth1"));
}

TEST_CASE("counter generator golden stream") {
  CounterRng rng(484810895217554690ULL);
  CHECK(rng.next_u64() == 3642909696041533826ULL);
  CHECK(rng.next_u64() == 14439585730898001795ULL);
  CHECK(rng.next_u64() == 9234714933990282497ULL);
  CHECK(rng.counter() == 3);
  CounterRng u(484810895217554690ULL);
  CHECK(u.uniform01() == 0.19748253033083696);
  CHECK(u.uniform01() == 0.7827715109615151);
  CHECK(u.uniform01() == 0.5006148996858297);
  CHECK(u.uniform(4.0, 4.0) == 4.0);
}

TEST_CASE("degenerate ranges give a constant variant") {
  VariationConfig cfg;
  cfg.speed_offset = {7.0, 7.0};
  for (auto& r : cfg.position_offset) r = {1.0, 1.0};
  cfg.finger_spacing = {2.0, 2.0};
  cfg.finger_rotation = {-3.0, -3.0};
  cfg.hand_orientation = {0.5, 0.5};
  cfg.chromaticity_coeff = {1.0, 1.0};
  cfg.depth_min = {20.0, 20.0};
  cfg.depth_max = {150.0, 150.0};
  const VariantParams a = sample_variant(cfg, {}, 1, 0);
  const VariantParams b = sample_variant(cfg, {}, 987654321, 0);
  CHECK(a.speed_offset == 7.0);
  CHECK(a.position_offset == Vec3(1, 1, 1));
  for (int f = 0; f < 5; ++f) {
    CHECK(a.finger_spacing_offsets[f] == 2.0);
    CHECK(a.finger_rotation_offsets[f] == -3.0);
  }
  CHECK(a.depth_min == 20.0);
  CHECK(a.depth_max == 150.0);
  VariantParams b2 = b;
  b2.seed = a.seed;
  CHECK(a == b2);
}

TEST_CASE("Low speed condition always lands in [12.5, 37.5]") {
  VariationConfig cfg;
  const ConditionMap low{{VariationParam::SpeedOffset, RangeCondition::Low}};
  for (int i = 0; i < 10000; ++i) {
    const VariantParams v = sample_variant(cfg, low, derive_seed(3, "swipe_right", i, "depth0"), i);
    REQUIRE(v.speed_offset >= 12.5);
    REQUIRE(v.speed_offset <= 37.5);
  }
}

TEST_CASE("Monte Carlo statistics of the median speed range") {
  VariationConfig cfg;
  double lo = 1e9, hi = -1e9, sum = 0.0, sq = 0.0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    const double s = sample_variant(cfg, {}, derive_seed(11, "swipe_up", i, "depth0"), i).speed_offset;
    lo = std::min(lo, s);
    hi = std::max(hi, s);
    sum += s;
    sq += s * s;
  }
  const double mean = sum / n;
  const double var = sq / n - mean * mean;
  CHECK(lo >= 0.0);
  CHECK(hi <= 50.0);
  // Uniform on [0,50]: mean 25, variance 50^2/12, standard error sqrt(var/n) ~ 0.144.
  CHECK(std::abs(mean - 25.0) < 3 * std::sqrt(2500.0 / 12.0 / n));
  CHECK(std::abs(var - 2500.0 / 12.0) < 0.05 * 2500.0 / 12.0);
  CHECK(lo < 0.1);
  CHECK(hi > 49.9);
}

TEST_CASE("every field stays inside its scaled range") {
  VariationConfig cfg;
  for (auto cond : {RangeCondition::Low, RangeCondition::Median, RangeCondition::High}) {
    ConditionMap cm;
    for (auto p : kAllVariationParams) {
      if (p != VariationParam::DepthMin && p != VariationParam::DepthMax) cm[p] = cond;
    }
    const VariationConfig s = cfg.scaled(cm);
    for (int i = 0; i < 10000; ++i) {
      const VariantParams v = sample_variant(cfg, cm, derive_seed(5, "x", i, "c"), i);
      REQUIRE(s.speed_offset.contains(v.speed_offset));
      for (int k = 0; k < 3; ++k) REQUIRE(s.position_offset[k].contains(v.position_offset[k]));
      for (int f = 0; f < 5; ++f) {
        REQUIRE(s.finger_spacing.contains(v.finger_spacing_offsets[f]));
        REQUIRE(s.finger_rotation.contains(v.finger_rotation_offsets[f]));
      }
      for (int k = 0; k < 3; ++k) REQUIRE(s.hand_orientation.contains(v.hand_orientation_offset[k]));
      REQUIRE(s.chromaticity_coeff.contains(v.chromaticity_coeff));
      REQUIRE(v.depth_min < v.depth_max);
    }
  }
}

TEST_CASE("changing one condition leaves every other field bit-identical") {
  VariationConfig cfg;
  for (int i = 0; i < 200; ++i) {
    const std::uint64_t seed = derive_seed(9, "rotate_two_finger", i, "depth0");
    const VariantParams base = sample_variant(cfg, {}, seed, i);
    const VariantParams high =
        sample_variant(cfg, {{VariationParam::SpeedOffset, RangeCondition::High}}, seed, i);
    CHECK(base.speed_offset != high.speed_offset);
    VariantParams patched = high;
    patched.speed_offset = base.speed_offset;
    CHECK(patched == base);
  }
}

TEST_CASE("sampling is reproducible") {
  VariationConfig cfg;
  const auto a = sample_variant(cfg, {}, 77, 3);
  const auto b = sample_variant(cfg, {}, 77, 3);
  CHECK(a == b);
  CHECK(a.seed == 77);
  CHECK(a.variant_index == 3);
}

TEST_CASE("validation names the field") {
  VariationConfig cfg;
  cfg.speed_offset = {5.0, 1.0};
  CHECK_THROWS_WITH_AS(cfg.validate(), doctest::Contains("speed_offset"), ConfigError);
  VariationConfig d;
  d.depth_min = {10.0, 200.0};
  CHECK_THROWS_AS(d.validate(), ConfigError);
}

}
