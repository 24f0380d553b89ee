#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>

namespace gsynth {

/// Closed interval [lo, hi] in the parameter's own units.
struct ParamRange {
  double lo = 0.0;
  double hi = 0.0;

  double center() const { return 0.5 * (lo + hi); }
  double width() const { return hi - lo; }
  bool contains(double v) const { return v >= lo && v <= hi; }
  friend bool operator==(const ParamRange&, const ParamRange&) = default;
};

enum class RangeCondition { Low, Median, High };

std::string_view to_string(RangeCondition c);
std::optional<RangeCondition> parse_range_condition(std::string_view s);

/// Rescale a median range about its center: Low halves the width, High
/// doubles it, Median is the identity.
ParamRange scale_range(const ParamRange& median, RangeCondition cond);

/// Variation parameters that can be sampled and condition-scaled.
enum class VariationParam {
  SpeedOffset,
  PositionOffset,
  FingerSpacing,
  FingerRotation,
  HandOrientation,
  ChromaticityCoeff,
  DepthMin,
  DepthMax,
};

inline constexpr std::array<VariationParam, 8> kAllVariationParams = {
    VariationParam::SpeedOffset,     VariationParam::PositionOffset,
    VariationParam::FingerSpacing,   VariationParam::FingerRotation,
    VariationParam::HandOrientation, VariationParam::ChromaticityCoeff,
    VariationParam::DepthMin,        VariationParam::DepthMax,
};

std::string_view to_string(VariationParam p);
/// Accepts the canonical field names plus the short aliases "speed",
/// "position" and "chromaticity".
std::optional<VariationParam> parse_variation_param(std::string_view s);

using ConditionMap = std::map<VariationParam, RangeCondition>;

/// Median ranges for every varied parameter. Lengths in cm, angles in
/// degrees, speeds in cm/s.
struct VariationConfig {
  ParamRange speed_offset{0.0, 50.0};
  std::array<ParamRange, 3> position_offset{{{-5.0, 5.0}, {-5.0, 5.0}, {-5.0, 5.0}}};
  ParamRange finger_spacing{-8.0, 8.0};
  ParamRange finger_rotation{-10.0, 10.0};
  ParamRange hand_orientation{-15.0, 15.0};
  ParamRange chromaticity_coeff{0.9, 1.1};
  ParamRange depth_min{15.0, 25.0};
  ParamRange depth_max{140.0, 160.0};
  ConditionMap condition_overrides;

  /// Condition for `p`: `extra` wins over `condition_overrides`, default Median.
  RangeCondition condition_for(VariationParam p, const ConditionMap& extra = {}) const;

  /// Copy with every range replaced by its condition-scaled range and the
  /// override map cleared.
  VariationConfig scaled(const ConditionMap& extra = {}) const;

  /// Throws ConfigError naming the field when an invariant fails after
  /// condition scaling.
  void validate() const;

  friend bool operator==(const VariationConfig&, const VariationConfig&) = default;
};

}  // namespace gsynth
