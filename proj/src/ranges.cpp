#include "gsynth/ranges.hpp"

#include <cmath>

#include "gsynth/errors.hpp"

namespace gsynth {

std::string_view to_string(RangeCondition c) {
  switch (c) {
    case RangeCondition::Low: return "low";
    case RangeCondition::Median: return "median";
    case RangeCondition::High: return "high";
  }
  return "median";
}

std::optional<RangeCondition> parse_range_condition(std::string_view s) {
  if (s == "low") return RangeCondition::Low;
  if (s == "median") return RangeCondition::Median;
  if (s == "high") return RangeCondition::High;
  return std::nullopt;
}

ParamRange scale_range(const ParamRange& median, RangeCondition cond) {
  const double m = median.center();
  const double w = 0.5 * (median.hi - median.lo);
  switch (cond) {
    case RangeCondition::Low: return {m - 0.5 * w, m + 0.5 * w};
    case RangeCondition::Median: return median;
    case RangeCondition::High: return {m - 2.0 * w, m + 2.0 * w};
  }
  return median;
}

std::string_view to_string(VariationParam p) {
  switch (p) {
    case VariationParam::SpeedOffset: return "speed_offset";
    case VariationParam::PositionOffset: return "position_offset";
    case VariationParam::FingerSpacing: return "finger_spacing";
    case VariationParam::FingerRotation: return "finger_rotation";
    case VariationParam::HandOrientation: return "hand_orientation";
    case VariationParam::ChromaticityCoeff: return "chromaticity_coeff";
    case VariationParam::DepthMin: return "depth_min";
    case VariationParam::DepthMax: return "depth_max";
  }
  return "";
}

std::optional<VariationParam> parse_variation_param(std::string_view s) {
  for (auto p : kAllVariationParams) {
    if (to_string(p) == s) return p;
  }
  if (s == "speed") return VariationParam::SpeedOffset;
  if (s == "position") return VariationParam::PositionOffset;
  if (s == "chromaticity") return VariationParam::ChromaticityCoeff;
  return std::nullopt;
}

RangeCondition VariationConfig::condition_for(VariationParam p, const ConditionMap& extra) const {
  if (auto it = extra.find(p); it != extra.end()) return it->second;
  if (auto it = condition_overrides.find(p); it != condition_overrides.end()) return it->second;
  return RangeCondition::Median;
}

VariationConfig VariationConfig::scaled(const ConditionMap& extra) const {
  VariationConfig out = *this;
  auto apply = [&](ParamRange& r, VariationParam p) { r = scale_range(r, condition_for(p, extra)); };
  apply(out.speed_offset, VariationParam::SpeedOffset);
  for (auto& axis : out.position_offset) apply(axis, VariationParam::PositionOffset);
  apply(out.finger_spacing, VariationParam::FingerSpacing);
  apply(out.finger_rotation, VariationParam::FingerRotation);
  apply(out.hand_orientation, VariationParam::HandOrientation);
  apply(out.chromaticity_coeff, VariationParam::ChromaticityCoeff);
  apply(out.depth_min, VariationParam::DepthMin);
  apply(out.depth_max, VariationParam::DepthMax);
  out.condition_overrides.clear();
  return out;
}

namespace {

void check_range(const ParamRange& r, const std::string& field) {
  if (!std::isfinite(r.lo) || !std::isfinite(r.hi)) {
    throw ConfigError("variation." + field + ": range bounds must be finite");
  }
  if (r.lo > r.hi) {
    throw ConfigError("variation." + field + ": lo must not exceed hi");
  }
}

}  // namespace

void VariationConfig::validate() const {
  const VariationConfig s = scaled();
  check_range(s.speed_offset, "speed_offset");
  const char* axes[] = {"x", "y", "z"};
  for (int i = 0; i < 3; ++i) {
    check_range(s.position_offset[i], std::string("position_offset.") + axes[i]);
  }
  check_range(s.finger_spacing, "finger_spacing");
  check_range(s.finger_rotation, "finger_rotation");
  check_range(s.hand_orientation, "hand_orientation");
  check_range(s.chromaticity_coeff, "chromaticity_coeff");
  check_range(s.depth_min, "depth_min");
  check_range(s.depth_max, "depth_max");
  if (s.chromaticity_coeff.lo <= 0.0) {
    throw ConfigError("variation.chromaticity_coeff: coefficient must stay positive");
  }
  if (s.depth_min.lo <= 0.0) {
    throw ConfigError("variation.depth_min: minimum range must stay positive");
  }
  if (!(s.depth_min.hi < s.depth_max.lo)) {
    throw ConfigError(
        "variation.depth_max: depth_min.hi must be below depth_max.lo so every sampled "
        "camera has a positive span");
  }
}

}  // namespace gsynth
