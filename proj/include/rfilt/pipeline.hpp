#pragma once

// Processing configurations: resampling, rounding, re-segmentation, filtering
// and ROI aggregation, in that order.

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rfilt/features.hpp"
#include "rfilt/filter.hpp"
#include "rfilt/resample.hpp"

namespace rfilt {

struct ProcessingConfig {
  std::string name;  // "A", "B" or free text
  int mode = 3;      // 2: slice-wise, 3: volumetric
  std::optional<Spacing3> resample_spacing;
  InterpMethod image_interp = InterpMethod::tricubic;
  double mask_threshold = 0.5;
  bool round_intensities = false;
  std::optional<IntensityRange> reseg;
  BoundaryMode boundary = BoundaryMode::mirror();
  FilterSpec filter;

  /// Slice-wise, no interpolation, re-segmentation [-1000, 400], mirror.
  static ProcessingConfig configuration_a();
  /// Volumetric, 1 mm tricubic resampling, rounding, [-1000, 400], mirror.
  static ProcessingConfig configuration_b();
};

/// Parses a JSON configuration. Unknown keys are rejected. A "configuration"
/// key of "A" or "B" starts from the matching preset.
ProcessingConfig parse_config(std::string_view json_text);
ProcessingConfig load_config(const std::filesystem::path& path);
std::string config_to_json(const ProcessingConfig& config);

/// Parses a filter block on its own (same keys as the "filter" object).
FilterSpec parse_filter_json(std::string_view json_text);

struct RunResult {
  VolumeImage image;  // after interpolation and rounding
  ResponseMap response;
  RoiMask morphological;
  RoiMask intensity;
  std::vector<FeatureValue> features;
  Diagnostics diagnostics;
  std::vector<std::string> log;
};

RunResult run_configuration(const VolumeImage& image, const RoiMask& mask,
                            const ProcessingConfig& config);

}  // namespace rfilt
