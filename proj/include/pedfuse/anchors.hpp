#pragma once

#include <array>
#include <vector>

#include "pedfuse/geometry.hpp"

namespace pedfuse {

/// One feature-map output layer of the candidate generator grid.
struct LayerSpec {
  int grid_w = 1;
  int grid_h = 1;
  int layer_index = 0;  // 0..6
};

/// Default-box layout: 7 aspect ratios per grid cell. The two 0.41 variants
/// share the numeric ratio 0.41 but draw their heights from different
/// per-layer tables (slot 3 is the "b" variant).
struct AnchorConfig {
  static constexpr int kNumRatios = 7;
  static constexpr int kNumLayers = 7;
  static constexpr int kAltRatioSlot = 3;  // 0.41b

  std::array<double, kNumRatios> aspect_ratios{0.1, 0.2, 0.41, 0.41, 0.8, 1.6, 3.0};
  std::array<double, kNumLayers> heights_main{0.05, 0.1, 0.24, 0.38, 0.52, 0.66, 0.80};
  std::array<double, kNumLayers> heights_alt_41b{0.1, 0.24, 0.38, 0.52, 0.66, 0.80, 0.94};
  double image_w = 640.0;
  double image_h = 480.0;
};

/// Default boxes for one layer: grid_w * grid_h * 7 boxes centered at the
/// grid cell centers. Heights are relative to image height; width = ratio *
/// height. Boxes are not clipped to the image bounds.
std::vector<BoundingBox> generate_default_boxes(const LayerSpec& layer,
                                                const AnchorConfig& config);

}  // namespace pedfuse
