#include "pedfuse/anchors.hpp"

#include <stdexcept>

namespace pedfuse {

std::vector<BoundingBox> generate_default_boxes(const LayerSpec& layer,
                                                const AnchorConfig& config) {
  if (layer.grid_w < 1 || layer.grid_h < 1) {
    throw std::invalid_argument("grid dimensions must be >= 1");
  }
  if (layer.layer_index < 0 || layer.layer_index >= AnchorConfig::kNumLayers) {
    throw std::invalid_argument("layer_index must be in 0..6");
  }

  std::vector<BoundingBox> boxes;
  boxes.reserve(static_cast<size_t>(layer.grid_w) * layer.grid_h * AnchorConfig::kNumRatios);
  for (int j = 0; j < layer.grid_h; ++j) {
    for (int i = 0; i < layer.grid_w; ++i) {
      const double cx = (i + 0.5) / layer.grid_w * config.image_w;
      const double cy = (j + 0.5) / layer.grid_h * config.image_h;
      for (int r = 0; r < AnchorConfig::kNumRatios; ++r) {
        const double rel_h = (r == AnchorConfig::kAltRatioSlot)
                                 ? config.heights_alt_41b[layer.layer_index]
                                 : config.heights_main[layer.layer_index];
        const double h = rel_h * config.image_h;
        const double w = config.aspect_ratios[r] * h;
        boxes.push_back({cx - w / 2.0, cy - h / 2.0, w, h});
      }
    }
  }
  return boxes;
}

}  // namespace pedfuse
