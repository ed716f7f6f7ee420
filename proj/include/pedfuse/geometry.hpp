#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace pedfuse {

/// Axis-aligned rectangle in pixel coordinates, top-left origin.
/// Coordinates are real-valued; width and height must be positive.
struct BoundingBox {
  double x = 0.0;
  double y = 0.0;
  double w = 0.0;
  double h = 0.0;

  double right() const { return x + w; }
  double bottom() const { return y + h; }
  double area() const { return w * h; }
  bool valid() const { return w > 0.0 && h > 0.0; }

  bool operator==(const BoundingBox&) const = default;
};

enum class Category {
  person,
  people,         // large group of individuals
  person_unclear  // unclear identification
};

std::string to_string(Category c);
Category category_from_string(const std::string& s);

/// Ground-truth pedestrian annotation. The occlusion fraction is derived
/// from the visible box when present; otherwise an explicit value from the
/// input file is honored, defaulting to 0.
struct GroundTruthAnnotation {
  std::string frame_id;
  BoundingBox box;
  std::optional<BoundingBox> visible_box;
  Category category = Category::person;
  std::optional<double> occlusion_override;

  double occlusion_fraction() const;
};

/// Per-frame binary raster: 1 = pedestrian class, 0 = background.
/// Row-major, pixels.size() == width * height.
struct SegmentationMask {
  std::string frame_id;
  int width = 0;
  int height = 0;
  std::vector<std::uint8_t> pixels;

  bool at(int px, int py) const { return pixels[static_cast<size_t>(py) * width + px] != 0; }
};

/// Intersection area over union area of two boxes. Symmetric, in [0,1],
/// 0 for disjoint boxes.
double jaccard(const BoundingBox& a, const BoundingBox& b);

/// Binary candidate labels: label[i] = 1 iff the candidate has Jaccard
/// overlap strictly greater than 0.5 with some ground-truth box.
std::vector<int> label_candidates(const std::vector<BoundingBox>& candidates,
                                  const std::vector<GroundTruthAnnotation>& gt);

/// Fraction of the box covered by pedestrian pixels. A raster pixel counts
/// as inside the box when its center does; the denominator is the number of
/// raster pixels inside the (raster-clipped) box. A box entirely outside the
/// raster yields 0.
double mask_coverage(const BoundingBox& box, const SegmentationMask& mask);

/// Same, but first checks that the mask belongs to the expected frame.
double mask_coverage(const BoundingBox& box, const SegmentationMask& mask,
                     const std::string& expected_frame_id);

}  // namespace pedfuse
