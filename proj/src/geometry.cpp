#include "pedfuse/geometry.hpp"

#include <algorithm>
#include <cmath>

namespace pedfuse {

std::string to_string(Category c) {
  switch (c) {
    case Category::person: return "person";
    case Category::people: return "people";
    case Category::person_unclear: return "person?";
  }
  throw std::logic_error("unknown category");
}

Category category_from_string(const std::string& s) {
  if (s == "person") return Category::person;
  if (s == "people") return Category::people;
  if (s == "person?") return Category::person_unclear;
  throw std::invalid_argument("unknown category: '" + s + "'");
}

double GroundTruthAnnotation::occlusion_fraction() const {
  if (visible_box) {
    const double f = 1.0 - visible_box->area() / box.area();
    return std::clamp(f, 0.0, 1.0);
  }
  if (occlusion_override) return std::clamp(*occlusion_override, 0.0, 1.0);
  return 0.0;
}

double jaccard(const BoundingBox& a, const BoundingBox& b) {
  const double ix = std::max(0.0, std::min(a.right(), b.right()) - std::max(a.x, b.x));
  const double iy = std::max(0.0, std::min(a.bottom(), b.bottom()) - std::max(a.y, b.y));
  const double inter = ix * iy;
  if (inter <= 0.0) return 0.0;
  // Areas use the same edge arithmetic as the intersection so identical
  // boxes come out at exactly 1.
  const double area_a = (a.right() - a.x) * (a.bottom() - a.y);
  const double area_b = (b.right() - b.x) * (b.bottom() - b.y);
  return inter / (area_a + area_b - inter);
}

std::vector<int> label_candidates(const std::vector<BoundingBox>& candidates,
                                  const std::vector<GroundTruthAnnotation>& gt) {
  std::vector<int> labels(candidates.size(), 0);
  for (size_t i = 0; i < candidates.size(); ++i) {
    for (const auto& g : gt) {
      if (jaccard(candidates[i], g.box) > 0.5) {  // strict
        labels[i] = 1;
        break;
      }
    }
  }
  return labels;
}

double mask_coverage(const BoundingBox& box, const SegmentationMask& mask) {
  // Pixel (px,py) has its center at (px+0.5, py+0.5); the center is inside
  // the box when it falls in [x, x+w) x [y, y+h).
  const int px0 = std::max(0, static_cast<int>(std::ceil(box.x - 0.5)));
  const int py0 = std::max(0, static_cast<int>(std::ceil(box.y - 0.5)));
  const int px1 = std::min(mask.width - 1, static_cast<int>(std::ceil(box.right() - 0.5)) - 1);
  const int py1 = std::min(mask.height - 1, static_cast<int>(std::ceil(box.bottom() - 0.5)) - 1);
  long total = 0;
  long covered = 0;
  for (int py = py0; py <= py1; ++py) {
    for (int px = px0; px <= px1; ++px) {
      ++total;
      if (mask.at(px, py)) ++covered;
    }
  }
  if (total == 0) return 0.0;
  return static_cast<double>(covered) / static_cast<double>(total);
}

double mask_coverage(const BoundingBox& box, const SegmentationMask& mask,
                     const std::string& expected_frame_id) {
  if (mask.frame_id != expected_frame_id) {
    throw std::invalid_argument("mask frame '" + mask.frame_id +
                                "' does not match expected frame '" + expected_frame_id + "'");
  }
  return mask_coverage(box, mask);
}

}  // namespace pedfuse
