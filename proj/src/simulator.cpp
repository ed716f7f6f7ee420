#include "pedfuse/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "pedfuse/rng.hpp"

namespace pedfuse {

namespace {

constexpr int kMaxPlacementAttempts = 1000;

std::string candidate_id(const std::string& frame_id, int index) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "_c%04d", index);
  return frame_id + buf;
}

// Paints pixels whose centers fall inside the box, same containment rule
// as mask_coverage.
void paint_box(SegmentationMask& mask, const BoundingBox& box) {
  const int px0 = std::max(0, static_cast<int>(std::ceil(box.x - 0.5)));
  const int py0 = std::max(0, static_cast<int>(std::ceil(box.y - 0.5)));
  const int px1 = std::min(mask.width - 1, static_cast<int>(std::ceil(box.right() - 0.5)) - 1);
  const int py1 = std::min(mask.height - 1, static_cast<int>(std::ceil(box.bottom() - 0.5)) - 1);
  for (int py = py0; py <= py1; ++py) {
    for (int px = px0; px <= px1; ++px) {
      mask.pixels[static_cast<size_t>(py) * mask.width + px] = 1;
    }
  }
}

}  // namespace

SyntheticScene generate_scene(const SceneConfig& config, std::uint64_t seed) {
  if (config.image_w <= 0.0 || config.image_h <= 0.0) {
    throw std::invalid_argument("image dimensions must be positive");
  }
  if (config.n_pedestrians < 0) {
    throw std::invalid_argument("pedestrian count must be >= 0");
  }
  SplitMix64 rng(seed);
  SyntheticScene scene;
  scene.frame_id = config.frame_id;
  scene.image_w = config.image_w;
  scene.image_h = config.image_h;
  scene.rng_seed = seed;

  const double max_h = std::min(config.max_gt_height, config.image_h);
  for (int k = 0; k < config.n_pedestrians; ++k) {
    bool placed = false;
    for (int attempt = 0; attempt < kMaxPlacementAttempts && !placed; ++attempt) {
      const double h = rng.uniform(std::min(config.min_gt_height, max_h), max_h);
      const double w = 0.41 * rng.uniform(0.9, 1.1) * h;
      if (w > config.image_w) continue;
      BoundingBox box{rng.uniform(0.0, config.image_w - w),
                      rng.uniform(0.0, config.image_h - h), w, h};
      bool overlaps = false;
      for (const auto& g : scene.gt) {
        if (jaccard(box, g.box) > 0.3) {
          overlaps = true;
          break;
        }
      }
      if (overlaps) continue;
      GroundTruthAnnotation gt;
      gt.frame_id = config.frame_id;
      gt.box = box;
      gt.category = Category::person;
      scene.gt.push_back(gt);
      placed = true;
    }
    if (!placed) {
      throw std::runtime_error("infeasible placement: cannot fit " +
                               std::to_string(config.n_pedestrians) + " pedestrians in " +
                               std::to_string(config.image_w) + "x" +
                               std::to_string(config.image_h));
    }
  }

  int next_id = 0;
  // One jittered candidate per GT keeps recall at 100% before fusion.
  for (const auto& g : scene.gt) {
    const double j = config.jitter;
    BoundingBox box{g.box.x + rng.uniform(-j, j) * g.box.w,
                    g.box.y + rng.uniform(-j, j) * g.box.h,
                    g.box.w * (1.0 + rng.uniform(-j, j)),
                    g.box.h * (1.0 + rng.uniform(-j, j))};
    if (!(jaccard(box, g.box) > 0.5)) box = g.box;
    Candidate c;
    c.id = candidate_id(config.frame_id, next_id++);
    c.frame_id = config.frame_id;
    c.box = box;
    c.score_generator = rng.uniform(config.tp_score_lo, config.tp_score_hi);
    c.score_fused = c.score_generator;
    scene.candidates.push_back(c);
  }

  const int n_fp = config.n_false_positives >= 0
                       ? config.n_false_positives
                       : static_cast<int>(std::lround(config.fp_per_tp * config.n_pedestrians));
  for (int k = 0; k < n_fp; ++k) {
    bool placed = false;
    for (int attempt = 0; attempt < kMaxPlacementAttempts && !placed; ++attempt) {
      const double h = rng.uniform(std::min(45.0, max_h), max_h);
      const double w = 0.41 * rng.uniform(0.7, 1.4) * h;
      if (w > config.image_w) continue;
      BoundingBox box{rng.uniform(0.0, config.image_w - w),
                      rng.uniform(0.0, config.image_h - h), w, h};
      bool is_positive = false;
      for (const auto& g : scene.gt) {
        if (jaccard(box, g.box) > 0.5) {
          is_positive = true;
          break;
        }
      }
      if (is_positive) continue;
      Candidate c;
      c.id = candidate_id(config.frame_id, next_id++);
      c.frame_id = config.frame_id;
      c.box = box;
      c.score_generator = rng.uniform(config.fp_score_lo, config.fp_score_hi);
      c.score_fused = c.score_generator;
      scene.candidates.push_back(c);
      placed = true;
    }
    if (!placed) {
      throw std::runtime_error("infeasible placement: cannot place background candidate");
    }
  }
  return scene;
}

std::vector<ClassifierVerdict> simulate_verdicts(const SyntheticScene& scene,
                                                 const SimClassifierSpec& spec, double a_c) {
  if (spec.kind == SimClassifierSpec::Kind::oracle &&
      (spec.tpr != 1.0 || spec.fpr != 0.0)) {
    throw std::invalid_argument("oracle classifier requires tpr = 1, fpr = 0");
  }
  if (!(spec.tpr >= 0.0 && spec.tpr <= 1.0 && spec.fpr >= 0.0 && spec.fpr <= 1.0)) {
    throw std::invalid_argument("tpr and fpr must be in [0,1]");
  }
  std::vector<BoundingBox> boxes;
  boxes.reserve(scene.candidates.size());
  for (const auto& c : scene.candidates) boxes.push_back(c.box);
  const auto labels = label_candidates(boxes, scene.gt);

  SplitMix64 rng(spec.rng_seed);
  std::vector<ClassifierVerdict> out;
  out.reserve(scene.candidates.size());
  for (size_t i = 0; i < scene.candidates.size(); ++i) {
    double p;
    if (spec.kind == SimClassifierSpec::Kind::oracle) {
      p = labels[i] ? 1.0 : 0.0;
    } else {
      const bool confident = rng.bernoulli(labels[i] ? spec.tpr : spec.fpr);
      p = confident ? rng.uniform(a_c, 1.0) : rng.uniform(0.0, a_c);
    }
    out.push_back({scene.candidates[i].id, spec.classifier_id, p});
  }
  return out;
}

SegmentationMask synthesize_mask(const SyntheticScene& scene, double coverage_quality) {
  if (!(coverage_quality >= 0.0 && coverage_quality <= 1.0)) {
    throw std::invalid_argument("coverage_quality must be in [0,1]");
  }
  SegmentationMask mask;
  mask.frame_id = scene.frame_id;
  mask.width = static_cast<int>(std::lround(scene.image_w));
  mask.height = static_cast<int>(std::lround(scene.image_h));
  mask.pixels.assign(static_cast<size_t>(mask.width) * mask.height, 0);
  if (coverage_quality == 0.0) return mask;
  // Shrinking each side by sqrt(quality) keeps the painted area at about
  // quality * box area.
  const double s = std::sqrt(coverage_quality);
  for (const auto& g : scene.gt) {
    const double w = g.box.w * s;
    const double h = g.box.h * s;
    paint_box(mask, {g.box.x + (g.box.w - w) / 2.0, g.box.y + (g.box.h - h) / 2.0, w, h});
  }
  return mask;
}

}  // namespace pedfuse
