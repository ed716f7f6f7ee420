#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "pedfuse/fusion.hpp"
#include "pedfuse/geometry.hpp"

namespace pedfuse {

/// Parameters for one synthetic frame. Defaults follow the candidate
/// generator's working regime: 640x480 frames, pedestrian aspect ratio
/// centered on 0.41, overlapping true/false score ranges, and 2.4 false
/// positives per true candidate.
struct SceneConfig {
  std::string frame_id = "frame0";
  double image_w = 640.0;
  double image_h = 480.0;
  int n_pedestrians = 2;
  double fp_per_tp = 2.4;
  int n_false_positives = -1;  // -1: round(fp_per_tp * n_pedestrians)
  double min_gt_height = 60.0;
  double max_gt_height = 240.0;
  double jitter = 0.08;  // relative candidate perturbation, 0 = exact GT boxes
  double tp_score_lo = 0.4;
  double tp_score_hi = 1.0;
  double fp_score_lo = 0.01;
  double fp_score_hi = 0.7;
};

struct SyntheticScene {
  std::string frame_id;
  double image_w = 0.0;
  double image_h = 0.0;
  std::vector<GroundTruthAnnotation> gt;
  std::vector<Candidate> candidates;
  std::uint64_t rng_seed = 0;
};

struct SimClassifierSpec {
  enum class Kind { oracle, noisy };
  Kind kind = Kind::oracle;
  std::string classifier_id = "oracle";
  double tpr = 1.0;  // probability a true candidate scores >= a_c
  double fpr = 0.0;  // probability a false candidate scores >= a_c
  std::uint64_t rng_seed = 0;
};

/// Deterministic synthetic scene: non-overlapping GT pedestrians, one
/// jittered candidate per GT with Jaccard overlap > 0.5 (full recall), and
/// background false-positive candidates disjoint enough from every GT.
/// Throws when the requested pedestrians cannot be placed.
SyntheticScene generate_scene(const SceneConfig& config, std::uint64_t seed);

/// Verdicts for every candidate in the scene, labeled against scene.gt.
/// Oracle: p = 1 for true candidates, 0 for false ones. Noisy: p lands in
/// [a_c, 1] with probability tpr (true) / fpr (false), in [0, a_c)
/// otherwise. Deterministic given spec.rng_seed.
std::vector<ClassifierVerdict> simulate_verdicts(const SyntheticScene& scene,
                                                 const SimClassifierSpec& spec,
                                                 double a_c = 0.7);

/// Binary mask rasterizing the scene's GT boxes. coverage_quality = 1
/// paints each GT region exactly; lower values shrink each painted region
/// around its center so the painted area is about quality * box area.
SegmentationMask synthesize_mask(const SyntheticScene& scene, double coverage_quality);

}  // namespace pedfuse
