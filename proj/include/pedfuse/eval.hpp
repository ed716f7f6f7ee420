#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pedfuse/fusion.hpp"
#include "pedfuse/geometry.hpp"

namespace pedfuse {

/// One named evaluation setting: a height band (full-box height, pixels)
/// and an occlusion-fraction window. Interval conventions: min_height is
/// inclusive, max_height exclusive; the occlusion window is closed at both
/// ends unless occ_lo_exclusive is set.
struct EvalSetting {
  std::string name;
  std::optional<double> min_height;
  std::optional<double> max_height;  // exclusive
  double occ_lo = 0.0;
  double occ_hi = 1.0;
  bool occ_lo_exclusive = false;

  /// The eight standard settings: Reasonable, All, Far, Medium, Near,
  /// Occ.none, Occ.partial, Occ.heavy.
  static EvalSetting by_name(const std::string& name);
  static std::vector<std::string> names();

  bool admits(const GroundTruthAnnotation& gt) const;
};

struct MissRateCurve {
  std::vector<std::pair<double, double>> points;  // (fppi, miss_rate), fppi increasing
  double lamr = 0.0;
};

struct GtPartition {
  std::vector<GroundTruthAnnotation> evaluated;
  std::vector<GroundTruthAnnotation> ignored;
};

/// Splits GT into evaluated and ignored sets. 'people' and 'person?'
/// annotations, and 'person' annotations outside the setting's window, are
/// ignored (matching them is neither credit nor penalty).
GtPartition filter_ground_truth(const std::vector<GroundTruthAnnotation>& gt,
                                const EvalSetting& setting);

struct MatchCounts {
  int tp = 0;
  int fp = 0;
  int miss = 0;
};

/// Per-detection outcome of greedy matching with all detections admitted,
/// used to build threshold-sweep curves in one matching pass (greedy
/// matching in descending score order is prefix-stable, so restricting to
/// scores >= t never changes the decisions of the retained detections).
struct FrameMatchResult {
  // (fused score, matched-an-evaluated-GT) per detection that was not
  // absorbed by an ignore region; absorbed detections are dropped.
  std::vector<std::pair<double, bool>> detection_events;
  int evaluated_gt = 0;
};

FrameMatchResult match_frame_detailed(const std::vector<Candidate>& detections,
                                      const std::vector<GroundTruthAnnotation>& evaluated_gt,
                                      const std::vector<GroundTruthAnnotation>& ignored_gt,
                                      double iou_threshold = 0.5);

/// Greedy score-ordered matching: each detection takes the highest-IoU
/// unmatched evaluated GT at IoU >= threshold (TP); otherwise, a detection
/// overlapping any ignored GT at IoU >= threshold is discarded; remaining
/// detections are FP and unmatched evaluated GT are misses.
MatchCounts match_frame(const std::vector<Candidate>& detections,
                        const std::vector<GroundTruthAnnotation>& evaluated_gt,
                        const std::vector<GroundTruthAnnotation>& ignored_gt,
                        double iou_threshold = 0.5);

struct FrameData {
  std::vector<Candidate> detections;
  std::vector<GroundTruthAnnotation> gt;
};

/// Frames keyed by frame id; the map size is the FPPI denominator.
using Corpus = std::map<std::string, FrameData>;

Corpus build_corpus(const std::vector<Candidate>& detections,
                    const std::vector<GroundTruthAnnotation>& annotations);

/// FPPI / miss-rate staircase swept over all distinct fused scores, with
/// the implicit empty-detection point (0, 1). Throws when the setting
/// admits no GT. threads <= 1 runs sequentially; per-frame matching is
/// order-independent so parallel runs are bit-identical.
MissRateCurve compute_curve(const Corpus& corpus, const EvalSetting& setting,
                            double iou_threshold = 0.5, int threads = 1);

/// Log-average miss rate: geometric mean of the curve's miss rate sampled
/// at 9 FPPI points log-spaced over [1e-2, 1] (staircase/previous-point
/// interpolation; sampled rates floored at 1e-10).
double compute_lamr(const MissRateCurve& curve);

}  // namespace pedfuse
