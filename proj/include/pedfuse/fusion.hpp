#pragma once

#include <functional>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "pedfuse/geometry.hpp"

namespace pedfuse {

/// A multiplicative rescaling applied to a candidate's score, tagged with
/// its source ("ss" for the segmentation vote, otherwise a classifier id).
struct AppliedFactor {
  std::string source;
  double factor = 1.0;

  bool operator==(const AppliedFactor&) const = default;
};

/// A detection hypothesis. score_fused always equals score_generator times
/// the product of applied_factors.
struct Candidate {
  std::string id;
  std::string frame_id;
  BoundingBox box;
  double score_generator = 0.0;
  double score_fused = 0.0;
  std::vector<AppliedFactor> applied_factors;
};

struct ClassifierVerdict {
  std::string candidate_id;
  std::string classifier_id;
  double probability = 0.0;  // in [0,1]
};

struct FusionParams {
  double a_c = 0.7;   // classification probability counted as confident
  double b_c = 0.1;   // classifier factor floor
  double a_ss = 4.0;  // segmentation coverage slope
  double b_ss = 0.35; // segmentation factor floor
  double ss_accept_ratio = 0.2;
  double collect_min_score = 0.01;
  double collect_min_height_px = 40.0;

  void validate() const;
};

/// How to treat a declared classifier with no verdict for a candidate.
enum class VerdictPolicy { strict, lenient };

/// Confidence scaling factor for one classifier probability:
/// max(p / a_c, b_c). Throws if p is outside [0,1].
double scaling_factor(double p, const FusionParams& params = {});

/// Applies one scaling factor per verdict to the candidate's fused score.
/// Verdicts must all reference the candidate and carry distinct classifier
/// ids; factors are applied in classifier-id order so the result does not
/// depend on verdict arrival order. declared_classifiers, when non-empty,
/// is the full classifier roster: a missing verdict is an error under
/// strict policy and a neutral factor 1 under lenient policy.
Candidate fuse_classifiers(Candidate candidate,
                           const std::vector<ClassifierVerdict>& verdicts,
                           const FusionParams& params = {},
                           VerdictPolicy policy = VerdictPolicy::strict,
                           const std::vector<std::string>& declared_classifiers = {});

/// Segmentation-mask vote: coverage above ss_accept_ratio leaves the score
/// unchanged (factor 1); otherwise the score is multiplied by
/// max(coverage * a_ss, b_ss). The factor is recorded with source "ss".
Candidate fuse_segmentation(Candidate candidate, double coverage,
                            const FusionParams& params = {});

/// Hard-rejection baseline: a candidate survives only if every classifier
/// probability is >= threshold. Surviving scores are unmodified.
std::vector<Candidate> hard_reject(const std::vector<Candidate>& candidates,
                                   const std::vector<ClassifierVerdict>& verdicts,
                                   double threshold,
                                   VerdictPolicy policy = VerdictPolicy::strict,
                                   const std::vector<std::string>& declared_classifiers = {});

/// Hard-rejection counterpart of the segmentation vote: keeps candidates
/// whose mask coverage is >= min_coverage (the baseline uses 0.05).
std::vector<Candidate> hard_reject_by_coverage(
    const std::vector<Candidate>& candidates,
    const std::unordered_map<std::string, double>& coverage_by_id,
    double min_coverage = 0.05);

/// Candidate-collection filter: keeps candidates with generator score
/// strictly above collect_min_score and box height strictly above
/// collect_min_height_px.
std::vector<Candidate> collect_for_classification(const std::vector<Candidate>& candidates,
                                                  const FusionParams& params = {});

/// Greedy non-maximum suppression within one frame. Ties break by
/// descending fused score, then ascending id.
std::vector<Candidate> nms(const std::vector<Candidate>& candidates, double iou_threshold);

/// A verdict provider computes one classifier's verdicts for a candidate
/// pool (file reader, simulator, network client, ...).
using VerdictProvider =
    std::function<std::vector<ClassifierVerdict>(const std::vector<Candidate>&)>;

/// Runs all providers concurrently and fuses their verdicts. The merge is
/// canonical (classifier-id order), so the output is bit-identical to
/// invoking the providers sequentially.
std::vector<Candidate> fuse_with_providers(std::vector<Candidate> candidates,
                                           const std::vector<VerdictProvider>& providers,
                                           const FusionParams& params = {},
                                           VerdictPolicy policy = VerdictPolicy::strict);

/// Groups a flat verdict list by candidate id, rejecting duplicate
/// (candidate, classifier) pairs.
std::unordered_map<std::string, std::vector<ClassifierVerdict>> group_verdicts(
    const std::vector<ClassifierVerdict>& verdicts);

}  // namespace pedfuse
