#pragma once

#include <string>
#include <vector>

#include "pedfuse/eval.hpp"
#include "pedfuse/fusion.hpp"
#include "pedfuse/geometry.hpp"

namespace pedfuse {

/// Parse failure carrying the file and 1-based line it happened on.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& path, int line, const std::string& what)
      : std::runtime_error(path + ":" + std::to_string(line) + ": " + what) {}
  explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

/// Detections, JSON Lines: {"id","frame","bbox":[x,y,w,h],"score"} with
/// optional "score_fused" and "factors":[[source,factor],...]. Generator
/// scores must lie in [0,1]; fused scores are unclamped (the fusion product
/// can exceed 1). Ids must be unique within a file.
std::vector<Candidate> read_detections(const std::string& path);
void write_detections(const std::string& path, const std::vector<Candidate>& candidates);

/// Annotations, JSON Lines: {"frame","bbox","category","visible_bbox"?,
/// "occlusion"?}. Categories: "person" | "people" | "person?". When both
/// visible_bbox and occlusion are given they must agree within 0.02.
std::vector<GroundTruthAnnotation> read_annotations(const std::string& path);
void write_annotations(const std::string& path,
                       const std::vector<GroundTruthAnnotation>& annotations);

/// Classifier verdicts, JSON Lines: {"candidate","p","classifier"?}. The
/// default classifier id is the filename stem.
std::vector<ClassifierVerdict> read_verdicts(const std::string& path);
void write_verdicts(const std::string& path, const std::vector<ClassifierVerdict>& verdicts);

/// Binary PGM (magic P5, maxval <= 255); any nonzero pixel is pedestrian.
/// The frame id is the filename stem.
SegmentationMask read_mask(const std::string& path);
void write_mask(const std::string& path, const SegmentationMask& mask);

/// CSV with header "fppi,miss_rate", one row per point, and a trailing
/// "# lamr=<value>" comment.
void write_curve_csv(const std::string& path, const MissRateCurve& curve);

/// Fixed 9-significant-digit decimal formatting used for every number we
/// serialize, so reruns are byte-identical.
std::string format_double(double v);

}  // namespace pedfuse
