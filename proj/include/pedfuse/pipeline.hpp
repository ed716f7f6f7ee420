#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pedfuse/eval.hpp"
#include "pedfuse/fusion.hpp"

namespace pedfuse {

/// End-to-end run: candidates -> optional collection pre-filter ->
/// classifier fusion (soft or hard) -> optional segmentation fusion ->
/// optional NMS -> miss-rate curve under one evaluation setting.
struct RunConfig {
  std::string detections_path;
  std::string annotations_path;
  std::vector<std::string> verdict_paths;
  std::optional<std::string> mask_dir;  // <frame_id>.pgm per frame

  FusionParams fusion;
  std::string setting_name = "Reasonable";
  double eval_iou = 0.5;
  std::optional<double> nms_iou;

  VerdictPolicy verdict_policy = VerdictPolicy::strict;
  bool hard_rejection = false;
  double hard_threshold = 0.5;       // classifier probability floor
  double hard_min_coverage = 0.05;   // mask coverage floor

  enum class PreFilter { off, drop, skip };
  PreFilter prefilter = PreFilter::off;

  int threads = 1;
};

struct PipelineResult {
  std::vector<Candidate> fused;
  MissRateCurve curve;
};

/// Fusion stage only (no evaluation); also the first half of run_pipeline.
std::vector<Candidate> run_fusion(const RunConfig& config);

PipelineResult run_pipeline(const RunConfig& config);

}  // namespace pedfuse
