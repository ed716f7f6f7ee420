#include "pedfuse/pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <map>
#include <set>
#include <unordered_map>

#include "pedfuse/io.hpp"

namespace pedfuse {

namespace {

bool passes_collection(const Candidate& c, const FusionParams& p) {
  return c.score_generator > p.collect_min_score && c.box.h > p.collect_min_height_px;
}

}  // namespace

std::vector<Candidate> run_fusion(const RunConfig& config) {
  config.fusion.validate();
  std::vector<Candidate> candidates = read_detections(config.detections_path);

  // Collection pre-filter: drop removes sub-threshold candidates, skip
  // keeps them but exempts them from classifier fusion.
  std::set<std::string> exempt;
  if (config.prefilter == RunConfig::PreFilter::drop) {
    candidates = collect_for_classification(candidates, config.fusion);
  } else if (config.prefilter == RunConfig::PreFilter::skip) {
    for (const auto& c : candidates) {
      if (!passes_collection(c, config.fusion)) exempt.insert(c.id);
    }
  }

  if (!config.verdict_paths.empty()) {
    std::vector<ClassifierVerdict> all_verdicts;
    std::set<std::string> classifier_ids;
    for (const auto& path : config.verdict_paths) {
      auto vs = read_verdicts(path);
      for (const auto& v : vs) classifier_ids.insert(v.classifier_id);
      all_verdicts.insert(all_verdicts.end(), vs.begin(), vs.end());
    }
    const std::vector<std::string> declared(classifier_ids.begin(), classifier_ids.end());
    auto grouped = group_verdicts(all_verdicts);
    static const std::vector<ClassifierVerdict> kNone;
    auto verdicts_of = [&](const std::string& id) -> const std::vector<ClassifierVerdict>& {
      auto it = grouped.find(id);
      return it == grouped.end() ? kNone : it->second;
    };

    if (config.hard_rejection) {
      std::vector<Candidate> survivors;
      for (auto& c : candidates) {
        if (exempt.contains(c.id)) {
          survivors.push_back(std::move(c));
          continue;
        }
        bool ok = true;
        for (const auto& v : verdicts_of(c.id)) {
          if (v.probability < config.hard_threshold) {
            ok = false;
            break;
          }
        }
        if (ok && config.verdict_policy == VerdictPolicy::strict) {
          // strict mode still demands a full verdict roster
          fuse_classifiers(c, verdicts_of(c.id), config.fusion, config.verdict_policy,
                           declared);
        }
        if (ok) survivors.push_back(std::move(c));
      }
      candidates = std::move(survivors);
    } else {
      for (auto& c : candidates) {
        if (exempt.contains(c.id)) continue;
        c = fuse_classifiers(std::move(c), verdicts_of(c.id), config.fusion,
                             config.verdict_policy, declared);
      }
    }
  }

  if (config.mask_dir) {
    std::map<std::string, SegmentationMask> masks;
    auto mask_for = [&](const std::string& frame_id) -> const SegmentationMask& {
      auto it = masks.find(frame_id);
      if (it == masks.end()) {
        const auto path = std::filesystem::path(*config.mask_dir) / (frame_id + ".pgm");
        it = masks.emplace(frame_id, read_mask(path.string())).first;
      }
      return it->second;
    };
    if (config.hard_rejection) {
      std::unordered_map<std::string, double> coverage;
      for (const auto& c : candidates) {
        coverage[c.id] = mask_coverage(c.box, mask_for(c.frame_id), c.frame_id);
      }
      candidates = hard_reject_by_coverage(candidates, coverage, config.hard_min_coverage);
    } else {
      for (auto& c : candidates) {
        const double cov = mask_coverage(c.box, mask_for(c.frame_id), c.frame_id);
        c = fuse_segmentation(std::move(c), cov, config.fusion);
      }
    }
  }

  if (config.nms_iou) {
    std::map<std::string, std::vector<Candidate>> by_frame;
    for (auto& c : candidates) by_frame[c.frame_id].push_back(std::move(c));
    candidates.clear();
    for (auto& [frame, cs] : by_frame) {
      auto kept = nms(cs, *config.nms_iou);
      candidates.insert(candidates.end(), kept.begin(), kept.end());
    }
  }
  return candidates;
}

PipelineResult run_pipeline(const RunConfig& config) {
  PipelineResult result;
  result.fused = run_fusion(config);
  const auto annotations = read_annotations(config.annotations_path);
  const auto corpus = build_corpus(result.fused, annotations);
  if (corpus.empty()) throw std::runtime_error("pipeline input contains no frames");
  result.curve = compute_curve(corpus, EvalSetting::by_name(config.setting_name),
                               config.eval_iou, config.threads);
  return result;
}

}  // namespace pedfuse
