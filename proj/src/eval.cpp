#include "pedfuse/eval.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <stdexcept>

namespace pedfuse {

EvalSetting EvalSetting::by_name(const std::string& name) {
  // Height bands use the full-box height. "50+" means >= 50; "30-80" means
  // [30, 80); "1-35%" means (0, 0.35]; "35-80%" means (0.35, 0.80].
  if (name == "Reasonable") return {name, 50.0, {}, 0.0, 0.35, false};
  if (name == "All") return {name, 20.0, {}, 0.0, 0.80, false};
  if (name == "Far") return {name, {}, 30.0, 0.0, 1.0, false};
  if (name == "Medium") return {name, 30.0, 80.0, 0.0, 1.0, false};
  if (name == "Near") return {name, 80.0, {}, 0.0, 1.0, false};
  if (name == "Occ.none") return {name, {}, {}, 0.0, 0.0, false};
  if (name == "Occ.partial") return {name, {}, {}, 0.0, 0.35, true};
  if (name == "Occ.heavy") return {name, {}, {}, 0.35, 0.80, true};
  throw std::invalid_argument("unknown evaluation setting: '" + name + "'");
}

std::vector<std::string> EvalSetting::names() {
  return {"Reasonable", "All", "Far", "Medium", "Near",
          "Occ.none", "Occ.partial", "Occ.heavy"};
}

bool EvalSetting::admits(const GroundTruthAnnotation& gt) const {
  if (gt.category != Category::person) return false;
  const double h = gt.box.h;
  if (min_height && h < *min_height) return false;
  if (max_height && h >= *max_height) return false;
  const double occ = gt.occlusion_fraction();
  if (occ_lo_exclusive ? occ <= occ_lo : occ < occ_lo) return false;
  if (occ > occ_hi) return false;
  return true;
}

GtPartition filter_ground_truth(const std::vector<GroundTruthAnnotation>& gt,
                                const EvalSetting& setting) {
  GtPartition out;
  for (const auto& g : gt) {
    (setting.admits(g) ? out.evaluated : out.ignored).push_back(g);
  }
  return out;
}

FrameMatchResult match_frame_detailed(const std::vector<Candidate>& detections,
                                      const std::vector<GroundTruthAnnotation>& evaluated_gt,
                                      const std::vector<GroundTruthAnnotation>& ignored_gt,
                                      double iou_threshold) {
  std::vector<const Candidate*> sorted;
  sorted.reserve(detections.size());
  for (const auto& d : detections) sorted.push_back(&d);
  std::sort(sorted.begin(), sorted.end(), [](const Candidate* a, const Candidate* b) {
    if (a->score_fused != b->score_fused) return a->score_fused > b->score_fused;
    return a->id < b->id;
  });

  FrameMatchResult result;
  result.evaluated_gt = static_cast<int>(evaluated_gt.size());
  std::vector<bool> gt_matched(evaluated_gt.size(), false);
  for (const Candidate* d : sorted) {
    int best = -1;
    double best_iou = 0.0;
    for (size_t g = 0; g < evaluated_gt.size(); ++g) {
      if (gt_matched[g]) continue;
      const double iou = jaccard(d->box, evaluated_gt[g].box);
      if (iou >= iou_threshold && iou > best_iou) {
        best_iou = iou;
        best = static_cast<int>(g);
      }
    }
    if (best >= 0) {
      gt_matched[best] = true;
      result.detection_events.emplace_back(d->score_fused, true);
      continue;
    }
    // Ignore regions absorb any number of detections.
    bool absorbed = false;
    for (const auto& g : ignored_gt) {
      if (jaccard(d->box, g.box) >= iou_threshold) {
        absorbed = true;
        break;
      }
    }
    if (!absorbed) result.detection_events.emplace_back(d->score_fused, false);
  }
  return result;
}

MatchCounts match_frame(const std::vector<Candidate>& detections,
                        const std::vector<GroundTruthAnnotation>& evaluated_gt,
                        const std::vector<GroundTruthAnnotation>& ignored_gt,
                        double iou_threshold) {
  const auto detail = match_frame_detailed(detections, evaluated_gt, ignored_gt, iou_threshold);
  MatchCounts counts;
  for (const auto& [score, is_tp] : detail.detection_events) {
    (is_tp ? counts.tp : counts.fp)++;
  }
  counts.miss = detail.evaluated_gt - counts.tp;
  return counts;
}

Corpus build_corpus(const std::vector<Candidate>& detections,
                    const std::vector<GroundTruthAnnotation>& annotations) {
  Corpus corpus;
  for (const auto& d : detections) corpus[d.frame_id].detections.push_back(d);
  for (const auto& g : annotations) corpus[g.frame_id].gt.push_back(g);
  return corpus;
}

MissRateCurve compute_curve(const Corpus& corpus, const EvalSetting& setting,
                            double iou_threshold, int threads) {
  if (corpus.empty()) throw std::invalid_argument("corpus has no frames");

  std::vector<const FrameData*> frames;
  frames.reserve(corpus.size());
  for (const auto& [id, data] : corpus) frames.push_back(&data);

  std::vector<FrameMatchResult> results(frames.size());
  auto run_range = [&](size_t lo, size_t hi) {
    for (size_t i = lo; i < hi; ++i) {
      const auto part = filter_ground_truth(frames[i]->gt, setting);
      results[i] = match_frame_detailed(frames[i]->detections, part.evaluated, part.ignored,
                                        iou_threshold);
    }
  };
  if (threads <= 1 || frames.size() < 2) {
    run_range(0, frames.size());
  } else {
    const size_t n = std::min<size_t>(threads, frames.size());
    std::vector<std::future<void>> futures;
    for (size_t t = 0; t < n; ++t) {
      const size_t lo = frames.size() * t / n;
      const size_t hi = frames.size() * (t + 1) / n;
      futures.push_back(std::async(std::launch::async, run_range, lo, hi));
    }
    for (auto& f : futures) f.get();
  }

  long total_gt = 0;
  std::vector<std::pair<double, bool>> events;
  for (const auto& r : results) {
    total_gt += r.evaluated_gt;
    events.insert(events.end(), r.detection_events.begin(), r.detection_events.end());
  }
  if (total_gt == 0) {
    throw std::runtime_error("no ground truth admitted under setting '" + setting.name +
                             "': miss rate undefined");
  }

  std::sort(events.begin(), events.end(),
            [](const auto& a, const auto& b) { return a.first > b.first; });

  const double frame_count = static_cast<double>(corpus.size());
  std::vector<std::pair<double, double>> raw;
  raw.emplace_back(0.0, 1.0);  // threshold above every score
  long tp = 0, fp = 0;
  size_t i = 0;
  while (i < events.size()) {
    const double score = events[i].first;
    for (; i < events.size() && events[i].first == score; ++i) {
      (events[i].second ? tp : fp)++;
    }
    raw.emplace_back(static_cast<double>(fp) / frame_count,
                     static_cast<double>(total_gt - tp) / static_cast<double>(total_gt));
  }

  // Collapse to a staircase with strictly increasing FPPI, keeping the
  // lowest miss rate seen at each FPPI.
  MissRateCurve curve;
  for (const auto& [fppi, mr] : raw) {
    if (!curve.points.empty() && curve.points.back().first == fppi) {
      curve.points.back().second = std::min(curve.points.back().second, mr);
    } else {
      curve.points.emplace_back(fppi, mr);
    }
  }
  curve.lamr = compute_lamr(curve);
  return curve;
}

double compute_lamr(const MissRateCurve& curve) {
  if (curve.points.empty()) throw std::invalid_argument("empty miss-rate curve");
  double log_sum = 0.0;
  for (int k = 0; k <= 8; ++k) {
    const double ref = std::pow(10.0, -2.0 + 0.25 * k);
    // Previous-point interpolation: the largest curve FPPI <= ref.
    double mr = curve.points.front().second;
    for (const auto& [fppi, rate] : curve.points) {
      if (fppi <= ref) {
        mr = rate;
      } else {
        break;
      }
    }
    log_sum += std::log(std::max(mr, 1e-10));
  }
  return std::exp(log_sum / 9.0);
}

}  // namespace pedfuse
