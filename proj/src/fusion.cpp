#include "pedfuse/fusion.hpp"

#include <algorithm>
#include <future>
#include <map>
#include <set>

namespace pedfuse {

void FusionParams::validate() const {
  if (!(a_c > 0.0 && a_c <= 1.0)) throw std::invalid_argument("a_c must be in (0,1]");
  if (!(b_c > 0.0 && b_c <= 1.0)) throw std::invalid_argument("b_c must be in (0,1]");
  if (!(a_ss > 0.0)) throw std::invalid_argument("a_ss must be > 0");
  if (!(b_ss > 0.0 && b_ss <= 1.0)) throw std::invalid_argument("b_ss must be in (0,1]");
  if (!(ss_accept_ratio > 0.0 && ss_accept_ratio < 1.0)) {
    throw std::invalid_argument("ss_accept_ratio must be in (0,1)");
  }
}

double scaling_factor(double p, const FusionParams& params) {
  if (!(p >= 0.0 && p <= 1.0)) {
    throw std::invalid_argument("classification probability must be in [0,1]");
  }
  return std::max(p / params.a_c, params.b_c);
}

namespace {

// Collects (classifier_id, probability) for one candidate in classifier-id
// order, enforcing uniqueness and the declared-roster policy.
std::map<std::string, double> ordered_probabilities(
    const std::string& candidate_id, const std::vector<ClassifierVerdict>& verdicts,
    VerdictPolicy policy, const std::vector<std::string>& declared_classifiers) {
  std::map<std::string, double> probs;
  for (const auto& v : verdicts) {
    if (v.candidate_id != candidate_id) {
      throw std::invalid_argument("verdict for candidate '" + v.candidate_id +
                                  "' passed while fusing candidate '" + candidate_id + "'");
    }
    if (!probs.emplace(v.classifier_id, v.probability).second) {
      throw std::invalid_argument("duplicate verdict from classifier '" + v.classifier_id +
                                  "' for candidate '" + candidate_id + "'");
    }
  }
  if (!declared_classifiers.empty()) {
    const std::set<std::string> declared(declared_classifiers.begin(),
                                         declared_classifiers.end());
    for (const auto& [cid, p] : probs) {
      if (!declared.contains(cid)) {
        throw std::invalid_argument("verdict from undeclared classifier '" + cid + "'");
      }
    }
    for (const auto& cid : declared) {
      if (!probs.contains(cid)) {
        if (policy == VerdictPolicy::strict) {
          throw std::invalid_argument("missing verdict from classifier '" + cid +
                                      "' for candidate '" + candidate_id + "'");
        }
        // lenient: neutral factor, no entry needed
      }
    }
  }
  return probs;
}

}  // namespace

Candidate fuse_classifiers(Candidate candidate,
                           const std::vector<ClassifierVerdict>& verdicts,
                           const FusionParams& params, VerdictPolicy policy,
                           const std::vector<std::string>& declared_classifiers) {
  params.validate();
  const auto probs =
      ordered_probabilities(candidate.id, verdicts, policy, declared_classifiers);
  for (const auto& [cid, p] : probs) {
    const double f = scaling_factor(p, params);
    candidate.score_fused *= f;
    candidate.applied_factors.push_back({cid, f});
  }
  return candidate;
}

Candidate fuse_segmentation(Candidate candidate, double coverage,
                            const FusionParams& params) {
  params.validate();
  if (!(coverage >= 0.0 && coverage <= 1.0)) {
    throw std::invalid_argument("mask coverage must be in [0,1]");
  }
  double f = 1.0;
  if (!(coverage > params.ss_accept_ratio)) {
    f = std::max(coverage * params.a_ss, params.b_ss);
  }
  candidate.score_fused *= f;
  candidate.applied_factors.push_back({"ss", f});
  return candidate;
}

std::vector<Candidate> hard_reject(const std::vector<Candidate>& candidates,
                                   const std::vector<ClassifierVerdict>& verdicts,
                                   double threshold, VerdictPolicy policy,
                                   const std::vector<std::string>& declared_classifiers) {
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw std::invalid_argument("hard-rejection threshold must be in (0,1)");
  }
  auto grouped = group_verdicts(verdicts);
  std::vector<Candidate> out;
  for (const auto& c : candidates) {
    auto it = grouped.find(c.id);
    static const std::vector<ClassifierVerdict> kNone;
    const auto& vs = it == grouped.end() ? kNone : it->second;
    const auto probs = ordered_probabilities(c.id, vs, policy, declared_classifiers);
    bool survives = true;
    for (const auto& [cid, p] : probs) {
      if (p < threshold) {
        survives = false;
        break;
      }
    }
    if (survives) out.push_back(c);
  }
  return out;
}

std::vector<Candidate> hard_reject_by_coverage(
    const std::vector<Candidate>& candidates,
    const std::unordered_map<std::string, double>& coverage_by_id, double min_coverage) {
  std::vector<Candidate> out;
  for (const auto& c : candidates) {
    auto it = coverage_by_id.find(c.id);
    const double cov = it == coverage_by_id.end() ? 0.0 : it->second;
    if (cov >= min_coverage) out.push_back(c);
  }
  return out;
}

std::vector<Candidate> collect_for_classification(const std::vector<Candidate>& candidates,
                                                  const FusionParams& params) {
  std::vector<Candidate> out;
  for (const auto& c : candidates) {
    if (c.score_generator > params.collect_min_score &&
        c.box.h > params.collect_min_height_px) {
      out.push_back(c);
    }
  }
  return out;
}

std::vector<Candidate> nms(const std::vector<Candidate>& candidates, double iou_threshold) {
  if (!(iou_threshold > 0.0 && iou_threshold < 1.0)) {
    throw std::invalid_argument("nms iou threshold must be in (0,1)");
  }
  std::vector<Candidate> sorted = candidates;
  std::sort(sorted.begin(), sorted.end(), [](const Candidate& a, const Candidate& b) {
    if (a.score_fused != b.score_fused) return a.score_fused > b.score_fused;
    return a.id < b.id;
  });
  std::vector<Candidate> kept;
  for (const auto& c : sorted) {
    bool suppressed = false;
    for (const auto& k : kept) {
      if (jaccard(c.box, k.box) > iou_threshold) {
        suppressed = true;
        break;
      }
    }
    if (!suppressed) kept.push_back(c);
  }
  return kept;
}

std::unordered_map<std::string, std::vector<ClassifierVerdict>> group_verdicts(
    const std::vector<ClassifierVerdict>& verdicts) {
  std::unordered_map<std::string, std::vector<ClassifierVerdict>> grouped;
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& v : verdicts) {
    if (!seen.emplace(v.candidate_id, v.classifier_id).second) {
      throw std::invalid_argument("duplicate verdict from classifier '" + v.classifier_id +
                                  "' for candidate '" + v.candidate_id + "'");
    }
    grouped[v.candidate_id].push_back(v);
  }
  return grouped;
}

std::vector<Candidate> fuse_with_providers(std::vector<Candidate> candidates,
                                           const std::vector<VerdictProvider>& providers,
                                           const FusionParams& params, VerdictPolicy policy) {
  // Fan out: each provider runs on its own thread; the overall latency is
  // that of the slowest provider.
  std::vector<std::future<std::vector<ClassifierVerdict>>> futures;
  futures.reserve(providers.size());
  for (const auto& provider : providers) {
    futures.push_back(std::async(std::launch::async,
                                 [&provider, &candidates] { return provider(candidates); }));
  }
  std::vector<ClassifierVerdict> all;
  for (auto& f : futures) {
    auto vs = f.get();
    all.insert(all.end(), vs.begin(), vs.end());
  }
  auto grouped = group_verdicts(all);
  for (auto& c : candidates) {
    auto it = grouped.find(c.id);
    if (it != grouped.end()) {
      c = fuse_classifiers(std::move(c), it->second, params, policy);
    }
  }
  return candidates;
}

}  // namespace pedfuse
