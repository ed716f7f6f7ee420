// Acceptance suite: one pass/fail line per criterion, nonzero exit when
// any criterion fails. Pass --cli <path-to-pedfuse> to enable the CLI
// determinism check.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>
#include <unistd.h>

#include "pedfuse/anchors.hpp"
#include "pedfuse/eval.hpp"
#include "pedfuse/fusion.hpp"
#include "pedfuse/io.hpp"
#include "pedfuse/rng.hpp"
#include "pedfuse/simulator.hpp"

using namespace pedfuse;
namespace fs = std::filesystem;

namespace {

int failures = 0;

void report(int number, const std::string& name, bool ok, const std::string& detail = "") {
  std::printf("[%s] criterion %2d: %s%s%s\n", ok ? "PASS" : "FAIL", number, name.c_str(),
              detail.empty() ? "" : " -- ", detail.c_str());
  if (!ok) ++failures;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// ---- shared simulated corpus (criteria 4 and 5) --------------------------

struct SimCorpus {
  Corpus frames;                       // raw generator scores
  std::vector<SyntheticScene> scenes;  // per-frame scenes for verdicts
};

SimCorpus build_sim_corpus(int n_frames, int peds_per_frame, std::uint64_t seed) {
  SimCorpus corpus;
  SplitMix64 seeder(seed);
  for (int f = 0; f < n_frames; ++f) {
    SceneConfig cfg;
    char id[16];
    std::snprintf(id, sizeof(id), "f%05d", f);
    cfg.frame_id = id;
    cfg.n_pedestrians = peds_per_frame;
    auto scene = generate_scene(cfg, seeder.next_u64());
    corpus.frames[cfg.frame_id] = {scene.candidates, scene.gt};
    corpus.scenes.push_back(std::move(scene));
  }
  return corpus;
}

std::vector<ClassifierVerdict> corpus_verdicts(const SimCorpus& corpus,
                                               SimClassifierSpec spec,
                                               std::uint64_t seed) {
  SplitMix64 seeder(seed);
  std::vector<ClassifierVerdict> all;
  for (const auto& scene : corpus.scenes) {
    spec.rng_seed = seeder.next_u64();
    const auto vs = simulate_verdicts(scene, spec);
    all.insert(all.end(), vs.begin(), vs.end());
  }
  return all;
}

Corpus fuse_corpus(const SimCorpus& corpus, const std::vector<ClassifierVerdict>& verdicts) {
  auto grouped = group_verdicts(verdicts);
  Corpus out;
  for (const auto& [frame, data] : corpus.frames) {
    FrameData fused{{}, data.gt};
    for (const auto& c : data.detections) {
      fused.detections.push_back(fuse_classifiers(c, grouped.at(c.id)));
    }
    out[frame] = std::move(fused);
  }
  return out;
}

Corpus hard_reject_corpus(const SimCorpus& corpus,
                          const std::vector<ClassifierVerdict>& verdicts, double threshold) {
  auto grouped = group_verdicts(verdicts);
  Corpus out;
  for (const auto& [frame, data] : corpus.frames) {
    FrameData kept{{}, data.gt};
    for (const auto& c : data.detections) {
      bool survives = true;
      for (const auto& v : grouped.at(c.id)) {
        if (v.probability < threshold) {
          survives = false;
          break;
        }
      }
      if (survives) kept.detections.push_back(c);
    }
    out[frame] = std::move(kept);
  }
  return out;
}

// ---- criteria ------------------------------------------------------------

void criterion_1() {
  const auto start = std::chrono::steady_clock::now();
  bool ok = true;
  for (const double p : {0.0, 0.07, 0.5, 0.7, 1.0}) {
    const double expected = std::max(p / 0.7, 0.1);
    if (std::abs(scaling_factor(p) - expected) > 1e-12) ok = false;
  }
  ok = ok && std::abs(scaling_factor(0.7) - 1.0) <= 1e-12;
  ok = ok && std::abs(scaling_factor(0.0) - 0.1) <= 1e-12;
  const double elapsed = seconds_since(start);
  report(1, "scaling factor matches max(p/0.7, 0.1)", ok && elapsed < 1.0,
         "elapsed " + std::to_string(elapsed) + "s");
}

void criterion_2() {
  const auto start = std::chrono::steady_clock::now();
  SplitMix64 rng(2024);
  bool ok = true;
  for (int trial = 0; trial < 1000 && ok; ++trial) {
    const int m = 1 + static_cast<int>(rng.next_u64() % 5);
    std::vector<ClassifierVerdict> verdicts;
    for (int k = 0; k < m; ++k) {
      verdicts.push_back({"c", "clf" + std::to_string(k), rng.next_double()});
    }
    Candidate base;
    base.id = "c";
    base.box = {0, 0, 20, 50};
    base.score_generator = rng.next_double();
    base.score_fused = base.score_generator;

    const auto fused = fuse_classifiers(base, verdicts);
    double product = base.score_generator;
    for (const auto& f : fused.applied_factors) product *= f.factor;
    if (std::abs(fused.score_fused - product) > 1e-12) ok = false;

    auto reversed = verdicts;
    std::reverse(reversed.begin(), reversed.end());
    if (std::abs(fuse_classifiers(base, reversed).score_fused - fused.score_fused) > 1e-12) {
      ok = false;
    }

    const size_t which = rng.next_u64() % verdicts.size();
    auto raised = verdicts;
    raised[which].probability += (1.0 - raised[which].probability) * rng.next_double();
    if (fuse_classifiers(base, raised).score_fused < fused.score_fused - 1e-12) ok = false;
  }
  const double elapsed = seconds_since(start);
  report(2, "fused score product, permutation invariance, monotonicity",
         ok && elapsed < 5.0, "elapsed " + std::to_string(elapsed) + "s");
}

void criterion_3() {
  Candidate base;
  base.id = "c";
  base.box = {0, 0, 20, 50};
  base.score_generator = 0.6;
  base.score_fused = 0.6;
  bool ok = std::abs(fuse_segmentation(base, 0.21).score_fused - 0.6) <= 1e-12;
  ok = ok && std::abs(fuse_segmentation(base, 0.1).score_fused - 0.6 * 0.4) <= 1e-12;
  ok = ok && std::abs(fuse_segmentation(base, 0.0).score_fused - 0.6 * 0.35) <= 1e-12;
  report(3, "segmentation fusion branches (a_ss=4, b_ss=0.35, accept>0.2)", ok);
}

void criteria_4_and_5() {
  const auto start = std::chrono::steady_clock::now();
  const auto corpus = build_sim_corpus(200, 2, 42);
  const auto setting = EvalSetting::by_name("Reasonable");

  SimClassifierSpec noisy;
  noisy.kind = SimClassifierSpec::Kind::noisy;
  noisy.tpr = 0.9;
  noisy.fpr = 0.1;
  noisy.classifier_id = "noisy_a";
  auto verdicts = corpus_verdicts(corpus, noisy, 1001);
  noisy.classifier_id = "noisy_b";
  const auto more = corpus_verdicts(corpus, noisy, 2002);
  verdicts.insert(verdicts.end(), more.begin(), more.end());

  const auto soft = compute_curve(fuse_corpus(corpus, verdicts), setting);
  const auto hard_frames = hard_reject_corpus(corpus, verdicts, 0.5);
  const auto hard = compute_curve(hard_frames, setting);

  // A true candidate hard rejection dropped but soft fusion retained.
  bool hard_missed_a_kept_candidate = false;
  for (const auto& [frame, data] : corpus.frames) {
    std::vector<BoundingBox> boxes;
    for (const auto& c : data.detections) boxes.push_back(c.box);
    const auto labels = label_candidates(boxes, data.gt);
    const auto& survivors = hard_frames.at(frame).detections;
    for (size_t i = 0; i < data.detections.size(); ++i) {
      if (!labels[i]) continue;
      bool survived = false;
      for (const auto& s : survivors) {
        if (s.id == data.detections[i].id) survived = true;
      }
      if (!survived) hard_missed_a_kept_candidate = true;  // soft keeps everything
    }
  }

  const double elapsed = seconds_since(start);
  std::ostringstream detail4;
  detail4 << "soft=" << soft.lamr << " hard=" << hard.lamr << " elapsed=" << elapsed << "s";
  report(4, "soft fusion beats hard rejection on the noisy corpus",
         soft.lamr < hard.lamr && hard_missed_a_kept_candidate && elapsed < 30.0,
         detail4.str());

  const auto start5 = std::chrono::steady_clock::now();
  const double plain = compute_curve(corpus.frames, setting).lamr;

  SimClassifierSpec oracle;  // defaults: oracle, tpr 1, fpr 0
  const double with_oracle =
      compute_curve(fuse_corpus(corpus, corpus_verdicts(corpus, oracle, 3003)), setting).lamr;

  SimClassifierSpec adversary;
  adversary.kind = SimClassifierSpec::Kind::noisy;
  adversary.classifier_id = "adversary";
  adversary.tpr = 0.0;
  adversary.fpr = 1.0;
  const double adversarial_hard =
      compute_curve(
          hard_reject_corpus(corpus, corpus_verdicts(corpus, adversary, 4004), 0.5), setting)
          .lamr;

  const double elapsed5 = seconds_since(start5);
  std::ostringstream detail5;
  detail5 << "oracle=" << with_oracle << " plain=" << plain
          << " adversarial_hard=" << adversarial_hard << " elapsed=" << elapsed5 << "s";
  report(5, "oracle < generator alone < adversarial hard rejection",
         with_oracle < plain && plain < adversarial_hard && elapsed5 < 30.0, detail5.str());
}

void criterion_6() {
  // Independent oracle: direct geometric mean over the nine log-spaced
  // reference FPPI points with linear search over the curve.
  auto oracle_lamr = [](const std::vector<std::pair<double, double>>& points) {
    double sum = 0.0;
    for (int k = 0; k <= 8; ++k) {
      const double ref = std::pow(10.0, -2.0 + k / 4.0);
      double mr = points.front().second;
      for (const auto& [fppi, rate] : points) {
        if (fppi <= ref) mr = rate;
      }
      sum += std::log(std::max(mr, 1e-10));
    }
    return std::exp(sum / 9.0);
  };

  const std::vector<std::vector<std::pair<double, double>>> fixtures{
      {{0.0, 0.5}, {1.0, 0.5}},
      {{0.0, 0.4}, {0.09, 0.1}},
      {{0.0, 1.0}, {0.02, 0.6}, {0.3, 0.2}, {0.9, 0.05}},
  };
  bool ok = true;
  for (const auto& points : fixtures) {
    MissRateCurve curve;
    curve.points = points;
    if (std::abs(compute_lamr(curve) - oracle_lamr(points)) > 1e-9) ok = false;
  }
  MissRateCurve mixed;
  mixed.points = fixtures[1];
  ok = ok && std::abs(compute_lamr(mixed) - 0.1851749424574581) <= 1e-9;
  report(6, "compute_lamr matches the brute-force geometric mean", ok);
}

void criterion_7() {
  SplitMix64 rng(777);
  auto person = [](const BoundingBox& box) {
    GroundTruthAnnotation g;
    g.frame_id = "f";
    g.box = box;
    return g;
  };
  // Exhaustive assignment maximizing TP count.
  std::function<int(const std::vector<Candidate>&, const std::vector<GroundTruthAnnotation>&,
                    std::vector<int>&, size_t)>
      search = [&](const std::vector<Candidate>& dets,
                   const std::vector<GroundTruthAnnotation>& gt, std::vector<int>& assigned,
                   size_t i) -> int {
    if (i == dets.size()) return 0;
    int best = search(dets, gt, assigned, i + 1);
    for (size_t g = 0; g < gt.size(); ++g) {
      if (assigned[g]) continue;
      if (jaccard(dets[i].box, gt[g].box) >= 0.5) {
        assigned[g] = 1;
        best = std::max(best, 1 + search(dets, gt, assigned, i + 1));
        assigned[g] = 0;
      }
    }
    return best;
  };

  bool ok = true;
  int accepted = 0;
  while (accepted < 100) {
    std::vector<GroundTruthAnnotation> gt;
    const int n_gt = 1 + static_cast<int>(rng.next_u64() % 3);
    for (int g = 0; g < n_gt; ++g) {
      gt.push_back(person({rng.uniform(0.0, 400.0), rng.uniform(0.0, 300.0),
                           rng.uniform(20.0, 40.0), rng.uniform(50.0, 100.0)}));
    }
    std::vector<Candidate> dets;
    const int n_det = 1 + static_cast<int>(rng.next_u64() % 5);
    for (int d = 0; d < n_det; ++d) {
      Candidate c;
      c.id = "d" + std::to_string(d);
      c.frame_id = "f";
      if (rng.bernoulli(0.6)) {
        const auto& base = gt[rng.next_u64() % gt.size()].box;
        c.box = {base.x + rng.uniform(-5.0, 5.0), base.y + rng.uniform(-5.0, 5.0), base.w,
                 base.h};
      } else {
        c.box = {rng.uniform(0.0, 400.0), rng.uniform(0.0, 300.0), rng.uniform(20.0, 40.0),
                 rng.uniform(50.0, 100.0)};
      }
      c.score_generator = rng.next_double();
      c.score_fused = c.score_generator;
      dets.push_back(std::move(c));
    }
    bool ambiguous = false;
    for (const auto& d : dets) {
      int hits = 0;
      for (const auto& g : gt) {
        if (jaccard(d.box, g.box) >= 0.5) ++hits;
      }
      if (hits > 1) ambiguous = true;
    }
    if (ambiguous) continue;
    ++accepted;
    std::vector<int> assigned(gt.size(), 0);
    if (match_frame(dets, gt, {}).tp != search(dets, gt, assigned, 0)) ok = false;
  }
  report(7, "greedy matching equals exhaustive maxima on 100 random frames", ok);
}

void criterion_8() {
  bool ok = true;
  const AnchorConfig config;
  for (const LayerSpec spec : {LayerSpec{1, 1, 0}, LayerSpec{38, 38, 0}, LayerSpec{10, 6, 4}}) {
    const auto boxes = generate_default_boxes(spec, config);
    if (boxes.size() != static_cast<size_t>(spec.grid_w) * spec.grid_h * 7) ok = false;
    for (size_t i = 0; i < boxes.size(); ++i) {
      if (std::abs(boxes[i].w / boxes[i].h - config.aspect_ratios[i % 7]) > 1e-9) ok = false;
    }
  }
  const auto layer0 = generate_default_boxes({1, 1, 0}, config);
  ok = ok && std::abs(layer0[AnchorConfig::kAltRatioSlot].h - 48.0) <= 1e-9;
  report(8, "anchor counts, aspect ratios, and the 48 px layer-0 0.41b height", ok);
}

void criterion_9() {
  const auto start = std::chrono::steady_clock::now();

  // 100,000 candidates fused against 2 verdict sets.
  SplitMix64 rng(99);
  std::vector<Candidate> pool;
  pool.reserve(100000);
  for (int i = 0; i < 100000; ++i) {
    Candidate c;
    c.id = "c" + std::to_string(i);
    c.frame_id = "f" + std::to_string(i / 10);
    c.box = {rng.uniform(0.0, 600.0), rng.uniform(0.0, 400.0), 24, 60};
    c.score_generator = rng.next_double();
    c.score_fused = c.score_generator;
    pool.push_back(std::move(c));
  }
  auto provider = [](const std::string& clf, std::uint64_t seed) -> VerdictProvider {
    return [clf, seed](const std::vector<Candidate>& cs) {
      SplitMix64 r(seed);
      std::vector<ClassifierVerdict> out;
      out.reserve(cs.size());
      for (const auto& c : cs) out.push_back({c.id, clf, r.next_double()});
      return out;
    };
  };
  const auto fused = fuse_with_providers(pool, {provider("a", 1), provider("b", 2)});
  bool ok = fused.size() == pool.size();

  // 10,000-frame corpus evaluated in parallel and sequentially.
  Corpus corpus;
  SplitMix64 crng(7);
  for (int f = 0; f < 10000; ++f) {
    char id[16];
    std::snprintf(id, sizeof(id), "f%05d", f);
    FrameData data;
    for (int g = 0; g < 2; ++g) {
      GroundTruthAnnotation gt;
      gt.frame_id = id;
      gt.box = {crng.uniform(0.0, 500.0), crng.uniform(0.0, 300.0), 24, crng.uniform(50.0, 150.0)};
      data.gt.push_back(gt);
      Candidate c;
      c.id = std::string(id) + "_d" + std::to_string(g);
      c.frame_id = id;
      c.box = {gt.box.x + crng.uniform(-4.0, 4.0), gt.box.y, gt.box.w, gt.box.h};
      c.score_generator = crng.next_double();
      c.score_fused = c.score_generator;
      data.detections.push_back(std::move(c));
    }
    Candidate fp;
    fp.id = std::string(id) + "_fp";
    fp.frame_id = id;
    fp.box = {crng.uniform(0.0, 500.0), 0, 24, 80};
    fp.score_generator = crng.next_double();
    fp.score_fused = fp.score_generator;
    data.detections.push_back(std::move(fp));
    corpus[id] = std::move(data);
  }
  const auto setting = EvalSetting::by_name("Reasonable");
  const auto parallel = compute_curve(corpus, setting, 0.5, 4);
  const double elapsed = seconds_since(start);

  const auto sequential = compute_curve(corpus, setting, 0.5, 1);
  ok = ok && parallel.lamr == sequential.lamr &&
       parallel.points.size() == sequential.points.size();
  for (size_t i = 0; ok && i < parallel.points.size(); ++i) {
    if (parallel.points[i] != sequential.points[i]) ok = false;
  }

  report(9, "fuse 100k candidates + evaluate 10k frames under 2 s, parallel == sequential",
         ok && elapsed < 2.0, "elapsed " + std::to_string(elapsed) + "s");
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void criterion_10(const std::string& cli) {
  if (cli.empty()) {
    report(10, "CLI determinism", false, "no --cli path given");
    return;
  }
  const fs::path work =
      fs::temp_directory_path() / ("pedfuse_accept_" + std::to_string(::getpid()));
  fs::remove_all(work);
  fs::create_directories(work);
  auto run = [&](const std::string& args) {
    const std::string cmd = "\"" + cli + "\" " + args + " > /dev/null 2>&1";
    return std::system(cmd.c_str()) == 0;
  };
  bool ok = true;
  for (const std::string rep : {"r1", "r2"}) {
    const std::string dir = (work / rep).string();
    ok = ok && run("simulate --frames 20 --peds 2 --seed 9 --mask-quality 0.9"
                   " --classifier oracle --classifier noisy:cnn:0.9:0.1 --out-dir " + dir);
    ok = ok && run("fuse --detections " + dir + "/detections.jsonl --verdicts " + dir +
                   "/oracle.jsonl --verdicts " + dir + "/cnn.jsonl --masks " + dir +
                   "/masks --out " + dir + "/fused.jsonl");
    ok = ok && run("curve --detections " + dir + "/fused.jsonl --annotations " + dir +
                   "/annotations.jsonl --setting Reasonable --out " + dir + "/curve.csv");
    ok = ok && run("anchors --layer 8x6 --layer 4x3 --out " + dir + "/anchors.jsonl");
  }
  for (const std::string file : {"detections.jsonl", "annotations.jsonl", "oracle.jsonl",
                                 "cnn.jsonl", "fused.jsonl", "curve.csv", "anchors.jsonl",
                                 "masks/f00000.pgm"}) {
    if (slurp(work / "r1" / file) != slurp(work / "r2" / file)) ok = false;
    if (slurp(work / "r1" / file).empty()) ok = false;
  }
  fs::remove_all(work);
  report(10, "CLI reruns produce byte-identical outputs", ok);
}

}  // namespace

int main(int argc, char** argv) {
  std::string cli;
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--cli") cli = argv[i + 1];
  }
  criterion_1();
  criterion_2();
  criterion_3();
  criteria_4_and_5();
  criterion_6();
  criterion_7();
  criterion_8();
  criterion_9();
  criterion_10(cli);
  if (failures > 0) {
    std::printf("%d criterion(s) failed\n", failures);
    return 1;
  }
  std::printf("all criteria passed\n");
  return 0;
}
