#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "pedfuse/anchors.hpp"
#include "pedfuse/eval.hpp"
#include "pedfuse/fusion.hpp"
#include "pedfuse/io.hpp"
#include "pedfuse/pipeline.hpp"
#include "pedfuse/rng.hpp"
#include "pedfuse/simulator.hpp"

namespace fs = std::filesystem;
using namespace pedfuse;

namespace {

void add_fusion_flags(CLI::App* cmd, FusionParams& params) {
  cmd->add_option("--a-c", params.a_c, "Confident classification probability");
  cmd->add_option("--b-c", params.b_c, "Classifier factor floor");
  cmd->add_option("--a-ss", params.a_ss, "Segmentation coverage slope");
  cmd->add_option("--b-ss", params.b_ss, "Segmentation factor floor");
  cmd->add_option("--ss-accept", params.ss_accept_ratio,
                  "Coverage above which the segmentation vote accepts unchanged");
  cmd->add_option("--collect-min-score", params.collect_min_score,
                  "Collection filter: minimum generator score (strict)");
  cmd->add_option("--collect-min-height", params.collect_min_height_px,
                  "Collection filter: minimum box height in pixels (strict)");
}

void add_pipeline_flags(CLI::App* cmd, RunConfig& config, bool& lenient,
                        std::string& prefilter, double& nms_iou) {
  cmd->add_option("--detections", config.detections_path, "Candidate detections (JSONL)")
      ->required();
  cmd->add_option("--verdicts", config.verdict_paths, "Classifier verdict files (JSONL)");
  cmd->add_option("--masks", config.mask_dir, "Directory of per-frame P5 masks");
  cmd->add_flag("--hard", config.hard_rejection, "Hard rejection instead of soft fusion");
  cmd->add_option("--hard-threshold", config.hard_threshold,
                  "Classifier probability floor for --hard");
  cmd->add_option("--hard-min-coverage", config.hard_min_coverage,
                  "Mask coverage floor for --hard");
  cmd->add_flag("--lenient", lenient, "Treat missing verdicts as neutral (factor 1)");
  cmd->add_option("--prefilter", prefilter, "Collection pre-filter: off, drop, or skip")
      ->check(CLI::IsMember({"off", "drop", "skip"}));
  cmd->add_option("--nms", nms_iou, "Per-frame NMS IoU threshold");
  add_fusion_flags(cmd, config.fusion);
}

void finish_pipeline_config(RunConfig& config, bool lenient, const std::string& prefilter,
                            double nms_iou) {
  if (lenient) config.verdict_policy = VerdictPolicy::lenient;
  if (prefilter == "drop") config.prefilter = RunConfig::PreFilter::drop;
  if (prefilter == "skip") config.prefilter = RunConfig::PreFilter::skip;
  if (nms_iou > 0.0) config.nms_iou = nms_iou;
}

int cmd_fuse(const RunConfig& config, const std::string& out_path) {
  write_detections(out_path, run_fusion(config));
  return 0;
}

int cmd_eval(const RunConfig& config, const std::string& curve_out,
             const std::string& fused_out) {
  const auto result = run_pipeline(config);
  if (!fused_out.empty()) write_detections(fused_out, result.fused);
  if (!curve_out.empty()) write_curve_csv(curve_out, result.curve);
  std::cout << "lamr=" << format_double(result.curve.lamr) << "\n";
  return 0;
}

int cmd_curve(const std::string& detections_path, const std::string& annotations_path,
              const std::string& setting, double iou, int threads,
              const std::string& out_path) {
  const auto detections = read_detections(detections_path);
  const auto annotations = read_annotations(annotations_path);
  const auto curve =
      compute_curve(build_corpus(detections, annotations), EvalSetting::by_name(setting),
                    iou, threads);
  write_curve_csv(out_path, curve);
  std::cout << "lamr=" << format_double(curve.lamr) << "\n";
  return 0;
}

int cmd_label(const std::string& detections_path, const std::string& annotations_path,
              bool no_collect, const FusionParams& params, const std::string& out_path) {
  auto candidates = read_detections(detections_path);
  if (!no_collect) candidates = collect_for_classification(candidates, params);
  const auto annotations = read_annotations(annotations_path);

  std::map<std::string, std::vector<GroundTruthAnnotation>> gt_by_frame;
  for (const auto& g : annotations) gt_by_frame[g.frame_id].push_back(g);

  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + out_path + "' for writing");
  for (const auto& c : candidates) {
    const auto it = gt_by_frame.find(c.frame_id);
    static const std::vector<GroundTruthAnnotation> kNone;
    const auto labels = label_candidates({c.box}, it == gt_by_frame.end() ? kNone : it->second);
    out << "{\"id\":" << nlohmann::json(c.id).dump() << ",\"label\":" << labels[0] << "}\n";
  }
  return 0;
}

int cmd_anchors(const std::vector<std::string>& layers, double image_w, double image_h,
                const std::string& out_path) {
  AnchorConfig config;
  config.image_w = image_w;
  config.image_h = image_h;
  std::vector<Candidate> out;
  for (size_t li = 0; li < layers.size(); ++li) {
    int gw = 0, gh = 0;
    if (std::sscanf(layers[li].c_str(), "%dx%d", &gw, &gh) != 2) {
      throw std::runtime_error("--layer expects WxH, got '" + layers[li] + "'");
    }
    const auto boxes =
        generate_default_boxes({gw, gh, static_cast<int>(li)}, config);
    for (size_t b = 0; b < boxes.size(); ++b) {
      char id[32];
      std::snprintf(id, sizeof(id), "anchor_l%zu_%06zu", li, b);
      out.push_back({id, "anchors", boxes[b], 0.0, 0.0, {}});
    }
  }
  write_detections(out_path, out);
  return 0;
}

struct SimOptions {
  int frames = 10;
  int peds_per_frame = 2;
  double fp_per_tp = 2.4;
  std::uint64_t seed = 1;
  double image_w = 640.0;
  double image_h = 480.0;
  double jitter = 0.08;
  double mask_quality = -1.0;  // < 0: no masks
  std::vector<std::string> classifiers;  // "oracle:NAME" or "noisy:NAME:TPR:FPR"
  std::string out_dir;
};

SimClassifierSpec parse_classifier_spec(const std::string& text, std::uint64_t seed) {
  SimClassifierSpec spec;
  spec.rng_seed = seed;
  const auto parts = [&] {
    std::vector<std::string> out;
    size_t pos = 0;
    while (true) {
      const size_t next = text.find(':', pos);
      out.push_back(text.substr(pos, next - pos));
      if (next == std::string::npos) break;
      pos = next + 1;
    }
    return out;
  }();
  if (parts[0] == "oracle" && parts.size() <= 2) {
    spec.kind = SimClassifierSpec::Kind::oracle;
    spec.classifier_id = parts.size() == 2 ? parts[1] : "oracle";
    return spec;
  }
  if (parts[0] == "noisy" && parts.size() == 4) {
    spec.kind = SimClassifierSpec::Kind::noisy;
    spec.classifier_id = parts[1];
    spec.tpr = std::stod(parts[2]);
    spec.fpr = std::stod(parts[3]);
    return spec;
  }
  throw std::runtime_error("--classifier expects 'oracle[:NAME]' or 'noisy:NAME:TPR:FPR', got '" +
                           text + "'");
}

int cmd_simulate(const SimOptions& opt) {
  fs::create_directories(opt.out_dir);
  const fs::path dir(opt.out_dir);

  std::vector<Candidate> detections;
  std::vector<GroundTruthAnnotation> annotations;
  std::vector<SyntheticScene> scenes;
  SplitMix64 seeder(opt.seed);
  for (int f = 0; f < opt.frames; ++f) {
    SceneConfig cfg;
    char frame_id[16];
    std::snprintf(frame_id, sizeof(frame_id), "f%05d", f);
    cfg.frame_id = frame_id;
    cfg.image_w = opt.image_w;
    cfg.image_h = opt.image_h;
    cfg.n_pedestrians = opt.peds_per_frame;
    cfg.fp_per_tp = opt.fp_per_tp;
    cfg.jitter = opt.jitter;
    auto scene = generate_scene(cfg, seeder.next_u64());
    detections.insert(detections.end(), scene.candidates.begin(), scene.candidates.end());
    annotations.insert(annotations.end(), scene.gt.begin(), scene.gt.end());
    scenes.push_back(std::move(scene));
  }
  write_detections((dir / "detections.jsonl").string(), detections);
  write_annotations((dir / "annotations.jsonl").string(), annotations);

  for (size_t k = 0; k < opt.classifiers.size(); ++k) {
    auto spec = parse_classifier_spec(opt.classifiers[k], 0);
    std::vector<ClassifierVerdict> verdicts;
    SplitMix64 vseeder(opt.seed ^ (0xC2B2AE3D27D4EB4FULL * (k + 1)));
    for (const auto& scene : scenes) {
      spec.rng_seed = vseeder.next_u64();
      const auto vs = simulate_verdicts(scene, spec);
      verdicts.insert(verdicts.end(), vs.begin(), vs.end());
    }
    write_verdicts((dir / (spec.classifier_id + ".jsonl")).string(), verdicts);
  }

  if (opt.mask_quality >= 0.0) {
    fs::create_directories(dir / "masks");
    for (const auto& scene : scenes) {
      write_mask((dir / "masks" / (scene.frame_id + ".pgm")).string(),
                 synthesize_mask(scene, opt.mask_quality));
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Soft-rejection detection fusion and Caltech-protocol evaluation"};
  app.require_subcommand(1);

  // fuse
  RunConfig fuse_config;
  bool fuse_lenient = false;
  std::string fuse_prefilter = "off";
  double fuse_nms = 0.0;
  std::string fuse_out;
  auto* fuse = app.add_subcommand("fuse", "Fuse candidate scores with classifier/mask votes");
  add_pipeline_flags(fuse, fuse_config, fuse_lenient, fuse_prefilter, fuse_nms);
  fuse->add_option("--out", fuse_out, "Output fused detections (JSONL)")->required();

  // eval
  RunConfig eval_config;
  bool eval_lenient = false;
  std::string eval_prefilter = "off";
  double eval_nms = 0.0;
  std::string eval_curve_out, eval_fused_out;
  auto* eval = app.add_subcommand("eval", "Run the full pipeline and report L-AMR");
  add_pipeline_flags(eval, eval_config, eval_lenient, eval_prefilter, eval_nms);
  eval->add_option("--annotations", eval_config.annotations_path, "Ground truth (JSONL)")
      ->required();
  eval->add_option("--setting", eval_config.setting_name, "Evaluation setting name");
  eval->add_option("--iou", eval_config.eval_iou, "Matching IoU threshold");
  eval->add_option("--threads", eval_config.threads, "Per-frame evaluation threads");
  eval->add_option("--curve-out", eval_curve_out, "Miss-rate curve CSV path");
  eval->add_option("--fused-out", eval_fused_out, "Fused detections JSONL path");

  // curve
  std::string curve_detections, curve_annotations, curve_setting = "Reasonable", curve_out;
  double curve_iou = 0.5;
  int curve_threads = 1;
  auto* curve = app.add_subcommand("curve", "Miss-rate curve for already-fused detections");
  curve->add_option("--detections", curve_detections, "Fused detections (JSONL)")->required();
  curve->add_option("--annotations", curve_annotations, "Ground truth (JSONL)")->required();
  curve->add_option("--setting", curve_setting, "Evaluation setting name");
  curve->add_option("--iou", curve_iou, "Matching IoU threshold");
  curve->add_option("--threads", curve_threads, "Per-frame evaluation threads");
  curve->add_option("--out", curve_out, "Curve CSV path")->required();

  // label
  std::string label_detections, label_annotations, label_out;
  bool label_no_collect = false;
  FusionParams label_params;
  auto* label = app.add_subcommand(
      "label", "Overlap-label candidates after the collection thresholds");
  label->add_option("--detections", label_detections, "Candidate detections (JSONL)")
      ->required();
  label->add_option("--annotations", label_annotations, "Ground truth (JSONL)")->required();
  label->add_flag("--no-collect", label_no_collect, "Skip the collection pre-filter");
  add_fusion_flags(label, label_params);
  label->add_option("--out", label_out, "Output labels (JSONL)")->required();

  // anchors
  std::vector<std::string> anchor_layers;
  double anchor_image_w = 640.0, anchor_image_h = 480.0;
  std::string anchor_out;
  auto* anchors = app.add_subcommand("anchors", "Emit the default-box grid as detections");
  anchors->add_option("--layer", anchor_layers, "Grid size WxH, one per output layer (max 7)")
      ->required();
  anchors->add_option("--image-w", anchor_image_w, "Image width in pixels");
  anchors->add_option("--image-h", anchor_image_h, "Image height in pixels");
  anchors->add_option("--out", anchor_out, "Output detections (JSONL)")->required();

  // simulate
  SimOptions sim;
  auto* simulate = app.add_subcommand("simulate", "Generate a synthetic corpus");
  simulate->add_option("--frames", sim.frames, "Number of frames");
  simulate->add_option("--peds", sim.peds_per_frame, "Pedestrians per frame");
  simulate->add_option("--fp-ratio", sim.fp_per_tp, "False positives per true candidate");
  simulate->add_option("--seed", sim.seed, "Corpus seed");
  simulate->add_option("--image-w", sim.image_w, "Frame width");
  simulate->add_option("--image-h", sim.image_h, "Frame height");
  simulate->add_option("--jitter", sim.jitter, "Candidate jitter relative to box size");
  simulate->add_option("--mask-quality", sim.mask_quality,
                       "Also write masks at this coverage quality (0..1)");
  simulate->add_option("--classifier", sim.classifiers,
                       "Simulated classifier: 'oracle[:NAME]' or 'noisy:NAME:TPR:FPR'");
  simulate->add_option("--out-dir", sim.out_dir, "Output directory")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (*fuse) {
      finish_pipeline_config(fuse_config, fuse_lenient, fuse_prefilter, fuse_nms);
      return cmd_fuse(fuse_config, fuse_out);
    }
    if (*eval) {
      finish_pipeline_config(eval_config, eval_lenient, eval_prefilter, eval_nms);
      return cmd_eval(eval_config, eval_curve_out, eval_fused_out);
    }
    if (*curve) {
      return cmd_curve(curve_detections, curve_annotations, curve_setting, curve_iou,
                       curve_threads, curve_out);
    }
    if (*label) {
      return cmd_label(label_detections, label_annotations, label_no_collect, label_params,
                       label_out);
    }
    if (*anchors) {
      if (anchor_layers.size() > 7) throw std::runtime_error("at most 7 output layers");
      return cmd_anchors(anchor_layers, anchor_image_w, anchor_image_h, anchor_out);
    }
    if (*simulate) return cmd_simulate(sim);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
