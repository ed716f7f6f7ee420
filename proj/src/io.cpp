#include "pedfuse/io.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <set>

#include <json.hpp>

namespace pedfuse {

using nlohmann::json;

namespace {

std::string stem_of(const std::string& path) {
  return std::filesystem::path(path).stem().string();
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParseError("cannot open '" + path + "'");
  return in;
}

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParseError("cannot open '" + path + "' for writing");
  return out;
}

json parse_line(const std::string& path, int line_no, const std::string& line) {
  json j = json::parse(line, nullptr, false);
  if (j.is_discarded() || !j.is_object()) {
    throw ParseError(path, line_no, "malformed JSON object");
  }
  return j;
}

std::string get_string(const json& j, const char* key, const std::string& path, int line_no) {
  if (!j.contains(key) || !j[key].is_string()) {
    throw ParseError(path, line_no, std::string("missing or non-string field '") + key + "'");
  }
  return j[key].get<std::string>();
}

double get_number(const json& j, const char* key, const std::string& path, int line_no) {
  if (!j.contains(key) || !j[key].is_number()) {
    throw ParseError(path, line_no, std::string("missing or non-numeric field '") + key + "'");
  }
  return j[key].get<double>();
}

BoundingBox get_bbox(const json& j, const char* key, const std::string& path, int line_no) {
  if (!j.contains(key) || !j[key].is_array() || j[key].size() != 4) {
    throw ParseError(path, line_no, std::string("field '") + key + "' must be [x,y,w,h]");
  }
  BoundingBox box;
  double* fields[4] = {&box.x, &box.y, &box.w, &box.h};
  for (int i = 0; i < 4; ++i) {
    if (!j[key][i].is_number()) {
      throw ParseError(path, line_no, std::string("field '") + key + "' must be numeric");
    }
    *fields[i] = j[key][i].get<double>();
  }
  if (!box.valid()) {
    throw ParseError(path, line_no, std::string("field '") + key + "' must have w > 0 and h > 0");
  }
  return box;
}

template <typename Fn>
void for_each_line(const std::string& path, Fn&& fn) {
  auto in = open_input(path);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    fn(line_no, line);
  }
}

std::string quote(const std::string& s) { return json(s).dump(); }

}  // namespace

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

std::vector<Candidate> read_detections(const std::string& path) {
  std::vector<Candidate> out;
  std::set<std::string> ids;
  for_each_line(path, [&](int line_no, const std::string& line) {
    const json j = parse_line(path, line_no, line);
    Candidate c;
    c.id = get_string(j, "id", path, line_no);
    if (!ids.insert(c.id).second) {
      throw ParseError(path, line_no, "duplicate candidate id '" + c.id + "'");
    }
    c.frame_id = get_string(j, "frame", path, line_no);
    c.box = get_bbox(j, "bbox", path, line_no);
    c.score_generator = get_number(j, "score", path, line_no);
    if (c.score_generator < 0.0 || c.score_generator > 1.0) {
      throw ParseError(path, line_no, "score must be in [0,1]");
    }
    c.score_fused = c.score_generator;
    if (j.contains("score_fused")) {
      c.score_fused = get_number(j, "score_fused", path, line_no);
      if (c.score_fused < 0.0) throw ParseError(path, line_no, "score_fused must be >= 0");
    }
    if (j.contains("factors")) {
      if (!j["factors"].is_array()) {
        throw ParseError(path, line_no, "field 'factors' must be an array");
      }
      for (const auto& f : j["factors"]) {
        if (!f.is_array() || f.size() != 2 || !f[0].is_string() || !f[1].is_number()) {
          throw ParseError(path, line_no, "each factor must be [source, value]");
        }
        c.applied_factors.push_back({f[0].get<std::string>(), f[1].get<double>()});
      }
    }
    out.push_back(std::move(c));
  });
  return out;
}

void write_detections(const std::string& path, const std::vector<Candidate>& candidates) {
  auto out = open_output(path);
  for (const auto& c : candidates) {
    out << "{\"id\":" << quote(c.id) << ",\"frame\":" << quote(c.frame_id) << ",\"bbox\":["
        << format_double(c.box.x) << ',' << format_double(c.box.y) << ','
        << format_double(c.box.w) << ',' << format_double(c.box.h)
        << "],\"score\":" << format_double(c.score_generator);
    if (c.score_fused != c.score_generator || !c.applied_factors.empty()) {
      out << ",\"score_fused\":" << format_double(c.score_fused) << ",\"factors\":[";
      for (size_t i = 0; i < c.applied_factors.size(); ++i) {
        if (i) out << ',';
        out << '[' << quote(c.applied_factors[i].source) << ','
            << format_double(c.applied_factors[i].factor) << ']';
      }
      out << ']';
    }
    out << "}\n";
  }
}

std::vector<GroundTruthAnnotation> read_annotations(const std::string& path) {
  std::vector<GroundTruthAnnotation> out;
  for_each_line(path, [&](int line_no, const std::string& line) {
    const json j = parse_line(path, line_no, line);
    GroundTruthAnnotation g;
    g.frame_id = get_string(j, "frame", path, line_no);
    g.box = get_bbox(j, "bbox", path, line_no);
    try {
      g.category = category_from_string(get_string(j, "category", path, line_no));
    } catch (const std::invalid_argument& e) {
      throw ParseError(path, line_no, e.what());
    }
    if (j.contains("visible_bbox")) {
      g.visible_box = get_bbox(j, "visible_bbox", path, line_no);
      if (jaccard(*g.visible_box, g.box) <= 0.0) {
        throw ParseError(path, line_no, "visible_bbox does not overlap bbox");
      }
    }
    if (j.contains("occlusion")) {
      const double occ = get_number(j, "occlusion", path, line_no);
      if (occ < 0.0 || occ > 1.0) throw ParseError(path, line_no, "occlusion must be in [0,1]");
      if (g.visible_box) {
        GroundTruthAnnotation derived = g;
        if (std::abs(derived.occlusion_fraction() - occ) > 0.02) {
          throw ParseError(path, line_no,
                           "occlusion inconsistent with visible_bbox (differ by > 0.02)");
        }
      } else {
        g.occlusion_override = occ;
      }
    }
    out.push_back(std::move(g));
  });
  return out;
}

void write_annotations(const std::string& path,
                       const std::vector<GroundTruthAnnotation>& annotations) {
  auto out = open_output(path);
  for (const auto& g : annotations) {
    out << "{\"frame\":" << quote(g.frame_id) << ",\"bbox\":[" << format_double(g.box.x) << ','
        << format_double(g.box.y) << ',' << format_double(g.box.w) << ','
        << format_double(g.box.h) << "],\"category\":" << quote(to_string(g.category));
    if (g.visible_box) {
      out << ",\"visible_bbox\":[" << format_double(g.visible_box->x) << ','
          << format_double(g.visible_box->y) << ',' << format_double(g.visible_box->w) << ','
          << format_double(g.visible_box->h) << ']';
    } else if (g.occlusion_override) {
      out << ",\"occlusion\":" << format_double(*g.occlusion_override);
    }
    out << "}\n";
  }
}

std::vector<ClassifierVerdict> read_verdicts(const std::string& path) {
  const std::string default_id = stem_of(path);
  std::vector<ClassifierVerdict> out;
  for_each_line(path, [&](int line_no, const std::string& line) {
    const json j = parse_line(path, line_no, line);
    ClassifierVerdict v;
    v.candidate_id = get_string(j, "candidate", path, line_no);
    v.classifier_id =
        j.contains("classifier") ? get_string(j, "classifier", path, line_no) : default_id;
    v.probability = get_number(j, "p", path, line_no);
    if (v.probability < 0.0 || v.probability > 1.0) {
      throw ParseError(path, line_no, "p must be in [0,1]");
    }
    out.push_back(std::move(v));
  });
  return out;
}

void write_verdicts(const std::string& path, const std::vector<ClassifierVerdict>& verdicts) {
  const std::string default_id = stem_of(path);
  auto out = open_output(path);
  for (const auto& v : verdicts) {
    out << "{\"candidate\":" << quote(v.candidate_id);
    if (v.classifier_id != default_id) out << ",\"classifier\":" << quote(v.classifier_id);
    out << ",\"p\":" << format_double(v.probability) << "}\n";
  }
}

SegmentationMask read_mask(const std::string& path) {
  auto in = open_input(path);
  std::string magic;
  in >> magic;
  if (magic != "P5") {
    throw ParseError("'" + path + "': expected binary PGM magic P5, got '" + magic + "'");
  }
  auto next_token = [&]() -> long {
    // Skips whitespace and '#' comments per the PGM grammar.
    while (true) {
      const int c = in.peek();
      if (c == '#') {
        std::string comment;
        std::getline(in, comment);
      } else if (std::isspace(c)) {
        in.get();
      } else {
        break;
      }
    }
    long v = -1;
    in >> v;
    if (!in) throw ParseError("'" + path + "': malformed PGM header");
    return v;
  };
  const long width = next_token();
  const long height = next_token();
  const long maxval = next_token();
  if (width <= 0 || height <= 0) throw ParseError("'" + path + "': zero or negative dimensions");
  if (maxval <= 0 || maxval > 255) throw ParseError("'" + path + "': maxval must be in 1..255");
  in.get();  // single whitespace byte after maxval

  SegmentationMask mask;
  mask.frame_id = stem_of(path);
  mask.width = static_cast<int>(width);
  mask.height = static_cast<int>(height);
  std::vector<char> raw(static_cast<size_t>(width) * height);
  in.read(raw.data(), static_cast<std::streamsize>(raw.size()));
  if (static_cast<size_t>(in.gcount()) != raw.size()) {
    throw ParseError("'" + path + "': truncated raster");
  }
  mask.pixels.resize(raw.size());
  for (size_t i = 0; i < raw.size(); ++i) {
    mask.pixels[i] = static_cast<unsigned char>(raw[i]) > 0 ? 1 : 0;
  }
  return mask;
}

void write_mask(const std::string& path, const SegmentationMask& mask) {
  auto out = open_output(path);
  out << "P5\n" << mask.width << ' ' << mask.height << "\n255\n";
  for (const auto p : mask.pixels) {
    out.put(p ? static_cast<char>(255) : static_cast<char>(0));
  }
}

void write_curve_csv(const std::string& path, const MissRateCurve& curve) {
  auto out = open_output(path);
  out << "fppi,miss_rate\n";
  for (const auto& [fppi, mr] : curve.points) {
    out << format_double(fppi) << ',' << format_double(mr) << '\n';
  }
  out << "# lamr=" << format_double(curve.lamr) << '\n';
}

}  // namespace pedfuse
