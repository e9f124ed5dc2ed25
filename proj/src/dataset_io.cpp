// Copyright 2026 The polyenc Authors
// SPDX-License-Identifier: Apache-2.0

#include "polyenc/dataset_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#include <json.hpp>

#include "polyenc/error.hpp"
#include "polyenc/random.hpp"

namespace polyenc::io {

using nlohmann::json;

namespace {

std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void spill(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  out << text;
  if (!out) throw Error(ErrorCode::kIoError, "write failed for " + path.string());
}

json parse_json(std::string_view text) {
  try {
    return json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    const std::size_t end = std::min<std::size_t>(e.byte == 0 ? 0 : e.byte - 1, text.size());
    const auto line = 1 + std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(end), '\n');
    throw Error(ErrorCode::kParseError, "invalid JSON at line " + std::to_string(line) + ": " + e.what());
  }
}

[[noreturn]] void field_error(const std::string& where, const std::string& what) {
  throw Error(ErrorCode::kParseError, where + ": " + what);
}

const json& member(const json& obj, const char* key, const std::string& where) {
  if (!obj.is_object()) field_error(where, "expected an object");
  auto it = obj.find(key);
  if (it == obj.end()) field_error(where, std::string("missing field '") + key + "'");
  return *it;
}

std::int64_t as_int(const json& v, const std::string& where) {
  if (v.is_number_integer()) return v.get<std::int64_t>();
  if (v.is_number_float()) {
    const double d = v.get<double>();
    if (std::floor(d) == d) return static_cast<std::int64_t>(d);
  }
  field_error(where, "expected an integer");
}

double as_real(const json& v, const std::string& where) {
  if (!v.is_number()) field_error(where, "expected a number");
  return v.get<double>();
}

// Flat [x1, y1, x2, y2, ...] list; nullopt if it is not one.
std::optional<std::vector<Point>> flat_points(const json& v) {
  if (!v.is_array() || v.size() % 2 != 0) return std::nullopt;
  std::vector<Point> points;
  points.reserve(v.size() / 2);
  for (std::size_t i = 0; i < v.size(); i += 2) {
    if (!v[i].is_number() || !v[i + 1].is_number()) return std::nullopt;
    points.push_back({v[i].get<double>(), v[i + 1].get<double>()});
  }
  return points;
}

json flatten(std::span<const Point> points) {
  json out = json::array();
  for (const Point& p : points) {
    out.push_back(p.x);
    out.push_back(p.y);
  }
  return out;
}

const char* scheme_name(Scheme s) { return s == Scheme::kZeroPad ? "zeropad" : "uniform"; }

}  // namespace

CocoDocument parse_coco(std::string_view text) {
  const json doc = parse_json(text);
  const json& images = member(doc, "images", "document");
  const json& annotations = member(doc, "annotations", "document");
  if (!images.is_array()) field_error("images", "expected an array");
  if (!annotations.is_array()) field_error("annotations", "expected an array");

  std::map<std::int64_t, Scene> by_id;
  for (std::size_t i = 0; i < images.size(); ++i) {
    const std::string where = "images[" + std::to_string(i) + "]";
    Scene scene;
    scene.image_id = as_int(member(images[i], "id", where), where + ".id");
    const json& name = member(images[i], "file_name", where);
    if (!name.is_string()) field_error(where + ".file_name", "expected a string");
    scene.file_name = name.get<std::string>();
    scene.width = static_cast<int>(as_int(member(images[i], "width", where), where + ".width"));
    scene.height = static_cast<int>(as_int(member(images[i], "height", where), where + ".height"));
    if (scene.width <= 0 || scene.height <= 0) field_error(where, "image size must be positive");
    if (!by_id.emplace(scene.image_id, std::move(scene)).second) {
      field_error(where + ".id", "duplicate image id");
    }
  }

  CocoDocument out;
  for (std::size_t i = 0; i < annotations.size(); ++i) {
    const std::string where = "annotations[" + std::to_string(i) + "]";
    const std::int64_t image_id = as_int(member(annotations[i], "image_id", where), where + ".image_id");
    auto scene = by_id.find(image_id);
    if (scene == by_id.end()) field_error(where + ".image_id", "unknown image " + std::to_string(image_id));

    const json& segmentation = member(annotations[i], "segmentation", where);
    auto skip = [&](const std::string& why) {
      ++out.malformed;
      out.warnings.push_back(where + ": " + why);
    };
    if (!segmentation.is_array() || segmentation.empty()) {
      skip("segmentation is not a polygon list");
      continue;
    }
    const json& first = segmentation[0];
    if (!first.is_array()) {
      skip("segmentation is not a polygon list");
      continue;
    }
    if (first.size() % 2 != 0) {
      skip("odd coordinate count " + std::to_string(first.size()));
      continue;
    }
    if (first.size() < 6) {
      skip("fewer than 3 vertices");
      continue;
    }
    auto points = flat_points(first);
    if (!points) {
      skip("non-numeric coordinate");
      continue;
    }
    try {
      scene->second.instances.push_back(Ring::from_points_dedup(*points));
    } catch (const Error& e) {
      skip(e.what());
    }
  }
  for (auto& [id, scene] : by_id) out.scenes.push_back(std::move(scene));
  return out;
}

CocoDocument read_coco(const std::filesystem::path& path) { return parse_coco(slurp(path)); }

std::string coco_to_string(std::span<const Scene> scenes) {
  json images = json::array();
  json annotations = json::array();
  std::int64_t next_id = 1;
  for (const Scene& scene : scenes) {
    images.push_back({{"id", scene.image_id},
                      {"file_name", scene.file_name},
                      {"width", scene.width},
                      {"height", scene.height}});
    for (const Ring& ring : scene.instances) {
      double x0 = ring[0].x, y0 = ring[0].y, x1 = x0, y1 = y0;
      for (const Point& p : ring.vertices()) {
        x0 = std::min(x0, p.x);
        y0 = std::min(y0, p.y);
        x1 = std::max(x1, p.x);
        y1 = std::max(y1, p.y);
      }
      annotations.push_back({{"id", next_id++},
                             {"image_id", scene.image_id},
                             {"category_id", 100},
                             {"segmentation", json::array({flatten(ring.vertices())})},
                             {"bbox", {x0, y0, x1 - x0, y1 - y0}},
                             {"area", std::abs(signed_area(ring))},
                             {"iscrowd", 0}});
    }
  }
  json doc = {{"images", std::move(images)},
              {"annotations", std::move(annotations)},
              {"categories", json::array({{{"id", 100}, {"name", "building"}}})}};
  return doc.dump() + "\n";
}

void write_coco(std::span<const Scene> scenes, const std::filesystem::path& path) {
  spill(path, coco_to_string(scenes));
}

// ---------------------------------------------------------------------------
// Synthetic scenes

namespace {

enum class Shape { kRectangle, kRotatedRectangle, kLShape, kRegularPolygon };

std::vector<Point> rotated(std::vector<Point> pts, double theta) {
  const double c = std::cos(theta), s = std::sin(theta);
  for (Point& p : pts) p = {c * p.x - s * p.y, s * p.x + c * p.y};
  return pts;
}

// Rectangle sides in [16, 70] with aspect at most 3.
std::pair<double, double> rect_sides(Rng& rng) {
  for (;;) {
    const double w = rng.uniform(16.0, 70.0);
    const double h = rng.uniform(16.0, 70.0);
    if (std::max(w, h) <= 3.0 * std::min(w, h)) return {w, h};
  }
}

std::vector<Point> make_shape(Shape shape, Rng& rng) {
  switch (shape) {
    case Shape::kRectangle: {
      const auto [w, h] = rect_sides(rng);
      return {{-w / 2, -h / 2}, {w / 2, -h / 2}, {w / 2, h / 2}, {-w / 2, h / 2}};
    }
    case Shape::kRotatedRectangle: {
      const auto [w, h] = rect_sides(rng);
      const double theta = rng.uniform(5.0, 85.0) * std::numbers::pi / 180.0;
      return rotated({{-w / 2, -h / 2}, {w / 2, -h / 2}, {w / 2, h / 2}, {-w / 2, h / 2}}, theta);
    }
    case Shape::kLShape: {
      // Bounding box minus one corner block; arms stay >= 0.35 of each side.
      const double w = rng.uniform(30.0, 70.0);
      const double h = rng.uniform(30.0, 70.0);
      const double a = w * (1.0 - rng.uniform(0.35, 0.6));
      const double b = h * rng.uniform(0.35, 0.6);
      std::vector<Point> pts = {{0, 0}, {a, 0}, {a, b}, {w, b}, {w, h}, {0, h}};
      for (Point& p : pts) p = p - Point{w / 2, h / 2};
      return rotated(std::move(pts), static_cast<double>(rng.uniform_int(0, 3)) * std::numbers::pi / 2);
    }
    case Shape::kRegularPolygon: {
      const auto n = static_cast<std::size_t>(rng.uniform_int(4, 12));
      const double radius = rng.uniform(15.0, 38.0);
      const double phase = rng.uniform(0.0, 2.0 * std::numbers::pi);
      std::vector<Point> pts;
      for (std::size_t k = 0; k < n; ++k) {
        const double t = phase + 2.0 * std::numbers::pi * static_cast<double>(k) / static_cast<double>(n);
        pts.push_back({radius * std::cos(t), radius * std::sin(t)});
      }
      return pts;
    }
  }
  return {};
}

double round_cents(double v) { return std::round(v * 100.0) / 100.0; }

Scene synth_scene(std::size_t index, std::uint64_t seed, const SynthConfig& cfg,
                  std::span<const Shape> shapes) {
  Rng rng = Rng::derived(seed, index);
  Scene scene;
  scene.image_id = static_cast<std::int64_t>(index) + 1;
  char name[32];
  std::snprintf(name, sizeof name, "synth_%06zu.png", index + 1);
  scene.file_name = name;
  scene.width = cfg.frame;
  scene.height = cfg.frame;

  struct Circle {
    Point c;
    double r;
  };
  std::vector<Circle> placed;
  const auto wanted = static_cast<std::size_t>(rng.uniform_int(cfg.min_instances, cfg.max_instances));
  constexpr double kMargin = 2.0;
  for (int attempt = 0; attempt < 200 && placed.size() < wanted; ++attempt) {
    const Shape shape = shapes[static_cast<std::size_t>(rng.uniform_int(0, static_cast<std::int64_t>(shapes.size()) - 1))];
    std::vector<Point> pts = make_shape(shape, rng);
    double r = 0.0;
    for (const Point& p : pts) r = std::max(r, std::hypot(p.x, p.y));
    const double lo = r + kMargin;
    const double hi = cfg.frame - r - kMargin;
    if (hi <= lo) continue;
    const Point center{rng.uniform(lo, hi), rng.uniform(lo, hi)};
    const bool clear = std::all_of(placed.begin(), placed.end(), [&](const Circle& c) {
      return distance(c.c, center) > c.r + r + kMargin;
    });
    if (!clear) continue;
    placed.push_back({center, r});

    for (Point& p : pts) p = {round_cents(p.x + center.x), round_cents(p.y + center.y)};
    // Random orientation and start vertex so consumers must canonicalize.
    if (rng.uniform() < 0.5) std::reverse(pts.begin(), pts.end());
    std::rotate(pts.begin(), pts.begin() + rng.uniform_int(0, static_cast<std::int64_t>(pts.size()) - 1), pts.end());
    scene.instances.emplace_back(std::move(pts));
  }
  return scene;
}

}  // namespace

std::vector<Scene> synth_scenes(std::size_t count, std::uint64_t seed, const SynthConfig& cfg) {
  if (count == 0) throw Error(ErrorCode::kInvalidArgument, "synth_scenes needs count >= 1");
  if (cfg.min_instances < 0 || cfg.max_instances < cfg.min_instances) {
    throw Error(ErrorCode::kInvalidArgument, "bad instance count range");
  }
  if (cfg.frame < 64) throw Error(ErrorCode::kInvalidArgument, "frame must be at least 64 pixels");
  std::vector<Shape> shapes;
  if (cfg.rectangles) shapes.push_back(Shape::kRectangle);
  if (cfg.rotated_rectangles) shapes.push_back(Shape::kRotatedRectangle);
  if (cfg.l_shapes) shapes.push_back(Shape::kLShape);
  if (cfg.regular_polygons) shapes.push_back(Shape::kRegularPolygon);
  if (shapes.empty()) throw Error(ErrorCode::kInvalidArgument, "no shape family enabled");

  std::vector<Scene> scenes;
  scenes.reserve(count);
  for (std::size_t i = 0; i < count; ++i) scenes.push_back(synth_scene(i, seed, cfg, shapes));
  return scenes;
}

// ---------------------------------------------------------------------------
// Prediction files

std::string predictions_to_string(std::span<const PredictionRecord> records) {
  if (records.empty()) return "[]\n";
  std::string out = "[\n";
  for (std::size_t i = 0; i < records.size(); ++i) {
    const PredictionRecord& r = records[i];
    json j = {{"image_id", r.image_id}, {"score", r.score}, {"polygon", flatten(r.polygon)}};
    if (r.corner_scores) j["corner_scores"] = *r.corner_scores;
    if (r.scheme) j["scheme"] = scheme_name(*r.scheme);
    out += j.dump();
    out += i + 1 < records.size() ? ",\n" : "\n";
  }
  out += "]\n";
  return out;
}

void write_predictions(std::span<const PredictionRecord> records, const std::filesystem::path& path) {
  spill(path, predictions_to_string(records));
}

std::vector<PredictionRecord> parse_predictions(std::string_view text) {
  const json doc = parse_json(text);
  if (!doc.is_array()) field_error("document", "expected an array of prediction records");
  std::vector<PredictionRecord> records;
  records.reserve(doc.size());
  for (std::size_t i = 0; i < doc.size(); ++i) {
    const std::string where = "record[" + std::to_string(i) + "]";
    const json& j = doc[i];
    PredictionRecord r;
    r.image_id = as_int(member(j, "image_id", where), where + ".image_id");
    r.score = as_real(member(j, "score", where), where + ".score");
    if (!(r.score >= 0.0 && r.score <= 1.0)) field_error(where + ".score", "must lie in [0, 1]");
    const json& poly = member(j, "polygon", where);
    auto points = flat_points(poly);
    if (!points || points->size() < 3) {
      field_error(where + ".polygon", "expected an even list of at least 6 numbers");
    }
    r.polygon = std::move(*points);
    if (auto it = j.find("corner_scores"); it != j.end()) {
      if (!it->is_array()) field_error(where + ".corner_scores", "expected an array");
      std::vector<double> scores;
      for (const json& s : *it) {
        const double v = as_real(s, where + ".corner_scores");
        if (!(v >= 0.0 && v <= 1.0)) field_error(where + ".corner_scores", "must lie in [0, 1]");
        scores.push_back(v);
      }
      if (scores.size() != r.polygon.size()) {
        field_error(where + ".corner_scores", "length differs from the vertex count");
      }
      r.corner_scores = std::move(scores);
    }
    if (auto it = j.find("scheme"); it != j.end()) {
      if (*it == "uniform") {
        r.scheme = Scheme::kUniformSampling;
      } else if (*it == "zeropad") {
        r.scheme = Scheme::kZeroPad;
      } else {
        field_error(where + ".scheme", "expected \"uniform\" or \"zeropad\"");
      }
    }
    records.push_back(std::move(r));
  }
  return records;
}

std::vector<PredictionRecord> read_predictions(const std::filesystem::path& path) {
  return parse_predictions(slurp(path));
}

EncodedPolygon to_encoded(const PredictionRecord& record) {
  if (!record.corner_scores) {
    throw Error(ErrorCode::kInvalidArgument, "prediction record has no corner scores");
  }
  EncodedPolygon poly;
  poly.coords = record.polygon;
  poly.corner_flags = *record.corner_scores;
  poly.scheme = record.scheme.value_or(Scheme::kUniformSampling);
  return poly;
}

PredictionRecord from_encoded(std::int64_t image_id, double score, const EncodedPolygon& poly) {
  return {image_id, score, poly.coords, poly.corner_flags, poly.scheme};
}

// ---------------------------------------------------------------------------
// Simulated network output

std::vector<PredictionRecord> simulate_predictions(std::span<const Scene> scenes, const NoiseConfig& cfg) {
  if (cfg.coord_sigma < 0.0 || cfg.score_sigma < 0.0) {
    throw Error(ErrorCode::kInvalidArgument, "noise levels must be non-negative");
  }
  const EncodingConfig enc{cfg.m, false};
  std::vector<PredictionRecord> out;
  std::uint64_t counter = 0;
  for (const Scene& scene : scenes) {
    for (const Ring& ring : scene.instances) {
      Rng rng = Rng::derived(cfg.seed, counter++);
      EncodedPolygon poly = encode_uniform(ring, enc);
      const std::size_t m = poly.size();

      // Circular distance from each index to the nearest labelled corner.
      std::vector<std::size_t> gap(m, m);
      for (std::size_t i = 0; i < m; ++i) {
        if (poly.corner_flags[i] != 1.0) continue;
        for (std::size_t j = 0; j < m; ++j) {
          const std::size_t d = i > j ? i - j : j - i;
          gap[j] = std::min(gap[j], std::min(d, m - d));
        }
      }
      const double s = cfg.score_sigma;
      std::vector<double> scores(m);
      for (std::size_t i = 0; i < m; ++i) {
        double base = 0.5 * s;  // wall
        if (gap[i] == 0) base = 1.0;
        else if (gap[i] == 1) base = std::min(1.0, 6.0 * s);
        else if (gap[i] == 2) base = std::min(1.0, 3.0 * s);
        scores[i] = std::clamp(base * (1.0 + s * rng.normal()), 0.0, 1.0);
      }
      for (Point& p : poly.coords) {
        p.x += cfg.coord_sigma * rng.normal();
        p.y += cfg.coord_sigma * rng.normal();
      }
      const double score = 1.0 / (1.0 + s * std::abs(rng.normal()));
      out.push_back({scene.image_id, score, std::move(poly.coords), std::move(scores),
                     Scheme::kUniformSampling});
    }
  }
  return out;
}

std::vector<metrics::GtInstance> gt_instances(std::span<const Scene> scenes) {
  std::vector<metrics::GtInstance> gts;
  for (const Scene& scene : scenes) {
    for (const Ring& ring : scene.instances) gts.push_back({scene.image_id, ring});
  }
  return gts;
}

metrics::EvalConfig eval_config_for(std::span<const Scene> scenes) {
  metrics::EvalConfig cfg;
  for (const Scene& scene : scenes) cfg.image_sizes[scene.image_id] = {scene.width, scene.height};
  return cfg;
}

// ---------------------------------------------------------------------------
// SVG

namespace {

void append_ring(std::string& out, const Ring& ring, const char* stroke) {
  char buf[96];
  out += "  <path d=\"";
  for (std::size_t i = 0; i < ring.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%s%.3f %.3f ", i == 0 ? "M " : "L ", ring[i].x, ring[i].y);
    out += buf;
  }
  std::snprintf(buf, sizeof buf, "Z\" fill=\"none\" stroke=\"%s\" stroke-width=\"1\"/>\n", stroke);
  out += buf;
  for (const Point& p : ring.vertices()) {
    std::snprintf(buf, sizeof buf, "  <circle cx=\"%.3f\" cy=\"%.3f\" r=\"1.5\" fill=\"%s\"/>\n", p.x, p.y, stroke);
    out += buf;
  }
}

}  // namespace

std::string svg_string(const Scene& scene, std::span<const Ring> predictions) {
  if (scene.width <= 0 || scene.height <= 0) {
    throw Error(ErrorCode::kInvalidArgument, "scene size must be positive");
  }
  char buf[512];
  std::snprintf(buf, sizeof buf,
                "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
                "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"%d\" height=\"%d\" "
                "viewBox=\"0 0 %d %d\">\n"
                "  <rect x=\"0\" y=\"0\" width=\"%d\" height=\"%d\" fill=\"white\" stroke=\"black\"/>\n",
                scene.width, scene.height, scene.width, scene.height, scene.width, scene.height);
  std::string out = buf;
  for (const Ring& ring : scene.instances) append_ring(out, ring, "#1a9641");
  for (const Ring& ring : predictions) append_ring(out, ring, "#d7191c");
  out += "</svg>\n";
  return out;
}

void render_svg(const Scene& scene, std::span<const Ring> predictions, const std::filesystem::path& path) {
  spill(path, svg_string(scene, predictions));
}

}  // namespace polyenc::io
