// Copyright 2026 The polyenc Authors
// SPDX-License-Identifier: Apache-2.0

#include <gtest/gtest.h>

#include <filesystem>
#include <random>

#include "polyenc/dataset_io.hpp"
#include "polyenc/error.hpp"
#include "polyenc/refinement.hpp"

using namespace polyenc;
using namespace polyenc::io;

namespace {

const std::filesystem::path kData = POLYENC_TEST_DATA;

ErrorCode code_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no exception";
  return ErrorCode::kInvalidArgument;
}

std::string message_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.what();
  }
  return {};
}

}  // namespace

TEST(ReadCoco, MinimalFixture) {
  const CocoDocument doc = read_coco(kData / "coco_minimal.json");
  EXPECT_EQ(doc.malformed, 0u);
  ASSERT_EQ(doc.scenes.size(), 3u);
  EXPECT_EQ(doc.scenes[0].image_id, 3);
  EXPECT_EQ(doc.scenes[0].width, 320);
  EXPECT_EQ(doc.scenes[0].height, 200);
  EXPECT_EQ(doc.scenes[0].instances, std::vector<Ring>{Ring({{10, 10}, {20, 10}, {20, 20}, {10, 20}})});
  EXPECT_EQ(doc.scenes[1].image_id, 7);
  EXPECT_EQ(doc.scenes[1].file_name, "tile_007.png");
  ASSERT_EQ(doc.scenes[1].instances.size(), 2u);
  EXPECT_EQ(doc.scenes[1].instances[0], Ring({{100.5, 40.25}, {160, 40.25}, {130, 90}}));
  EXPECT_EQ(doc.scenes[1].instances[1].size(), 6u);  // first ring only
  EXPECT_TRUE(doc.scenes[2].instances.empty());
}

TEST(ReadCoco, MalformedFixtureSkipsAndCounts) {
  const CocoDocument doc = read_coco(kData / "coco_malformed.json");
  EXPECT_EQ(doc.malformed, 6u);
  EXPECT_EQ(doc.warnings.size(), 6u);
  ASSERT_EQ(doc.scenes.size(), 2u);
  EXPECT_EQ(doc.scenes[0].instances.size(), 1u);
  EXPECT_EQ(doc.scenes[1].instances.size(), 1u);
}

TEST(ReadCoco, EmptyAnnotations) {
  const CocoDocument doc = parse_coco(R"({"images": [{"id": 1, "file_name": "x", "width": 5, "height": 6}], "annotations": []})");
  ASSERT_EQ(doc.scenes.size(), 1u);
  EXPECT_TRUE(doc.scenes[0].instances.empty());
}

TEST(ReadCoco, ParseErrorsCarryContext) {
  EXPECT_EQ(code_of([] { parse_coco("{\n  \"images\": [\n  oops\n]}"); }), ErrorCode::kParseError);
  EXPECT_NE(message_of([] { parse_coco("{\n  \"images\": [\n  oops\n]}"); }).find("line 3"), std::string::npos);
  EXPECT_NE(message_of([] { parse_coco(R"({"images": [{"id": 1, "file_name": "x", "width": 5}], "annotations": []})"); })
                .find("images[0]"),
            std::string::npos);
  EXPECT_EQ(code_of([] { parse_coco(R"({"images": []})"); }), ErrorCode::kParseError);
  EXPECT_EQ(code_of([] {
              parse_coco(R"({"images": [], "annotations": [{"image_id": 4, "segmentation": [[0,0,1,0,1,1]]}]})");
            }),
            ErrorCode::kParseError);
  EXPECT_EQ(code_of([] { read_coco("/nonexistent/file.json"); }), ErrorCode::kIoError);
}

TEST(CocoRoundTrip, SynthesizedScenesSurvive) {
  const auto scenes = synth_scenes(20, 5);
  const CocoDocument doc = parse_coco(coco_to_string(scenes));
  ASSERT_EQ(doc.scenes.size(), scenes.size());
  for (std::size_t i = 0; i < scenes.size(); ++i) {
    EXPECT_EQ(doc.scenes[i].image_id, scenes[i].image_id);
    EXPECT_EQ(doc.scenes[i].instances, scenes[i].instances);
  }
}

TEST(Synth, Deterministic) {
  EXPECT_EQ(coco_to_string(synth_scenes(2, 42)), coco_to_string(synth_scenes(2, 42)));
  EXPECT_NE(coco_to_string(synth_scenes(2, 42)), coco_to_string(synth_scenes(2, 43)));
  // Scene i does not depend on how many scenes were requested.
  EXPECT_EQ(synth_scenes(5, 9)[1].instances, synth_scenes(2, 9)[1].instances);
}

TEST(Synth, RectanglesOnly) {
  SynthConfig cfg;
  cfg.rotated_rectangles = cfg.l_shapes = cfg.regular_polygons = false;
  for (const Scene& s : synth_scenes(30, 1, cfg)) {
    for (const Ring& r : s.instances) EXPECT_EQ(r.size(), 4u);
  }
}

TEST(Synth, NonOverlappingAndInFrame) {
  std::size_t total = 0;
  for (const Scene& s : synth_scenes(100, 42)) {
    EXPECT_GE(s.instances.size(), 1u);
    total += s.instances.size();
    std::vector<Mask> masks;
    for (const Ring& r : s.instances) {
      for (const Point& p : r.vertices()) {
        EXPECT_GE(p.x, 0.0);
        EXPECT_GE(p.y, 0.0);
        EXPECT_LE(p.x, 300.0);
        EXPECT_LE(p.y, 300.0);
      }
      EXPECT_NE(signed_area(r), 0.0);
      masks.push_back(rasterize(r, s.width, s.height));
    }
    for (std::size_t a = 0; a < masks.size(); ++a) {
      for (std::size_t b = a + 1; b < masks.size(); ++b) {
        std::size_t overlap = 0;
        for (std::size_t k = 0; k < masks[a].bits().size(); ++k) overlap += masks[a].bits()[k] & masks[b].bits()[k];
        EXPECT_EQ(overlap, 0u);
      }
    }
  }
  EXPECT_GT(total, 100u);
}

TEST(Synth, RejectsZeroCount) { EXPECT_THROW(synth_scenes(0, 1), Error); }

TEST(Predictions, RoundTrip) {
  std::mt19937_64 rng(71);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<PredictionRecord> records;
  for (int i = 0; i < 100; ++i) {
    PredictionRecord r;
    r.image_id = i / 3;
    r.score = u(rng);
    const std::size_t n = 3 + static_cast<std::size_t>(i % 10);
    for (std::size_t k = 0; k < n; ++k) r.polygon.push_back({300 * u(rng), 300 * u(rng)});
    if (i % 2 == 0) {
      r.corner_scores.emplace();
      for (std::size_t k = 0; k < n; ++k) r.corner_scores->push_back(u(rng));
    }
    if (i % 3 == 0) r.scheme = i % 2 ? Scheme::kZeroPad : Scheme::kUniformSampling;
    records.push_back(std::move(r));
  }
  const auto path = std::filesystem::temp_directory_path() / "polyenc_pred_roundtrip.json";
  write_predictions(records, path);
  EXPECT_EQ(read_predictions(path), records);  // 17 significant digits round-trip exactly
  std::filesystem::remove(path);
}

TEST(Predictions, EmptyAndOptionalFields) {
  EXPECT_EQ(predictions_to_string({}), "[]\n");
  EXPECT_TRUE(parse_predictions("[]").empty());
  const auto r = parse_predictions(R"([{"image_id": 1, "score": 0.5, "polygon": [0,0, 1,0, 1,1]}])");
  ASSERT_EQ(r.size(), 1u);
  EXPECT_FALSE(r[0].corner_scores.has_value());
  EXPECT_FALSE(r[0].scheme.has_value());
}

TEST(Predictions, Validation) {
  EXPECT_EQ(code_of([] { parse_predictions(R"([{"image_id": 1, "score": 1.5, "polygon": [0,0,1,0,1,1]}])"); }),
            ErrorCode::kParseError);
  EXPECT_EQ(code_of([] { parse_predictions(R"([{"image_id": 1, "score": 0.5, "polygon": [0,0,1,0,1]}])"); }),
            ErrorCode::kParseError);
  EXPECT_EQ(code_of([] { parse_predictions(R"([{"image_id": 1, "score": 0.5, "polygon": [0,0,1,0]}])"); }),
            ErrorCode::kParseError);
  EXPECT_EQ(code_of([] {
              parse_predictions(R"([{"image_id": 1, "score": 0.5, "polygon": [0,0,1,0,1,1], "corner_scores": [1]}])");
            }),
            ErrorCode::kParseError);
  EXPECT_EQ(code_of([] { parse_predictions(R"({"image_id": 1})"); }), ErrorCode::kParseError);
}

TEST(Simulate, ZeroNoiseIsEncodedGroundTruth) {
  const auto scenes = synth_scenes(5, 3);
  const auto preds = simulate_predictions(scenes, {0.0, 0.0, 96, 1});
  std::size_t k = 0;
  for (const Scene& s : scenes) {
    for (const Ring& r : s.instances) {
      ASSERT_LT(k, preds.size());
      EXPECT_EQ(preds[k].image_id, s.image_id);
      EXPECT_EQ(preds[k].score, 1.0);
      EXPECT_EQ(to_encoded(preds[k]).coords, encode_uniform(r).coords);
      EXPECT_EQ(*preds[k].corner_scores, encode_uniform(r).corner_flags);
      ++k;
    }
  }
  EXPECT_EQ(k, preds.size());
}

TEST(Simulate, Deterministic) {
  const auto scenes = synth_scenes(5, 3);
  EXPECT_EQ(simulate_predictions(scenes, {}), simulate_predictions(scenes, {}));
}

TEST(Svg, EmptySceneHasFrameOnly) {
  Scene s;
  const std::string svg = svg_string(s, {});
  EXPECT_NE(svg.find("<rect"), std::string::npos);
  EXPECT_EQ(svg.find("<path"), std::string::npos);
}

TEST(Svg, OneSquareOnePath) {
  Scene s;
  s.instances.push_back(Ring({{10, 10}, {20, 10}, {20, 20}, {10, 20}}));
  const std::string svg = svg_string(s, {});
  EXPECT_EQ(svg.find("<path"), svg.rfind("<path"));
  const auto d0 = svg.find("d=\"") + 3;
  const std::string d = svg.substr(d0, svg.find('"', d0) - d0);
  EXPECT_EQ(std::count(d.begin(), d.end(), 'M'), 1);
  EXPECT_EQ(std::count(d.begin(), d.end(), 'L'), 3);
  EXPECT_EQ(std::count(d.begin(), d.end(), 'Z'), 1);
  EXPECT_EQ(svg, svg_string(s, {}));
}

TEST(Svg, FileOutput) {
  const Scene s = synth_scenes(1, 8)[0];
  const auto path = std::filesystem::temp_directory_path() / "polyenc_scene.svg";
  render_svg(s, s.instances, path);
  EXPECT_TRUE(std::filesystem::file_size(path) > 0);
  std::filesystem::remove(path);
  EXPECT_EQ(code_of([&] { render_svg(s, {}, "/nonexistent/dir/x.svg"); }), ErrorCode::kIoError);
}
