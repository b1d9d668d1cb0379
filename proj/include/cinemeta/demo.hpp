// Copyright 2026 The Cinemeta Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CINEMETA_DEMO_HPP_
#define CINEMETA_DEMO_HPP_

// A small self-contained dailies project on disk: three synthetic clips,
// a slate template, fixture detector responses, an actor gallery, a
// profile, a pipeline config and a hand-written truth catalog.
//
//   A001C001  pan, slate in the first frames, exterior day, one face
//   A001C002  static, slate reading "12A", interior night, 3D LUT
//   A001C003  zoom, raw RGGB mosaic, no slate, body height only

#include <array>
#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "cinemeta/formats/catalog.hpp"
#include "cinemeta/formats/raster.hpp"
#include "cinemeta/io.hpp"
#include "cinemeta/metadata_model.hpp"
#include "cinemeta/slate.hpp"
#include "cinemeta/synthetic.hpp"

namespace cinemeta::demo {

inline constexpr int kWidth = 320;
inline constexpr int kHeight = 240;
inline constexpr int kFrames = 10;
inline constexpr int kSlateFrames = 3;

namespace detail {

inline void WriteJson(const fs::path& p, const Json& j) {
  fs::create_directories(p.parent_path());
  WriteFileAtomic(p, j.dump(2) + "\n");
}

struct ClipPlan {
  std::string id;
  std::function<Eigen::Matrix3d(int)> view;  // frame -> world
  bool slate = false;
  std::array<double, 3> tint{1, 1, 1};
  bool raw = false;
};

inline Image Tinted(const Image& gray, const std::array<double, 3>& tint) {
  Image rgb(gray.width(), gray.height(), 3);
  for (int y = 0; y < gray.height(); ++y) {
    for (int x = 0; x < gray.width(); ++x) {
      for (int c = 0; c < 3; ++c) rgb.at(x, y, c) = gray.at(x, y) * tint[c];
    }
  }
  return rgb;
}

// RGGB: R at (even, even), B at (odd, odd), G elsewhere.
inline Image Mosaic(const Image& rgb) {
  Image raw(rgb.width(), rgb.height(), 1);
  for (int y = 0; y < rgb.height(); ++y) {
    for (int x = 0; x < rgb.width(); ++x) {
      const int c = (x % 2 == 0 && y % 2 == 0) ? 0 : (x % 2 == 1 && y % 2 == 1) ? 2 : 1;
      raw.at(x, y) = rgb.at(x, y, c);
    }
  }
  return raw;
}

inline void WriteClip(const fs::path& root, const ClipPlan& plan, std::uint64_t seed, const SlateTemplate& tpl) {
  const synthetic::Texture tex(seed);
  const Image board = synthetic::FilledSlate(tpl, seed);
  const Eigen::Matrix3d placement = synthetic::RandomPlacement(seed, tpl.image.width(), tpl.image.height(), kWidth,
                                                               kHeight);
  std::mt19937_64 rng(seed ^ 0xD1CE);
  const fs::path dir = root / "frames" / plan.id;
  fs::create_directories(dir);
  for (int i = 0; i < kFrames; ++i) {
    const Eigen::Matrix3d view = plan.view(i);
    Image gray = synthetic::Render(tex, kWidth, kHeight, view);
    if (plan.slate && i < kSlateFrames) PasteWarped(gray, board, view.inverse() * placement);
    Image rgb = Tinted(gray, plan.tint);
    synthetic::AddNoise(rgb, 0.005, rng);
    char name[32];
    std::snprintf(name, sizeof name, plan.raw ? "f%04d.pgm" : "f%04d.ppm", i);
    SaveImage(plan.raw ? Mosaic(rgb) : rgb, dir / name);
  }
}

inline Annotated<int> Manual(int v) { return {v, 1.0, Provenance::kManual}; }
template <typename V>
Annotated<V> Manual(V v) {
  return {std::move(v), 1.0, Provenance::kManual};
}

}  // namespace detail

// Writes the project under `root` and returns the config path.
inline fs::path WriteProject(const fs::path& root, std::uint64_t seed = 7) {
  using detail::WriteJson;
  fs::create_directories(root);
  const SlateTemplate tpl = [&] {
    SlateTemplate t = synthetic::MakeSlateTemplate(seed);
    t.template_id = "board_a";
    return t;
  }();
  SaveTemplate(tpl, root / "templates");

  const double cx = (kWidth - 1) / 2.0, cy = (kHeight - 1) / 2.0;
  const std::vector<detail::ClipPlan> plans = {
      {"A001C001", [](int i) { return synthetic::Translation(-4.0 * i, 0.0); }, true, {1.0, 0.95, 0.85}, false},
      {"A001C002", [](int) { return Eigen::Matrix3d(Eigen::Matrix3d::Identity()); }, true, {0.12, 0.16, 0.32}, false},
      {"A001C003", [=](int i) { return synthetic::ScaleAbout(std::pow(1.025, -i), cx, cy); }, false, {0.9, 0.9, 0.85},
       true},
  };
  for (std::size_t k = 0; k < plans.size(); ++k) detail::WriteClip(root, plans[k], seed * 31 + k, tpl);

  // A warm-ish grade: trilinear over a 2-point lattice is exactly linear.
  fs::create_directories(root / "luts");
  WriteFileAtomic(root / "luts" / "grade.cube",
                  "TITLE \"demo grade\"\nLUT_3D_SIZE 2\n"
                  "0 0 0\n1 0 0\n0 0.97 0\n1 0.97 0\n0 0 0.92\n1 0 0.92\n0 0.97 0.92\n1 0.97 0.92\n");

  const Json common = {{"frame_pattern", "f%04d.ppm"}, {"frame_count", kFrames}, {"fps", 24}, {"iso", 800},
                       {"shutter", 180}, {"aperture", 2.8}};
  Json m1 = common;
  m1.update({{"clip_id", "A001C001"}, {"frames_dir", "../frames/A001C001"}, {"timecode_start", "01:00:00:00"},
             {"slate_template_id", "board_a"}, {"slate_scan_frames", 6}, {"scene_num", 11}});
  Json m2 = common;
  m2.update({{"clip_id", "A001C002"}, {"frames_dir", "../frames/A001C002"}, {"timecode_start", "01:10:00:00"},
             {"slate_template_id", "board_a"}, {"scene_num", 4}, {"shot_num", 1}, {"take_num", 2},
             {"scene_type", "Inside"}, {"lut", "../luts/grade.cube"}});
  Json m3 = common;
  m3.update({{"clip_id", "A001C003"}, {"frames_dir", "../frames/A001C003"}, {"frame_pattern", "f%04d.pgm"},
             {"timecode_start", "01:20:00:00"}, {"bayer_pattern", "RGGB"}});
  WriteJson(root / "manifests" / "A001C001.json", m1);
  WriteJson(root / "manifests" / "A001C002.json", m2);
  WriteJson(root / "manifests" / "A001C003.json", m3);

  const fs::path fx = root / "fixtures";
  auto ocr = [&](const std::string& clip, const std::string& region, const std::string& text, double conf) {
    WriteJson(fx / clip / "ocr" / (region + ".json"), {{"text", text}, {"confidence", conf}});
  };
  ocr("A001C001", "scene", "12", 0.97);
  ocr("A001C001", "shot", "3", 0.95);
  ocr("A001C001", "take", "7", 0.96);
  ocr("A001C001", "director", "M. Reyes", 0.8);
  ocr("A001C002", "scene", "12A", 0.9);
  ocr("A001C002", "shot", "1", 0.92);
  ocr("A001C002", "take", "2", 0.91);
  // Boxes are in sampled-frame pixels (160 x 120 at spatial factor 2).
  WriteJson(fx / "A001C001" / "face_detect" / "all.json",
            Json::parse(R"([{"box": [70, 30, 24, 30], "confidence": 0.93}])"));
  WriteJson(fx / "A001C001" / "face_embed" / "all.json", Json::parse(R"({"embedding": [0.96, 0.2, 0.0, 0.2]})"));
  WriteJson(fx / "A001C001" / "scene_classify" / "all.json",
            Json::parse(R"({"scene_type": "Outside", "place": "beach", "confidence": 0.88})"));
  WriteJson(fx / "A001C002" / "scene_classify" / "all.json",
            Json::parse(R"({"scene_type": "Inside", "place": "bedroom", "confidence": 0.8})"));
  WriteJson(fx / "A001C002" / "object_detect" / "all.json",
            Json::parse(R"([{"category": "bed", "confidence": 0.85}, {"category": "lamp", "confidence": 0.2}])"));
  WriteJson(fx / "A001C003" / "scene_classify" / "all.json",
            Json::parse(R"({"scene_type": "Outside", "place": "street", "confidence": 0.7})"));
  WriteJson(fx / "A001C003" / "object_detect" / "all.json",
            Json::parse(R"([{"category": "car", "confidence": 0.9}, {"category": "lamp", "confidence": 0.6}])"));
  WriteJson(fx / "A001C003" / "pose_height" / "all.json", Json::parse(R"({"height_px": 200, "confidence": 0.8})"));

  WriteJson(root / "gallery.json", Json::parse(R"([
    {"pid": "p01", "display_name": "Ada Stone", "embedding": [1, 0, 0, 0]},
    {"pid": "p02", "display_name": "Ben Okoro", "embedding": [0, 1, 0, 0]}])"));
  WriteJson(root / "profile.json", Json::parse(R"({
    "selected_labels": ["SceneNum", "ShotNum", "TakeNum", "CameraMove", "ShotType", "ActorPID",
                        "Time", "SceneType", "Places", "ObjectType", "notes"],
    "output_format": "ale", "video_format": "1080", "fps": 24})"));
  WriteJson(root / "config.json", Json::parse(R"({
    "profile": "profile.json", "clips": "manifests", "templates": "templates", "gallery": "gallery.json",
    "seed": 7, "workers": 1,
    "detectors": {"backend": "fixtures", "root": "fixtures", "transcript": "out/transcript.jsonl"},
    "sampling": {"spatial_factor": 2, "frame_stride": 1},
    "output": {"catalog": "out/catalog.jsonl", "export": "out/dailies.ale", "log": "out/ingest.log"}})"));

  // What a script supervisor would have logged.
  std::vector<MetadataRecord> truth(3);
  truth[0].clip_id = ClipId("A001C001");
  truth[0].semantic.scene_num = detail::Manual(12);
  truth[0].semantic.shot_num = detail::Manual(3);
  truth[0].semantic.take_num = detail::Manual(7);
  truth[0].semantic.camera_move = detail::Manual(CameraMove::kPan);
  truth[0].semantic.shot_type = detail::Manual(ShotType::kClose);
  truth[0].semantic.actors = {detail::Manual(ActorPID{"p01", "Ada Stone"})};
  truth[0].semantic.time = detail::Manual(DayNight::kDay);
  truth[0].semantic.scene_type = detail::Manual(SceneType::kOutside);
  truth[1].clip_id = ClipId("A001C002");
  truth[1].semantic.scene_num = detail::Manual(12);
  truth[1].semantic.shot_num = detail::Manual(1);
  truth[1].semantic.take_num = detail::Manual(2);
  truth[1].semantic.camera_move = detail::Manual(CameraMove::kStatic);
  truth[1].semantic.time = detail::Manual(DayNight::kNight);
  truth[1].semantic.scene_type = detail::Manual(SceneType::kInside);
  truth[2].clip_id = ClipId("A001C003");
  truth[2].semantic.camera_move = detail::Manual(CameraMove::kZoom);
  truth[2].semantic.shot_type = detail::Manual(ShotType::kMedium);
  truth[2].semantic.time = detail::Manual(DayNight::kDay);
  truth[2].semantic.scene_type = detail::Manual(SceneType::kOutside);
  WriteFileAtomic(root / "truth.jsonl", SerializeCatalog(truth));
  return root / "config.json";
}

}  // namespace cinemeta::demo

#endif  // CINEMETA_DEMO_HPP_
