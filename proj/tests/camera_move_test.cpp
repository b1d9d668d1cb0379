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

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "cinemeta/camera_move.hpp"
#include "cinemeta/imaging.hpp"
#include "cinemeta/synthetic.hpp"

namespace cinemeta {
namespace {

MotionSample Sample(double tx, double ty, double s, double parallax) {
  MotionSample m;
  m.valid = true;
  m.mean_translation = {tx, ty};
  m.scale = s;
  m.parallax_ratio = parallax;
  m.frame_diagonal = 200.0;
  m.tracked_points = 100;
  return m;
}

MoveDecision Decide(const std::vector<MotionSample>& samples) { return Classify(samples, {}); }

template <typename F>
std::vector<Image> Map(const std::vector<Image>& frames, F f) {
  std::vector<Image> out;
  for (const Image& img : frames) out.push_back(f(img));
  return out;
}

TEST(AnalyzeClip, IdenticalFrames) {
  const auto frames = synthetic::Static({.frames = 2, .seed = 3});
  const auto samples = AnalyzeClip(frames, {});
  ASSERT_EQ(samples.size(), 1u);
  EXPECT_TRUE(samples[0].valid);
  EXPECT_LT(Norm(samples[0].mean_translation), 1e-9);
  EXPECT_NEAR(samples[0].scale, 1.0, 1e-9);
}

TEST(AnalyzeClip, ConstantPan) {
  const auto samples = AnalyzeClip(synthetic::Pan({.frames = 10, .seed = 4}, 4.0, 0.0), {});
  ASSERT_EQ(samples.size(), 9u);
  for (const MotionSample& s : samples) {
    ASSERT_TRUE(s.valid);
    EXPECT_NEAR(s.mean_translation.x, 4.0, 0.05);
    EXPECT_NEAR(s.mean_translation.y, 0.0, 0.05);
    EXPECT_NEAR(s.scale, 1.0, 1e-3);
    EXPECT_GE(s.tracked_points, 8);
  }
}

TEST(AnalyzeClip, StrideSkipsFrames) {
  CameraMoveConfig c;
  c.stride = 3;
  const auto samples = AnalyzeClip(synthetic::Pan({.frames = 10, .seed = 4}, 2.0, 0.0), c);
  ASSERT_EQ(samples.size(), 3u);
  EXPECT_EQ(samples[1].frame_a, 3);
  EXPECT_EQ(samples[1].frame_b, 6);
  EXPECT_NEAR(samples[1].mean_translation.x, 6.0, 0.05);
}

TEST(AnalyzeClip, OneFrameIsTooFew) {
  const auto frames = synthetic::Static({.frames = 1});
  try {
    AnalyzeClip(frames, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kTooFewFrames);
  }
}

TEST(AnalyzeClip, FeaturelessPairIsFlaggedInvalid) {
  const std::vector<Image> frames(3, Image(64, 48, 1, 0.5));
  const auto samples = AnalyzeClip(frames, {});
  ASSERT_EQ(samples.size(), 2u);
  EXPECT_FALSE(samples[0].valid);
  EXPECT_FALSE(samples[1].valid);
  EXPECT_THROW(Classify(samples, {}), Error);
}

TEST(Classify, DecisionTableExamples) {
  const MoveDecision pan = Decide(std::vector<MotionSample>(6, Sample(4, 0.1, 1.0, 0.01)));
  EXPECT_EQ(pan.label, CameraMove::kPan);
  EXPECT_DOUBLE_EQ(pan.confidence, 1.0);

  EXPECT_EQ(Decide(std::vector<MotionSample>(6, Sample(0.01, -0.02, 1.0001, 0.0))).label, CameraMove::kStatic);

  std::vector<MotionSample> shaky;
  for (int i = 0; i < 8; ++i) shaky.push_back(Sample(i % 2 ? -6 : 6, 0, 1.0, 0.02));
  const MoveDecision hh = Decide(shaky);
  EXPECT_EQ(hh.label, CameraMove::kHandheld);
  EXPECT_DOUBLE_EQ(hh.evidence["flip_fraction"].get<double>(), 1.0);
  EXPECT_DOUBLE_EQ(hh.confidence, 1.0);

  EXPECT_EQ(Decide(std::vector<MotionSample>(6, Sample(0, 0, 1.01, 0.01))).label, CameraMove::kZoom);
  EXPECT_EQ(Decide(std::vector<MotionSample>(6, Sample(0, 0, 0.99, 0.5))).label, CameraMove::kDolly);
  EXPECT_EQ(Decide(std::vector<MotionSample>(6, Sample(-5, 0.2, 1.0, 0.6))).label, CameraMove::kTruck);
  EXPECT_EQ(Decide(std::vector<MotionSample>(6, Sample(0.3, 3, 1.0, 0.01))).label, CameraMove::kTilt);
  EXPECT_EQ(Decide(std::vector<MotionSample>(6, Sample(0.3, -3, 1.0, 0.4))).label, CameraMove::kPedestal);
}

TEST(Classify, UnknownWhenNothingFits) {
  // Diagonal drift: neither axis dominates, no flips, no scale.
  const MoveDecision d = Decide(std::vector<MotionSample>(5, Sample(3, 3, 1.0, 0.01)));
  EXPECT_EQ(d.label, CameraMove::kUnknown);
  EXPECT_EQ(d.confidence, 0.0);
}

TEST(Classify, ThresholdBoundaries) {
  // The static band is open: |t| = 0.002 * D already counts as motion.
  EXPECT_EQ(Decide(std::vector<MotionSample>(3, Sample(0.399, 0, 1.0, 0))).label, CameraMove::kStatic);
  EXPECT_NE(Decide(std::vector<MotionSample>(3, Sample(0.4, 0, 1.0, 0))).label, CameraMove::kStatic);
  // Scale change below the zoom floor.
  EXPECT_EQ(Decide(std::vector<MotionSample>(3, Sample(0, 0, 1.0039, 0))).label, CameraMove::kUnknown);
  EXPECT_EQ(Decide(std::vector<MotionSample>(3, Sample(0, 0, 1.0041, 0))).label, CameraMove::kZoom);
  // Parallax exactly at tau stays on the rotational side.
  EXPECT_EQ(Decide(std::vector<MotionSample>(3, Sample(4, 0, 1, 0.15))).label, CameraMove::kPan);
  EXPECT_EQ(Decide(std::vector<MotionSample>(3, Sample(4, 0, 1, 0.1501))).label, CameraMove::kTruck);
}

TEST(Classify, ConfidenceCountsAgreeingSamples) {
  std::vector<MotionSample> s(8, Sample(4, 0, 1.0, 0.01));
  s[2] = Sample(4, 3, 1.0, 0.01);  // not horizontally dominant
  s[5].valid = false;              // ignored entirely
  s[5].mean_translation = {-50, 0};
  const MoveDecision d = Decide(s);
  EXPECT_EQ(d.label, CameraMove::kPan);
  EXPECT_DOUBLE_EQ(d.confidence, 6.0 / 7.0);
  EXPECT_EQ(d.evidence["valid_samples"].get<int>(), 7);
}

TEST(Classify, ExactlyOneLabelWithBoundedConfidence) {
  std::mt19937_64 rng(77);
  std::uniform_real_distribution<double> t(-8, 8), s(0.97, 1.03), p(0, 0.5);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<MotionSample> v;
    const int n = 1 + static_cast<int>(rng() % 10);
    for (int i = 0; i < n; ++i) v.push_back(Sample(t(rng), t(rng), s(rng), p(rng)));
    const MoveDecision d = Decide(v);
    EXPECT_GE(d.confidence, 0.0);
    EXPECT_LE(d.confidence, 1.0);
    EXPECT_EQ(Decide(v).label, d.label);
  }
}

TEST(CameraMoveSynthetic, TwoPlaneMoveIsTruck) {
  const auto samples = AnalyzeClip(synthetic::TwoPlane({.seed = 12}, 8.0, 2.0), {});
  const MoveDecision d = Classify(samples, {});
  EXPECT_EQ(d.label, CameraMove::kTruck);
  EXPECT_GT(d.evidence["median_parallax_ratio"].get<double>(), 0.15);
  const MoveDecision flat = Classify(AnalyzeClip(synthetic::Pan({.seed = 12}, 8.0, 0.0), {}), {});
  EXPECT_EQ(flat.label, CameraMove::kPan);
  EXPECT_LT(flat.evidence["median_parallax_ratio"].get<double>(), 0.15);
}

TEST(CameraMoveSynthetic, NoiselessPureMotionsAreCertain) {
  const synthetic::ClipSpec spec{.frames = 6, .seed = 5};
  const std::vector<std::pair<std::vector<Image>, CameraMove>> clips = {
      {synthetic::Static(spec), CameraMove::kStatic},
      {synthetic::Pan(spec, -3.0, 0.0), CameraMove::kPan},
      {synthetic::Pan(spec, 0.0, 5.0), CameraMove::kTilt},
      {synthetic::Zoom(spec, 0.975), CameraMove::kZoom},
  };
  for (const auto& [frames, expected] : clips) {
    const MoveDecision d = Classify(AnalyzeClip(frames, {}), {});
    EXPECT_EQ(d.label, expected) << ToString(expected);
    EXPECT_DOUBLE_EQ(d.confidence, 1.0) << ToString(expected);
  }
}

TEST(CameraMoveSynthetic, MirrorKeepsLabelsAndFlipsPanSign) {
  const synthetic::ClipSpec spec{.frames = 6, .seed = 8, .noise_sigma = 0.01};
  for (CameraMove m : {CameraMove::kPan, CameraMove::kStatic, CameraMove::kTilt, CameraMove::kZoom,
                       CameraMove::kHandheld}) {
    const auto frames = synthetic::MovementClip(m, spec);
    const auto a = AnalyzeClip(frames, {});
    const auto b = AnalyzeClip(Map(frames, FlipHorizontal), {});
    const MoveDecision da = Classify(a, {}), db = Classify(b, {});
    EXPECT_EQ(da.label, m);
    EXPECT_EQ(db.label, m);
    if (m == CameraMove::kPan) {
      EXPECT_LT(a[0].mean_translation.x * b[0].mean_translation.x, 0.0);
    }
  }
}

TEST(CameraMoveSynthetic, TransposeSwapsAxes) {
  const synthetic::ClipSpec spec{.frames = 6, .seed = 9, .noise_sigma = 0.01};
  const std::vector<std::pair<CameraMove, CameraMove>> pairs = {{CameraMove::kPan, CameraMove::kTilt},
                                                                {CameraMove::kTilt, CameraMove::kPan},
                                                                {CameraMove::kTruck, CameraMove::kPedestal},
                                                                {CameraMove::kPedestal, CameraMove::kTruck}};
  for (const auto& [m, swapped] : pairs) {
    const auto frames = synthetic::MovementClip(m, spec);
    EXPECT_EQ(Classify(AnalyzeClip(frames, {}), {}).label, m);
    EXPECT_EQ(Classify(AnalyzeClip(Map(frames, Transpose), {}), {}).label, swapped) << ToString(m);
  }
}

TEST(CameraMoveSynthetic, SpatialScaleLeavesLabel) {
  const synthetic::ClipSpec big{.width = 320, .height = 240, .frames = 5, .seed = 10, .noise_sigma = 0.005};
  const auto half = [](const Image& img) { return DownsampleBox(img, 2); };
  for (CameraMove m : {CameraMove::kStatic, CameraMove::kPan, CameraMove::kTilt, CameraMove::kZoom}) {
    const auto frames = synthetic::MovementClip(m, big);
    CameraMoveConfig c;
    c.track.search_radius = 24;
    const MoveDecision full = Classify(AnalyzeClip(frames, c), c);
    const MoveDecision small = Classify(AnalyzeClip(Map(frames, half), {}), {});
    EXPECT_EQ(full.label, m);
    EXPECT_EQ(small.label, full.label) << ToString(m);
  }
}

TEST(CameraMoveConfig, ReadsJsonKeys) {
  const auto c = CameraMoveConfig::FromJson(
      Json{{"stride", 2}, {"max_corners", 50}, {"tau_parallax", 0.2}, {"static_t", 0.003}, {"scale_eps", 0.001},
           {"flip_fraction", 0.4}});
  EXPECT_EQ(c.stride, 2);
  EXPECT_EQ(c.max_corners, 50);
  EXPECT_EQ(c.tau_parallax, 0.2);
  EXPECT_EQ(c.static_t, 0.003);
  EXPECT_EQ(c.scale_eps, 0.001);
  EXPECT_EQ(c.flip_fraction, 0.4);
  EXPECT_THROW(CameraMoveConfig::FromJson(Json{{"stride", 0}}), Error);
}

}  // namespace
}  // namespace cinemeta
