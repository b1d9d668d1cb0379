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

#include <algorithm>
#include <cmath>
#include <random>
#include <set>
#include <utility>
#include <vector>

#include "cinemeta/geometry/corners.hpp"
#include "cinemeta/geometry/descriptors.hpp"
#include "cinemeta/geometry/tracking.hpp"
#include "cinemeta/geometry/transform.hpp"
#include "cinemeta/geometry/warp.hpp"
#include "cinemeta/synthetic.hpp"
#include "support/oracles.hpp"

namespace cinemeta {
namespace {

Image WhiteSquare() {
  Image img(64, 64, 1, 0.0);
  for (int y = 22; y < 42; ++y)
    for (int x = 22; x < 42; ++x) img.at(x, y) = 1.0;
  return img;
}

Image Textured(std::uint64_t seed, int w = 160, int h = 120) {
  return synthetic::Render(synthetic::Texture(seed), w, h, Eigen::Matrix3d::Identity());
}

TEST(Corners, UniformImageHasNone) {
  EXPECT_TRUE(DetectCorners(Image(40, 30, 1, 0.5), 100, 3, 0.01).empty());
}

TEST(Corners, ResponseMatchesEigenOracle) {
  const Image img = Textured(3, 48, 40);
  const auto ours = CornerResponse(img);
  const auto ref = oracle::MinEigenResponse(img);
  ASSERT_EQ(ours.size(), ref.size());
  for (std::size_t i = 0; i < ours.size(); ++i) ASSERT_NEAR(ours[i], ref[i], 1e-12) << i;
}

TEST(Corners, SquareYieldsItsFourVertices) {
  const Image img = WhiteSquare();
  // The oracle's strongest response in each quadrant sits at a vertex.
  const auto ref = oracle::MinEigenResponse(img);
  const std::vector<std::pair<double, double>> vertices = {{21.5, 21.5}, {41.5, 21.5}, {21.5, 41.5}, {41.5, 41.5}};
  for (const auto& [vx, vy] : vertices) {
    const int qx = vx < 32 ? 0 : 32, qy = vy < 32 ? 0 : 32;
    int bx = qx, by = qy;
    for (int y = qy; y < qy + 32; ++y)
      for (int x = qx; x < qx + 32; ++x)
        if (ref[y * 64 + x] > ref[by * 64 + bx]) bx = x, by = y;
    EXPECT_LE(std::hypot(bx - vx, by - vy), 2.0);
  }

  const auto corners = DetectCorners(img, 10, 5.0, 0.1);
  ASSERT_EQ(corners.size(), 4u);
  for (const auto& [vx, vy] : vertices) {
    const bool near = std::any_of(corners.begin(), corners.end(),
                                  [&](const Corner& c) { return std::hypot(c.x - vx, c.y - vy) <= 2.0; });
    EXPECT_TRUE(near) << vx << "," << vy;
  }
  for (std::size_t i = 1; i < corners.size(); ++i) EXPECT_GE(corners[i - 1].response, corners[i].response);
}

TEST(Corners, MaxNTruncates) { EXPECT_EQ(DetectCorners(WhiteSquare(), 2, 5.0, 0.1).size(), 2u); }

TEST(Corners, MinDistanceAndBoundsHold) {
  const Image img = Textured(5);
  const auto corners = DetectCorners(img, 300, 6.0, 0.01);
  ASSERT_GT(corners.size(), 50u);
  for (std::size_t i = 0; i < corners.size(); ++i) {
    EXPECT_GE(corners[i].x, 0.0);
    EXPECT_LT(corners[i].x, img.width());
    EXPECT_GE(corners[i].y, 0.0);
    EXPECT_LT(corners[i].y, img.height());
    for (std::size_t j = 0; j < i; ++j)
      EXPECT_GE(std::hypot(corners[i].x - corners[j].x, corners[i].y - corners[j].y), 6.0);
  }
}

TEST(Corners, RegionsRestrictTheSearch) {
  const Image img = Textured(5);
  const Rect box{40, 30, 50, 40};
  const auto corners = DetectCorners(img, 300, 4.0, 0.01, std::span(&box, 1));
  ASSERT_FALSE(corners.empty());
  for (const Corner& c : corners) EXPECT_TRUE(box.Contains(c.position()));
}

TEST(Corners, RejectsBadQuality) {
  EXPECT_THROW(DetectCorners(WhiteSquare(), 4, 1, 0.0), Error);
  EXPECT_THROW(DetectCorners(WhiteSquare(), 4, 1, 1.5), Error);
}

TEST(Descriptors, SelfMatchIsExact) {
  const Image img = Textured(11);
  const auto corners = DetectCorners(img, 200, 5.0, 0.01);
  const auto desc = ComputeDescriptors(img, corners);
  ASSERT_GT(desc.size(), 30u);
  const auto matches = MatchDescriptors(desc, desc, 0.9);
  EXPECT_EQ(matches.size(), desc.size());
  for (const auto& m : matches) {
    EXPECT_EQ(m.score, 0.0);
    EXPECT_EQ(m.a, m.b);
  }
}

TEST(Descriptors, BorderCornersAreSkipped) {
  const Image img = Textured(11, 64, 64);
  const std::vector<Corner> corners = {{14.4, 30, 1}, {15, 30, 1}, {48.4, 30, 1}, {48.6, 30, 1}, {30, 49, 1}};
  const auto desc = ComputeDescriptors(img, corners);
  ASSERT_EQ(desc.size(), 2u);
  EXPECT_EQ(desc[0].center.x, 15);
  EXPECT_EQ(desc[1].center.x, 48.4);
}

TEST(Descriptors, ComplementIsAtFullDistance) {
  const Image img = Textured(2, 64, 64);
  const std::vector<Corner> c = {{32, 32, 1}};
  Descriptor d = ComputeDescriptors(img, c).at(0);
  Descriptor inv = d;
  for (auto& w : inv.bits) w = ~w;
  EXPECT_EQ(Hamming(d, inv), kDescriptorBits);
  EXPECT_EQ(Hamming(d, d), 0);
}

TEST(Descriptors, PatternIsFixedAndInsidePatch) {
  const auto& p = SamplingPattern();
  std::set<std::tuple<int, int, int, int>> distinct;
  for (const SamplePair& s : p) {
    for (int v : {s.x1, s.y1, s.x2, s.y2}) {
      EXPECT_GE(v, -kPatchRadius);
      EXPECT_LE(v, kPatchRadius);
    }
    EXPECT_FALSE(s.x1 == s.x2 && s.y1 == s.y2);
    distinct.insert({s.x1, s.y1, s.x2, s.y2});
  }
  EXPECT_GT(distinct.size(), 250u);
  EXPECT_EQ(&p, &SamplingPattern());
}

TEST(Descriptors, HalfTurnDefeatsUprightDescriptors) {
  const Image img = Textured(21);
  Image rotated(img.width(), img.height(), 1);
  for (int y = 0; y < img.height(); ++y)
    for (int x = 0; x < img.width(); ++x) rotated.at(x, y) = img.at(img.width() - 1 - x, img.height() - 1 - y);
  const auto da = ComputeDescriptors(img, DetectCorners(img, 200, 5.0, 0.01));
  const auto db = ComputeDescriptors(rotated, DetectCorners(rotated, 200, 5.0, 0.01));
  const auto matches = MatchDescriptors(da, db, 0.8);
  int correct = 0;
  for (const auto& m : matches) {
    const double ex = img.width() - 1 - m.a.x, ey = img.height() - 1 - m.a.y;
    if (std::hypot(m.b.x - ex, m.b.y - ey) < 2.0) ++correct;
  }
  // Versus a shifted copy, which matches plentifully.
  const Image shifted = synthetic::Render(synthetic::Texture(21), 160, 120, synthetic::Translation(-3, 2));
  const auto ds = ComputeDescriptors(shifted, DetectCorners(shifted, 200, 5.0, 0.01));
  const auto control = MatchDescriptors(da, ds, 0.8);
  EXPECT_LE(correct, 2);
  EXPECT_LE(matches.size() * 10, da.size());
  EXPECT_GE(control.size() * 2, da.size());
}

TEST(Descriptors, MatchingIsSymmetric) {
  for (std::uint64_t seed = 1; seed <= 12; ++seed) {
    synthetic::ClipSpec spec{.width = 128, .height = 96, .frames = 2, .seed = seed, .noise_sigma = 0.04};
    const auto frames = synthetic::Pan(spec, 2.0 + seed % 3, -1.0);
    const auto da = ComputeDescriptors(frames[0], DetectCorners(frames[0], 150, 4.0, 0.01));
    const auto db = ComputeDescriptors(frames[1], DetectCorners(frames[1], 150, 4.0, 0.01));
    const double ratio = 0.6 + 0.03 * seed;
    const auto ab = MatchDescriptors(da, db, ratio);
    const auto ba = MatchDescriptors(db, da, ratio);
    std::set<std::tuple<double, double, double, double>> s1, s2;
    for (const auto& m : ab) s1.insert({m.a.x, m.a.y, m.b.x, m.b.y});
    for (const auto& m : ba) s2.insert({m.b.x, m.b.y, m.a.x, m.a.y});
    EXPECT_EQ(s1, s2) << "seed " << seed;
    EXPECT_FALSE(s1.empty());
  }
}

TEST(Tracking, IntegerShiftIsRecovered) {
  const Image a = Textured(31);
  const Image b = synthetic::Render(synthetic::Texture(31), 160, 120, synthetic::Translation(-3, 2));
  std::vector<Point2> pts;
  for (const Corner& c : DetectCorners(a, 150, 5.0, 0.01)) {
    if (c.x > 25 && c.y > 25 && c.x < 135 && c.y < 95) pts.push_back(c.position());
  }
  ASSERT_GT(pts.size(), 40u);
  const auto res = TrackPoints(a, b, pts, {.window = 11, .search_radius = 8});
  int exact = 0;
  for (const auto& r : res) exact += !r.lost && r.integer_dx == 3 && r.integer_dy == -2;
  EXPECT_GE(exact * 100, 95 * static_cast<int>(pts.size()));
}

TEST(Tracking, SubpixelShiftIsRefined) {
  const synthetic::Texture tex(33);
  const Image a = synthetic::Render(tex, 120, 100, Eigen::Matrix3d::Identity());
  const Image b = synthetic::Render(tex, 120, 100, synthetic::Translation(-1.4, -0.3));
  std::vector<Point2> pts;
  for (const Corner& c : DetectCorners(a, 60, 6.0, 0.05)) {
    if (c.x > 15 && c.y > 15 && c.x < 105 && c.y < 85) pts.push_back(c.position());
  }
  ASSERT_GT(pts.size(), 15u);
  std::vector<double> dx, dy;
  for (const auto& r : TrackPoints(a, b, pts, {.window = 11, .search_radius = 4})) {
    if (r.lost) continue;
    dx.push_back(r.displacement.x);
    dy.push_back(r.displacement.y);
  }
  ASSERT_GT(dx.size(), 10u);
  std::nth_element(dx.begin(), dx.begin() + dx.size() / 2, dx.end());
  std::nth_element(dy.begin(), dy.begin() + dy.size() / 2, dy.end());
  EXPECT_NEAR(dx[dx.size() / 2], 1.4, 0.25);
  EXPECT_NEAR(dy[dy.size() / 2], 0.3, 0.25);
}

TEST(Tracking, IdenticalFramesGiveZeroMotion) {
  const Image a = Textured(41);
  std::vector<Point2> pts;
  for (const Corner& c : DetectCorners(a, 80, 5.0, 0.01)) {
    if (c.x > 8 && c.y > 8 && c.x < 151 && c.y < 111) pts.push_back(c.position());
  }
  for (const auto& r : TrackPoints(a, a, pts)) {
    EXPECT_FALSE(r.lost);
    EXPECT_EQ(r.displacement, (Point2{0, 0}));
  }
}

TEST(Tracking, WindowLeavingFrameIsLost) {
  const Image a = Textured(41);
  const std::vector<Point2> pts = {{1, 60}, {80, 1}, {158, 60}, {80, 60}};
  const auto res = TrackPoints(a, a, pts, {.window = 11, .search_radius = 4});
  EXPECT_TRUE(res[0].lost);
  EXPECT_TRUE(res[1].lost);
  EXPECT_TRUE(res[2].lost);
  EXPECT_FALSE(res[3].lost);
}

TEST(Tracking, UnrelatedContentIsLost) {
  const Image a = Textured(41);
  const Image b = synthetic::NoiseFrame(160, 120, 9);
  const std::vector<Point2> pts = {{80, 60}, {50, 40}};
  for (const auto& r : TrackPoints(a, b, pts)) EXPECT_TRUE(r.lost);
}

TEST(Tracking, RejectsBadWindow) {
  const Image a(32, 32, 1);
  const std::vector<Point2> pts = {{16, 16}};
  EXPECT_THROW(TrackPoints(a, a, pts, {.window = 3}), Error);
  EXPECT_THROW(TrackPoints(a, a, pts, {.window = 8}), Error);
}

struct RigidFixture {
  std::vector<PointMatch> matches;
  std::vector<Eigen::Vector2d> a, b;
};

RigidFixture Rigid(double theta, double tx, double ty, int n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0, 200);
  RigidFixture f;
  for (int i = 0; i < n; ++i) {
    const Eigen::Vector2d p(u(rng), u(rng));
    const Eigen::Vector2d q(std::cos(theta) * p.x() - std::sin(theta) * p.y() + tx,
                            std::sin(theta) * p.x() + std::cos(theta) * p.y() + ty);
    f.a.push_back(p);
    f.b.push_back(q);
    f.matches.push_back({{p.x(), p.y()}, {q.x(), q.y()}, 0});
  }
  return f;
}

TEST(Ransac, ExactEuclideanAgreesWithLeastSquaresOracle) {
  const RigidFixture f = Rigid(0.1, 5, -3, 20, 7);
  const auto ref = oracle::RigidLeastSquares(f.a, f.b);
  const TransformModel m = FitTransformRansac(f.matches, TransformKind::kEuclidean, 100, 1.0, 42);
  EXPECT_NEAR(m.theta(), ref[0], 1e-6);
  EXPECT_NEAR(m.translation().x, ref[1], 1e-6);
  EXPECT_NEAR(m.translation().y, ref[2], 1e-6);
  EXPECT_NEAR(m.theta(), 0.1, 1e-6);
  EXPECT_EQ(m.inliers.size(), 20u);
  EXPECT_NEAR(m.scale(), 1.0, 1e-9);
  EXPECT_LT(m.rms_residual, 1e-9);
}

TEST(Ransac, OutliersAreRejectedAcrossSeeds) {
  int ok = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    RigidFixture f = Rigid(0.1, 5, -3, 20, 1000 + seed);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> u(0, 200);
    for (int i = 0; i < 8; ++i) f.matches.push_back({{u(rng), u(rng)}, {u(rng), u(rng)}, 0});
    const TransformModel m = FitTransformRansac(f.matches, TransformKind::kEuclidean, 500, 1.0, seed);
    const auto ref = oracle::RigidLeastSquares(f.a, f.b);
    ok += m.inliers.size() == 20u && std::abs(m.theta() - ref[0]) < 1e-6 &&
          std::abs(m.translation().x - ref[1]) < 1e-6 && std::abs(m.translation().y - ref[2]) < 1e-6;
  }
  EXPECT_GE(ok, 99);
}

TEST(Ransac, TooFewMatches) {
  const RigidFixture f = Rigid(0.1, 5, -3, 3, 1);
  try {
    FitTransformRansac(std::span(f.matches).first(1), TransformKind::kEuclidean, 10, 1.0, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kTooFewMatches);
  }
  EXPECT_THROW(FitTransformRansac(f.matches, TransformKind::kHomography, 10, 1.0, 1), Error);
}

TEST(Ransac, DeterministicForSeed) {
  RigidFixture f = Rigid(-0.3, 1, 2, 30, 5);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> n(0, 0.5);
  for (auto& m : f.matches) m.b = m.b + Point2{n(rng), n(rng)};
  const auto m1 = FitTransformRansac(f.matches, TransformKind::kSimilarity, 200, 0.8, 99);
  const auto m2 = FitTransformRansac(f.matches, TransformKind::kSimilarity, 200, 0.8, 99);
  EXPECT_EQ(m1.matrix, m2.matrix);
  EXPECT_EQ(m1.inliers, m2.inliers);
  EXPECT_EQ(m1.rms_residual, m2.rms_residual);
}

TEST(Ransac, InlierResidualsWithinThreshold) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    RigidFixture f = Rigid(0.05 * seed, seed, -2.0 * seed, 40, seed);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> n(0, 0.6);
    for (auto& m : f.matches) m.b = m.b + Point2{n(rng), n(rng)};
    const double thr = 1.0;
    const auto m = FitTransformRansac(f.matches, TransformKind::kEuclidean, 300, thr, seed);
    for (std::size_t i : m.inliers) EXPECT_LE(Norm(m.Apply(f.matches[i].a) - f.matches[i].b), thr);
    EXPECT_NEAR((m.matrix.topLeftCorner<2, 2>().transpose() * m.matrix.topLeftCorner<2, 2>() -
                 Eigen::Matrix2d::Identity()).norm(), 0.0, 1e-9);
  }
}

TEST(Ransac, SimilarityRecoversScale) {
  std::vector<PointMatch> matches;
  const TransformModel truth = TransformModel::Similarity(1.03, 0.02, -4, 6);
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0, 150);
  for (int i = 0; i < 25; ++i) {
    const Point2 p{u(rng), u(rng)};
    matches.push_back({p, truth.Apply(p), 0});
  }
  const auto m = FitTransformRansac(matches, TransformKind::kSimilarity, 50, 0.5, 3);
  EXPECT_NEAR(m.scale(), 1.03, 1e-9);
  EXPECT_NEAR(m.theta(), 0.02, 1e-9);
  EXPECT_NEAR(m.translation().x, -4, 1e-7);
}

TEST(Ransac, MinimalHomographyIsExact) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> u(0, 300), d(-20, 20);
  int checked = 0;
  for (int trial = 0; trial < 200; ++trial) {
    std::array<Point2, 4> a, b;
    std::array<Eigen::Vector2d, 4> ea, eb;
    for (int i = 0; i < 4; ++i) {
      a[i] = {u(rng), u(rng)};
      b[i] = a[i] + Point2{d(rng), d(rng)};
      ea[i] = {a[i].x, a[i].y};
      eb[i] = {b[i].x, b[i].y};
    }
    if (detail::DegenerateSample(TransformKind::kHomography, a, b)) continue;
    const auto h = detail::SolveHomography(a, b);
    ASSERT_TRUE(h.has_value());
    EXPECT_DOUBLE_EQ((*h)(2, 2), 1.0);
    for (int i = 0; i < 4; ++i) EXPECT_LT(Norm(ApplyMatrix(*h, a[i]) - b[i]), 1e-6);
    const Eigen::Matrix3d ref = oracle::HomographyFrom4(ea, eb);
    EXPECT_LT((ref - *h).cwiseAbs().maxCoeff() / ref.cwiseAbs().maxCoeff(), 1e-6);
    ++checked;
  }
  EXPECT_GT(checked, 150);
}

TEST(Ransac, HomographyWithOutliers) {
  Eigen::Matrix3d truth;
  truth << 0.9, 0.05, 12, -0.04, 1.1, -7, 1e-4, -2e-4, 1;
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> u(0, 200);
  std::vector<PointMatch> matches;
  for (int i = 0; i < 40; ++i) {
    const Point2 p{u(rng), u(rng)};
    matches.push_back({p, ApplyMatrix(truth, p), 0});
  }
  for (int i = 0; i < 15; ++i) matches.push_back({{u(rng), u(rng)}, {u(rng), u(rng)}, 0});
  const auto m = FitTransformRansac(matches, TransformKind::kHomography, 400, 1.0, 8);
  EXPECT_EQ(m.inliers.size(), 40u);
  EXPECT_DOUBLE_EQ(m.matrix(2, 2), 1.0);
  for (double x : {0.0, 200.0})
    for (double y : {0.0, 200.0}) EXPECT_LT(Norm(m.Apply({x, y}) - ApplyMatrix(truth, {x, y})), 1e-6);
}

TEST(Ransac, CollinearPointsAreDegenerate) {
  std::vector<PointMatch> matches;
  for (int i = 0; i < 10; ++i) matches.push_back({{double(i), 2.0 * i}, {double(i) + 1, 2.0 * i}, 0});
  try {
    FitTransformRansac(matches, TransformKind::kHomography, 10, 1.0, 1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDegenerate);
  }
}

TEST(Warp, IdentityAndRoundTrip) {
  const Image img = Textured(51, 80, 60);
  EXPECT_EQ(WarpImage(img, Eigen::Matrix3d::Identity(), 80, 60), img);
  const Eigen::Matrix3d t = synthetic::Translation(-5, -4);
  const Image moved = WarpImage(img, t, 80, 60, -1.0);
  EXPECT_EQ(moved.at(0, 0), -1.0);
  EXPECT_DOUBLE_EQ(moved.at(10, 10), img.at(5, 6));
  Image canvas(80, 60, 1, 0.0);
  PasteWarped(canvas, img, t.inverse());
  EXPECT_DOUBLE_EQ(canvas.at(10, 10), img.at(5, 6));
}

}  // namespace
}  // namespace cinemeta
