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

// Planar transforms and seeded RANSAC fitting.

#ifndef CINEMETA_GEOMETRY_TRANSFORM_HPP_
#define CINEMETA_GEOMETRY_TRANSFORM_HPP_

#include <Eigen/Dense>
#include <Eigen/SVD>
#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "cinemeta/error.hpp"
#include "cinemeta/geometry/descriptors.hpp"

namespace cinemeta {

enum class TransformKind { kEuclidean, kSimilarity, kHomography };

inline std::string_view ToString(TransformKind k) {
  switch (k) {
    case TransformKind::kEuclidean: return "euclidean";
    case TransformKind::kSimilarity: return "similarity";
    case TransformKind::kHomography: return "homography";
  }
  return "?";
}

inline int MinimalSampleSize(TransformKind k) { return k == TransformKind::kHomography ? 4 : 2; }

inline Point2 ApplyMatrix(const Eigen::Matrix3d& m, Point2 p) {
  const Eigen::Vector3d q = m * Eigen::Vector3d(p.x, p.y, 1.0);
  return {q.x() / q.z(), q.y() / q.z()};
}

// A fitted model. `matrix` maps points of image A to image B and always
// has h33 = 1; the euclidean and similarity parameters are read off it.
struct TransformModel {
  TransformKind kind = TransformKind::kHomography;
  Eigen::Matrix3d matrix = Eigen::Matrix3d::Identity();
  std::vector<std::size_t> inliers;
  double rms_residual = 0.0;

  static TransformModel Similarity(double scale, double theta, double tx, double ty) {
    TransformModel m;
    m.kind = scale == 1.0 ? TransformKind::kEuclidean : TransformKind::kSimilarity;
    const double c = scale * std::cos(theta), s = scale * std::sin(theta);
    m.matrix << c, -s, tx, s, c, ty, 0, 0, 1;
    return m;
  }

  Point2 Apply(Point2 p) const { return ApplyMatrix(matrix, p); }
  double scale() const { return std::hypot(matrix(0, 0), matrix(1, 0)); }
  double theta() const { return std::atan2(matrix(1, 0), matrix(0, 0)); }
  Point2 translation() const { return {matrix(0, 2), matrix(1, 2)}; }
};

namespace detail {

inline bool NearlyCollinear(Point2 a, Point2 b, Point2 c) {
  const Point2 u = b - a, v = c - a;
  const double cross = u.x * v.y - u.y * v.x;
  return std::abs(cross) <= 1e-6 * Norm(u) * Norm(v) || Norm(u) < 1e-9 || Norm(v) < 1e-9;
}

// Closed-form least squares (Umeyama in 2-D). Nullopt when the point sets
// have no spread.
inline std::optional<Eigen::Matrix3d> SolveSimilarity(std::span<const Point2> a, std::span<const Point2> b,
                                                      bool fix_scale) {
  const std::size_t n = a.size();
  Point2 ca, cb;
  for (std::size_t i = 0; i < n; ++i) {
    ca = ca + a[i];
    cb = cb + b[i];
  }
  ca = (1.0 / n) * ca;
  cb = (1.0 / n) * cb;
  double dot = 0, cross = 0, var_a = 0, var_b = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 p = a[i] - ca, q = b[i] - cb;
    dot += p.x * q.x + p.y * q.y;
    cross += p.x * q.y - p.y * q.x;
    var_a += p.x * p.x + p.y * p.y;
    var_b += q.x * q.x + q.y * q.y;
  }
  if (var_a < 1e-12 || var_b < 1e-12) return std::nullopt;
  const double theta = std::atan2(cross, dot);
  const double s = fix_scale ? 1.0 : std::hypot(dot, cross) / var_a;
  const double c = s * std::cos(theta), sn = s * std::sin(theta);
  Eigen::Matrix3d m;
  m << c, -sn, cb.x - (c * ca.x - sn * ca.y), sn, c, cb.y - (sn * ca.x + c * ca.y), 0, 0, 1;
  return m;
}

// Hartley normalisation: centroid to origin, mean distance sqrt(2).
inline Eigen::Matrix3d NormalisingTransform(std::span<const Point2> pts) {
  Point2 c;
  for (const Point2& p : pts) c = c + p;
  c = (1.0 / pts.size()) * c;
  double mean = 0;
  for (const Point2& p : pts) mean += Norm(p - c);
  mean /= pts.size();
  const double s = mean > 0 ? std::sqrt(2.0) / mean : 1.0;
  Eigen::Matrix3d t;
  t << s, 0, -s * c.x, 0, s, -s * c.y, 0, 0, 1;
  return t;
}

// Normalised DLT; four or more correspondences.
inline std::optional<Eigen::Matrix3d> SolveHomography(std::span<const Point2> a, std::span<const Point2> b) {
  const std::size_t n = a.size();
  const Eigen::Matrix3d ta = NormalisingTransform(a), tb = NormalisingTransform(b);
  Eigen::MatrixXd design(2 * n, 9);
  for (std::size_t i = 0; i < n; ++i) {
    const Point2 p = ApplyMatrix(ta, a[i]), q = ApplyMatrix(tb, b[i]);
    design.row(2 * i) << -p.x, -p.y, -1, 0, 0, 0, q.x * p.x, q.x * p.y, q.x;
    design.row(2 * i + 1) << 0, 0, 0, -p.x, -p.y, -1, q.y * p.x, q.y * p.y, q.y;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(design, Eigen::ComputeFullV);
  const Eigen::VectorXd h = svd.matrixV().col(8);
  Eigen::Matrix3d hn;
  hn << h(0), h(1), h(2), h(3), h(4), h(5), h(6), h(7), h(8);
  Eigen::Matrix3d m = tb.inverse() * hn * ta;
  if (std::abs(m(2, 2)) < 1e-12 || !m.allFinite()) return std::nullopt;
  m /= m(2, 2);
  return m;
}

inline bool DegenerateSample(TransformKind kind, std::span<const Point2> a, std::span<const Point2> b) {
  if (kind != TransformKind::kHomography) return Norm(a[1] - a[0]) < 1e-9 || Norm(b[1] - b[0]) < 1e-9;
  for (int i = 0; i < 4; ++i) {
    for (int j = i + 1; j < 4; ++j) {
      for (int k = j + 1; k < 4; ++k) {
        if (NearlyCollinear(a[i], a[j], a[k]) || NearlyCollinear(b[i], b[j], b[k])) return true;
      }
    }
  }
  return false;
}

inline std::optional<Eigen::Matrix3d> Solve(TransformKind kind, std::span<const Point2> a, std::span<const Point2> b) {
  switch (kind) {
    case TransformKind::kEuclidean: return SolveSimilarity(a, b, true);
    case TransformKind::kSimilarity: return SolveSimilarity(a, b, false);
    case TransformKind::kHomography: return SolveHomography(a, b);
  }
  return std::nullopt;
}

// Uniform integer in [0, n) without modulo bias, so the sample sequence
// is fixed by the seed alone.
inline std::size_t BoundedDraw(std::mt19937_64& engine, std::size_t n) {
  const std::uint64_t range = n;
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() - std::numeric_limits<std::uint64_t>::max() % range;
  std::uint64_t v;
  do {
    v = engine();
  } while (v >= limit);
  return static_cast<std::size_t>(v % range);
}

struct Scored {
  std::vector<std::size_t> inliers;
  double rms = 0.0;
};

inline Scored ScoreModel(const Eigen::Matrix3d& m, std::span<const PointMatch> matches, double threshold) {
  Scored s;
  double sum = 0.0;
  for (std::size_t i = 0; i < matches.size(); ++i) {
    const Point2 p = ApplyMatrix(m, matches[i].a);
    const double r = Norm(p - matches[i].b);
    if (r <= threshold) {
      s.inliers.push_back(i);
      sum += r * r;
    }
  }
  s.rms = s.inliers.empty() ? 0.0 : std::sqrt(sum / s.inliers.size());
  return s;
}

inline bool Better(const Scored& x, const Scored& y) {
  return x.inliers.size() > y.inliers.size() || (x.inliers.size() == y.inliers.size() && x.rms < y.rms);
}

}  // namespace detail

// Consecutive degenerate minimal samples tolerated before giving up.
inline constexpr int kMaxDegenerateDraws = 1000;

// Least squares over every match; no outlier rejection.
inline TransformModel FitTransform(std::span<const PointMatch> matches, TransformKind kind) {
  if (static_cast<int>(matches.size()) < MinimalSampleSize(kind))
    Fail(ErrorCode::kTooFewMatches, "need at least " + std::to_string(MinimalSampleSize(kind)) + " matches");
  std::vector<Point2> a, b;
  for (const PointMatch& m : matches) {
    a.push_back(m.a);
    b.push_back(m.b);
  }
  const auto solved = detail::Solve(kind, a, b);
  if (!solved) Fail(ErrorCode::kDegenerate, "point configuration is degenerate");
  TransformModel model;
  model.kind = kind;
  model.matrix = *solved;
  const auto scored = detail::ScoreModel(*solved, matches, std::numeric_limits<double>::infinity());
  model.inliers = scored.inliers;
  model.rms_residual = scored.rms;
  return model;
}

inline TransformModel FitTransformRansac(std::span<const PointMatch> matches, TransformKind kind, int iterations,
                                         double inlier_threshold, std::uint64_t seed) {
  const int k = MinimalSampleSize(kind);
  if (static_cast<int>(matches.size()) < k)
    Fail(ErrorCode::kTooFewMatches,
         std::to_string(matches.size()) + " matches, " + std::string(ToString(kind)) + " needs " + std::to_string(k));
  if (iterations < 1) Fail(ErrorCode::kInvalidArgument, "RANSAC needs at least one iteration");
  if (!(inlier_threshold > 0.0)) Fail(ErrorCode::kInvalidArgument, "inlier threshold must be positive");

  std::mt19937_64 engine(seed);
  std::optional<Eigen::Matrix3d> best_model;
  detail::Scored best;
  std::vector<std::size_t> idx(k);
  std::vector<Point2> sa(k), sb(k);
  for (int it = 0; it < iterations; ++it) {
    std::optional<Eigen::Matrix3d> candidate;
    for (int attempt = 0; !candidate; ++attempt) {
      if (attempt == kMaxDegenerateDraws)
        Fail(ErrorCode::kDegenerate, "no non-degenerate minimal sample after " + std::to_string(attempt) + " draws");
      for (int s = 0; s < k; ++s) {
        bool fresh;
        do {
          idx[s] = detail::BoundedDraw(engine, matches.size());
          fresh = std::find(idx.begin(), idx.begin() + s, idx[s]) == idx.begin() + s;
        } while (!fresh);
        sa[s] = matches[idx[s]].a;
        sb[s] = matches[idx[s]].b;
      }
      if (detail::DegenerateSample(kind, sa, sb)) continue;
      candidate = detail::Solve(kind, sa, sb);
    }
    const detail::Scored scored = detail::ScoreModel(*candidate, matches, inlier_threshold);
    if (!best_model || detail::Better(scored, best)) {
      best = scored;
      best_model = candidate;
    }
  }

  // Least-squares refit on the consensus set, kept only when it does not
  // lose support.
  if (static_cast<int>(best.inliers.size()) >= k) {
    std::vector<Point2> ia, ib;
    for (std::size_t i : best.inliers) {
      ia.push_back(matches[i].a);
      ib.push_back(matches[i].b);
    }
    if (const auto refit = detail::Solve(kind, ia, ib)) {
      const detail::Scored rescored = detail::ScoreModel(*refit, matches, inlier_threshold);
      if (rescored.inliers.size() >= best.inliers.size()) {
        best = rescored;
        best_model = refit;
      }
    }
  }
  TransformModel model;
  model.kind = kind;
  model.matrix = *best_model;
  model.inliers = std::move(best.inliers);
  model.rms_residual = best.rms;
  return model;
}

}  // namespace cinemeta

#endif  // CINEMETA_GEOMETRY_TRANSFORM_HPP_
