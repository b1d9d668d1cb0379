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
#include <random>

#include "cinemeta/fusion.hpp"
#include "support/decision_oracles.hpp"
#include "support/generators.hpp"

namespace cinemeta {
namespace {

ClipManifest Clip(const std::string& id) {
  ClipManifest m;
  m.clip_id = ClipId(id);
  m.frame_pattern = "f%04d.ppm";
  return m;
}

AnnotatorOutputs Empty(const std::string& id) {
  AnnotatorOutputs a;
  a.clip_id = ClipId(id);
  return a;
}

SlateReading Slate(std::optional<int> scene, const std::string& raw, double conf) {
  SlateReading s;
  s.fields["scene"] = FieldReading{raw, scene, conf};
  return s;
}

UserProfile Profile(double min_confidence = 0.0) {
  UserProfile p = UserProfile::Make({Label::kSceneNum, Label::kCameraMove});
  p.min_confidence = min_confidence;
  return p;
}

TEST(Fuse, SlateBeatsManifestAndManifestIsNoted) {
  ClipManifest clip = Clip("A001");
  clip.scene_num = 11;
  const MetadataRecord r = Fuse(clip, Slate(12, "12", 0.9), Empty("A001"), Profile());
  ASSERT_TRUE(r.semantic.scene_num);
  EXPECT_EQ(r.semantic.scene_num->value(), 12);
  EXPECT_EQ(r.semantic.scene_num->provenance(), Provenance::kSlateOcr);
  EXPECT_DOUBLE_EQ(r.semantic.scene_num->confidence(), 0.9);
  EXPECT_EQ(r.notes, "scene_num=11(manifest,1)");
}

TEST(Fuse, AbsentAnnotationStaysAbsent) {
  const MetadataRecord r = Fuse(Clip("A"), std::nullopt, Empty("A"), Profile());
  EXPECT_FALSE(r.semantic.time);
  EXPECT_FALSE(r.semantic.scene_num);
  EXPECT_FALSE(r.notes);
}

TEST(Fuse, BelowMinConfidenceIsDroppedAndNoted) {
  AnnotatorOutputs a = Empty("A");
  a.camera_move.emplace(CameraMove::kPan, 0.6, Provenance::kAnnotator);
  const MetadataRecord r = Fuse(Clip("A"), std::nullopt, a, Profile(0.8));
  EXPECT_FALSE(r.semantic.camera_move);
  EXPECT_EQ(r.notes, "camera_move=pan(annotator,0.6)");
  // The threshold itself passes.
  EXPECT_TRUE(Fuse(Clip("A"), std::nullopt, a, Profile(0.6)).semantic.camera_move);
}

TEST(Fuse, UnparsedSlateTextIsNotedNeverNumbered) {
  ClipManifest clip = Clip("A");
  clip.scene_num = 11;
  const MetadataRecord r = Fuse(clip, Slate(std::nullopt, "12A", 0.9), Empty("A"), Profile());
  EXPECT_EQ(r.semantic.scene_num->value(), 11);
  EXPECT_EQ(r.semantic.scene_num->provenance(), Provenance::kManifest);
  EXPECT_EQ(r.notes, "scene_num_unparsed=12A(slate_ocr,0.9)");
}

TEST(Fuse, ClipMismatch) {
  try {
    Fuse(Clip("A"), std::nullopt, Empty("B"), Profile());
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kClipMismatch);
  }
}

TEST(Fuse, BasicMetadataAndManifestSceneType) {
  ClipManifest clip = Clip("A");
  clip.basic.fps = 24;
  clip.scene_type = SceneType::kInside;
  AnnotatorOutputs a = Empty("A");
  a.scene_type.emplace(SceneType::kOutside, 0.95, Provenance::kAnnotator);
  const MetadataRecord r = Fuse(clip, std::nullopt, a, Profile());
  EXPECT_EQ(r.basic, clip.basic);
  EXPECT_EQ(r.semantic.scene_type->value(), SceneType::kOutside);  // annotator outranks manifest by default
  EXPECT_EQ(r.notes, "scene_type=Inside(manifest,1)");
}

TEST(Fuse, PrecedenceExhaustive) {
  // Every precedence order of the three scene/shot/take sources, every
  // confidence on a grid including the threshold, with and without each
  // source present.
  std::vector<Provenance> order = {Provenance::kManual, Provenance::kSlateOcr, Provenance::kAnnotator,
                                   Provenance::kManifest, Provenance::kCamera};
  std::sort(order.begin(), order.end());
  const double grid[] = {0.0, 0.5, 0.7, 1.0};
  int cases = 0;
  do {
    UserProfile p = Profile();
    p.precedence = order;
    for (double min_conf : {0.0, 0.5, 0.7}) {
      p.min_confidence = min_conf;
      for (int present = 0; present < 4; ++present) {
        for (double slate_conf : grid) {
          ClipManifest clip = Clip("A");
          std::vector<oracle::Candidate> cands;
          std::optional<SlateReading> slate;
          if (present & 1) {
            slate = Slate(12, "12", slate_conf);
            cands.push_back({12, Provenance::kSlateOcr, slate_conf, Source::kSlate});
          }
          if (present & 2) {
            clip.scene_num = 11;
            cands.push_back({11, Provenance::kManifest, 1.0, Source::kManifest});
          }
          const MetadataRecord r = Fuse(clip, slate, Empty("A"), p);
          const auto expected = oracle::FusionWinner(cands, order, min_conf);
          ASSERT_EQ(r.semantic.scene_num.has_value(), expected.has_value());
          if (expected) {
            EXPECT_EQ(r.semantic.scene_num->value(), *expected);
          }
          // Every losing or filtered candidate is accounted for in notes.
          const std::size_t noted = r.notes ? std::count(r.notes->begin(), r.notes->end(), '(') : 0;
          EXPECT_EQ(noted, cands.size() - (expected ? 1 : 0));
          ++cases;
        }
      }
    }
  } while (std::next_permutation(order.begin(), order.end()));
  EXPECT_EQ(cases, 120 * 3 * 4 * 4);
}

TEST(Fuse, EqualRankTiesGoToConfidenceThenSlate) {
  // Two candidates with one provenance can only come from list fields or
  // from a profile that ranks slate and manifest equally (neither listed).
  UserProfile p = Profile();
  p.precedence = {Provenance::kManual};
  ClipManifest clip = Clip("A");
  clip.scene_num = 11;
  EXPECT_EQ(Fuse(clip, Slate(12, "12", 1.0), Empty("A"), p).semantic.scene_num->value(), 12);  // source order
  EXPECT_EQ(Fuse(clip, Slate(12, "12", 0.99), Empty("A"), p).semantic.scene_num->value(), 11);  // confidence
}

TEST(Fuse, ListsAreDeduplicatedAndPermutationInvariant) {
  AnnotatorOutputs a = Empty("A");
  a.actors = {Annotated<ActorPID>({"p2", std::nullopt}, 0.7, Provenance::kAnnotator),
              Annotated<ActorPID>({"p1", "Ann"}, 0.9, Provenance::kAnnotator),
              Annotated<ActorPID>({"p2", std::nullopt}, 0.8, Provenance::kAnnotator)};
  a.objects = {Annotated<std::string>("car", 0.4, Provenance::kAnnotator),
               Annotated<std::string>("tree", 0.2, Provenance::kAnnotator)};
  const MetadataRecord base = Fuse(Clip("A"), std::nullopt, a, Profile(0.3));
  ASSERT_EQ(base.semantic.actors.size(), 2u);
  EXPECT_EQ(base.semantic.actors[0].value().pid, "p1");
  EXPECT_DOUBLE_EQ(base.semantic.actors[1].confidence(), 0.8);
  ASSERT_EQ(base.semantic.objects.size(), 1u);
  EXPECT_EQ(base.notes, "objects=tree(annotator,0.2)");
  std::mt19937 rng(1);
  for (int i = 0; i < 20; ++i) {
    std::shuffle(a.actors.begin(), a.actors.end(), rng);
    std::shuffle(a.objects.begin(), a.objects.end(), rng);
    EXPECT_EQ(Fuse(Clip("A"), std::nullopt, a, Profile(0.3)), base);
  }
}

TEST(Fuse, RaisingMinConfidenceNeverAddsValues) {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  auto populated = [](const MetadataRecord& r) {
    const SemanticFields& s = r.semantic;
    return int(s.scene_num.has_value()) + s.camera_move.has_value() + s.time.has_value() + s.places.has_value() +
           int(s.actors.size()) + int(s.objects.size());
  };
  for (int trial = 0; trial < 200; ++trial) {
    ClipManifest clip = Clip("A");
    if (u(rng) < 0.5) clip.scene_num = 3;
    AnnotatorOutputs a = Empty("A");
    a.camera_move.emplace(CameraMove::kTilt, u(rng), Provenance::kAnnotator);
    a.time.emplace(DayNight::kNight, u(rng), Provenance::kAnnotator);
    a.places.emplace("street", u(rng), Provenance::kAnnotator);
    a.actors.emplace_back(ActorPID{"x", std::nullopt}, u(rng), Provenance::kAnnotator);
    a.objects.emplace_back("car", u(rng), Provenance::kAnnotator);
    const auto slate = Slate(4, "4", u(rng));
    int previous = 1 << 20;
    for (double m = 0.0; m <= 1.0; m += 0.125) {
      const MetadataRecord r = Fuse(clip, slate, a, Profile(m));
      EXPECT_LE(populated(r), previous);
      previous = populated(r);
      // No fabricated provenance.
      if (r.semantic.scene_num) {
        EXPECT_TRUE(r.semantic.scene_num->provenance() == Provenance::kSlateOcr ||
                    r.semantic.scene_num->provenance() == Provenance::kManifest);
      }
    }
  }
}

// --- catalog ------------------------------------------------------------------

MetadataRecord Record(const std::string& id, CameraMove move, DayNight time) {
  MetadataRecord r;
  r.clip_id = ClipId(id);
  r.semantic.camera_move.emplace(move, 0.9, Provenance::kAnnotator);
  r.semantic.time.emplace(time, 0.8, Provenance::kAnnotator);
  return r;
}

TEST(Catalog, AppendQueryAndDuplicates) {
  const fs::path dir = testing::ScratchDir("fusion_catalog");
  const fs::path cat = dir / "catalog.jsonl";
  CatalogAppend(cat, Record("c1", CameraMove::kPan, DayNight::kDay));
  EXPECT_EQ(CatalogQuery(cat, ParsePredicate("")), std::vector<ClipId>{ClipId("c1")});
  CatalogAppend(cat, Record("c2", CameraMove::kPan, DayNight::kNight));
  CatalogAppend(cat, Record("c3", CameraMove::kStatic, DayNight::kDay));
  try {
    CatalogAppend(cat, Record("c2", CameraMove::kTilt, DayNight::kDay));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDuplicateClipId);
  }
  EXPECT_EQ(ReadCatalog(cat).size(), 3u);
  EXPECT_FALSE(fs::exists(dir / "catalog.jsonl.tmp"));

  // Brute-force filter over the records.
  const auto records = ReadCatalog(cat);
  for (const char* q : {"CameraMove=pan,Time=Day", "CameraMove=pan", "Time=Day", "Time=Night,CameraMove=static", ""}) {
    std::vector<ClipId> expected;
    const QueryPredicate pred = ParsePredicate(q);
    for (const auto& r : records) {
      bool ok = true;
      for (const Clause& c : pred.clauses) {
        const std::string cell = CellText(r, c.field);
        std::string want;
        std::visit([&](const auto& v) {
          if constexpr (std::is_same_v<std::decay_t<decltype(v)>, int>) want = std::to_string(v);
          else if constexpr (std::is_same_v<std::decay_t<decltype(v)>, std::string>) want = v;
          else want = std::string(ToString(v));
        }, c.value);
        ok = ok && cell == want;
      }
      if (ok) expected.push_back(r.clip_id);
    }
    EXPECT_EQ(CatalogQuery(cat, pred), expected) << q;
  }
  EXPECT_EQ(CatalogQuery(cat, ParsePredicate("CameraMove=pan,Time=Day")), std::vector<ClipId>{ClipId("c1")});
}

TEST(Catalog, MissingFileIsAnIoError) {
  try {
    CatalogQuery(testing::ScratchDir("fusion_missing") / "nope.jsonl", ParsePredicate(""));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kIo);
    EXPECT_NE(std::string(e.what()).find("nope.jsonl"), std::string::npos);
  }
}

}  // namespace
}  // namespace cinemeta
