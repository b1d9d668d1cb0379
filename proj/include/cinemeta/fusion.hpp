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

#ifndef CINEMETA_FUSION_HPP_
#define CINEMETA_FUSION_HPP_

// Merges manifest facts, slate readings and annotator outputs into one
// MetadataRecord per clip, and keeps the JSON-lines catalog.

#include <algorithm>
#include <cmath>
#include <optional>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "cinemeta/formats/catalog.hpp"
#include "cinemeta/formats/manifest.hpp"
#include "cinemeta/io.hpp"
#include "cinemeta/metadata_model.hpp"
#include "cinemeta/profile.hpp"
#include "cinemeta/query.hpp"
#include "cinemeta/slate.hpp"

namespace cinemeta {

// Everything the annotators concluded about one clip. Absent means the
// annotator had nothing to say (or failed).
struct AnnotatorOutputs {
  ClipId clip_id;
  std::optional<Annotated<CameraMove>> camera_move;
  std::optional<Annotated<ShotType>> shot_type;
  std::vector<Annotated<ActorPID>> actors;
  std::optional<Annotated<DayNight>> time;
  std::optional<Annotated<SceneType>> scene_type;
  std::optional<Annotated<std::string>> places;
  std::vector<Annotated<std::string>> objects;
};

// Where a candidate came from; also the last tie-breaker.
enum class Source { kSlate, kAnnotator, kManifest };

template <typename V>
struct Candidate {
  Annotated<V> value;
  Source source;
};

namespace detail {

inline std::string ValueText(int v) { return std::to_string(v); }
inline std::string ValueText(const std::string& v) { return v; }
inline std::string ValueText(const ActorPID& v) { return v.pid; }
template <typename E>
  requires std::is_enum_v<E>
std::string ValueText(E v) {
  return std::string(ToString(v));
}

inline std::string ConfidenceText(double c) { return FormatNumber(std::round(c * 1000.0) / 1000.0); }

template <typename V>
std::string NoteFor(std::string_view field, const Annotated<V>& a) {
  return std::string(field) + "=" + ValueText(a.value()) + "(" + std::string(ToString(a.provenance())) + "," +
         ConfidenceText(a.confidence()) + ")";
}

// Strongest first: precedence rank, then confidence, then source order.
// The value text settles anything left so the order is total.
template <typename V>
auto StrengthKey(const Candidate<V>& c, const UserProfile& profile) {
  return std::make_tuple(profile.Rank(c.value.provenance()), -c.value.confidence(), static_cast<int>(c.source),
                         ValueText(c.value.value()));
}

template <typename V>
void SortByStrength(std::vector<Candidate<V>>& cs, const UserProfile& profile) {
  std::sort(cs.begin(), cs.end(), [&](const Candidate<V>& a, const Candidate<V>& b) {
    return StrengthKey(a, profile) < StrengthKey(b, profile);
  });
}

// Single-valued field: the strongest candidate clearing min_confidence wins;
// everything else is noted.
template <typename V>
std::optional<Annotated<V>> FuseScalar(std::string_view field, std::vector<Candidate<V>> cs,
                                       const UserProfile& profile, std::vector<std::string>& notes) {
  SortByStrength(cs, profile);
  std::optional<Annotated<V>> winner;
  for (const Candidate<V>& c : cs) {
    if (!winner && c.value.confidence() >= profile.min_confidence) {
      winner = c.value;
    } else {
      notes.push_back(NoteFor(field, c.value));
    }
  }
  return winner;
}

// List field: one entry per distinct value, the strongest candidate for it.
// Values whose every candidate falls below min_confidence are noted.
// Output is ordered by value text.
template <typename V>
std::vector<Annotated<V>> FuseList(std::string_view field, std::vector<Candidate<V>> cs, const UserProfile& profile,
                                   std::vector<std::string>& notes) {
  SortByStrength(cs, profile);
  std::map<std::string, Annotated<V>> kept;
  for (const Candidate<V>& c : cs) {
    const std::string key = ValueText(c.value.value());
    if (c.value.confidence() >= profile.min_confidence) {
      kept.try_emplace(key, c.value);
    } else if (!kept.contains(key)) {
      notes.push_back(NoteFor(field, c.value));
    }
  }
  std::vector<Annotated<V>> out;
  for (auto& [key, a] : kept) out.push_back(std::move(a));
  return out;
}

template <typename V>
void Offer(std::vector<Candidate<V>>& cs, const std::optional<Annotated<V>>& a, Source s) {
  if (a) cs.push_back({*a, s});
}

}  // namespace detail

// Slate readings become slate_ocr candidates for scene/shot/take. Text that
// does not parse as an integer is noted, never turned into a number.
inline void OfferSlate(const SlateReading& slate, std::vector<Candidate<int>>& scene,
                       std::vector<Candidate<int>>& shot, std::vector<Candidate<int>>& take,
                       std::vector<std::string>& notes) {
  const std::pair<const char*, std::vector<Candidate<int>>*> targets[] = {
      {"scene", &scene}, {"shot", &shot}, {"take", &take}};
  for (const auto& [region, list] : targets) {
    auto it = slate.fields.find(region);
    if (it == slate.fields.end()) continue;
    const FieldReading& f = it->second;
    const double conf = std::clamp(f.confidence, 0.0, 1.0);
    if (f.parsed) {
      list->push_back({Annotated<int>(*f.parsed, conf, Provenance::kSlateOcr), Source::kSlate});
    } else {
      notes.push_back(std::string(region) + "_num_unparsed=" + f.raw_text + "(slate_ocr," +
                      detail::ConfidenceText(conf) + ")");
    }
  }
}

// Per field: candidates under profile.min_confidence are dropped, the
// highest-precedence survivor wins (ties: confidence, then slate before
// annotators before manifest), and losers go to notes. All fields are
// stored; the profile's selection only filters exports.
inline MetadataRecord Fuse(const ClipManifest& clip, const std::optional<SlateReading>& slate,
                           const AnnotatorOutputs& annotations, const UserProfile& profile) {
  if (!(annotations.clip_id == clip.clip_id))
    Fail(ErrorCode::kClipMismatch, "annotations for '" + annotations.clip_id.str() + "' offered to clip '" +
                                       clip.clip_id.str() + "'");
  MetadataRecord r;
  r.clip_id = clip.clip_id;
  r.basic = clip.basic;
  std::vector<std::string> notes;

  std::vector<Candidate<int>> scene, shot, take;
  if (slate) OfferSlate(*slate, scene, shot, take, notes);
  auto manifest_int = [](std::vector<Candidate<int>>& cs, const std::optional<int>& v) {
    if (v) cs.push_back({Annotated<int>(*v, 1.0, Provenance::kManifest), Source::kManifest});
  };
  manifest_int(scene, clip.scene_num);
  manifest_int(shot, clip.shot_num);
  manifest_int(take, clip.take_num);

  SemanticFields& s = r.semantic;
  s.scene_num = detail::FuseScalar("scene_num", std::move(scene), profile, notes);
  s.shot_num = detail::FuseScalar("shot_num", std::move(shot), profile, notes);
  s.take_num = detail::FuseScalar("take_num", std::move(take), profile, notes);

  std::vector<Candidate<CameraMove>> move;
  detail::Offer(move, annotations.camera_move, Source::kAnnotator);
  s.camera_move = detail::FuseScalar("camera_move", std::move(move), profile, notes);

  std::vector<Candidate<ShotType>> shot_type;
  detail::Offer(shot_type, annotations.shot_type, Source::kAnnotator);
  s.shot_type = detail::FuseScalar("shot_type", std::move(shot_type), profile, notes);

  std::vector<Candidate<ActorPID>> actors;
  for (const auto& a : annotations.actors) actors.push_back({a, Source::kAnnotator});
  s.actors = detail::FuseList("actors", std::move(actors), profile, notes);

  std::vector<Candidate<DayNight>> time;
  detail::Offer(time, annotations.time, Source::kAnnotator);
  s.time = detail::FuseScalar("time", std::move(time), profile, notes);

  std::vector<Candidate<SceneType>> scene_type;
  detail::Offer(scene_type, annotations.scene_type, Source::kAnnotator);
  if (clip.scene_type)
    scene_type.push_back({Annotated<SceneType>(*clip.scene_type, 1.0, Provenance::kManifest), Source::kManifest});
  s.scene_type = detail::FuseScalar("scene_type", std::move(scene_type), profile, notes);

  std::vector<Candidate<std::string>> places;
  detail::Offer(places, annotations.places, Source::kAnnotator);
  s.places = detail::FuseScalar("places", std::move(places), profile, notes);

  std::vector<Candidate<std::string>> objects;
  for (const auto& o : annotations.objects) objects.push_back({o, Source::kAnnotator});
  s.objects = detail::FuseList("objects", std::move(objects), profile, notes);

  for (const std::string& n : notes) AppendNote(r.notes, n);
  return r;
}

// ---------------------------------------------------------------------------
// Catalog

// Appends one record, rewriting the file through a temporary so readers
// see either the old or the new catalog. Callers serialise appends.
inline void CatalogAppend(const fs::path& catalog, const MetadataRecord& record) {
  std::string text = fs::exists(catalog) ? ReadFile(catalog) : std::string();
  for (const MetadataRecord& r : ParseCatalog(text, catalog.string())) {
    if (r.clip_id == record.clip_id)
      Fail(ErrorCode::kDuplicateClipId, catalog.string() + ": clip '" + record.clip_id.str() + "' already catalogued");
  }
  if (!text.empty() && text.back() != '\n') text += '\n';
  text += SerializeRecord(record);
  text += '\n';
  WriteFileAtomic(catalog, text);
}

inline std::vector<ClipId> CatalogQuery(const fs::path& catalog, const QueryPredicate& predicate) {
  std::vector<ClipId> out;
  for (const MetadataRecord& r : ReadCatalog(catalog)) {
    if (Match(r, predicate)) out.push_back(r.clip_id);
  }
  return out;
}

}  // namespace cinemeta

#endif  // CINEMETA_FUSION_HPP_
