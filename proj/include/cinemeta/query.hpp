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

#ifndef CINEMETA_QUERY_HPP_
#define CINEMETA_QUERY_HPP_

#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "cinemeta/metadata_model.hpp"

namespace cinemeta {

using ClauseValue = std::variant<int, CameraMove, ShotType, DayNight, SceneType, std::string>;

struct Clause {
  Label field;
  ClauseValue value;

  bool operator==(const Clause&) const = default;
};

// Conjunction of equality clauses (membership for ActorPID / ObjectType).
// Only constructible through ParsePredicate or from already-validated clauses.
struct QueryPredicate {
  std::vector<Clause> clauses;

  bool operator==(const QueryPredicate&) const = default;
};

inline bool IsQueryableLabel(Label l) { return l != Label::kName && l != Label::kNotes; }

// Grammar: `Field=Value(,Field=Value)*`; surrounding spaces are ignored and an
// empty string is the empty (always-true) predicate.
inline QueryPredicate ParsePredicate(std::string_view text) {
  QueryPredicate predicate;
  if (Trim(text).empty()) return predicate;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t end = std::min(text.find(',', pos), text.size());
    const std::string_view clause = Trim(text.substr(pos, end - pos));
    pos = end + 1;
    const std::size_t eq = clause.find('=');
    if (eq == std::string_view::npos) {
      Fail(ErrorCode::kBadValue, "clause '" + std::string(clause) + "' is not Field=Value");
    }
    const std::string_view name = Trim(clause.substr(0, eq));
    const std::string_view value = Trim(clause.substr(eq + 1));
    auto label = LabelFromString(name);
    if (!label || !IsQueryableLabel(*label)) {
      Fail(ErrorCode::kUnknownField, "unknown field '" + std::string(name) + "'");
    }
    auto bad = [&]() -> ClauseValue {
      Fail(ErrorCode::kBadValue,
           "'" + std::string(value) + "' is not a valid " + std::string(name) + " value");
    };
    ClauseValue v;
    switch (*label) {
      case Label::kSceneNum:
      case Label::kShotNum:
      case Label::kTakeNum: {
        auto n = ParseUnsigned(value);
        v = (n && *n <= INT32_MAX) ? ClauseValue(static_cast<int>(*n)) : bad();
        break;
      }
      case Label::kCameraMove: {
        auto m = CameraMoveFromString(value);
        v = m ? ClauseValue(*m) : bad();
        break;
      }
      case Label::kShotType: {
        auto s = ShotTypeFromString(value);
        v = s ? ClauseValue(*s) : bad();
        break;
      }
      case Label::kTime: {
        auto t = DayNightFromString(value);
        v = t ? ClauseValue(*t) : bad();
        break;
      }
      case Label::kSceneType: {
        auto t = SceneTypeFromString(value);
        v = t ? ClauseValue(*t) : bad();
        break;
      }
      default:
        v = IsValidToken(value) ? ClauseValue(std::string(value)) : bad();
        break;
    }
    predicate.clauses.push_back(Clause{*label, std::move(v)});
  }
  return predicate;
}

inline bool MatchClause(const MetadataRecord& record, const Clause& clause) {
  const SemanticFields& s = record.semantic;
  auto eq = [&](const auto& field) {
    using V = std::decay_t<decltype(field->value())>;
    return field.has_value() && std::holds_alternative<V>(clause.value) &&
           field->value() == std::get<V>(clause.value);
  };
  switch (clause.field) {
    case Label::kSceneNum: return eq(s.scene_num);
    case Label::kShotNum: return eq(s.shot_num);
    case Label::kTakeNum: return eq(s.take_num);
    case Label::kCameraMove: return eq(s.camera_move);
    case Label::kShotType: return eq(s.shot_type);
    case Label::kTime: return eq(s.time);
    case Label::kSceneType: return eq(s.scene_type);
    case Label::kPlaces: return eq(s.places);
    case Label::kActorPID:
      for (const auto& a : s.actors) {
        if (a.value().pid == std::get<std::string>(clause.value)) return true;
      }
      return false;
    case Label::kObjectType:
      for (const auto& o : s.objects) {
        if (o.value() == std::get<std::string>(clause.value)) return true;
      }
      return false;
    case Label::kName:
    case Label::kNotes: return false;
  }
  return false;
}

inline bool Match(const MetadataRecord& record, const QueryPredicate& predicate) {
  for (const Clause& c : predicate.clauses) {
    if (!MatchClause(record, c)) return false;
  }
  return true;
}

}  // namespace cinemeta

#endif  // CINEMETA_QUERY_HPP_
