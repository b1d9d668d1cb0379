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

#ifndef CINEMETA_PROFILE_HPP_
#define CINEMETA_PROFILE_HPP_

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cinemeta/metadata_model.hpp"

namespace cinemeta {

enum class OutputFormat { kAle, kCsv, kJson };

inline std::string_view ToString(OutputFormat f) {
  switch (f) {
    case OutputFormat::kAle: return "ale";
    case OutputFormat::kCsv: return "csv";
    case OutputFormat::kJson: return "json";
  }
  return "";
}

inline std::vector<Provenance> DefaultPrecedence() {
  return {Provenance::kManual, Provenance::kSlateOcr, Provenance::kAnnotator,
          Provenance::kManifest, Provenance::kCamera};
}

// Which labels a user wants, in which file format, under which header names,
// and how competing sources are ranked during fusion.
struct UserProfile {
  std::vector<Label> selected_labels;
  OutputFormat output_format = OutputFormat::kAle;
  std::map<Label, std::string> column_renames;
  std::vector<Provenance> precedence = DefaultPrecedence();
  double min_confidence = 0.0;
  // ALE heading values; FPS falls back to the first record when unset.
  std::string video_format = "1080";
  std::optional<double> fps;

  // Export column order: Name first, then the selection without Name.
  std::vector<Label> Columns() const {
    std::vector<Label> cols{Label::kName};
    for (Label l : selected_labels) {
      if (l != Label::kName) cols.push_back(l);
    }
    return cols;
  }

  std::string HeaderFor(Label l) const {
    auto it = column_renames.find(l);
    return it != column_renames.end() ? it->second : std::string(ToString(l));
  }

  // Lower is stronger; provenances missing from the list rank last.
  std::size_t Rank(Provenance p) const {
    auto it = std::find(precedence.begin(), precedence.end(), p);
    return static_cast<std::size_t>(it - precedence.begin());
  }

  // Builds a profile with validation; used by LoadProfile and by tests.
  static UserProfile Make(std::vector<Label> labels, OutputFormat format = OutputFormat::kAle,
                          std::map<Label, std::string> renames = {}) {
    UserProfile p;
    p.selected_labels = std::move(labels);
    p.output_format = format;
    p.column_renames = std::move(renames);
    p.Validate();
    return p;
  }

  void Validate() const {
    if (selected_labels.empty()) Fail(ErrorCode::kEmptySelection, "profile selects no labels");
    std::vector<Label> seen;
    for (Label l : selected_labels) {
      if (std::find(seen.begin(), seen.end(), l) != seen.end()) {
        Fail(ErrorCode::kBadValue, "label '" + std::string(ToString(l)) + "' selected twice");
      }
      seen.push_back(l);
    }
    std::vector<std::string> headers;
    for (Label l : Columns()) {
      if (auto it = column_renames.find(l); it != column_renames.end()) {
        if (it->second.empty() || HasControlChar(it->second)) {
          Fail(ErrorCode::kBadValue, "invalid header name for " + std::string(ToString(l)));
        }
      }
      headers.push_back(HeaderFor(l));
    }
    for (const auto& [label, name] : column_renames) {
      const auto cols = Columns();
      if (std::find(cols.begin(), cols.end(), label) == cols.end()) {
        Fail(ErrorCode::kUnknownLabel,
             "rename of unselected label '" + std::string(ToString(label)) + "'");
      }
    }
    std::sort(headers.begin(), headers.end());
    if (std::adjacent_find(headers.begin(), headers.end()) != headers.end()) {
      Fail(ErrorCode::kBadValue, "duplicate column header after renames");
    }
    std::vector<Provenance> prec = precedence;
    std::sort(prec.begin(), prec.end());
    if (std::adjacent_find(prec.begin(), prec.end()) != prec.end()) {
      Fail(ErrorCode::kBadPrecedence, "duplicated provenance in precedence");
    }
    if (!(min_confidence >= 0.0 && min_confidence <= 1.0)) {
      Fail(ErrorCode::kBadValue, "min_confidence outside [0,1]");
    }
    if (fps && !(*fps > 0.0)) Fail(ErrorCode::kBadValue, "profile fps must be positive");
    if (video_format.empty() || HasControlChar(video_format)) {
      Fail(ErrorCode::kBadValue, "invalid video_format");
    }
  }
};

inline UserProfile ProfileFromJson(const Json& j) {
  if (!j.is_object()) Fail(ErrorCode::kBadType, "profile: expected an object");
  UserProfile p;
  auto labels = j.find("selected_labels");
  if (labels == j.end()) Fail(ErrorCode::kMissingKey, "profile: missing key 'selected_labels'");
  if (!labels->is_array()) Fail(ErrorCode::kBadType, "profile.selected_labels: expected an array");
  for (const Json& v : *labels) {
    if (!v.is_string()) Fail(ErrorCode::kBadType, "profile.selected_labels: expected strings");
    auto l = LabelFromString(v.get<std::string>());
    if (!l) Fail(ErrorCode::kUnknownLabel, "unknown label '" + v.get<std::string>() + "'");
    p.selected_labels.push_back(*l);
  }
  if (auto it = j.find("output_format"); it != j.end()) {
    const std::string f = detail::RequireString(*it, "profile.output_format");
    if (f == "ale") {
      p.output_format = OutputFormat::kAle;
    } else if (f == "csv") {
      p.output_format = OutputFormat::kCsv;
    } else if (f == "json") {
      p.output_format = OutputFormat::kJson;
    } else {
      Fail(ErrorCode::kBadValue, "profile.output_format: unknown format '" + f + "'");
    }
  }
  if (auto it = j.find("column_renames"); it != j.end()) {
    if (!it->is_object()) Fail(ErrorCode::kBadType, "profile.column_renames: expected an object");
    for (auto kv = it->begin(); kv != it->end(); ++kv) {
      auto l = LabelFromString(kv.key());
      if (!l) Fail(ErrorCode::kUnknownLabel, "rename of unknown label '" + kv.key() + "'");
      p.column_renames[*l] = detail::RequireString(kv.value(), "profile.column_renames");
    }
  }
  if (auto it = j.find("precedence"); it != j.end()) {
    if (!it->is_array()) Fail(ErrorCode::kBadType, "profile.precedence: expected an array");
    p.precedence.clear();
    for (const Json& v : *it) {
      auto prov = v.is_string() ? ProvenanceFromString(v.get<std::string>()) : std::nullopt;
      if (!prov) Fail(ErrorCode::kBadPrecedence, "unknown provenance " + v.dump());
      p.precedence.push_back(*prov);
    }
  }
  if (auto it = j.find("min_confidence"); it != j.end()) {
    p.min_confidence = detail::RequireNumber(*it, "profile.min_confidence");
  }
  if (auto it = j.find("video_format"); it != j.end()) {
    p.video_format = detail::RequireString(*it, "profile.video_format");
  }
  if (auto it = j.find("fps"); it != j.end()) {
    p.fps = detail::RequireNumber(*it, "profile.fps");
  }
  p.Validate();
  return p;
}

inline UserProfile LoadProfile(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    Fail(ErrorCode::kBadType, std::string("profile: malformed JSON: ") + e.what());
  }
  return ProfileFromJson(j);
}

}  // namespace cinemeta

#endif  // CINEMETA_PROFILE_HPP_
