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

// JSON export: the catalog's record shape, projected onto a profile.
//
//   {"labels": ["SceneNum", ...], "records": [{clip_id, basic, semantic, notes?}]}
//
// Basic camera metadata always travels; semantic keys and notes only when
// their label is selected.

#ifndef CINEMETA_FORMATS_JSON_EXPORT_HPP_
#define CINEMETA_FORMATS_JSON_EXPORT_HPP_

#include <algorithm>
#include <string>
#include <string_view>
#include <vector>

#include "cinemeta/metadata_model.hpp"
#include "cinemeta/profile.hpp"

namespace cinemeta {

inline Json ProjectRecord(const MetadataRecord& r, const UserProfile& profile) {
  const auto cols = profile.Columns();
  auto selected = [&](Label l) { return std::find(cols.begin(), cols.end(), l) != cols.end(); };
  Json full = ToJson(r);
  Json out = Json::object();
  out["clip_id"] = full["clip_id"];
  out["basic"] = full["basic"];
  Json sem = Json::object();
  for (Label l : kAllLabels) {
    if (l == Label::kName || l == Label::kNotes || !selected(l)) continue;
    const std::string key(SidecarKey(l));
    if (full["semantic"].contains(key)) sem[key] = full["semantic"][key];
  }
  out["semantic"] = std::move(sem);
  if (selected(Label::kNotes) && r.notes) out["notes"] = *r.notes;
  return out;
}

inline std::string WriteJsonExport(const std::vector<MetadataRecord>& records, const UserProfile& profile) {
  profile.Validate();
  Json labels = Json::array();
  for (Label l : profile.Columns()) labels.push_back(std::string(ToString(l)));
  Json list = Json::array();
  for (const auto& r : records) list.push_back(ProjectRecord(r, profile));
  return Json{{"labels", std::move(labels)}, {"records", std::move(list)}}.dump(2) + "\n";
}

inline std::vector<MetadataRecord> ParseJsonExport(std::string_view text) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const Json::parse_error& e) {
    Fail(ErrorCode::kBadType, std::string("json export: malformed JSON: ") + e.what());
  }
  if (!j.is_object() || !j.contains("records") || !j["records"].is_array())
    Fail(ErrorCode::kMissingKey, "json export: missing 'records' list");
  std::vector<MetadataRecord> out;
  for (const Json& r : j["records"]) out.push_back(RecordFromJson(r));
  return out;
}

}  // namespace cinemeta

#endif  // CINEMETA_FORMATS_JSON_EXPORT_HPP_
