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

// Catalog: JSON-lines file, one canonical sidecar record per LF-terminated
// line, clip ids unique.

#ifndef CINEMETA_FORMATS_CATALOG_HPP_
#define CINEMETA_FORMATS_CATALOG_HPP_

#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "cinemeta/io.hpp"
#include "cinemeta/metadata_model.hpp"

namespace cinemeta {

inline std::vector<MetadataRecord> ParseCatalog(std::string_view text, std::string_view origin = "catalog") {
  std::vector<MetadataRecord> records;
  std::set<std::string> ids;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    if (Trim(line).empty()) continue;
    MetadataRecord r;
    try {
      r = ParseRecord(line);
    } catch (const Error& e) {
      Fail(e.code(), std::string(origin) + ":" + std::to_string(line_no) + ": " + e.what());
    }
    if (!ids.insert(r.clip_id.str()).second) {
      Fail(ErrorCode::kDuplicateClipId, std::string(origin) + ":" + std::to_string(line_no) +
                                            ": duplicate clip id '" + r.clip_id.str() + "'");
    }
    records.push_back(std::move(r));
  }
  return records;
}

inline std::string SerializeCatalog(const std::vector<MetadataRecord>& records) {
  std::string out;
  for (const auto& r : records) {
    out += SerializeRecord(r);
    out += '\n';
  }
  return out;
}

inline std::vector<MetadataRecord> ReadCatalog(const fs::path& path) {
  return ParseCatalog(ReadFile(path), path.string());
}

}  // namespace cinemeta

#endif  // CINEMETA_FORMATS_CATALOG_HPP_
