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

// Avid Log Exchange (ALE): three tab-delimited sections.
//
//   Heading
//   FIELD_DELIM<TAB>TABS
//   ...
//   <blank>
//   Column
//   Name<TAB>...
//   <blank>
//   Data
//   row<TAB>...
//
// The writer emits exactly this layout with LF endings. The parser also
// tolerates CRLF and extra blank lines between sections.

#ifndef CINEMETA_FORMATS_ALE_HPP_
#define CINEMETA_FORMATS_ALE_HPP_

#include <algorithm>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "cinemeta/metadata_model.hpp"
#include "cinemeta/profile.hpp"

namespace cinemeta {

struct AleDocument {
  std::vector<std::pair<std::string, std::string>> heading;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  bool operator==(const AleDocument&) const = default;
};

namespace detail {

inline std::vector<std::string> SplitTabs(std::string_view line) {
  std::vector<std::string> cells;
  std::size_t pos = 0;
  while (true) {
    const std::size_t tab = line.find('\t', pos);
    cells.emplace_back(line.substr(pos, tab == std::string_view::npos ? line.npos : tab - pos));
    if (tab == std::string_view::npos) break;
    pos = tab + 1;
  }
  return cells;
}

inline void CheckAleCell(std::string_view cell, std::size_t line_no) {
  if (HasControlChar(cell)) {
    Fail(ErrorCode::kEmbeddedControl,
         "control character in ALE cell on line " + std::to_string(line_no));
  }
}

}  // namespace detail

inline AleDocument ParseAle(std::string_view text) {
  std::vector<std::string_view> lines;
  std::size_t pos = 0;
  while (pos < text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    lines.push_back(line);
    pos = end + 1;
  }

  AleDocument doc;
  std::size_t i = 0;
  auto skip_blank = [&] {
    while (i < lines.size() && lines[i].empty()) ++i;
  };
  auto expect = [&](std::string_view section) {
    skip_blank();
    if (i >= lines.size() || lines[i] != section) {
      Fail(ErrorCode::kMissingSection, "MissingSection(\"" + std::string(section) + "\")");
    }
    ++i;
  };

  expect("Heading");
  for (; i < lines.size() && !lines[i].empty() && lines[i] != "Column" && lines[i] != "Data";
       ++i) {
    auto cells = detail::SplitTabs(lines[i]);
    if (cells.size() != 2) {
      Fail(ErrorCode::kRowArity, "heading line " + std::to_string(i + 1) + ": expected 2 cells, got " +
                                     std::to_string(cells.size()));
    }
    for (const auto& c : cells) detail::CheckAleCell(c, i + 1);
    doc.heading.emplace_back(std::move(cells[0]), std::move(cells[1]));
  }

  expect("Column");
  skip_blank();
  if (i >= lines.size() || lines[i] == "Data") {
    Fail(ErrorCode::kMissingSection, "MissingSection(\"Column\"): no column names");
  }
  doc.columns = detail::SplitTabs(lines[i]);
  for (const auto& c : doc.columns) detail::CheckAleCell(c, i + 1);
  ++i;

  expect("Data");
  for (; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    auto cells = detail::SplitTabs(lines[i]);
    if (cells.size() != doc.columns.size()) {
      Fail(ErrorCode::kRowArity, "RowArity(line " + std::to_string(i + 1) + ", expected " +
                                     std::to_string(doc.columns.size()) + ", got " +
                                     std::to_string(cells.size()) + ")");
    }
    for (const auto& c : cells) detail::CheckAleCell(c, i + 1);
    doc.rows.push_back(std::move(cells));
  }
  return doc;
}

// Canonical text of a document.
inline std::string WriteAle(const AleDocument& doc) {
  auto join = [](const std::vector<std::string>& cells) {
    std::string out;
    for (std::size_t k = 0; k < cells.size(); ++k) {
      if (k) out += '\t';
      out += cells[k];
    }
    return out;
  };
  std::string out = "Heading\n";
  for (const auto& [key, value] : doc.heading) out += key + '\t' + value + '\n';
  out += "\nColumn\n";
  out += join(doc.columns) + '\n';
  out += "\nData\n";
  for (const auto& row : doc.rows) {
    if (row.size() != doc.columns.size()) {
      Fail(ErrorCode::kRowArity, "row width does not match column count");
    }
    out += join(row) + '\n';
  }
  return out;
}

// ALE cells cannot hold control characters; free text is flattened to spaces.
inline std::string SanitizeAleCell(std::string cell) {
  for (char& c : cell) {
    if (static_cast<unsigned char>(c) < 0x20 || c == 0x7f) c = ' ';
  }
  return cell;
}

// Projects records onto the profile's columns. The clip id always leads as
// `Name`, which Avid uses as the clip key.
inline AleDocument ToAleDocument(const std::vector<MetadataRecord>& records,
                                 const UserProfile& profile) {
  profile.Validate();
  AleDocument doc;
  doc.heading.emplace_back("FIELD_DELIM", "TABS");
  doc.heading.emplace_back("VIDEO_FORMAT", profile.video_format);
  if (profile.fps) {
    doc.heading.emplace_back("FPS", FormatNumber(*profile.fps));
  } else if (!records.empty()) {
    doc.heading.emplace_back("FPS", FormatNumber(records.front().basic.fps));
  }
  const auto cols = profile.Columns();
  for (Label l : cols) {
    doc.columns.push_back(l == Label::kName ? std::string("Name") : profile.HeaderFor(l));
  }
  for (const auto& r : records) {
    std::vector<std::string> row;
    for (Label l : cols) row.push_back(SanitizeAleCell(CellText(r, l)));
    doc.rows.push_back(std::move(row));
  }
  return doc;
}

inline std::string WriteAle(const std::vector<MetadataRecord>& records, const UserProfile& profile) {
  return WriteAle(ToAleDocument(records, profile));
}

// Rebuilds records from an ALE table whose columns cover the profile
// selection (extra columns are ignored). Values come back as manual entries.
inline std::vector<MetadataRecord> RecordsFromAle(const AleDocument& doc, const UserProfile& profile) {
  double fps = profile.fps.value_or(24.0);
  for (const auto& [key, value] : doc.heading) {
    if (key == "FPS") {
      if (auto v = ParseReal(value); v && *v > 0) fps = *v;
    }
  }
  std::vector<std::pair<Label, std::size_t>> mapping;
  for (Label l : profile.Columns()) {
    const std::string header = l == Label::kName ? std::string("Name") : profile.HeaderFor(l);
    auto it = std::find(doc.columns.begin(), doc.columns.end(), header);
    if (it == doc.columns.end()) {
      Fail(ErrorCode::kHeaderMismatch, "ALE lacks column '" + header + "'");
    }
    mapping.emplace_back(l, static_cast<std::size_t>(it - doc.columns.begin()));
  }
  std::vector<MetadataRecord> records;
  for (std::size_t r = 0; r < doc.rows.size(); ++r) {
    MetadataRecord rec;
    try {
      rec.clip_id = ClipId(doc.rows[r][mapping.front().second]);
    } catch (const Error& e) {
      Fail(ErrorCode::kBadValue, "ALE data row " + std::to_string(r + 1) + ": " + e.what());
    }
    rec.basic.fps = fps;
    rec.basic.timecode_start = Timecode{0, 0, 0, 0, TimecodeBase(fps)};
    for (std::size_t k = 1; k < mapping.size(); ++k) {
      ApplyCell(rec, mapping[k].first, doc.rows[r][mapping[k].second]);
    }
    records.push_back(std::move(rec));
  }
  return records;
}

}  // namespace cinemeta

#endif  // CINEMETA_FORMATS_ALE_HPP_
