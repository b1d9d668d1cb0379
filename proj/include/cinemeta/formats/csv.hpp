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

// RFC-4180 CSV as imported by DaVinci Resolve: CRLF row terminators, cells
// with comma, quote, CR or LF wrapped in double quotes with quotes doubled.

#ifndef CINEMETA_FORMATS_CSV_HPP_
#define CINEMETA_FORMATS_CSV_HPP_

#include <string>
#include <string_view>
#include <vector>

#include "cinemeta/metadata_model.hpp"
#include "cinemeta/profile.hpp"

namespace cinemeta {

inline std::string QuoteCsvCell(std::string_view cell) {
  if (cell.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(cell);
  std::string out = "\"";
  for (char c : cell) {
    if (c == '"') out += '"';
    out += c;
  }
  out += '"';
  return out;
}

inline std::string WriteCsvRows(const std::vector<std::vector<std::string>>& rows) {
  std::string out;
  for (const auto& row : rows) {
    for (std::size_t k = 0; k < row.size(); ++k) {
      if (k) out += ',';
      out += QuoteCsvCell(row[k]);
    }
    out += "\r\n";
  }
  return out;
}

// Splits CSV text into rows of cells. Accepts CRLF or bare LF terminators;
// a final terminator is optional.
inline std::vector<std::vector<std::string>> ParseCsvRows(std::string_view text) {
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string cell;
  std::size_t line = 1;
  std::size_t i = 0;
  bool row_open = false;
  auto end_row = [&] {
    row.push_back(std::move(cell));
    cell.clear();
    rows.push_back(std::move(row));
    row.clear();
    row_open = false;
  };
  while (i < text.size()) {
    const char c = text[i];
    if (c == '"' && cell.empty()) {
      const std::size_t open_line = line;
      ++i;
      bool closed = false;
      while (i < text.size()) {
        if (text[i] == '"') {
          if (i + 1 < text.size() && text[i + 1] == '"') {
            cell += '"';
            i += 2;
            continue;
          }
          closed = true;
          ++i;
          break;
        }
        if (text[i] == '\n') ++line;
        cell += text[i++];
      }
      if (!closed) {
        Fail(ErrorCode::kCsvSyntax, "unterminated quoted cell starting on line " + std::to_string(open_line));
      }
      row_open = true;
      if (i < text.size() && text[i] != ',' && text[i] != '\r' && text[i] != '\n') {
        Fail(ErrorCode::kCsvSyntax, "unexpected character after closing quote on line " + std::to_string(line));
      }
      continue;
    }
    if (c == '"') {
      Fail(ErrorCode::kCsvSyntax, "quote inside unquoted cell on line " + std::to_string(line));
    }
    if (c == ',') {
      row.push_back(std::move(cell));
      cell.clear();
      row_open = true;
      ++i;
    } else if (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') {
      end_row();
      i += 2;
      ++line;
    } else if (c == '\n') {
      end_row();
      ++i;
      ++line;
    } else if (c == '\r') {
      Fail(ErrorCode::kCsvSyntax, "bare carriage return on line " + std::to_string(line));
    } else {
      cell += c;
      row_open = true;
      ++i;
    }
  }
  if (row_open || !cell.empty()) end_row();
  return rows;
}

inline std::string WriteCsv(const std::vector<MetadataRecord>& records, const UserProfile& profile) {
  profile.Validate();
  const auto cols = profile.Columns();
  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> header;
  for (Label l : cols) header.push_back(profile.HeaderFor(l));
  rows.push_back(std::move(header));
  for (const auto& r : records) {
    std::vector<std::string> row;
    for (Label l : cols) row.push_back(CellText(r, l));
    rows.push_back(std::move(row));
  }
  return WriteCsvRows(rows);
}

// Inverse of WriteCsv for the profile's columns. The header must equal the
// profile's headers in order. Cells that do not parse leave the field absent
// and are recorded in notes.
inline std::vector<MetadataRecord> ParseCsv(std::string_view text, const UserProfile& profile) {
  profile.Validate();
  const auto rows = ParseCsvRows(text);
  const auto cols = profile.Columns();
  std::vector<std::string> expected;
  for (Label l : cols) expected.push_back(profile.HeaderFor(l));
  if (rows.empty() || rows.front() != expected) {
    Fail(ErrorCode::kHeaderMismatch, "CSV header does not match the profile columns");
  }
  const double fps = profile.fps.value_or(24.0);
  std::vector<MetadataRecord> records;
  for (std::size_t r = 1; r < rows.size(); ++r) {
    const auto& row = rows[r];
    if (row.size() != cols.size()) {
      Fail(ErrorCode::kRowArity, "CSV record " + std::to_string(r + 1) + ": expected " +
                                     std::to_string(cols.size()) + " cells, got " +
                                     std::to_string(row.size()));
    }
    MetadataRecord rec;
    try {
      rec.clip_id = ClipId(row[0]);
    } catch (const Error& e) {
      Fail(ErrorCode::kBadValue, "CSV record " + std::to_string(r + 1) + ": " + e.what());
    }
    rec.basic.fps = fps;
    rec.basic.timecode_start = Timecode{0, 0, 0, 0, TimecodeBase(fps)};
    for (std::size_t k = 1; k < cols.size(); ++k) ApplyCell(rec, cols[k], row[k]);
    records.push_back(std::move(rec));
  }
  return records;
}

}  // namespace cinemeta

#endif  // CINEMETA_FORMATS_CSV_HPP_
