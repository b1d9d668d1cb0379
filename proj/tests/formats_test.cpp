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

#include <functional>

#include <gtest/gtest.h>

#include "cinemeta/formats/ale.hpp"
#include "cinemeta/formats/catalog.hpp"
#include "cinemeta/formats/csv.hpp"
#include "cinemeta/formats/manifest.hpp"
#include "cinemeta/formats/raster.hpp"
#include "support/generators.hpp"

namespace cinemeta {
namespace {

ErrorCode CodeOf(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "expected an error";
  return ErrorCode::kInvalidArgument;
}

MetadataRecord Clip(const std::string& id) {
  MetadataRecord r;
  r.clip_id = ClipId(id);
  r.basic.fps = 24.0;
  r.basic.timecode_start = Timecode::Make(0, 0, 0, 0, 24);
  return r;
}

// Every projected cell of `expected` reappears in `actual`.
void ExpectProjectionEqual(const std::vector<MetadataRecord>& expected,
                           const std::vector<MetadataRecord>& actual, const UserProfile& profile) {
  ASSERT_EQ(expected.size(), actual.size());
  for (std::size_t i = 0; i < expected.size(); ++i) {
    for (Label l : profile.Columns()) {
      EXPECT_EQ(CellText(expected[i], l), CellText(actual[i], l))
          << "record " << i << " label " << ToString(l);
    }
  }
}

constexpr std::string_view kCanonicalAle =
    "Heading\n"
    "FIELD_DELIM\tTABS\n"
    "FPS\t24\n"
    "\n"
    "Column\n"
    "Name\tScene\n"
    "\n"
    "Data\n"
    "clip001\t12\n";

TEST(AleTest, ParsesThreeSections) {
  const AleDocument doc = ParseAle(kCanonicalAle);
  ASSERT_EQ(doc.heading.size(), 2u);
  EXPECT_EQ(doc.heading[0], (std::pair<std::string, std::string>{"FIELD_DELIM", "TABS"}));
  EXPECT_EQ(doc.heading[1], (std::pair<std::string, std::string>{"FPS", "24"}));
  EXPECT_EQ(doc.columns, (std::vector<std::string>{"Name", "Scene"}));
  ASSERT_EQ(doc.rows.size(), 1u);
  EXPECT_EQ(doc.rows[0], (std::vector<std::string>{"clip001", "12"}));
}

TEST(AleTest, CanonicalTextRoundTrips) {
  EXPECT_EQ(WriteAle(ParseAle(kCanonicalAle)), kCanonicalAle);
}

TEST(AleTest, ToleratesCrlfAndExtraBlankLines) {
  const std::string text =
      "\r\nHeading\r\nFIELD_DELIM\tTABS\r\n\r\n\r\nColumn\r\nName\tScene\r\n\r\n\r\nData\r\n\r\nclip001\t12\r\n\r\n";
  EXPECT_EQ(ParseAle(text), ParseAle("Heading\nFIELD_DELIM\tTABS\n\nColumn\nName\tScene\n\nData\nclip001\t12\n"));
}

TEST(AleTest, MissingColumnSection) {
  const std::string text = "Heading\nFIELD_DELIM\tTABS\n\nData\nclip001\t12\n";
  try {
    ParseAle(text);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kMissingSection);
    EXPECT_NE(std::string(e.what()).find("\"Column\""), std::string::npos);
  }
  EXPECT_EQ(CodeOf([] { ParseAle("Column\nName\n\nData\n"); }), ErrorCode::kMissingSection);
  EXPECT_EQ(CodeOf([] { ParseAle("Heading\n\nColumn\nName\n"); }), ErrorCode::kMissingSection);
}

TEST(AleTest, RowArityReportsLine) {
  const std::string text = "Heading\n\nColumn\nName\tScene\n\nData\nclip001\t12\nclip002\n";
  try {
    ParseAle(text);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kRowArity);
    EXPECT_NE(std::string(e.what()).find("line 8"), std::string::npos) << e.what();
    EXPECT_NE(std::string(e.what()).find("expected 2, got 1"), std::string::npos) << e.what();
  }
}

TEST(AleTest, RejectsControlCharacters) {
  EXPECT_EQ(CodeOf([] { ParseAle("Heading\n\nColumn\nName\n\nData\nclip\x01\n"); }),
            ErrorCode::kEmbeddedControl);
}

TEST(AleTest, WritesSelectedColumns) {
  MetadataRecord r = Clip("clip001");
  r.semantic.scene_num.emplace(12, 0.9, Provenance::kSlateOcr);
  const UserProfile p = UserProfile::Make({Label::kSceneNum});
  const std::string ale = WriteAle({r}, p);
  EXPECT_EQ(ale,
            "Heading\nFIELD_DELIM\tTABS\nVIDEO_FORMAT\t1080\nFPS\t24\n\nColumn\nName\tSceneNum\n\nData\n"
            "clip001\t12\n");

  r.semantic.scene_num.reset();
  EXPECT_NE(WriteAle({r}, p).find("clip001\t\n"), std::string::npos);
}

TEST(AleTest, FractionalFpsAndProfileOverride) {
  MetadataRecord r = Clip("c");
  r.basic.fps = 23.976;
  r.basic.timecode_start = Timecode::Make(0, 0, 0, 0, 24);
  UserProfile p = UserProfile::Make({Label::kTime});
  EXPECT_NE(WriteAle({r}, p).find("FPS\t23.976\n"), std::string::npos);
  p.fps = 25.0;
  p.video_format = "2160";
  const std::string ale = WriteAle({r}, p);
  EXPECT_NE(ale.find("FPS\t25\n"), std::string::npos);
  EXPECT_NE(ale.find("VIDEO_FORMAT\t2160\n"), std::string::npos);
}

TEST(AleTest, FlattensControlCharactersInNotes) {
  MetadataRecord r = Clip("c");
  r.notes = "line one\nline\ttwo";
  const std::string ale = WriteAle({r}, UserProfile::Make({Label::kNotes}));
  EXPECT_NO_THROW(ParseAle(ale));
  EXPECT_NE(ale.find("c\tline one line two\n"), std::string::npos);
}

TEST(AleTest, EmptySelectionRejected) {
  UserProfile p;
  EXPECT_EQ(CodeOf([&] { WriteAle({}, p); }), ErrorCode::kEmptySelection);
}

TEST(CsvTest, QuotesPerRfc4180) {
  EXPECT_EQ(QuoteCsvCell("good, keep"), "\"good, keep\"");
  EXPECT_EQ(QuoteCsvCell("say \"cut\""), "\"say \"\"cut\"\"\"");
  EXPECT_EQ(QuoteCsvCell("plain"), "plain");
  MetadataRecord r = Clip("clip001");
  r.notes = "good, keep";
  EXPECT_EQ(WriteCsv({r}, UserProfile::Make({Label::kNotes})), "Name,notes\r\nclip001,\"good, keep\"\r\n");
}

TEST(CsvTest, ZeroRecordsIsHeaderOnly) {
  EXPECT_EQ(WriteCsv({}, UserProfile::Make({Label::kSceneNum, Label::kTime})), "Name,SceneNum,Time\r\n");
}

TEST(CsvTest, RenamedHeader) {
  const UserProfile p = UserProfile::Make({Label::kSceneNum}, OutputFormat::kCsv, {{Label::kSceneNum, "Scene #"}});
  const std::string csv = WriteCsv({}, p);
  EXPECT_EQ(csv, "Name,Scene #\r\n");
  EXPECT_TRUE(ParseCsv(csv, p).empty());
}

TEST(CsvTest, UnparseableSceneBecomesNote) {
  const UserProfile p = UserProfile::Make({Label::kSceneNum});
  const auto records = ParseCsv("Name,SceneNum\r\nclip001,12A\r\n", p);
  ASSERT_EQ(records.size(), 1u);
  EXPECT_FALSE(records[0].semantic.scene_num);
  ASSERT_TRUE(records[0].notes);
  EXPECT_NE(records[0].notes->find("'12A'"), std::string::npos);
}

TEST(CsvTest, UnbalancedQuoteReportsLine) {
  const UserProfile p = UserProfile::Make({Label::kNotes});
  try {
    ParseCsv("Name,notes\r\nc1,ok\r\nc2,\"never closed\r\n", p);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kCsvSyntax);
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
  EXPECT_EQ(CodeOf([&] { ParseCsv("Name,notes\r\nc1,a\"b\r\n", p); }), ErrorCode::kCsvSyntax);
}

TEST(CsvTest, HeaderMismatch) {
  const UserProfile p = UserProfile::Make({Label::kSceneNum});
  EXPECT_EQ(CodeOf([&] { ParseCsv("Name,Scene\r\nc1,1\r\n", p); }), ErrorCode::kHeaderMismatch);
  EXPECT_EQ(CodeOf([&] { ParseCsv("", p); }), ErrorCode::kHeaderMismatch);
}

TEST(CsvTest, MultilineNotesSurvive) {
  MetadataRecord r = Clip("c1");
  r.notes = "first line\r\nsecond, \"quoted\"";
  const UserProfile p = UserProfile::Make({Label::kNotes});
  const auto back = ParseCsv(WriteCsv({r}, p), p);
  ASSERT_EQ(back.size(), 1u);
  EXPECT_EQ(back[0].notes, r.notes);
}

TEST(CsvTest, AcceptsBareLfAndMissingFinalTerminator) {
  const UserProfile p = UserProfile::Make({Label::kTakeNum});
  const auto records = ParseCsv("Name,TakeNum\nc1,4\nc2,", p);
  ASSERT_EQ(records.size(), 2u);
  EXPECT_EQ(records[0].semantic.take_num->value(), 4);
  EXPECT_FALSE(records[1].semantic.take_num);
}

// parse(write(rs, p)) recovers the projected fields for both table formats.
TEST(FormatsProperty, TableRoundTrips) {
  testing::Gen gen(314);
  for (int trial = 0; trial < 60; ++trial) {
    std::vector<MetadataRecord> records;
    for (int i = gen.Int(0, 6); i > 0; --i) records.push_back(gen.Record(static_cast<int>(records.size())));
    const UserProfile p = gen.Profile();
    ExpectProjectionEqual(records, ParseCsv(WriteCsv(records, p), p), p);
    ExpectProjectionEqual(records, RecordsFromAle(ParseAle(WriteAle(records, p)), p), p);
  }
}

TEST(FormatsProperty, WritersAreDeterministic) {
  testing::Gen a(5), b(5);
  std::vector<MetadataRecord> ra, rb;
  for (int i = 0; i < 20; ++i) {
    ra.push_back(a.Record(i));
    rb.push_back(b.Record(i));
  }
  const UserProfile p = UserProfile::Make({Label::kSceneNum, Label::kActorPID, Label::kNotes});
  EXPECT_EQ(WriteAle(ra, p), WriteAle(rb, p));
  EXPECT_EQ(WriteCsv(ra, p), WriteCsv(rb, p));
  EXPECT_EQ(SerializeCatalog(ra), SerializeCatalog(rb));
}

TEST(RasterTest, DecodesPpmExample) {
  const std::string bytes = std::string("P6\n2 1\n255\n") + std::string("\xff\x00\x00\x00\x00\xff", 6);
  const RasterFile r = ParseRaster(bytes);
  const Image img = ToImage(r);
  ASSERT_EQ(img.channels(), 3);
  EXPECT_EQ(img.at(0, 0, 0), 1.0);
  EXPECT_EQ(img.at(0, 0, 1), 0.0);
  EXPECT_EQ(img.at(0, 0, 2), 0.0);
  EXPECT_EQ(img.at(1, 0, 0), 0.0);
  EXPECT_EQ(img.at(1, 0, 2), 1.0);
  EXPECT_EQ(SerializeRaster(r), bytes);
}

TEST(RasterTest, SixteenBitBigEndian) {
  const std::string bytes = std::string("P5\n2 1\n65535\n") + std::string("\x01\x02\xff\xff", 4);
  const RasterFile r = ParseRaster(bytes);
  EXPECT_EQ(r.samples, (std::vector<std::uint16_t>{0x0102, 0xffff}));
  EXPECT_EQ(SerializeRaster(r), bytes);
  EXPECT_EQ(FromImage(ToImage(r), 65535), r);
}

TEST(RasterTest, HeaderCommentsAccepted) {
  const std::string bytes = std::string("P5\n# made by hand\n1 1\n255\n") + "\x80";
  EXPECT_EQ(ParseRaster(bytes).samples, (std::vector<std::uint16_t>{128}));
}

TEST(RasterTest, Errors) {
  EXPECT_EQ(CodeOf([] { ParseRaster("P3\n1 1\n255\n0 0 0\n"); }), ErrorCode::kBadMagic);
  EXPECT_EQ(CodeOf([] { ParseRaster("P2\n1 1\n255\n0\n"); }), ErrorCode::kBadMagic);
  EXPECT_EQ(CodeOf([] { ParseRaster("GIF89a"); }), ErrorCode::kBadMagic);
  EXPECT_EQ(CodeOf([] { ParseRaster("P6\n2 2\n255\n\x01\x02"); }), ErrorCode::kTruncatedPayload);
  EXPECT_EQ(CodeOf([] { ParseRaster("P5\n1 1\n1023\n\x00\x01"); }), ErrorCode::kUnsupportedMaxValue);
}

TEST(RasterTest, PropertyFileRoundTripIsByteExact) {
  testing::Gen gen(21);
  const auto dir = testing::ScratchDir("raster_roundtrip");
  for (int i = 0; i < 30; ++i) {
    RasterFile r;
    r.width = gen.Int(1, 17);
    r.height = gen.Int(1, 17);
    r.channels = gen.Coin() ? 1 : 3;
    r.max_value = gen.Coin() ? 255 : 65535;
    for (int k = 0; k < r.width * r.height * r.channels; ++k) r.samples.push_back(static_cast<std::uint16_t>(gen.Int(0, r.max_value)));
    const auto path = dir / ("r" + std::to_string(i) + (r.channels == 1 ? ".pgm" : ".ppm"));
    WriteRaster(r, path);
    const std::string bytes = ReadFile(path);
    EXPECT_EQ(ReadRaster(path), r);
    EXPECT_EQ(SerializeRaster(ReadRaster(path)), bytes);
  }
}

TEST(ManifestTest, MinimalManifest) {
  const ClipManifest m = ParseManifest(
      R"({"clip_id":"A001","frames_dir":"frames","frame_pattern":"f%04d.ppm","frame_count":10,"fps":24})",
      "/data/day1");
  EXPECT_EQ(m.clip_id.str(), "A001");
  EXPECT_EQ(m.frame_count, 10);
  EXPECT_EQ(m.basic.fps, 24.0);
  EXPECT_EQ(m.FramePath(3), fs::path("/data/day1/frames/f0003.ppm"));
  EXPECT_FALSE(m.slate_template_id);
}

TEST(ManifestTest, OptionalFields) {
  const ClipManifest m = ParseManifest(
      R"({"clip_id":"A002","frames_dir":"/abs","frame_pattern":"%d.pgm","frame_count":3,"fps":23.976,
          "timecode_start":"10:00:00:12","iso":800,"bayer_pattern":"GRBG","lut":"look.cube",
          "slate_template_id":"board","slate_scan_frames":12,"scene_num":11,"scene_type":"Inside",
          "frame_start":1})",
      "/m");
  EXPECT_EQ(m.basic.timecode_start, Timecode::Make(10, 0, 0, 12, 24));
  EXPECT_EQ(m.basic.iso, 800);
  EXPECT_EQ(m.bayer_pattern, BayerPattern::kGRBG);
  EXPECT_EQ(m.lut, fs::path("/m/look.cube"));
  EXPECT_EQ(m.slate_scan_frames, 12);
  EXPECT_EQ(m.scene_num, 11);
  EXPECT_EQ(m.scene_type, SceneType::kInside);
  EXPECT_EQ(m.FramePath(0), fs::path("/abs/1.pgm"));
}

TEST(ManifestTest, Errors) {
  EXPECT_EQ(CodeOf([] {
              ParseManifest(R"({"clip_id":"A","frames_dir":"f","frame_pattern":"%d.ppm","frame_count":0,"fps":24})");
            }),
            ErrorCode::kBadType);
  EXPECT_EQ(CodeOf([] { ParseManifest(R"({"clip_id":"A","frames_dir":"f","frame_count":1,"fps":24})"); }),
            ErrorCode::kMissingKey);
  EXPECT_EQ(CodeOf([] {
              ParseManifest(R"({"clip_id":"A","frames_dir":"f","frame_pattern":"%d.ppm","frame_count":1})");
            }),
            ErrorCode::kMissingKey);
  EXPECT_EQ(CodeOf([] {
              ParseManifest(R"({"clip_id":"A","frames_dir":"f","frame_pattern":"%s.ppm","frame_count":1,"fps":24})");
            }),
            ErrorCode::kBadType);
  EXPECT_EQ(CodeOf([] {
              ParseManifest(R"({"clip_id":"A","frames_dir":"f","frame_pattern":"%d.ppm","frame_count":"9","fps":24})");
            }),
            ErrorCode::kBadType);
}

TEST(CatalogTest, ReadsInFileOrder) {
  std::vector<MetadataRecord> records = {Clip("b"), Clip("a"), Clip("c")};
  const auto back = ParseCatalog(SerializeCatalog(records));
  ASSERT_EQ(back.size(), 3u);
  EXPECT_EQ(back[0].clip_id.str(), "b");
  EXPECT_EQ(back[2].clip_id.str(), "c");
}

TEST(CatalogTest, DuplicateClipIdRejected) {
  const std::string text = SerializeCatalog({Clip("a"), Clip("a")});
  EXPECT_EQ(CodeOf([&] { ParseCatalog(text); }), ErrorCode::kDuplicateClipId);
}

}  // namespace
}  // namespace cinemeta
