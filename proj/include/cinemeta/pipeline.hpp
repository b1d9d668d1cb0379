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

#ifndef CINEMETA_PIPELINE_HPP_
#define CINEMETA_PIPELINE_HPP_

// Orchestration: manifests in, one fused record per clip out, plus the
// export file, a run log and the evaluation report.
//
// Config (paths relative to the config file):
//   {
//     "profile": "profile.json", "clips": "manifests", "templates": "slates",
//     "gallery": "gallery.json", "seed": 7, "workers": 2,
//     "detectors": {"backend": "fixtures", "root": "fixtures"},
//     "sampling": {"spatial_factor": 4, "frame_stride": 4},
//     "camera_move": {...}, "slate": {...}, "shot_scale": {...},
//     "day_night": {...}, "actors": {"similarity_threshold": 0.5},
//     "objects": {"fraction": 0.3},
//     "output": {"catalog": "out/catalog.jsonl", "export": "out/dailies.ale", "log": "out/ingest.log"}
//   }

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <exception>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "cinemeta/camera_move.hpp"
#include "cinemeta/detector/client.hpp"
#include "cinemeta/formats/ale.hpp"
#include "cinemeta/formats/catalog.hpp"
#include "cinemeta/formats/csv.hpp"
#include "cinemeta/formats/json_export.hpp"
#include "cinemeta/formats/manifest.hpp"
#include "cinemeta/formats/raster.hpp"
#include "cinemeta/fusion.hpp"
#include "cinemeta/imaging.hpp"
#include "cinemeta/io.hpp"
#include "cinemeta/profile.hpp"
#include "cinemeta/semantic.hpp"
#include "cinemeta/slate.hpp"

namespace cinemeta {

struct SamplingConfig {
  int spatial_factor = 4;
  int frame_stride = 4;
};

struct PipelineConfig {
  fs::path profile;
  fs::path clips;
  std::optional<fs::path> templates;
  std::optional<fs::path> gallery;
  double similarity_threshold = 0.5;
  BackendSpec detectors;
  SamplingConfig sampling;
  CameraMoveConfig camera_move;
  SlateConfig slate;
  ScaleConfig shot_scale;
  DayNightConfig day_night;
  SceneObjectConfig objects;
  std::uint64_t seed = 0;
  int workers = 1;
  fs::path catalog;
  std::optional<fs::path> export_path;  // default: next to the catalog
  std::optional<fs::path> log;
};

namespace detail {

inline const Json& Section(const Json& j, const char* key) {
  static const Json kEmpty = Json::object();
  if (!j.contains(key)) return kEmpty;
  if (!j.at(key).is_object()) Fail(ErrorCode::kConfig, std::string("config.") + key + " must be an object");
  return j.at(key);
}

}  // namespace detail

inline PipelineConfig ConfigFromJson(const Json& j, const fs::path& base_dir) {
  if (!j.is_object()) Fail(ErrorCode::kConfig, "config must be a JSON object");
  PipelineConfig c;
  auto resolve = [&](const std::string& p) { return fs::path(p).is_absolute() ? fs::path(p) : base_dir / p; };
  try {
    for (const char* key : {"profile", "clips"}) {
      if (!j.contains(key)) Fail(ErrorCode::kConfig, std::string("config needs '") + key + "'");
    }
    c.profile = resolve(j.at("profile").get<std::string>());
    c.clips = resolve(j.at("clips").get<std::string>());
    if (j.contains("templates")) c.templates = resolve(j.at("templates").get<std::string>());
    if (j.contains("gallery")) c.gallery = resolve(j.at("gallery").get<std::string>());
    c.detectors = BackendSpec::FromJson(j.contains("detectors") ? j.at("detectors") : Json(), base_dir);
    const Json& sampling = detail::Section(j, "sampling");
    c.sampling.spatial_factor = sampling.value("spatial_factor", c.sampling.spatial_factor);
    c.sampling.frame_stride = sampling.value("frame_stride", c.sampling.frame_stride);
    if (c.sampling.spatial_factor < 1 || c.sampling.frame_stride < 1)
      Fail(ErrorCode::kConfig, "sampling factors must be at least 1");
    c.camera_move = CameraMoveConfig::FromJson(detail::Section(j, "camera_move"));
    c.slate = SlateConfig::FromJson(detail::Section(j, "slate"));
    c.shot_scale = ScaleConfig::FromJson(detail::Section(j, "shot_scale"));
    c.day_night = DayNightConfig::FromJson(detail::Section(j, "day_night"));
    c.similarity_threshold = detail::Section(j, "actors").value("similarity_threshold", c.similarity_threshold);
    c.objects.object_fraction = detail::Section(j, "objects").value("fraction", c.objects.object_fraction);
    if (j.contains("seed")) {
      if (!j.at("seed").is_number_unsigned()) Fail(ErrorCode::kConfig, "config.seed must be a non-negative integer");
      c.seed = j.at("seed").get<std::uint64_t>();
    }
    c.workers = j.value("workers", 1);
    if (c.workers < 1) Fail(ErrorCode::kConfig, "config.workers must be positive");
    const Json& output = detail::Section(j, "output");
    c.catalog = resolve(output.value("catalog", std::string("catalog.jsonl")));
    if (output.contains("export")) c.export_path = resolve(output.at("export").get<std::string>());
    if (output.contains("log")) c.log = resolve(output.at("log").get<std::string>());
  } catch (const Json::exception& e) {
    Fail(ErrorCode::kConfig, std::string("config: ") + e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::kConfig) throw;
    Fail(ErrorCode::kConfig, std::string("config: ") + e.what());
  }
  return c;
}

inline PipelineConfig LoadConfig(const fs::path& path) {
  Json j;
  try {
    j = Json::parse(ReadFile(path));
  } catch (const Json::parse_error& e) {
    Fail(ErrorCode::kConfig, path.string() + ": " + e.what());
  }
  return ConfigFromJson(j, path.parent_path());
}

// CINEMETA_SEED, when set, replaces the configured seed.
inline void ApplySeedOverride(PipelineConfig& c, const char* env = std::getenv("CINEMETA_SEED")) {
  if (!env) return;
  const auto v = ParseUnsigned(env);
  if (!v) Fail(ErrorCode::kConfig, std::string("CINEMETA_SEED must be a non-negative integer, got '") + env + "'");
  c.seed = static_cast<std::uint64_t>(*v);
}

// Per-clip seed: FNV-1a over "<run seed>/<clip id>", so a clip's random
// streams do not depend on which worker runs it or in what order.
inline std::uint64_t ClipSeed(std::uint64_t run_seed, const ClipId& clip) {
  std::uint64_t h = 14695981039346656037ull;
  for (char ch : std::to_string(run_seed) + "/" + clip.str()) {
    h ^= static_cast<unsigned char>(ch);
    h *= 1099511628211ull;
  }
  return h;
}

inline std::vector<fs::path> ListManifests(const fs::path& dir) {
  if (!fs::is_directory(dir)) Fail(ErrorCode::kIo, "clips directory '" + dir.string() + "' does not exist");
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".json") out.push_back(e.path());
  }
  std::sort(out.begin(), out.end(), [](const fs::path& a, const fs::path& b) { return a.filename() < b.filename(); });
  return out;
}

// ---------------------------------------------------------------------------
// Per-clip work

struct ClipFrames {
  std::vector<Image> head;              // full resolution, for the slate scan
  std::vector<SampledFrame> sampled;    // strided and downsampled
};

// Demosaic when the manifest says raw, then the LUT, then sampling.
inline ClipFrames LoadClipFrames(const ClipManifest& m, const SamplingConfig& s, int head_frames) {
  std::optional<Lut> lut;
  if (m.lut) lut = ParseCube(ReadFile(*m.lut));
  ClipFrames out;
  for (int i = 0; i < m.frame_count; ++i) {
    const bool in_head = i < head_frames;
    const bool sampled = i % s.frame_stride == 0;
    if (!in_head && !sampled) continue;
    Image img = LoadImage(m.FramePath(i));
    if (m.bayer_pattern) img = DemosaicBilinear(img, *m.bayer_pattern);
    if (lut && img.channels() == 3) img = ApplyLut(img, *lut);
    if (sampled) out.sampled.push_back({i, DownsampleBox(img, s.spatial_factor)});
    if (in_head) out.head.push_back(std::move(img));
  }
  return out;
}

struct PipelineContext {
  const PipelineConfig* config = nullptr;
  const UserProfile* profile = nullptr;
  const ActorGallery* gallery = nullptr;  // null when none configured
  TemplateRegistry* templates = nullptr;  // null when none configured
  DetectorPool* detectors = nullptr;
};

struct ClipOutcome {
  MetadataRecord record;
  std::vector<std::string> log;
};

inline Image AsGray(const Image& img) { return img.channels() == 3 ? ToGrayscale(img) : img; }

// Runs every annotator on one clip. Failures, including unreadable
// frames, become warnings and absent fields.
inline ClipOutcome ProcessClip(const ClipManifest& m, const PipelineContext& ctx) {
  const PipelineConfig& cfg = *ctx.config;
  ClipOutcome out;
  const std::string clip = m.clip_id.str();
  auto note = [&](const std::string& line) { out.log.push_back("clip " + clip + ": " + line); };
  auto guarded = [&](const char* stage, auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      note(std::string("warning: ") + stage + ": " + e.what());
    } catch (const Json::exception& e) {
      note(std::string("warning: ") + stage + ": " + e.what());
    }
  };

  const std::uint64_t seed = ClipSeed(cfg.seed, m.clip_id);
  SlateConfig slate_cfg = cfg.slate;
  slate_cfg.seed = seed;
  if (m.slate_scan_frames) slate_cfg.scan_frames = *m.slate_scan_frames;
  const int head = m.slate_template_id ? std::max(slate_cfg.scan_frames, 0) : 0;

  AnnotatorOutputs ann;
  ann.clip_id = m.clip_id;
  std::optional<SlateReading> slate;
  std::optional<ClipFrames> loaded;
  guarded("frames", [&] { loaded = LoadClipFrames(m, cfg.sampling, head); });
  if (loaded) {
    const ClipFrames& frames = *loaded;
    note(std::to_string(m.frame_count) + " frames, " + std::to_string(frames.sampled.size()) + " sampled");
    DetectorPool::Lease detector = ctx.detectors->Acquire();

    if (m.slate_template_id) {
      guarded("slate", [&] {
        if (!ctx.templates) Fail(ErrorCode::kConfig, "no templates directory configured");
        const auto tpl = ctx.templates->Get(*m.slate_template_id);
        std::vector<Image> gray;
        for (const Image& f : frames.head) gray.push_back(AsGray(f));
        const SlateHit hit = FindSlateFrame(gray, *tpl, slate_cfg, &*detector, clip);
        note("slate found at frame " + std::to_string(hit.frame_index) + " with " +
             std::to_string(hit.alignment.inliers()) + " inliers");
        if (!detector->Supports(DetectorKind::kOcr)) {
          note("warning: slate: no ocr backend, fields unread");
          return;
        }
        slate = ExtractFields(gray[hit.frame_index], hit.alignment, *tpl, *detector, clip, hit.frame_index);
      });
    }

    std::vector<Image> sampled_gray;
    for (const SampledFrame& f : frames.sampled) sampled_gray.push_back(AsGray(f.image));
    guarded("camera_move", [&] {
      CameraMoveConfig mc = cfg.camera_move;
      mc.seed = seed;
      const auto samples = AnalyzeClip(sampled_gray, mc);
      const MoveDecision d = Classify(samples, mc);
      ann.camera_move.emplace(d.label, d.confidence, Provenance::kAnnotator);
    });

    const bool scene_kinds =
        detector->Supports(DetectorKind::kSceneClassify) || detector->Supports(DetectorKind::kObjectDetect);
    if (scene_kinds) {
      guarded("scene", [&] {
        SceneObjects so = AnnotateSceneObjects(*detector, clip, frames.sampled, cfg.objects);
        ann.scene_type = so.scene_type;
        ann.places = so.places;
        ann.objects = std::move(so.objects);
      });
    }

    guarded("day_night", [&] {
      std::optional<SceneType> prior = m.scene_type;
      if (!prior && ann.scene_type) prior = ann.scene_type->value();
      std::vector<Image> images;
      for (const SampledFrame& f : frames.sampled) images.push_back(f.image);
      ann.time = ClassifyDayNight(images, prior, cfg.day_night);
    });

    const bool people = detector->Supports(DetectorKind::kFaceDetect) || detector->Supports(DetectorKind::kPoseHeight);
    if (people && !frames.sampled.empty()) {
      std::vector<FaceObservation> faces;
      guarded("faces", [&] {
        if (detector->Supports(DetectorKind::kFaceDetect)) faces = DetectFaces(*detector, clip, frames.sampled);
      });
      guarded("shot_scale", [&] {
        const auto pose = MeasurePoseHeight(*detector, clip, frames.sampled);
        if (faces.empty() && !pose) return;
        ann.shot_type = EstimateShotScale(faces, pose, frames.sampled.front().image.height(), cfg.shot_scale);
      });
      if (ctx.gallery) guarded("actors", [&] { ann.actors = IdentifyActors(faces, *ctx.gallery); });
    }

  }

  out.record = Fuse(m, slate, ann, *ctx.profile);
  std::string summary;
  for (Label l : kAllLabels) {
    if (l == Label::kName || l == Label::kNotes) continue;
    const std::string cell = CellText(out.record, l);
    if (!cell.empty()) summary += " " + std::string(ToString(l)) + "=" + cell;
  }
  note("fused" + (summary.empty() ? std::string(" (no semantic fields)") : summary));
  return out;
}

// ---------------------------------------------------------------------------
// Ingest

inline std::string Export(const std::vector<MetadataRecord>& records, const UserProfile& profile) {
  switch (profile.output_format) {
    case OutputFormat::kAle: return WriteAle(records, profile);
    case OutputFormat::kCsv: return WriteCsv(records, profile);
    case OutputFormat::kJson: return WriteJsonExport(records, profile);
  }
  return {};
}

struct IngestResult {
  std::vector<MetadataRecord> records;
  std::vector<std::string> log;
  fs::path catalog;
  fs::path export_path;
};

// Clips run on `workers` threads; records, log lines and files are written
// in manifest order afterwards, so output does not depend on scheduling.
// The catalog is rewritten from scratch on every run.
inline IngestResult RunIngest(const PipelineConfig& cfg) {
  const UserProfile profile = LoadProfile(ReadFile(cfg.profile));
  std::vector<ClipManifest> manifests;
  for (const fs::path& p : ListManifests(cfg.clips)) {
    ClipManifest m = LoadManifest(p);
    if (!fs::is_directory(m.frames_dir))
      Fail(ErrorCode::kIo, "clip '" + m.clip_id.str() + "': frames_dir '" + m.frames_dir.string() + "' does not exist");
    for (const auto& other : manifests) {
      if (other.clip_id == m.clip_id)
        Fail(ErrorCode::kDuplicateClipId, "clip id '" + m.clip_id.str() + "' appears in two manifests");
    }
    manifests.push_back(std::move(m));
  }
  std::optional<ActorGallery> gallery;
  if (cfg.gallery) gallery = LoadGallery(*cfg.gallery, cfg.similarity_threshold);
  std::optional<TemplateRegistry> templates;
  if (cfg.templates) {
    if (!fs::is_directory(*cfg.templates))
      Fail(ErrorCode::kIo, "templates directory '" + cfg.templates->string() + "' does not exist");
    templates.emplace(*cfg.templates);
  }
  if (cfg.detectors.type == BackendSpec::Type::kFixtures && !fs::is_directory(cfg.detectors.root))
    Fail(ErrorCode::kIo, "fixture root '" + cfg.detectors.root.string() + "' does not exist");
  if (!cfg.detectors.transcript.empty()) fs::create_directories(cfg.detectors.transcript.parent_path());
  DetectorPool pool(cfg.detectors, static_cast<std::size_t>(cfg.workers));

  PipelineContext ctx{&cfg, &profile, gallery ? &*gallery : nullptr, templates ? &*templates : nullptr, &pool};
  std::vector<std::optional<ClipOutcome>> outcomes(manifests.size());
  std::vector<std::exception_ptr> failures(manifests.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < manifests.size(); i = next++) {
      try {
        outcomes[i] = ProcessClip(manifests[i], ctx);
      } catch (...) {
        failures[i] = std::current_exception();
      }
    }
  };
  const int n = std::min<int>(cfg.workers, std::max<int>(1, static_cast<int>(manifests.size())));
  std::vector<std::thread> threads;
  for (int t = 1; t < n; ++t) threads.emplace_back(worker);
  worker();
  for (auto& t : threads) t.join();
  for (const auto& f : failures) {
    if (f) std::rethrow_exception(f);
  }

  IngestResult result;
  result.catalog = cfg.catalog;
  result.export_path = cfg.export_path.value_or(cfg.catalog.parent_path() /
                                                ("export." + std::string(ToString(profile.output_format))));
  result.log.push_back("ingest: " + std::to_string(manifests.size()) + " clips, seed " + std::to_string(cfg.seed));
  for (auto& o : outcomes) {
    result.records.push_back(std::move(o->record));
    result.log.insert(result.log.end(), o->log.begin(), o->log.end());
  }
  result.log.push_back("wrote " + result.catalog.filename().string() + " and " +
                       result.export_path.filename().string());
  if (!cfg.catalog.parent_path().empty()) fs::create_directories(cfg.catalog.parent_path());
  if (!result.export_path.parent_path().empty()) fs::create_directories(result.export_path.parent_path());
  WriteFileAtomic(cfg.catalog, SerializeCatalog(result.records));
  WriteFileAtomic(result.export_path, Export(result.records, profile));
  if (cfg.log) {
    if (!cfg.log->parent_path().empty()) fs::create_directories(cfg.log->parent_path());
    std::string text;
    for (const auto& line : result.log) text += line + "\n";
    WriteFileAtomic(*cfg.log, text);
  }
  return result;
}

// ---------------------------------------------------------------------------
// Evaluation

// The labels of the evaluation table, in its order. ObjectType is opt-in.
inline constexpr std::array<Label, 8> kEvalLabels = {Label::kSceneNum, Label::kShotNum,  Label::kTakeNum,
                                                     Label::kTime,     Label::kActorPID, Label::kShotType,
                                                     Label::kCameraMove, Label::kSceneType};

inline std::string_view EvalName(Label l) {
  switch (l) {
    case Label::kActorPID: return "PID";
    case Label::kShotType: return "ShotScale";
    default: return ToString(l);
  }
}

struct EvalCounts {
  std::int64_t correct = 0;
  std::int64_t total = 0;
};

struct EvalReport {
  std::size_t clips = 0;  // size of the prediction/truth intersection
  std::vector<std::pair<Label, EvalCounts>> counts;  // table order, totals > 0 only

  const EvalCounts* Find(Label l) const {
    for (const auto& [label, c] : counts) {
      if (label == l) return &c;
    }
    return nullptr;
  }
};

// correct/total rounded half-up to three decimals, from integers only.
inline std::string FormatAccuracy(std::int64_t correct, std::int64_t total) {
  if (total <= 0) return "n/a";
  const std::int64_t milli = (2000 * correct + total) / (2 * total);
  std::string frac = std::to_string(milli % 1000);
  frac.insert(0, 3 - frac.size(), '0');
  return std::to_string(milli / 1000) + "." + frac;
}

// Over the clip ids present in both catalogs. Scalar labels count clips
// whose truth has a value; an absent prediction is wrong. List labels
// (PID, and ObjectType when asked) count each truth entry, correct when
// the predicted list contains it.
inline EvalReport Evaluate(const std::vector<MetadataRecord>& predictions, const std::vector<MetadataRecord>& truth,
                           bool include_objects = false) {
  std::map<std::string, const MetadataRecord*> pred;
  for (const auto& r : predictions) pred[r.clip_id.str()] = &r;
  std::vector<Label> labels(kEvalLabels.begin(), kEvalLabels.end());
  if (include_objects) labels.push_back(Label::kObjectType);
  std::map<Label, EvalCounts> counts;
  EvalReport report;
  for (const MetadataRecord& t : truth) {
    auto it = pred.find(t.clip_id.str());
    if (it == pred.end()) continue;
    ++report.clips;
    const MetadataRecord& p = *it->second;
    for (Label l : labels) {
      EvalCounts& c = counts[l];
      if (IsListLabel(l)) {
        auto split = [](const std::string& cell) {
          std::vector<std::string> items;
          std::size_t pos = 0;
          while (!cell.empty() && pos <= cell.size()) {
            const std::size_t end = std::min(cell.find(';', pos), cell.size());
            items.push_back(cell.substr(pos, end - pos));
            pos = end + 1;
          }
          return items;
        };
        const auto have = split(CellText(p, l));
        for (const std::string& want : split(CellText(t, l))) {
          ++c.total;
          c.correct += std::find(have.begin(), have.end(), want) != have.end();
        }
      } else {
        const std::string want = CellText(t, l);
        if (want.empty()) continue;
        ++c.total;
        c.correct += CellText(p, l) == want;
      }
    }
  }
  if (report.clips == 0) Fail(ErrorCode::kEmptyIntersection, "predictions and truth share no clip ids");
  for (Label l : labels) {
    if (counts[l].total > 0) report.counts.emplace_back(l, counts[l]);
  }
  return report;
}

// Rows of four labels: a header row, then an Accuracy row. Labels without
// any truth print n/a.
inline std::string FormatEvalTable(const EvalReport& r, bool include_objects = false) {
  std::vector<Label> labels(kEvalLabels.begin(), kEvalLabels.end());
  if (include_objects) labels.push_back(Label::kObjectType);
  std::string out = "Evaluation results of semantic annotation (" + std::to_string(r.clips) + " clips).\n\n";
  for (std::size_t row = 0; row < labels.size(); row += 4) {
    std::string head, acc = "Accuracy";
    for (std::size_t i = row; i < std::min(row + 4, labels.size()); ++i) {
      head += "\t" + std::string(EvalName(labels[i]));
      const EvalCounts* c = r.Find(labels[i]);
      acc += "\t" + (c ? FormatAccuracy(c->correct, c->total) : std::string("n/a"));
    }
    out += head + "\n" + acc + "\n";
  }
  return out;
}

inline Json EvalToJson(const EvalReport& r) {
  Json labels = Json::object();
  for (const auto& [l, c] : r.counts) {
    labels[std::string(EvalName(l))] = {{"correct", c.correct},
                                        {"total", c.total},
                                        {"accuracy", static_cast<double>(c.correct) / static_cast<double>(c.total)}};
  }
  return {{"clips", r.clips}, {"labels", std::move(labels)}};
}

}  // namespace cinemeta

#endif  // CINEMETA_PIPELINE_HPP_
