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

// cinemeta: ingest dailies, export and query the catalog, evaluate
// predictions against a truth catalog.
//
// Exit codes: 0 success, 1 configuration or IO error, 2 evaluation error.

#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "cinemeta/demo.hpp"
#include "cinemeta/detector/fixture.hpp"
#include "cinemeta/pipeline.hpp"
#include "cinemeta/query.hpp"

namespace {

using namespace cinemeta;

constexpr int kOk = 0;
constexpr int kConfigOrIo = 1;
constexpr int kEvalError = 2;

int Ingest(const std::string& config_path, int workers) {
  PipelineConfig cfg = LoadConfig(config_path);
  ApplySeedOverride(cfg);
  if (workers > 0) cfg.workers = workers;
  const IngestResult r = RunIngest(cfg);
  for (const auto& line : r.log) std::cerr << line << "\n";
  std::cout << r.catalog.string() << "\n" << r.export_path.string() << "\n";
  return kOk;
}

int ExportCatalog(const std::string& catalog, const std::string& profile_path, const std::string& out,
                  const std::string& format) {
  UserProfile profile = LoadProfile(ReadFile(profile_path));
  if (format == "ale") profile.output_format = OutputFormat::kAle;
  if (format == "csv") profile.output_format = OutputFormat::kCsv;
  if (format == "json") profile.output_format = OutputFormat::kJson;
  const std::string text = Export(ReadCatalog(catalog), profile);
  if (out == "-") {
    std::cout << text;
  } else {
    WriteFileAtomic(out, text);
  }
  return kOk;
}

int Eval(const std::string& pred, const std::string& truth, bool objects, const std::string& json_out) {
  const auto predictions = ReadCatalog(pred);
  const auto reference = ReadCatalog(truth);
  EvalReport report;
  try {
    report = Evaluate(predictions, reference, objects);
  } catch (const Error& e) {
    std::cerr << "cinemeta eval: " << e.what() << "\n";
    return kEvalError;
  }
  std::cout << FormatEvalTable(report, objects);
  if (!json_out.empty()) WriteFileAtomic(json_out, EvalToJson(report).dump(2) + "\n");
  return kOk;
}

int Query(const std::string& catalog, const std::string& where) {
  const QueryPredicate predicate = ParsePredicate(where);
  for (const MetadataRecord& r : ReadCatalog(catalog)) {
    if (Match(r, predicate)) std::cout << r.clip_id.str() << "\n";
  }
  return kOk;
}

int ServeFixtures(const std::string& root) {
  FixtureConnection fixtures(root);
  ServeStream(std::cin, std::cout, fixtures);
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Film dailies metadata toolkit"};
  app.require_subcommand(1);

  std::string config;
  int workers = 0;
  auto* ingest = app.add_subcommand("ingest", "Annotate clips, fuse, write catalog and export");
  ingest->add_option("--config", config, "Pipeline config JSON")->required();
  ingest->add_option("--workers", workers, "Override config.workers")->check(CLI::PositiveNumber);

  std::string catalog, profile, out = "-", format;
  auto* exp = app.add_subcommand("export", "Write a catalog in the profile's format");
  exp->add_option("--catalog", catalog, "Catalog JSON-lines file")->required();
  exp->add_option("--profile", profile, "User profile JSON")->required();
  exp->add_option("--out", out, "Output path, - for stdout");
  exp->add_option("--format", format, "Override the profile format")->check(CLI::IsMember({"ale", "csv", "json"}));

  std::string pred, truth, json_out;
  bool objects = false;
  auto* eval = app.add_subcommand("eval", "Score predictions against a truth catalog");
  eval->add_option("--pred", pred, "Predicted catalog")->required();
  eval->add_option("--truth", truth, "Truth catalog")->required();
  eval->add_flag("--objects", objects, "Also score ObjectType");
  eval->add_option("--json", json_out, "Write the report as JSON too");

  std::string where;
  auto* query = app.add_subcommand("query", "List clip ids matching a predicate");
  query->add_option("--catalog", catalog, "Catalog JSON-lines file")->required();
  query->add_option("--where", where, "Predicate, e.g. Time=Night,SceneType=Inside")->required();

  std::string root;
  bool serve = false;
  auto* fixtures = app.add_subcommand("fixture-backend", "Serve fixture files over the detector protocol");
  fixtures->add_option("--root", root, "Fixture root directory")->required();
  fixtures->add_flag("--serve", serve, "Speak the protocol on stdin/stdout")->required();

  std::string demo_dir;
  std::uint64_t demo_seed = 7;
  auto* demo_cmd = app.add_subcommand("demo", "Write a small synthetic project");
  demo_cmd->add_option("--out", demo_dir, "Target directory")->required();
  demo_cmd->add_option("--seed", demo_seed, "Synthesis seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kConfigOrIo;
  }

  try {
    if (*ingest) return Ingest(config, workers);
    if (*exp) return ExportCatalog(catalog, profile, out, format);
    if (*eval) return Eval(pred, truth, objects, json_out);
    if (*query) return Query(catalog, where);
    if (*fixtures) return ServeFixtures(root);
    if (*demo_cmd) {
      std::cout << demo::WriteProject(demo_dir, demo_seed).string() << "\n";
      return kOk;
    }
  } catch (const Error& e) {
    std::cerr << "cinemeta " << app.get_subcommands().front()->get_name() << ": " << e.what() << "\n";
    return kConfigOrIo;
  } catch (const std::exception& e) {
    std::cerr << "cinemeta: " << e.what() << "\n";
    return kConfigOrIo;
  }
  return kConfigOrIo;
}
