// Copyright 2026 The rtleval Authors
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

#pragma once

#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "rtleval/hls.hpp"
#include "rtleval/llm.hpp"
#include "rtleval/metrics.hpp"
#include "rtleval/sim.hpp"

namespace rtleval::orchestrator {

// Configuration problems abort before any sampling; artifact_root is left
// untouched.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ModelProfile {
  std::string id;
  enum class Backend { replay, http } backend = Backend::replay;
  std::filesystem::path fixtures_dir;  // replay
  llm::HttpProfile http;               // http
};

enum class StageThrough { generate, synthesize, simulate };

struct RunConfig {
  std::filesystem::path dataset_path;
  std::filesystem::path prompts_dir;
  std::filesystem::path artifact_root;
  std::vector<ModelProfile> models;
  std::vector<prompt::GenerationMode> modes;
  llm::SamplingConfig sampling;
  hls::HlsConfig hls;
  sim::SimConfig sim;
  std::vector<int> k_values = {1, 5, 10};
  int parallelism = 1;
  int job_slots = 0;  // 0: same as parallelism
  double rate_limit_rpm = 0;
  long seed = 0;  // reserved for stimulus generation; bundled testbenches pin their own
  StageThrough stage_through = StageThrough::simulate;
  std::filesystem::path cache_dir;  // default: artifact_root/cache
};

// Paths to the bundled helper binaries, usually resolved next to the
// running executable; config values "builtin"/"mock" rely on these.
struct ToolPaths {
  std::filesystem::path minisim;
  std::filesystem::path mockhls;
};

// Parses the structured config document (JSON mirroring RunConfig field
// names). Relative paths are resolved against the config file's directory.
// Throws ConfigError.
RunConfig load_config(const std::filesystem::path& config_file, const ToolPaths& tools);

// Digest over the semantic run identity: dataset content, prompt content,
// models (wire behavior), modes, sampling, hls/sim parameters, k_values and
// seed. Machine-local knobs (parallelism, paths of artifacts/caches/tools)
// are excluded, so a resume may change them.
std::string config_digest(const RunConfig& cfg);

struct RunStats {
  long cells_total = 0;
  long cells_skipped = 0;     // already terminal when the run started
  long generate_executed = 0;
  long synthesize_executed = 0;
  long simulate_executed = 0;
  long transport_excluded_groups = 0;
};

struct RunResult {
  std::optional<metrics::EvalReport> report;  // absent when stage_through < simulate
  RunStats stats;
};

struct RunHooks {
  // Polled between cells; return true to stop the run early (used by tests
  // to simulate interruption). Pending cells stay pending.
  std::function<bool()> should_stop;
};

// Executes every (problem x model x mode x sample) cell, skipping cells that
// already reached a terminal verdict under artifact_root (crash-safe resume
// by construction). Writes report.json/report.csv/report.txt on full runs.
RunResult run(const RunConfig& cfg, const RunHooks& hooks = {});

// Loads the config persisted under artifact_root, refuses to proceed when
// its digest no longer matches the recorded one, then continues the run.
RunResult resume(const std::filesystem::path& artifact_root, const ToolPaths& tools);

// Rebuilds the report purely from stored verdicts; executes nothing.
metrics::EvalReport report_from_artifacts(const std::filesystem::path& artifact_root,
                                          const ToolPaths& tools);

}  // namespace rtleval::orchestrator
