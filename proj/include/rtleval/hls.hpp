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
#include <string>
#include <vector>

#include "rtleval/dataset.hpp"

namespace rtleval::hls {

// Aborts the run (not the sample): missing tool binary, unreadable script
// template, and similar setup defects.
struct Misconfiguration : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct HlsConfig {
  enum class Backend { mock, external };
  Backend backend = Backend::mock;

  // external: tool invocation template, e.g. {"vitis_hls", "-f", "{script}"}.
  // Placeholders: {script}, {source}, {top}, {part}, {project}.
  std::vector<std::string> tool_command;
  // external: batch script template file; same placeholders.
  std::filesystem::path script_template;
  // external: where the tool leaves Verilog, relative to the job directory.
  std::string rtl_dir = "proj/sol1/syn/verilog";

  std::string part_or_target = "generic-target";
  double timeout_s = 300;
  std::filesystem::path workdir_root;  // job dirs are created under here

  // mock: the bundled digest-lookup backend.
  std::filesystem::path mock_tool;
  std::filesystem::path fixtures_dir;
};

enum class SynthStatus { ok, tool_error, timeout };

std::string to_string(SynthStatus s);

struct SynthesisResult {
  SynthStatus status = SynthStatus::tool_error;
  std::vector<std::pair<std::string, std::string>> rtl_files;  // (filename, text)
  std::string log;
  std::string top_rtl_module;          // present iff ok
  std::filesystem::path job_dir;       // preserved for audit
};

// Name of the function the LLM was asked to write (the HLS top), parsed
// from the problem's function signature.
std::string top_function_name(const std::string& function_signature);

// Drives the configured synthesis backend on one code sample in a fresh job
// directory under cfg.workdir_root (preserved afterwards). Tool failures and
// timeouts are encoded in the result; configuration defects throw
// Misconfiguration.
SynthesisResult synthesize(const std::string& code, const dataset::Problem& p,
                           const HlsConfig& cfg);

struct WrapResult {
  bool ok = false;
  std::string wrapper;  // Verilog text, module named p.top_module
  std::string error;    // names the unmappable port when !ok
  std::vector<std::string> warnings;
};

// Emits a wrapper declaring exactly the golden port list and instantiating
// the synthesized top inside. Port association is by name after stripping
// tool affixes (_V/_i/_o suffixes); block-control ports (ap_clk, ap_start,
// ap_done, *_ap_vld, ...) are tied off or left open; a lone ap_return maps
// to the single remaining golden output. Falls back to positional order
// (with a recorded warning) when names cannot be reconciled.
WrapResult wrap_interface(const SynthesisResult& res, const dataset::Problem& p);

}  // namespace rtleval::hls
