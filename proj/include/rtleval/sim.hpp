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
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "rtleval/dataset.hpp"

namespace rtleval::sim {

// ---- sandboxed subprocess execution ----

struct ExecResult {
  int exit_code = -1;       // meaningful when !timed_out && signal == 0
  int signal = 0;           // terminating signal, 0 if exited normally
  bool timed_out = false;
  bool truncated = false;
  std::string output;       // stdout + stderr, capped
  double elapsed_s = 0.0;
};

struct ExecOptions {
  double timeout_s = 60.0;
  size_t max_output_bytes = 1 << 20;
  // Environment allowlist; listed variables are forwarded from the parent.
  std::vector<std::string> env_allowlist = {"PATH", "HOME", "LANG", "LC_ALL", "TMPDIR"};
  std::map<std::string, std::string> extra_env;
};

// Runs argv[0] with args in `workdir`, stdout+stderr merged and captured up
// to the cap (with a truncation marker), the whole process group killed at
// the timeout. File writes are confined by working in a fresh scratch
// directory; this is a runaway-code guard, not an adversarial jail (an
// external jail command can be prepended through the simulator/tool command
// templates). Throws std::runtime_error on spawn failure.
ExecResult sandbox_exec(const std::vector<std::string>& argv,
                        const std::filesystem::path& workdir, const ExecOptions& options);

// ---- simulation of candidates against golden testbenches ----

struct SimConfig {
  // Command templates, split on spaces before substitution. Placeholders:
  // {sources} (expands to one argv entry per file), {snapshot}, {workdir}.
  std::vector<std::string> compile_command = {"iverilog", "-g2012", "-o", "{snapshot}", "{sources}"};
  std::vector<std::string> run_command = {"vvp", "{snapshot}"};
  double timeout_s = 60.0;
  size_t max_output_bytes = 1 << 20;
};

// Built-in profile driving the bundled subset simulator binary.
SimConfig builtin_sim_config(const std::filesystem::path& minisim_binary);

enum class VerdictStatus { pass, fail };

enum class FailReason {
  ok,
  extract_error,
  hls_error,
  wrapper_error,
  sim_compile_error,
  mismatch,
  sim_timeout,
  runtime_error,
};

std::string to_string(VerdictStatus s);
std::string to_string(FailReason r);
FailReason fail_reason_from_string(const std::string& s);

struct Verdict {
  VerdictStatus status = VerdictStatus::fail;
  FailReason reason = FailReason::runtime_error;
  long mismatch_count = -1;  // >= 0 when a simulation completed
  std::string log_excerpt;

  static Verdict pass_verdict(long mismatches_seen = 0);
  static Verdict fail_verdict(FailReason reason, std::string log_excerpt,
                              long mismatch_count = -1);
};

struct NamedSource {
  std::string filename;  // as written into the scratch dir
  std::string content;
};

// Compiles {candidate sources, golden (top renamed to <top>_golden),
// testbench} in a scratch directory under `scratch_root`, runs the
// testbench, and derives the verdict from the summary line
// "MISMATCHES=<decimal>". All failure modes are encoded in the Verdict.
Verdict run_testbench(const std::vector<NamedSource>& candidate_rtl,
                      const dataset::Problem& p, const SimConfig& cfg,
                      const std::filesystem::path& scratch_root);

// Extracts the mismatch count from simulator output; nullopt when the
// summary line is absent.
std::optional<long> parse_mismatch_summary(const std::string& output);

}  // namespace rtleval::sim
