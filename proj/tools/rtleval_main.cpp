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

#include <unistd.h>

#include <cstdio>
#include <filesystem>
#include <string>

#include "CLI11.hpp"
#include "rtleval/dataset.hpp"
#include "rtleval/metrics.hpp"
#include "rtleval/orchestrator.hpp"
#include "rtleval/util/fs.hpp"

namespace fs = std::filesystem;
using namespace rtleval;

namespace {

fs::path executable_dir() {
  char buf[4096];
  ssize_t n = ::readlink("/proc/self/exe", buf, sizeof(buf) - 1);
  if (n <= 0) return fs::current_path();
  buf[n] = '\0';
  return fs::path(buf).parent_path();
}

orchestrator::ToolPaths default_tools() {
  fs::path dir = executable_dir();
  return {dir / "rtleval-minisim", dir / "rtleval-mockhls"};
}

void print_report(const metrics::EvalReport& report) {
  std::fputs(metrics::format_text(report).c_str(), stdout);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"evaluation pipeline for LLM hardware generation via HLS"};
  app.require_subcommand(1);

  auto* run_cmd = app.add_subcommand("run", "execute a run from a config file");
  std::string config_path, stage_through;
  int parallelism_override = 0;
  run_cmd->add_option("config", config_path, "run config (JSON)")->required();
  run_cmd->add_option("--stage-through", stage_through,
                      "stop after a stage: generate | synthesize | simulate");
  run_cmd->add_option("--parallelism", parallelism_override, "worker count override");

  auto* resume_cmd = app.add_subcommand("resume", "continue an interrupted run");
  std::string resume_root;
  resume_cmd->add_option("artifact-root", resume_root, "artifact root of the run")->required();

  auto* report_cmd = app.add_subcommand("report", "rebuild the report from stored verdicts");
  std::string report_root, format = "text", out_file;
  report_cmd->add_option("artifact-root", report_root, "artifact root of the run")->required();
  report_cmd->add_option("--format", format, "text | csv | machine")
      ->check(CLI::IsMember({"text", "csv", "machine"}));
  report_cmd->add_option("-o,--output", out_file, "write to a file instead of stdout");

  auto* validate_cmd = app.add_subcommand("validate-dataset", "check a dataset directory");
  std::string dataset_path;
  validate_cmd->add_option("path", dataset_path, "dataset root directory")->required();

  auto* passk_cmd = app.add_subcommand("passk", "pass@k calculator");
  int pk_n = 0, pk_c = 0, pk_k = 0;
  passk_cmd->add_option("n", pk_n, "samples generated")->required();
  passk_cmd->add_option("c", pk_c, "samples passing")->required();
  passk_cmd->add_option("k", pk_k, "k")->required();

  CLI11_PARSE(app, argc, argv);

  try {
    if (run_cmd->parsed()) {
      auto cfg = orchestrator::load_config(config_path, default_tools());
      if (!stage_through.empty()) {
        if (stage_through == "generate") cfg.stage_through = orchestrator::StageThrough::generate;
        else if (stage_through == "synthesize") cfg.stage_through = orchestrator::StageThrough::synthesize;
        else if (stage_through == "simulate" || stage_through == "full")
          cfg.stage_through = orchestrator::StageThrough::simulate;
        else throw orchestrator::ConfigError("unknown --stage-through '" + stage_through + "'");
      }
      if (parallelism_override > 0) cfg.parallelism = parallelism_override;
      auto result = orchestrator::run(cfg);
      std::fprintf(stdout, "cells: %ld total, %ld already complete, %ld generated, %ld synthesized, %ld simulated\n",
                   result.stats.cells_total, result.stats.cells_skipped,
                   result.stats.generate_executed, result.stats.synthesize_executed,
                   result.stats.simulate_executed);
      if (result.report) {
        print_report(*result.report);
        std::fprintf(stdout, "reports written under %s\n", cfg.artifact_root.string().c_str());
      } else {
        std::fprintf(stdout, "stopped after stage '%s'; resume or rerun to finish\n",
                     stage_through.empty() ? "partial" : stage_through.c_str());
      }
      return 0;
    }
    if (resume_cmd->parsed()) {
      auto result = orchestrator::resume(resume_root, default_tools());
      if (result.report) print_report(*result.report);
      return 0;
    }
    if (report_cmd->parsed()) {
      auto report = orchestrator::report_from_artifacts(report_root, default_tools());
      std::string text = format == "csv"     ? metrics::format_csv(report)
                         : format == "machine" ? metrics::format_machine(report)
                                               : metrics::format_text(report);
      if (out_file.empty())
        std::fputs(text.c_str(), stdout);
      else
        write_file_atomic(out_file, text);
      return 0;
    }
    if (validate_cmd->parsed()) {
      auto problems = dataset::load_dataset(dataset_path);
      for (const auto& p : problems)
        std::fprintf(stdout, "ok %-12s category=%-13s top=%s\n", p.id.c_str(),
                     dataset::to_string(p.category).c_str(), p.top_module.c_str());
      std::fprintf(stdout, "%zu problems valid\n", problems.size());
      return 0;
    }
    if (passk_cmd->parsed()) {
      std::fprintf(stdout, "%.12g\n", metrics::pass_at_k(pk_n, pk_c, pk_k));
      return 0;
    }
  } catch (const orchestrator::ConfigError& e) {
    std::fprintf(stderr, "rtleval: config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "rtleval: %s\n", e.what());
    return 1;
  }
  return 0;
}
