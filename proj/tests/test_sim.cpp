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

#include "rtleval/sim.hpp"

#include <unistd.h>

#include "doctest.h"
#include "rtleval/util/fs.hpp"
#include "rtleval/util/strings.hpp"

using namespace rtleval;
using namespace rtleval::sim;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& tag) {
  fs::path dir =
      fs::temp_directory_path() / ("rtleval_sim_" + tag + "_" + std::to_string(::getpid()));
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

dataset::Problem fadd_problem() {
  dataset::Problem p;
  p.id = "fadd";
  p.description = "full adder";
  p.function_signature = "void fadd(bool a, bool b, bool cin, bool *sum, bool *cout);";
  p.top_module = "fadd";
  p.golden_rtl =
      "module fadd(a, b, cin, sum, cout);\n"
      "  input a;\n  input b;\n  input cin;\n  output sum;\n  output cout;\n"
      "  assign sum = a ^ b ^ cin;\n"
      "  assign cout = (a & b) | (a & cin) | (b & cin);\n"
      "endmodule\n";
  p.testbench =
      "module tb;\n"
      "  reg a, b, cin;\n"
      "  wire sum_c, cout_c, sum_g, cout_g;\n"
      "  fadd dut(.a(a), .b(b), .cin(cin), .sum(sum_c), .cout(cout_c));\n"
      "  fadd_golden gold(.a(a), .b(b), .cin(cin), .sum(sum_g), .cout(cout_g));\n"
      "  integer i;\n  integer mismatches;\n"
      "  initial begin\n"
      "    mismatches = 0;\n"
      "    for (i = 0; i < 8; i = i + 1) begin\n"
      "      {a, b, cin} = i[2:0];\n"
      "      #1;\n"
      "      if ({sum_c, cout_c} !== {sum_g, cout_g}) mismatches = mismatches + 1;\n"
      "    end\n"
      "    $display(\"MISMATCHES=%0d\", mismatches);\n"
      "    $finish;\n"
      "  end\n"
      "endmodule\n";
  return p;
}

SimConfig builtin_cfg() { return builtin_sim_config(MINISIM_BIN); }

}  // namespace

TEST_CASE("sandbox_exec runs a trivial command") {
  auto dir = fresh_dir("true");
  auto r = sandbox_exec({"sh", "-c", "exit 0"}, dir, ExecOptions{});
  CHECK(r.exit_code == 0);
  CHECK(r.signal == 0);
  CHECK(!r.timed_out);
  CHECK(r.output.empty());
  fs::remove_all(dir);
}

TEST_CASE("sandbox_exec kills at the timeout") {
  auto dir = fresh_dir("sleep");
  ExecOptions opts;
  opts.timeout_s = 0.3;
  auto t0 = std::chrono::steady_clock::now();
  auto r = sandbox_exec({"sh", "-c", "sleep 30"}, dir, opts);
  double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  CHECK(r.timed_out);
  CHECK(r.elapsed_s >= 0.3);
  CHECK(wall < 10.0);  // nowhere near the sleep
  fs::remove_all(dir);
}

TEST_CASE("sandbox_exec caps output with a truncation marker") {
  auto dir = fresh_dir("spam");
  ExecOptions opts;
  opts.max_output_bytes = 10000;
  auto r = sandbox_exec({"sh", "-c", "yes spam | head -c 10000000"}, dir, opts);
  CHECK(r.truncated);
  CHECK(r.output.size() <= opts.max_output_bytes + 64);
  CHECK(contains(r.output, "[output truncated]"));
  fs::remove_all(dir);
}

TEST_CASE("sandbox_exec confines writes to the scratch directory") {
  auto dir = fresh_dir("writes");
  auto r = sandbox_exec({"sh", "-c", "echo hello > artifact.txt"}, dir, ExecOptions{});
  CHECK(r.exit_code == 0);
  CHECK(fs::exists(dir / "artifact.txt"));
  fs::remove_all(dir);
}

TEST_CASE("sandbox_exec sanitizes the environment") {
  auto dir = fresh_dir("env");
  setenv("RTLEVAL_SECRET_TOKEN", "leaky", 1);
  auto r = sandbox_exec({"sh", "-c", "echo token=${RTLEVAL_SECRET_TOKEN:-absent}"}, dir,
                        ExecOptions{});
  unsetenv("RTLEVAL_SECRET_TOKEN");
  CHECK(contains(r.output, "token=absent"));

  ExecOptions with_extra;
  with_extra.extra_env["RTLEVAL_EXTRA"] = "visible";
  auto r2 = sandbox_exec({"sh", "-c", "echo extra=${RTLEVAL_EXTRA:-absent}"}, dir, with_extra);
  CHECK(contains(r2.output, "extra=visible"));
  fs::remove_all(dir);
}

TEST_CASE("sandbox_exec spawn failure throws") {
  auto dir = fresh_dir("spawnfail");
  auto r = sandbox_exec({"/nonexistent/binary/xyz"}, dir, ExecOptions{});
  CHECK(r.exit_code == 127);  // exec failure is reported via exit status
  fs::remove_all(dir);
}

TEST_CASE("parse_mismatch_summary") {
  CHECK(parse_mismatch_summary("MISMATCHES=0\n") == 0);
  CHECK(parse_mismatch_summary("noise\nMISMATCHES=17\nmore noise\n") == 17);
  CHECK(parse_mismatch_summary("MISMATCHES=1\nMISMATCHES=3\n") == 3);  // last one wins
  CHECK(!parse_mismatch_summary("MISMATCHES=abc\n").has_value());
  CHECK(!parse_mismatch_summary("nothing here\n").has_value());
}

TEST_CASE("run_testbench golden self-equivalence") {
  auto scratch = fresh_dir("selftest");
  auto p = fadd_problem();
  auto v = run_testbench({{"candidate.v", p.golden_rtl}}, p, builtin_cfg(), scratch);
  CHECK(v.status == VerdictStatus::pass);
  CHECK(v.reason == FailReason::ok);
  CHECK(v.mismatch_count == 0);
  fs::remove_all(scratch);
}

TEST_CASE("run_testbench catches an output-swapping mutant") {
  auto scratch = fresh_dir("mutant");
  auto p = fadd_problem();
  std::string mutant =
      "module fadd(a, b, cin, sum, cout);\n"
      "  input a;\n  input b;\n  input cin;\n  output sum;\n  output cout;\n"
      "  assign cout = a ^ b ^ cin;\n"   // swapped
      "  assign sum = (a & b) | (a & cin) | (b & cin);\n"
      "endmodule\n";
  auto v = run_testbench({{"candidate.v", mutant}}, p, builtin_cfg(), scratch);
  CHECK(v.status == VerdictStatus::fail);
  CHECK(v.reason == FailReason::mismatch);
  CHECK(v.mismatch_count > 0);
  fs::remove_all(scratch);
}

TEST_CASE("run_testbench reports syntax errors as sim_compile_error") {
  auto scratch = fresh_dir("syntax");
  auto p = fadd_problem();
  auto v = run_testbench({{"candidate.v", "module fadd(a; endmodule"}}, p, builtin_cfg(), scratch);
  CHECK(v.status == VerdictStatus::fail);
  CHECK(v.reason == FailReason::sim_compile_error);
  CHECK(!v.log_excerpt.empty());
  fs::remove_all(scratch);
}

TEST_CASE("run_testbench flags a missing summary line") {
  auto scratch = fresh_dir("nosummary");
  auto p = fadd_problem();
  // Testbench that never prints the summary (bypasses dataset validation on
  // purpose; run_testbench must still yield a verdict).
  p.testbench =
      "module tb;\n  wire s, c, sg, cg;\n  reg a, b, ci;\n"
      "  fadd dut(.a(a), .b(b), .cin(ci), .sum(s), .cout(c));\n"
      "  initial begin\n    a = 0; b = 0; ci = 0;\n    #1;\n    $finish;\n  end\nendmodule\n";
  auto v = run_testbench({{"candidate.v", p.golden_rtl}}, p, builtin_cfg(), scratch);
  CHECK(v.status == VerdictStatus::fail);
  CHECK(v.reason == FailReason::runtime_error);
  CHECK(contains(v.log_excerpt, "MISMATCHES"));
  fs::remove_all(scratch);
}

TEST_CASE("run_testbench times out on a stuck simulator") {
  auto scratch = fresh_dir("stuck");
  auto p = fadd_problem();
  SimConfig cfg;
  cfg.compile_command = {"sh", "-c", "exit 0"};
  cfg.run_command = {"sh", "-c", "sleep 30"};
  cfg.timeout_s = 0.3;
  auto v = run_testbench({{"candidate.v", p.golden_rtl}}, p, cfg, scratch);
  CHECK(v.status == VerdictStatus::fail);
  CHECK(v.reason == FailReason::sim_timeout);
  fs::remove_all(scratch);
}

TEST_CASE("run_testbench is deterministic") {
  auto scratch = fresh_dir("deterministic");
  auto p = fadd_problem();
  auto v1 = run_testbench({{"candidate.v", p.golden_rtl}}, p, builtin_cfg(), scratch);
  auto v2 = run_testbench({{"candidate.v", p.golden_rtl}}, p, builtin_cfg(), scratch);
  CHECK(to_string(v1.status) == to_string(v2.status));
  CHECK(v1.mismatch_count == v2.mismatch_count);
  fs::remove_all(scratch);
}
