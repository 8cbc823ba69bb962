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

#include "rtleval/prompt.hpp"

#include <random>

#include "doctest.h"
#include "rtleval/util/strings.hpp"

using namespace rtleval;
using namespace rtleval::prompt;

namespace {

dataset::Problem fadd_problem() {
  dataset::Problem p;
  p.id = "fadd";
  p.category = dataset::Category::combinational;
  p.description =
      "Implement a 1-bit binary full adder with inputs a, b and cin and outputs sum and cout.";
  p.function_signature = "void fadd(bool a, bool b, bool cin, bool *sum, bool *cout);";
  p.pragmas = {"#pragma HLS INTERFACE ap_ctrl_none port=return"};
  p.top_module = "fadd";
  p.golden_rtl =
      "module fadd(a, b, cin, sum, cout);\n"
      "  input a;\n  input b;\n  input cin;\n  output sum;\n  output cout;\n"
      "  assign sum = a ^ b ^ cin;\n"
      "  assign cout = (a & b) | (a & cin) | (b & cin);\n"
      "endmodule\n";
  p.testbench = "module tb; initial $display(\"MISMATCHES=%0d\", 0); endmodule\n";
  return p;
}

Templates repo_templates() {
  return load_templates(std::filesystem::path(RTLEVAL_SOURCE_DIR) / "data" / "prompts");
}

}  // namespace

TEST_CASE("build_prompt hls_cpp carries description, signature, pragmas, one-shot") {
  auto p = fadd_problem();
  auto t = repo_templates();
  PromptBundle b = build_prompt(p, GenerationMode::hls_cpp, t);

  CHECK(contains(b.user_prompt, p.description));
  CHECK(contains(b.user_prompt, p.function_signature));
  CHECK(contains(b.user_prompt, p.pragmas[0]));
  CHECK(contains(b.system_prompt, p.function_signature));
  REQUIRE(b.one_shot_block.has_value());
  CHECK(b.one_shot_block->solution_code == t.default_one_shot.solution_hls_cpp);

  std::string flat = b.flattened();
  CHECK(contains(flat, p.description));
  CHECK(contains(flat, t.default_one_shot.solution_hls_cpp));

  // section order: system, one-shot pair, user
  size_t sys = flat.find("[system]");
  size_t shot_user = flat.find("[user]");
  size_t shot_asst = flat.find("[assistant]");
  size_t task_user = flat.rfind("[user]");
  REQUIRE(sys != std::string::npos);
  CHECK(sys < shot_user);
  CHECK(shot_user < shot_asst);
  CHECK(shot_asst < task_user);
  CHECK(contains(flat.substr(task_user), p.description));
}

TEST_CASE("build_prompt omits pragma section when problem has none") {
  auto p = fadd_problem();
  p.pragmas.clear();
  auto b = build_prompt(p, GenerationMode::hls_cpp, repo_templates());
  CHECK(!contains(b.user_prompt, "Pragmas:"));
}

TEST_CASE("build_prompt direct_verilog states module name and interface") {
  auto p = fadd_problem();
  p.id = "xnor";
  p.top_module = "xnor_gate";
  p.golden_rtl =
      "module xnor_gate(a, b, y);\n"
      "  input a;\n  input b;\n  output y;\n"
      "  assign y = ~(a ^ b);\n"
      "endmodule\n";
  auto b = build_prompt(p, GenerationMode::direct_verilog, repo_templates());
  CHECK(contains(b.system_prompt, "Verilog"));
  CHECK(contains(b.system_prompt, "xnor_gate"));
  CHECK(contains(b.user_prompt, "module xnor_gate(input a, input b, output y);"));
  CHECK(contains(b.user_prompt, p.function_signature));
  CHECK(b.mode == GenerationMode::direct_verilog);
}

TEST_CASE("build_prompt prefers the problem's own one-shot") {
  auto p = fadd_problem();
  p.one_shot = dataset::OneShot{"Custom example.", "int f() { return 0; }\n",
                                "module ex(y); output y; assign y = 1'b0; endmodule\n"};
  auto b = build_prompt(p, GenerationMode::hls_cpp, repo_templates());
  REQUIRE(b.one_shot_block.has_value());
  CHECK(b.one_shot_block->problem_text == "Custom example.");
  CHECK(contains(b.flattened(), "int f() { return 0; }"));
}

TEST_CASE("build_prompt is deterministic") {
  auto p = fadd_problem();
  auto t = repo_templates();
  for (auto mode : {GenerationMode::hls_cpp, GenerationMode::direct_verilog})
    CHECK(build_prompt(p, mode, t).flattened() == build_prompt(p, mode, t).flattened());
}

TEST_CASE("extract_code single tagged fence") {
  std::string code = "void f() {\n  return;\n}\n";
  auto got = extract_code("Here is the solution:\n```cpp\n" + code + "```\nHope this helps!",
                          GenerationMode::hls_cpp);
  REQUIRE(got.has_value());
  CHECK(*got == code);
}

TEST_CASE("fence round-trip recovers code byte-identically") {
  std::string cpp = "void full_adder(bool a) {\n  (void)a;\n}\n";
  auto got = extract_code(render_fenced(cpp, fence_tag(GenerationMode::hls_cpp)),
                          GenerationMode::hls_cpp);
  REQUIRE(got.has_value());
  CHECK(*got == cpp);

  std::string v = "module m(y);\n  output y;\n  assign y = 1'b1;\nendmodule\n";
  auto got2 = extract_code(render_fenced(v, fence_tag(GenerationMode::direct_verilog)),
                           GenerationMode::direct_verilog);
  REQUIRE(got2.has_value());
  CHECK(*got2 == v);
}

TEST_CASE("extract_code discards surrounding prose") {
  auto got = extract_code(
      "Let me explain the design first.\n\n```verilog\nmodule m(); endmodule\n```\n\n"
      "The module above is empty.",
      GenerationMode::direct_verilog);
  REQUIRE(got.has_value());
  CHECK(*got == "module m(); endmodule\n");
}

TEST_CASE("extract_code tie-break: earliest mode-consistent fence wins") {
  std::string raw =
      "Plan:\n```text\npseudo code here\n```\nImplementation:\n```cpp\nint real() { return 1; }\n```\n";
  auto got = extract_code(raw, GenerationMode::hls_cpp);
  REQUIRE(got.has_value());
  CHECK(*got == "int real() { return 1; }\n");

  // untagged fences are consistent with any mode, so an untagged first fence wins
  std::string raw2 = "```\nfirst block\n```\n```cpp\nint second() { return 2; }\n```\n";
  auto got2 = extract_code(raw2, GenerationMode::hls_cpp);
  REQUIRE(got2.has_value());
  CHECK(*got2 == "first block\n");
}

TEST_CASE("extract_code verilog fallback without fences") {
  std::string raw =
      "Sure! The design is simple enough:\n"
      "module top(a, y);\n  input a;\n  output y;\n  assign y = a;\nendmodule\n"
      "Let me know if you need more.";
  auto got = extract_code(raw, GenerationMode::direct_verilog);
  REQUIRE(got.has_value());
  CHECK(starts_with(*got, "module top"));
  CHECK(contains(*got, "endmodule"));
  CHECK(!contains(*got, "Sure!"));
  CHECK(!contains(*got, "Let me know"));
}

TEST_CASE("extract_code cpp fallback without fences") {
  std::string raw =
      "The function below implements the adder.\n"
      "void fadd(bool a, bool b, bool cin, bool *sum, bool *cout) {\n"
      "  *sum = a ^ b ^ cin;\n"
      "  *cout = (a & b) | (a & cin) | (b & cin);\n"
      "}\n"
      "That is all.";
  auto got = extract_code(raw, GenerationMode::hls_cpp);
  REQUIRE(got.has_value());
  CHECK(starts_with(*got, "void fadd"));
  CHECK(ends_with(rtrim(*got), "}"));
  CHECK(!contains(*got, "That is all"));
}

TEST_CASE("extract_code reports no-code-found") {
  CHECK(!extract_code("I cannot help with that request.", GenerationMode::hls_cpp).has_value());
  CHECK(!extract_code("", GenerationMode::direct_verilog).has_value());
  // empty fence is not code
  CHECK(!extract_code("```cpp\n```\n", GenerationMode::hls_cpp).has_value());
}

TEST_CASE("placeholder grammar: {name} substitution only, unknown names rejected") {
  std::map<std::string, std::string> values = {{"signature", "void f();"}, {"pragmas", ""}};
  CHECK(rtleval::render_placeholders("sig: {signature}!{pragmas}", values) == "sig: void f();!");
  CHECK_THROWS_WITH_AS(rtleval::render_placeholders("{missing}", values),
                       doctest::Contains("unknown placeholder"), std::runtime_error);
  CHECK_THROWS_WITH_AS(rtleval::render_placeholders("broken {", values),
                       doctest::Contains("unterminated"), std::runtime_error);
}

TEST_CASE("extracted code never contains fence delimiters") {
  std::mt19937 rng(42);
  const std::vector<std::string> pieces = {
      "prose line\n", "```cpp\n", "```\n", "int f() { return 0; }\n", "```verilog\n",
      "module m(); endmodule\n", "more text\n", "```text\n", "x = y;\n"};
  for (int iter = 0; iter < 500; iter++) {
    std::string raw;
    int n = 1 + (int)(rng() % 8);
    for (int i = 0; i < n; i++) raw += pieces[rng() % pieces.size()];
    for (auto mode : {GenerationMode::hls_cpp, GenerationMode::direct_verilog}) {
      auto got = extract_code(raw, mode);
      if (got) CHECK(!contains(*got, "```"));
    }
  }
}
