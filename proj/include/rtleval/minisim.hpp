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

// Interpreter for a combinational Verilog subset, enough to run this
// project's golden references, candidates, and self-checking testbenches
// without an external simulator:
//
//   - modules with ANSI or non-ANSI port declarations, wire/reg/integer
//     nets up to 64 bits, continuous assigns, module instantiation
//     (named or positional connections)
//   - expressions: bitwise/logical/reduction/arithmetic/comparison/shift
//     operators, ternary, concatenation, replication, bit and part selects,
//     sized and unsized literals with x digits; four-state lite semantics
//     (x tracked per bit, z folded into x), unsigned arithmetic only
//   - a single-threaded behavioral layer for testbenches: initial blocks
//     with begin/end, blocking (and <=, treated as blocking) assignments,
//     if/else, for loops, #delay (settles the combinational net), $display
//     with %d/%0d/%b/%h/%s, and $finish
//
// Sequential constructs (always blocks, events, clocks) are out of scope.

#pragma once

#include <memory>
#include <string>
#include <vector>

namespace rtleval::minisim {

struct CompileError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct SimRuntimeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct SourceFile {
  std::string name;     // for diagnostics
  std::string content;  // Verilog text
};

struct SimOutput {
  std::string display_output;  // everything $display printed
  long statements = 0;         // behavioral statements executed
  bool finished = false;       // $finish was reached
};

class Design {
 public:
  // Parses and elaborates. `top_hint` forces the top module; otherwise the
  // unique uninstantiated module containing an initial block is chosen.
  // Throws CompileError.
  static Design compile(const std::vector<SourceFile>& files, const std::string& top_hint = "");

  // Interprets the top module's initial blocks. Throws SimRuntimeError on
  // non-convergence or when the statement budget is exhausted.
  SimOutput run(long max_statements = 50000000) const;

  const std::string& top() const;

  Design(Design&&) noexcept;
  Design& operator=(Design&&) noexcept;
  ~Design();

 private:
  Design();
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace rtleval::minisim
