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

#include <string>
#include <string_view>
#include <vector>

namespace rtleval::verilog {

enum class TokKind { ident, number, string, symbol, eof };

struct Token {
  TokKind kind = TokKind::eof;
  std::string text;
  size_t pos = 0;   // byte offset of first char
  size_t line = 1;  // 1-based
};

// Comment- and string-aware tokenizer for the Verilog subset this project
// reads and writes. Unknown characters throw.
std::vector<Token> lex(std::string_view source);

enum class PortDir { in, out, inout };

struct Port {
  std::string name;
  PortDir dir = PortDir::in;
  int msb = 0;
  int lsb = 0;
  int width() const { return msb - lsb + 1; }
};

struct ModuleHeader {
  std::string name;
  std::vector<Port> ports;  // declaration order
};

// Names of all modules declared in the source.
std::vector<std::string> module_names(std::string_view source);

// Extracts one module's name and resolved port list (ANSI or non-ANSI
// declarations). Tolerant of body constructs it does not understand.
// Throws std::runtime_error if the module or its port declarations cannot
// be resolved.
ModuleHeader parse_module_header(std::string_view source, std::string_view module_name);

// Token-level rename of every identifier equal to `from`; comments and
// string literals are left untouched.
std::string rename_identifier(std::string_view source, std::string_view from,
                              std::string_view to);

// "module fadd(input a, input b, input cin, output sum, output cout);"
std::string format_module_interface(const ModuleHeader& h);

}  // namespace rtleval::verilog
