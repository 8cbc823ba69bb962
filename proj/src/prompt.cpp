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

#include <stdexcept>

#include "json.hpp"
#include "rtleval/util/fs.hpp"
#include "rtleval/util/strings.hpp"
#include "rtleval/verilog.hpp"

namespace rtleval::prompt {

namespace fs = std::filesystem;

std::string to_string(GenerationMode m) {
  return m == GenerationMode::hls_cpp ? "hls_cpp" : "direct_verilog";
}

GenerationMode mode_from_string(const std::string& s) {
  if (s == "hls_cpp") return GenerationMode::hls_cpp;
  if (s == "direct_verilog") return GenerationMode::direct_verilog;
  throw std::runtime_error("unknown generation mode '" + s + "'");
}

std::string fence_tag(GenerationMode m) {
  return m == GenerationMode::hls_cpp ? "cpp" : "verilog";
}

std::string render_fenced(const std::string& code, const std::string& tag) {
  std::string body = code;
  if (body.empty() || body.back() != '\n') body += '\n';
  return "```" + tag + "\n" + body + "```\n";
}

std::vector<ChatMessage> PromptBundle::messages() const {
  std::vector<ChatMessage> out;
  out.push_back({"system", system_prompt});
  if (one_shot_block) {
    out.push_back({"user", one_shot_block->problem_text});
    out.push_back({"assistant", render_fenced(one_shot_block->solution_code, fence_tag(mode))});
  }
  out.push_back({"user", user_prompt});
  return out;
}

std::string PromptBundle::flattened() const {
  std::string out;
  for (const auto& m : messages()) {
    out += "[" + m.role + "]\n";
    out += m.content;
    if (out.empty() || out.back() != '\n') out += '\n';
  }
  return out;
}

Templates load_templates(const fs::path& dir) {
  Templates t;
  t.system_hls_cpp = read_file(dir / "system_hls_cpp.txt");
  t.system_direct_verilog = read_file(dir / "system_direct_verilog.txt");
  t.user_hls_cpp = read_file(dir / "user_hls_cpp.txt");
  t.user_direct_verilog = read_file(dir / "user_direct_verilog.txt");
  auto j = nlohmann::json::parse(read_file(dir / "oneshot.json"));
  t.default_one_shot.problem_text = j.at("problem").get<std::string>();
  t.default_one_shot.solution_hls_cpp = j.at("solution_hls_cpp").get<std::string>();
  t.default_one_shot.solution_direct_verilog = j.at("solution_direct_verilog").get<std::string>();
  return t;
}

PromptBundle build_prompt(const dataset::Problem& p, GenerationMode mode,
                          const Templates& templates) {
  std::map<std::string, std::string> values;
  values["description"] = p.description;
  values["signature"] = p.function_signature;
  if (p.pragmas.empty()) {
    values["pragmas"] = "";
  } else {
    values["pragmas"] = "\nPragmas:\n" + join(p.pragmas, "\n") + "\n";
  }
  values["top_module"] = p.top_module;
  if (mode == GenerationMode::direct_verilog) {
    auto header = verilog::parse_module_header(p.golden_rtl, p.top_module);
    values["module_interface"] = verilog::format_module_interface(header);
  }

  PromptBundle bundle;
  bundle.mode = mode;
  bundle.system_prompt = render_placeholders(
      mode == GenerationMode::hls_cpp ? templates.system_hls_cpp
                                      : templates.system_direct_verilog,
      values);
  bundle.user_prompt = render_placeholders(
      mode == GenerationMode::hls_cpp ? templates.user_hls_cpp : templates.user_direct_verilog,
      values);

  const dataset::OneShot& shot = p.one_shot ? *p.one_shot : templates.default_one_shot;
  OneShotBlock block;
  block.problem_text = shot.problem_text;
  block.solution_code = mode == GenerationMode::hls_cpp ? shot.solution_hls_cpp
                                                        : shot.solution_direct_verilog;
  bundle.one_shot_block = block;
  return bundle;
}

namespace {

bool tag_consistent(const std::string& tag, GenerationMode mode) {
  if (tag.empty()) return true;
  std::string t = to_lower(trim(tag));
  if (mode == GenerationMode::hls_cpp)
    return t == "cpp" || t == "c++" || t == "c" || t == "cxx";
  return t == "verilog" || t == "v" || t == "systemverilog" || t == "sv";
}

struct Fence {
  std::string tag;
  std::string content;
};

// Any line starting with ``` is a fence boundary: it closes an open fence
// and, when it carries a tag, opens the next one. This keeps delimiters out
// of extracted content even for malformed nestings.
std::vector<Fence> find_fences(const std::string& raw) {
  std::vector<Fence> out;
  auto lines = split_lines(raw);
  std::optional<Fence> open;
  for (const auto& line : lines) {
    std::string t = trim(line);
    if (starts_with(t, "```")) {
      if (open) {
        out.push_back(std::move(*open));
        open.reset();
      } else {
        open = Fence{trim(t.substr(3)), ""};
        continue;
      }
      std::string tag = trim(t.substr(3));
      if (!tag.empty()) open = Fence{tag, ""};  // boundary doubles as opener
      continue;
    }
    if (open) {
      open->content += line;
      open->content += '\n';
    }
  }
  return out;  // an unclosed trailing fence yields no block
}

// Heuristic fallback: first "module" keyword through the last "endmodule".
std::optional<std::string> fallback_verilog(const std::string& raw) {
  auto lines = split_lines(raw);
  std::optional<size_t> start;
  std::optional<size_t> end;
  for (size_t i = 0; i < lines.size(); i++) {
    auto toks = split_ws(lines[i]);
    if (!start && !toks.empty() && (toks[0] == "module" || toks[0] == "macromodule"))
      start = i;
    if (start && !toks.empty())
      for (const auto& tok : toks)
        if (tok == "endmodule" || starts_with(tok, "endmodule")) end = i;
  }
  if (!start || !end || *end < *start) return std::nullopt;
  std::string out;
  for (size_t i = *start; i <= *end; i++) { out += lines[i]; out += '\n'; }
  return out;
}

bool looks_like_cpp_signature(const std::string& line) {
  std::string t = trim(line);
  if (t.empty() || !std::isalpha((unsigned char)t[0])) return false;
  auto paren = t.find('(');
  if (paren == std::string::npos) return false;
  // Reject prose: a sentence would contain spaces plus punctuation like
  // '.' or ',' before the paren beyond what a declarator uses.
  std::string head = t.substr(0, paren);
  for (char c : head)
    if (!(std::isalnum((unsigned char)c) || c == '_' || c == ' ' || c == '*' || c == '&' ||
          c == ':' || c == '<' || c == '>' || c == ','))
      return false;
  // Require at least a return type and a name (two words).
  return split_ws(head).size() >= 2;
}

// Heuristic fallback: first signature-like line through its balanced brace.
std::optional<std::string> fallback_cpp(const std::string& raw) {
  auto lines = split_lines(raw);
  for (size_t i = 0; i < lines.size(); i++) {
    if (!looks_like_cpp_signature(lines[i])) continue;
    int depth = 0;
    bool seen_brace = false;
    std::string out;
    for (size_t j = i; j < lines.size(); j++) {
      out += lines[j];
      out += '\n';
      for (char c : lines[j]) {
        if (c == '{') { depth++; seen_brace = true; }
        if (c == '}') depth--;
      }
      if (seen_brace && depth <= 0) return out;
    }
    return std::nullopt;  // unbalanced to end of text
  }
  return std::nullopt;
}

}  // namespace

std::optional<std::string> extract_code(const std::string& raw, GenerationMode mode) {
  auto fences = find_fences(raw);
  for (const auto& f : fences)
    if (tag_consistent(f.tag, mode) && !trim(f.content).empty()) return f.content;
  auto fallback = mode == GenerationMode::hls_cpp ? fallback_cpp(raw) : fallback_verilog(raw);
  if (!fallback) return std::nullopt;
  if (contains(*fallback, "```")) {
    // never hand fence delimiters back to callers
    std::string cleaned;
    for (const auto& line : split_lines(*fallback))
      if (!contains(line, "```")) { cleaned += line; cleaned += '\n'; }
    *fallback = cleaned;
  }
  if (trim(*fallback).empty()) return std::nullopt;
  return fallback;
}

}  // namespace rtleval::prompt
