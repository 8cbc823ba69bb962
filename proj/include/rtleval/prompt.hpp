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
#include <optional>
#include <string>
#include <vector>

#include "rtleval/dataset.hpp"

namespace rtleval::prompt {

enum class GenerationMode { hls_cpp, direct_verilog };

std::string to_string(GenerationMode m);
GenerationMode mode_from_string(const std::string& s);

// Fence tag used when rendering solutions for a mode ("cpp" / "verilog").
std::string fence_tag(GenerationMode m);

// Wraps code in a fenced block, adding a trailing newline to the code if
// missing. extract_code() recovers the code byte-identically.
std::string render_fenced(const std::string& code, const std::string& tag);

struct OneShotBlock {
  std::string problem_text;   // rendered as a user turn
  std::string solution_code;  // rendered fenced, as an assistant turn
};

struct ChatMessage {
  std::string role;  // "system" | "user" | "assistant"
  std::string content;
};

struct PromptBundle {
  std::string system_prompt;
  std::optional<OneShotBlock> one_shot_block;
  std::string user_prompt;
  GenerationMode mode = GenerationMode::hls_cpp;

  // Dialogue form: system, one-shot user/assistant pair, user.
  std::vector<ChatMessage> messages() const;
  // Single-request form with [role] section markers; used for cache keys
  // and golden files.
  std::string flattened() const;
};

// Prompt data files: per-mode system and user templates plus the fixed
// default one-shot example. Placeholders: {description}, {signature},
// {pragmas} everywhere; {top_module} and {module_interface} additionally in
// direct_verilog templates.
struct Templates {
  std::string system_hls_cpp;
  std::string system_direct_verilog;
  std::string user_hls_cpp;
  std::string user_direct_verilog;
  dataset::OneShot default_one_shot;
};

Templates load_templates(const std::filesystem::path& dir);

// Deterministic, pure. The user prompt carries the problem description and
// function signature verbatim; pragma lines appear iff the problem has
// pragmas; the one-shot block uses the problem's own example when present,
// the fixed default otherwise.
PromptBundle build_prompt(const dataset::Problem& p, GenerationMode mode,
                          const Templates& templates);

// Contents of the first fenced code block whose tag is consistent with the
// mode (untagged fences are consistent with every mode); earliest consistent
// fence wins. Without any fence, falls back to the longest region that looks
// like a function/module skeleton. std::nullopt when no code is found.
std::optional<std::string> extract_code(const std::string& raw, GenerationMode mode);

}  // namespace rtleval::prompt
