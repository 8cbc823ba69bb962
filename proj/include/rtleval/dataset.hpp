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

namespace rtleval::dataset {

enum class Category { combinational, kmap, fsm };

std::string to_string(Category c);
Category category_from_string(const std::string& s);

struct OneShot {
  std::string problem_text;
  std::string solution_hls_cpp;
  std::string solution_direct_verilog;
};

// One benchmark task. Verilog sources are loaded into memory; the on-disk
// layout keeps them as sibling files (see docs/dataset_format.md).
struct Problem {
  std::string id;
  Category category = Category::combinational;
  std::string description;
  std::string function_signature;
  std::optional<OneShot> one_shot;
  std::vector<std::string> pragmas;
  std::string golden_rtl;
  std::string testbench;
  std::string top_module;
  std::filesystem::path source_dir;  // where the record was loaded from
};

// Empty iff all Problem invariants hold; each violation names the field.
std::vector<std::string> validate_problem(const Problem& p);

// Loads all problems from a dataset root (one subdirectory per problem,
// sorted by name). Throws on a missing path, malformed record (message
// carries the record index and field), or duplicate id.
std::vector<Problem> load_dataset(const std::filesystem::path& path);

// Writes problems in the documented on-disk layout. load_dataset(save_dataset(ps))
// is identity on valid problem lists.
void save_dataset(const std::vector<Problem>& problems, const std::filesystem::path& path);

// Output-corrupting mutant candidates shipped with a problem, if any.
// Returns (file stem, Verilog text) pairs sorted by name.
std::vector<std::pair<std::string, std::string>> load_mutants(const Problem& p);

// ---- K-map textual schema ----

enum class CellValue { zero, one, dont_care };

struct KMapSpec {
  // 2..4 distinct names; the first floor(n/2) index table rows, the rest
  // columns.
  std::vector<std::string> variables;
  // Assignment bit string (one char per variable, in `variables` order,
  // '0'/'1') -> cell value. Must cover exactly 2^n assignments.
  std::map<std::string, CellValue> cells;

  bool operator==(const KMapSpec&) const = default;
};

std::vector<std::string> validate_kmap(const KMapSpec& spec);

// Deterministic grid with Gray-code row/column order; don't-care renders as
// "d". Throws std::invalid_argument when the spec is invalid.
std::string render_kmap(const KMapSpec& spec);

// Parser for the same grammar; render/parse round-trip.
KMapSpec parse_kmap(const std::string& text);

// ---- FSM textual schema ----

struct FsmTransition {
  std::string from;
  std::string input_condition;
  std::string to;

  bool operator==(const FsmTransition&) const = default;
};

struct FsmOutput {
  // Either a state name, or a transition reference "FROM -> TO when COND".
  std::string key;
  std::string expression;

  bool operator==(const FsmOutput&) const = default;
};

struct FsmSpec {
  std::vector<std::string> states;
  std::string reset_state;
  std::vector<FsmTransition> transitions;
  std::vector<FsmOutput> outputs;

  bool operator==(const FsmSpec&) const = default;
};

std::vector<std::string> validate_fsm(const FsmSpec& spec);
std::string render_fsm(const FsmSpec& spec);
FsmSpec parse_fsm(const std::string& text);

}  // namespace rtleval::dataset
