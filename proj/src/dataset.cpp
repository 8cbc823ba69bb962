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

#include "rtleval/dataset.hpp"

#include <algorithm>
#include <stdexcept>

#include "json.hpp"
#include "rtleval/util/fs.hpp"
#include "rtleval/util/strings.hpp"
#include "rtleval/verilog.hpp"

namespace rtleval::dataset {

namespace fs = std::filesystem;
using nlohmann::json;

std::string to_string(Category c) {
  switch (c) {
    case Category::combinational: return "combinational";
    case Category::kmap: return "kmap";
    case Category::fsm: return "fsm";
  }
  return "combinational";
}

Category category_from_string(const std::string& s) {
  if (s == "combinational") return Category::combinational;
  if (s == "kmap") return Category::kmap;
  if (s == "fsm") return Category::fsm;
  throw std::runtime_error("unknown category '" + s + "'");
}

static bool is_slug(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!(std::isalnum((unsigned char)c) || c == '_' || c == '-')) return false;
  return true;
}

std::vector<std::string> validate_problem(const Problem& p) {
  std::vector<std::string> v;
  if (p.id.empty())
    v.push_back("id: empty");
  else if (!is_slug(p.id))
    v.push_back("id: not a slug (allowed: alphanumerics, '_', '-')");
  if (trim(p.description).empty()) v.push_back("description: empty");
  if (trim(p.function_signature).empty()) v.push_back("function_signature: empty");
  if (p.top_module.empty()) v.push_back("top_module: missing");
  if (p.golden_rtl.empty()) v.push_back("golden_rtl: missing");
  if (p.testbench.empty()) v.push_back("testbench: missing");
  if (!p.golden_rtl.empty() && !p.top_module.empty()) {
    try {
      auto names = verilog::module_names(p.golden_rtl);
      if (std::find(names.begin(), names.end(), p.top_module) == names.end()) {
        v.push_back("golden_rtl: does not define module '" + p.top_module + "'");
      } else {
        auto header = verilog::parse_module_header(p.golden_rtl, p.top_module);
        for (const auto& port : header.ports) {
          std::string lower = to_lower(port.name);
          if (lower == "clk" || lower == "clock")
            v.push_back("golden_rtl: port '" + port.name +
                        "' looks sequential; only combinational problems are supported");
        }
      }
    } catch (const std::exception& e) {
      v.push_back(std::string("golden_rtl: unparseable (") + e.what() + ")");
    }
  }
  // The summary line the simulator harness greps for is part of the dataset
  // contract; a testbench that never emits it could not be scored.
  if (!p.testbench.empty() && !contains(p.testbench, "MISMATCHES="))
    v.push_back("testbench: missing MISMATCHES= summary emitter");
  if (p.one_shot) {
    if (trim(p.one_shot->problem_text).empty()) v.push_back("one_shot.problem: empty");
    if (trim(p.one_shot->solution_hls_cpp).empty()) v.push_back("one_shot.solution_hls_cpp: empty");
    if (trim(p.one_shot->solution_direct_verilog).empty())
      v.push_back("one_shot.solution_direct_verilog: empty");
  }
  return v;
}

static std::string require_string(const json& j, const std::string& field,
                                  const std::string& where) {
  if (!j.contains(field))
    throw std::runtime_error(where + ": missing field '" + field + "'");
  if (!j.at(field).is_string())
    throw std::runtime_error(where + ": field '" + field + "' is not a string");
  return j.at(field).get<std::string>();
}

std::vector<Problem> load_dataset(const fs::path& path) {
  std::error_code ec;
  if (!fs::exists(path, ec) || ec)
    throw std::runtime_error("dataset path does not exist: " + path.string());
  if (!fs::is_directory(path))
    throw std::runtime_error("dataset path is not a directory: " + path.string());

  std::vector<fs::path> dirs;
  for (const auto& e : fs::directory_iterator(path)) {
    if (!e.is_directory()) continue;
    std::string name = e.path().filename().string();
    if (!name.empty() && name[0] == '.') continue;
    dirs.push_back(e.path());
  }
  std::sort(dirs.begin(), dirs.end());

  std::vector<Problem> problems;
  std::map<std::string, size_t> ids_seen;
  for (size_t idx = 0; idx < dirs.size(); idx++) {
    const fs::path& dir = dirs[idx];
    std::string where = "record " + std::to_string(idx) + " (" + dir.filename().string() + ")";
    fs::path meta = dir / "problem.json";
    if (!fs::exists(meta))
      throw std::runtime_error(where + ": missing field 'problem.json'");
    json j;
    try {
      j = json::parse(read_file(meta));
    } catch (const std::exception& e) {
      throw std::runtime_error(where + ": malformed problem.json: " + e.what());
    }

    Problem p;
    p.source_dir = dir;
    p.id = require_string(j, "id", where);
    p.category = category_from_string(require_string(j, "category", where));
    p.description = require_string(j, "description", where);
    p.function_signature = require_string(j, "function_signature", where);
    p.top_module = require_string(j, "top_module", where);
    if (j.contains("pragmas")) {
      if (!j.at("pragmas").is_array())
        throw std::runtime_error(where + ": field 'pragmas' is not an array");
      for (const auto& pr : j.at("pragmas")) p.pragmas.push_back(pr.get<std::string>());
    }

    auto golden = read_file_if_exists(dir / "golden.v");
    if (!golden) throw std::runtime_error(where + ": golden_rtl: missing (no golden.v)");
    p.golden_rtl = *golden;
    auto tb = read_file_if_exists(dir / "testbench.v");
    if (!tb) throw std::runtime_error(where + ": testbench: missing (no testbench.v)");
    p.testbench = *tb;

    if (auto os = read_file_if_exists(dir / "oneshot.json")) {
      json oj;
      try {
        oj = json::parse(*os);
      } catch (const std::exception& e) {
        throw std::runtime_error(where + ": malformed oneshot.json: " + e.what());
      }
      OneShot shot;
      shot.problem_text = require_string(oj, "problem", where + " oneshot");
      shot.solution_hls_cpp = require_string(oj, "solution_hls_cpp", where + " oneshot");
      shot.solution_direct_verilog =
          require_string(oj, "solution_direct_verilog", where + " oneshot");
      p.one_shot = shot;
    }

    auto violations = validate_problem(p);
    if (!violations.empty())
      throw std::runtime_error(where + ": invalid problem: " + join(violations, "; "));

    auto [it, inserted] = ids_seen.emplace(p.id, idx);
    if (!inserted)
      throw std::runtime_error("duplicate id '" + p.id + "' (records " +
                               std::to_string(it->second) + " and " + std::to_string(idx) + ")");
    problems.push_back(std::move(p));
  }
  return problems;
}

void save_dataset(const std::vector<Problem>& problems, const fs::path& path) {
  ensure_dir(path);
  for (const auto& p : problems) {
    auto violations = validate_problem(p);
    if (!violations.empty())
      throw std::runtime_error("refusing to save invalid problem '" + p.id + "': " +
                               join(violations, "; "));
    fs::path dir = path / p.id;
    ensure_dir(dir);
    json j;
    j["id"] = p.id;
    j["category"] = to_string(p.category);
    j["description"] = p.description;
    j["function_signature"] = p.function_signature;
    j["pragmas"] = p.pragmas;
    j["top_module"] = p.top_module;
    write_file_atomic(dir / "problem.json", j.dump(2) + "\n");
    write_file_atomic(dir / "golden.v", p.golden_rtl);
    write_file_atomic(dir / "testbench.v", p.testbench);
    if (p.one_shot) {
      json oj;
      oj["problem"] = p.one_shot->problem_text;
      oj["solution_hls_cpp"] = p.one_shot->solution_hls_cpp;
      oj["solution_direct_verilog"] = p.one_shot->solution_direct_verilog;
      write_file_atomic(dir / "oneshot.json", oj.dump(2) + "\n");
    }
  }
}

std::vector<std::pair<std::string, std::string>> load_mutants(const Problem& p) {
  std::vector<std::pair<std::string, std::string>> out;
  fs::path dir = p.source_dir / "mutants";
  std::error_code ec;
  if (!fs::is_directory(dir, ec) || ec) return out;
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".v") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  for (const auto& f : files) out.emplace_back(f.stem().string(), read_file(f));
  return out;
}

// ---- K-map ----

static std::vector<std::string> gray_sequence(int bits) {
  std::vector<std::string> out;
  int count = 1 << bits;
  for (int i = 0; i < count; i++) {
    int g = i ^ (i >> 1);
    std::string s(bits, '0');
    for (int b = 0; b < bits; b++)
      if (g & (1 << (bits - 1 - b))) s[b] = '1';
    out.push_back(s);
  }
  return out;
}

std::vector<std::string> validate_kmap(const KMapSpec& spec) {
  std::vector<std::string> v;
  size_t n = spec.variables.size();
  if (n < 2 || n > 4) v.push_back("variables: need 2 to 4, got " + std::to_string(n));
  for (const auto& name : spec.variables)
    if (name.empty() || split_ws(name).size() != 1 || contains(name, "="))
      v.push_back("variables: bad name '" + name + "'");
  for (size_t i = 0; i < n; i++)
    for (size_t j = i + 1; j < n; j++)
      if (spec.variables[i] == spec.variables[j])
        v.push_back("variables: duplicate name '" + spec.variables[i] + "'");
  if (n >= 2 && n <= 4) {
    size_t expect = size_t{1} << n;
    if (spec.cells.size() != expect)
      v.push_back("cells: expected " + std::to_string(expect) + " assignments, got " +
                  std::to_string(spec.cells.size()));
    for (const auto& [key, _] : spec.cells) {
      if (key.size() != n || key.find_first_not_of("01") != std::string::npos)
        v.push_back("cells: bad assignment key '" + key + "'");
    }
  }
  return v;
}

static char cell_char(CellValue v) {
  switch (v) {
    case CellValue::zero: return '0';
    case CellValue::one: return '1';
    case CellValue::dont_care: return 'd';
  }
  return '0';
}

std::string render_kmap(const KMapSpec& spec) {
  auto violations = validate_kmap(spec);
  if (!violations.empty())
    throw std::invalid_argument("invalid KMapSpec: " + join(violations, "; "));

  int n = (int)spec.variables.size();
  int nrow_vars = n / 2;
  std::vector<std::string> row_vars(spec.variables.begin(), spec.variables.begin() + nrow_vars);
  std::vector<std::string> col_vars(spec.variables.begin() + nrow_vars, spec.variables.end());
  std::string row_prefix = join(row_vars, "");
  std::string col_prefix = join(col_vars, "");
  auto row_codes = gray_sequence((int)row_vars.size());
  auto col_codes = gray_sequence((int)col_vars.size());

  std::vector<std::string> col_labels;
  for (const auto& g : col_codes) col_labels.push_back(col_prefix + "=" + g);
  std::vector<std::string> row_labels;
  for (const auto& g : row_codes) row_labels.push_back(row_prefix + "=" + g);

  size_t label_w = 0;
  for (const auto& r : row_labels) label_w = std::max(label_w, r.size());

  auto pad = [](const std::string& s, size_t w) {
    return s.size() >= w ? s : s + std::string(w - s.size(), ' ');
  };

  std::string out = "K-map for f(" + join(spec.variables, ", ") + "):\n\n";
  std::string header = std::string(label_w, ' ');
  for (const auto& cl : col_labels) header += "  " + cl;
  out += rtrim(header) + "\n";
  for (size_t r = 0; r < row_codes.size(); r++) {
    std::string line = pad(row_labels[r], label_w);
    for (size_t c = 0; c < col_codes.size(); c++) {
      std::string key = row_codes[r] + col_codes[c];
      char ch = cell_char(spec.cells.at(key));
      line += "  " + pad(std::string(1, ch), col_labels[c].size());
    }
    out += rtrim(line) + "\n";
  }
  out += "\n('d' denotes don't-care)\n";
  return out;
}

KMapSpec parse_kmap(const std::string& text) {
  auto lines = split_lines(text);
  size_t li = 0;
  auto next_nonempty = [&]() -> std::string {
    while (li < lines.size() && trim(lines[li]).empty()) li++;
    if (li >= lines.size()) throw std::runtime_error("K-map text: unexpected end");
    return lines[li++];
  };

  std::string head = trim(next_nonempty());
  const std::string prefix = "K-map for f(";
  if (!starts_with(head, prefix) || !ends_with(head, "):"))
    throw std::runtime_error("K-map text: bad header line '" + head + "'");
  std::string vars_csv = head.substr(prefix.size(), head.size() - prefix.size() - 2);
  KMapSpec spec;
  for (auto& v : split(vars_csv, ',')) spec.variables.push_back(trim(v));

  int n = (int)spec.variables.size();
  if (n < 2 || n > 4) throw std::runtime_error("K-map text: bad variable count");
  int nrow_vars = n / 2;
  std::vector<std::string> row_vars(spec.variables.begin(), spec.variables.begin() + nrow_vars);
  std::vector<std::string> col_vars(spec.variables.begin() + nrow_vars, spec.variables.end());
  auto row_codes = gray_sequence((int)row_vars.size());
  auto col_codes = gray_sequence((int)col_vars.size());

  auto split_label = [](const std::string& tok) -> std::pair<std::string, std::string> {
    auto eq = tok.find('=');
    if (eq == std::string::npos) throw std::runtime_error("K-map text: bad label '" + tok + "'");
    return {tok.substr(0, eq), tok.substr(eq + 1)};
  };

  auto header_toks = split_ws(next_nonempty());
  if (header_toks.size() != col_codes.size())
    throw std::runtime_error("K-map text: wrong column count");
  for (size_t c = 0; c < header_toks.size(); c++) {
    auto [pfx, code] = split_label(header_toks[c]);
    if (pfx != join(col_vars, "") || code != col_codes[c])
      throw std::runtime_error("K-map text: column label '" + header_toks[c] +
                               "' out of Gray order");
  }

  for (size_t r = 0; r < row_codes.size(); r++) {
    auto toks = split_ws(next_nonempty());
    if (toks.size() != col_codes.size() + 1)
      throw std::runtime_error("K-map text: wrong cell count in row " + std::to_string(r));
    auto [pfx, code] = split_label(toks[0]);
    if (pfx != join(row_vars, "") || code != row_codes[r])
      throw std::runtime_error("K-map text: row label '" + toks[0] + "' out of Gray order");
    for (size_t c = 0; c < col_codes.size(); c++) {
      const std::string& cell = toks[c + 1];
      CellValue v;
      if (cell == "0") v = CellValue::zero;
      else if (cell == "1") v = CellValue::one;
      else if (cell == "d") v = CellValue::dont_care;
      else throw std::runtime_error("K-map text: bad cell token '" + cell + "'");
      spec.cells[row_codes[r] + col_codes[c]] = v;
    }
  }

  auto violations = validate_kmap(spec);
  if (!violations.empty())
    throw std::runtime_error("K-map text: parsed spec invalid: " + join(violations, "; "));
  return spec;
}

// ---- FSM ----

std::vector<std::string> validate_fsm(const FsmSpec& spec) {
  std::vector<std::string> v;
  if (spec.states.empty()) v.push_back("states: empty");
  for (const auto& s : spec.states)
    if (s.empty() || split_ws(s).size() != 1)
      v.push_back("states: bad name '" + s + "'");
  for (size_t i = 0; i < spec.states.size(); i++)
    for (size_t j = i + 1; j < spec.states.size(); j++)
      if (spec.states[i] == spec.states[j])
        v.push_back("states: duplicate '" + spec.states[i] + "'");
  auto known = [&](const std::string& s) {
    return std::find(spec.states.begin(), spec.states.end(), s) != spec.states.end();
  };
  if (!known(spec.reset_state)) v.push_back("reset_state: '" + spec.reset_state + "' not a state");
  std::vector<std::pair<std::string, std::string>> seen;
  for (const auto& t : spec.transitions) {
    if (!known(t.from)) v.push_back("transitions: from-state '" + t.from + "' unknown");
    if (!known(t.to)) v.push_back("transitions: to-state '" + t.to + "' unknown");
    if (trim(t.input_condition).empty()) v.push_back("transitions: empty input condition");
    if (contains(t.input_condition, "\n") || contains(t.input_condition, " => "))
      v.push_back("transitions: condition '" + t.input_condition + "' contains reserved text");
    auto key = std::make_pair(t.from, t.input_condition);
    if (std::find(seen.begin(), seen.end(), key) != seen.end())
      v.push_back("transitions: duplicate (from='" + t.from + "', condition='" +
                  t.input_condition + "')");
    seen.push_back(key);
  }
  for (const auto& o : spec.outputs) {
    if (contains(o.key, " => ") || contains(o.expression, "\n"))
      v.push_back("outputs: entry '" + o.key + "' contains reserved text");
    if (contains(o.key, " -> ")) {
      // transition reference: "FROM -> TO when COND"
      auto arrow = o.key.find(" -> ");
      auto when = o.key.find(" when ", arrow);
      if (when == std::string::npos) {
        v.push_back("outputs: bad transition reference '" + o.key + "'");
        continue;
      }
      std::string from = o.key.substr(0, arrow);
      std::string to = o.key.substr(arrow + 4, when - arrow - 4);
      std::string cond = o.key.substr(when + 6);
      bool found = false;
      for (const auto& t : spec.transitions)
        if (t.from == from && t.to == to && t.input_condition == cond) found = true;
      if (!found) v.push_back("outputs: no such transition '" + o.key + "'");
    } else if (!known(o.key)) {
      v.push_back("outputs: no such state '" + o.key + "'");
    }
  }
  return v;
}

std::string render_fsm(const FsmSpec& spec) {
  auto violations = validate_fsm(spec);
  if (!violations.empty())
    throw std::invalid_argument("invalid FsmSpec: " + join(violations, "; "));

  std::string out = "FSM specification:\n";
  out += "states:";
  for (const auto& s : spec.states) {
    out += " " + s;
    if (s == spec.reset_state) out += "(reset)";
  }
  out += "\n";
  out += "transitions:\n";
  for (const auto& t : spec.transitions)
    out += "  " + t.from + " -> " + t.to + " when " + t.input_condition + "\n";
  out += "outputs:\n";
  for (const auto& o : spec.outputs)
    out += "  " + o.key + " => " + o.expression + "\n";
  return out;
}

FsmSpec parse_fsm(const std::string& text) {
  auto lines = split_lines(text);
  FsmSpec spec;
  enum class Section { none, transitions, outputs } section = Section::none;
  bool saw_header = false, saw_states = false;
  for (const auto& raw : lines) {
    std::string line = rtrim(raw);
    if (trim(line).empty()) continue;
    if (!saw_header) {
      if (trim(line) != "FSM specification:")
        throw std::runtime_error("FSM text: bad header '" + line + "'");
      saw_header = true;
      continue;
    }
    if (starts_with(line, "states:")) {
      for (auto& tok : split_ws(line.substr(7))) {
        if (ends_with(tok, "(reset)")) {
          std::string name = tok.substr(0, tok.size() - 7);
          spec.states.push_back(name);
          spec.reset_state = name;
        } else {
          spec.states.push_back(tok);
        }
      }
      saw_states = true;
      continue;
    }
    if (trim(line) == "transitions:") { section = Section::transitions; continue; }
    if (trim(line) == "outputs:") { section = Section::outputs; continue; }
    if (starts_with(line, "  ") && section == Section::transitions) {
      std::string body = trim(line);
      auto arrow = body.find(" -> ");
      if (arrow == std::string::npos)
        throw std::runtime_error("FSM text: bad transition '" + body + "'");
      auto when = body.find(" when ", arrow);
      if (when == std::string::npos)
        throw std::runtime_error("FSM text: transition missing condition: '" + body + "'");
      FsmTransition t;
      t.from = body.substr(0, arrow);
      t.to = body.substr(arrow + 4, when - arrow - 4);
      t.input_condition = body.substr(when + 6);
      spec.transitions.push_back(t);
      continue;
    }
    if (starts_with(line, "  ") && section == Section::outputs) {
      std::string body = trim(line);
      auto sep = body.find(" => ");
      if (sep == std::string::npos)
        throw std::runtime_error("FSM text: bad output entry '" + body + "'");
      spec.outputs.push_back({body.substr(0, sep), body.substr(sep + 4)});
      continue;
    }
    throw std::runtime_error("FSM text: unexpected line '" + line + "'");
  }
  if (!saw_states) throw std::runtime_error("FSM text: missing states line");
  auto violations = validate_fsm(spec);
  if (!violations.empty())
    throw std::runtime_error("FSM text: parsed spec invalid: " + join(violations, "; "));
  return spec;
}

}  // namespace rtleval::dataset
