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

#include "rtleval/hls.hpp"

#include <algorithm>
#include <cstring>
#include <optional>
#include <set>

#include "rtleval/sim.hpp"
#include "rtleval/util/fs.hpp"
#include "rtleval/util/strings.hpp"
#include "rtleval/verilog.hpp"

namespace rtleval::hls {

namespace fs = std::filesystem;

std::string to_string(SynthStatus s) {
  switch (s) {
    case SynthStatus::ok: return "ok";
    case SynthStatus::tool_error: return "tool_error";
    case SynthStatus::timeout: return "timeout";
  }
  return "tool_error";
}

std::string top_function_name(const std::string& function_signature) {
  auto paren = function_signature.find('(');
  if (paren == std::string::npos)
    throw std::runtime_error("function signature has no parameter list: " + function_signature);
  size_t end = paren;
  while (end > 0 && std::isspace((unsigned char)function_signature[end - 1])) end--;
  size_t begin = end;
  while (begin > 0) {
    char c = function_signature[begin - 1];
    if (std::isalnum((unsigned char)c) || c == '_') begin--;
    else break;
  }
  if (begin == end)
    throw std::runtime_error("cannot find function name in signature: " + function_signature);
  return function_signature.substr(begin, end - begin);
}

namespace {

std::string substitute(const std::string& text,
                       const std::map<std::string, std::string>& values) {
  return render_placeholders(text, values);
}

std::vector<std::string> substitute_argv(const std::vector<std::string>& tmpl,
                                         const std::map<std::string, std::string>& values) {
  std::vector<std::string> out;
  for (const auto& token : tmpl) out.push_back(substitute(token, values));
  return out;
}

std::vector<std::pair<std::string, std::string>> collect_rtl(const fs::path& dir) {
  std::vector<std::pair<std::string, std::string>> out;
  std::error_code ec;
  if (!fs::is_directory(dir, ec) || ec) return out;
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".v") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  for (const auto& f : files) out.emplace_back(f.filename().string(), read_file(f));
  return out;
}

std::optional<std::string> find_marker(const std::string& log, const std::string& marker) {
  for (const auto& line : split_lines(log))
    if (starts_with(trim(line), marker)) return trim(line).substr(marker.size());
  return std::nullopt;
}

}  // namespace

SynthesisResult synthesize(const std::string& code, const dataset::Problem& p,
                           const HlsConfig& cfg) {
  if (cfg.timeout_s <= 0) throw Misconfiguration("hls: timeout must be positive");
  if (cfg.backend == HlsConfig::Backend::external && cfg.tool_command.empty())
    throw Misconfiguration("hls: external backend needs a tool_command");
  if (cfg.backend == HlsConfig::Backend::mock && cfg.mock_tool.empty())
    throw Misconfiguration("hls: mock backend needs the mock tool path");

  SynthesisResult result;
  fs::path job = make_scratch_dir(cfg.workdir_root.empty() ? fs::temp_directory_path()
                                                           : cfg.workdir_root,
                                  "hls_" + p.id);
  result.job_dir = job;
  fs::path source = job / "input.cpp";
  write_file_atomic(source, code);
  std::string top = top_function_name(p.function_signature);

  std::map<std::string, std::string> values;
  values["source"] = source.string();
  values["top"] = top;
  values["part"] = cfg.part_or_target;
  values["project"] = (job / "proj").string();
  values["outdir"] = (job / "rtl").string();

  std::vector<std::string> argv;
  fs::path rtl_dir;
  if (cfg.backend == HlsConfig::Backend::mock) {
    ensure_dir(job / "rtl");
    argv = {cfg.mock_tool.string(), "--fixtures", cfg.fixtures_dir.string(), "--input",
            source.string(), "--outdir", (job / "rtl").string()};
    rtl_dir = job / "rtl";
  } else {
    if (cfg.script_template.empty())
      throw Misconfiguration("hls: external backend needs a script template");
    std::string script_text;
    try {
      script_text = substitute(read_file(cfg.script_template), values);
    } catch (const std::exception& e) {
      throw Misconfiguration(std::string("hls: cannot render script template: ") + e.what());
    }
    fs::path script = job / "synth_script";
    write_file_atomic(script, script_text);
    values["script"] = script.string();
    argv = substitute_argv(cfg.tool_command, values);
    rtl_dir = job / substitute(cfg.rtl_dir, values);
  }

  sim::ExecOptions exec_opts;
  exec_opts.timeout_s = cfg.timeout_s;
  exec_opts.max_output_bytes = 4u << 20;
  sim::ExecResult run = sim::sandbox_exec(argv, job, exec_opts);
  result.log = run.output;
  write_file_atomic(job / "hls.log", run.output);

  if (run.timed_out) {
    result.status = SynthStatus::timeout;
    return result;
  }
  if (run.exit_code == 127 && contains(run.output, "sandbox_exec: exec failed"))
    throw Misconfiguration("hls: tool binary not found: " + argv[0]);
  if (run.exit_code != 0 || run.signal != 0) {
    result.status = SynthStatus::tool_error;
    return result;
  }

  result.rtl_files = collect_rtl(rtl_dir);
  if (result.rtl_files.empty()) {
    result.status = SynthStatus::tool_error;
    result.log += "\n[no RTL emitted under " + rtl_dir.string() + "]\n";
    return result;
  }

  std::string top_module = find_marker(run.output, "TOP_MODULE=").value_or(top);
  bool found = false;
  for (const auto& [name, text] : result.rtl_files) {
    auto names = verilog::module_names(text);
    if (std::find(names.begin(), names.end(), top_module) != names.end()) found = true;
  }
  if (!found) {
    result.status = SynthStatus::tool_error;
    result.log += "\n[emitted RTL does not define top module '" + top_module + "']\n";
    return result;
  }
  result.status = SynthStatus::ok;
  result.top_rtl_module = top_module;
  return result;
}

// ---- interface wrapping ----

namespace {

// Block-level control ports added by HLS; wrapper ties inputs to an
// activating constant and leaves outputs open.
std::optional<std::string> control_tieoff(const verilog::Port& port) {
  static const std::map<std::string, std::string> table = {
      {"ap_clk", "1'b0"},  {"ap_rst", "1'b0"},      {"ap_rst_n", "1'b1"},
      {"ap_start", "1'b1"}, {"ap_ce", "1'b1"},       {"ap_continue", "1'b1"},
  };
  auto it = table.find(port.name);
  if (it != table.end()) return port.dir == verilog::PortDir::in ? it->second : std::string();
  static const char* out_only[] = {"ap_done", "ap_idle", "ap_ready"};
  for (const char* name : out_only)
    if (port.name == name) return std::string();
  if (ends_with(port.name, "_ap_vld") || ends_with(port.name, "_ap_ack"))
    return port.dir == verilog::PortDir::in ? std::string("1'b1") : std::string();
  return std::nullopt;
}

std::string strip_affixes(std::string name) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (const char* suffix : {"_V", "_i", "_o"}) {
      if (ends_with(name, suffix) && name.size() > strlen(suffix)) {
        name = name.substr(0, name.size() - strlen(suffix));
        changed = true;
      }
    }
  }
  return name;
}

std::string range_text(const verilog::Port& p) {
  if (p.msb == 0 && p.lsb == 0) return "";
  return " [" + std::to_string(p.msb) + ":" + std::to_string(p.lsb) + "]";
}

}  // namespace

WrapResult wrap_interface(const SynthesisResult& res, const dataset::Problem& p) {
  WrapResult out;
  if (res.status != SynthStatus::ok) {
    out.error = "synthesis result is not ok";
    return out;
  }

  verilog::ModuleHeader golden;
  try {
    golden = verilog::parse_module_header(p.golden_rtl, p.top_module);
  } catch (const std::exception& e) {
    out.error = std::string("cannot parse golden interface: ") + e.what();
    return out;
  }

  verilog::ModuleHeader cand;
  bool found = false;
  for (const auto& [name, text] : res.rtl_files) {
    try {
      cand = verilog::parse_module_header(text, res.top_rtl_module);
      found = true;
      break;
    } catch (const std::exception&) {
      continue;
    }
  }
  if (!found) {
    out.error = "cannot parse synthesized top module '" + res.top_rtl_module + "'";
    return out;
  }

  // connection text per candidate port, in candidate declaration order
  std::vector<std::pair<const verilog::Port*, std::string>> connections;
  std::vector<const verilog::Port*> unmatched_cand;
  std::set<std::string> used_golden;

  auto golden_by_name = [&](const std::string& name) -> const verilog::Port* {
    for (const auto& g : golden.ports)
      if (g.name == name && !used_golden.count(g.name)) return &g;
    return nullptr;
  };

  const verilog::Port* ap_return = nullptr;
  for (const auto& c : cand.ports) {
    if (auto tie = control_tieoff(c)) {
      connections.emplace_back(&c, *tie);
      continue;
    }
    if (c.name == "ap_return") {
      ap_return = &c;
      connections.emplace_back(&c, "");  // resolved later
      continue;
    }
    const verilog::Port* g = golden_by_name(c.name);
    if (!g) g = golden_by_name(strip_affixes(c.name));
    if (g) {
      if (g->dir != c.dir) {
        out.error = "port '" + c.name + "' direction disagrees with golden '" + g->name + "'";
        return out;
      }
      if (g->width() != c.width()) {
        out.error = "port '" + c.name + "' width " + std::to_string(c.width()) +
                    " != golden '" + g->name + "' width " + std::to_string(g->width());
        return out;
      }
      used_golden.insert(g->name);
      connections.emplace_back(&c, g->name);
    } else {
      unmatched_cand.push_back(&c);
      connections.emplace_back(&c, "");
    }
  }

  std::vector<const verilog::Port*> unmatched_golden;
  for (const auto& g : golden.ports)
    if (!used_golden.count(g.name)) unmatched_golden.push_back(&g);

  // a lone ap_return takes the single remaining golden output
  if (ap_return) {
    std::vector<const verilog::Port*> outs;
    for (const auto* g : unmatched_golden)
      if (g->dir == verilog::PortDir::out) outs.push_back(g);
    if (outs.size() != 1) {
      out.error = "ap_return present but " + std::to_string(outs.size()) +
                  " unmatched golden outputs remain";
      return out;
    }
    if (outs[0]->width() != ap_return->width()) {
      out.error = "ap_return width " + std::to_string(ap_return->width()) +
                  " != golden output '" + outs[0]->name + "' width " +
                  std::to_string(outs[0]->width());
      return out;
    }
    for (auto& [cport, conn] : connections)
      if (cport == ap_return) conn = outs[0]->name;
    used_golden.insert(outs[0]->name);
    unmatched_golden.erase(std::find(unmatched_golden.begin(), unmatched_golden.end(), outs[0]));
  }

  if (!unmatched_cand.empty() || !unmatched_golden.empty()) {
    if (unmatched_cand.size() != unmatched_golden.size()) {
      std::string missing;
      for (const auto* g : unmatched_golden) missing += " " + g->name;
      for (const auto* c : unmatched_cand) missing += " " + c->name;
      out.error = "unmappable ports:" + (missing.empty() ? " (count mismatch)" : missing);
      return out;
    }
    // positional fallback in declaration order
    for (size_t k = 0; k < unmatched_cand.size(); k++) {
      const auto* c = unmatched_cand[k];
      const auto* g = unmatched_golden[k];
      if (c->dir != g->dir || c->width() != g->width()) {
        out.error = "positional fallback cannot map '" + c->name + "' to '" + g->name + "'";
        return out;
      }
      for (auto& [cport, conn] : connections)
        if (cport == c) conn = g->name;
      out.warnings.push_back("positional port association: " + c->name + " -> " + g->name);
    }
  }

  // emit the wrapper: exactly the golden port list, pure wiring
  std::string w;
  w += "// wrapper generated around " + res.top_rtl_module + "\n";
  w += "module " + p.top_module + "(";
  for (size_t k = 0; k < golden.ports.size(); k++) {
    if (k) w += ", ";
    w += golden.ports[k].name;
  }
  w += ");\n";
  for (const auto& g : golden.ports) {
    w += std::string("  ") +
         (g.dir == verilog::PortDir::in ? "input" :
          g.dir == verilog::PortDir::out ? "output" : "inout") +
         range_text(g) + " " + g.name + ";\n";
  }
  w += "  " + res.top_rtl_module + " u_synth(\n";
  for (size_t k = 0; k < connections.size(); k++) {
    const auto& [cport, conn] = connections[k];
    w += "    ." + cport->name + "(" + conn + ")";
    w += k + 1 < connections.size() ? ",\n" : "\n";
  }
  w += "  );\n";
  w += "endmodule\n";
  out.ok = true;
  out.wrapper = w;
  return out;
}

}  // namespace rtleval::hls
