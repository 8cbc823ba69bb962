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

// Command-line front end for the built-in combinational Verilog subset
// simulator. Mirrors the two-phase compile/run shape of conventional
// simulators so it can slot into the same invocation templates.

#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "rtleval/minisim.hpp"
#include "rtleval/util/fs.hpp"

using rtleval::minisim::Design;
using rtleval::minisim::SourceFile;

int main(int argc, char** argv) {
  CLI::App app{"combinational Verilog subset simulator"};
  app.require_subcommand(1);

  auto* compile = app.add_subcommand("compile", "parse and elaborate sources into a snapshot");
  std::vector<std::string> sources;
  std::string output, top;
  compile->add_option("-o,--output", output, "snapshot file to write")->required();
  compile->add_option("--top", top, "top module (default: the testbench root)");
  compile->add_option("sources", sources, "Verilog source files")->required()->expected(-1);

  auto* run = app.add_subcommand("run", "execute a compiled snapshot");
  std::string snapshot;
  long max_statements = 50000000;
  run->add_option("snapshot", snapshot, "snapshot file from 'compile'")->required();
  run->add_option("--max-statements", max_statements, "behavioral statement budget");

  CLI11_PARSE(app, argc, argv);

  try {
    if (compile->parsed()) {
      std::vector<SourceFile> files;
      for (const auto& path : sources)
        files.push_back({path, rtleval::read_file(path)});
      Design design = Design::compile(files, top);
      nlohmann::json snap;
      snap["format"] = "rtleval-minisim-snapshot-v1";
      snap["top"] = design.top();
      snap["files"] = nlohmann::json::array();
      for (const auto& f : files)
        snap["files"].push_back({{"name", f.name}, {"content", f.content}});
      rtleval::write_file_atomic(output, snap.dump());
      return 0;
    }
    // run
    auto snap = nlohmann::json::parse(rtleval::read_file(snapshot));
    if (snap.value("format", "") != "rtleval-minisim-snapshot-v1") {
      std::fprintf(stderr, "minisim: %s is not a minisim snapshot\n", snapshot.c_str());
      return 2;
    }
    std::vector<SourceFile> files;
    for (const auto& f : snap.at("files"))
      files.push_back({f.at("name").get<std::string>(), f.at("content").get<std::string>()});
    Design design = Design::compile(files, snap.at("top").get<std::string>());
    auto out = design.run(max_statements);
    std::fputs(out.display_output.c_str(), stdout);
    return 0;
  } catch (const rtleval::minisim::CompileError& e) {
    std::fprintf(stderr, "minisim: compile error: %s\n", e.what());
    return 1;
  } catch (const rtleval::minisim::SimRuntimeError& e) {
    std::fprintf(stderr, "minisim: runtime error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "minisim: %s\n", e.what());
    return 2;
  }
}
