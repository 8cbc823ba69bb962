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

// Stand-in for an external high-level synthesis tool. Maps the digest of
// the input C++ to a fixture directory and emits its canned RTL, so the
// full pipeline runs with no synthesis tool installed.
//
// Fixture layout under --fixtures:
//   <name>/code.cpp    exact code the fixture answers for
//   <name>/meta.json   {"top": "...", "rtl": ["f.v", ...],
//                       "delay_ms": 0, "behavior": "ok"|"tool_error",
//                       "log": "..."}
//   <name>/<f.v>       RTL files listed in meta

#include <chrono>
#include <cstdio>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "rtleval/util/digest.hpp"
#include "rtleval/util/fs.hpp"

namespace fs = std::filesystem;

int main(int argc, char** argv) {
  CLI::App app{"mock high-level synthesis backend"};
  std::string fixtures, input, outdir;
  app.add_option("--fixtures", fixtures, "fixture root directory")->required();
  app.add_option("--input", input, "input C++ file")->required();
  app.add_option("--outdir", outdir, "where to place emitted RTL")->required();
  CLI11_PARSE(app, argc, argv);

  try {
    std::string code = rtleval::read_file(input);
    std::string digest = rtleval::sha256_hex(code);

    fs::path match;
    nlohmann::json meta;
    for (const auto& entry : fs::directory_iterator(fixtures)) {
      if (!entry.is_directory()) continue;
      auto fixture_code = rtleval::read_file_if_exists(entry.path() / "code.cpp");
      if (!fixture_code) continue;
      if (rtleval::sha256_hex(*fixture_code) == digest) {
        match = entry.path();
        meta = nlohmann::json::parse(rtleval::read_file(entry.path() / "meta.json"));
        break;
      }
    }
    if (match.empty()) {
      std::fprintf(stderr,
                   "mockhls: no fixture for input digest %s\n"
                   "mockhls: synthesis front end rejects the design\n",
                   digest.c_str());
      return 3;
    }

    int delay_ms = meta.value("delay_ms", 0);
    if (delay_ms > 0) std::this_thread::sleep_for(std::chrono::milliseconds(delay_ms));

    std::string behavior = meta.value("behavior", "ok");
    if (behavior == "tool_error") {
      std::fprintf(stderr, "%s\n", meta.value("log", "mockhls: synthesis failed").c_str());
      return 4;
    }

    rtleval::ensure_dir(outdir);
    for (const auto& rtl_name : meta.at("rtl")) {
      std::string name = rtl_name.get<std::string>();
      rtleval::write_file_atomic(fs::path(outdir) / name,
                                 rtleval::read_file(match / name));
    }
    std::printf("MOCKHLS_FIXTURE=%s\n", match.filename().string().c_str());
    std::printf("TOP_MODULE=%s\n", meta.at("top").get<std::string>().c_str());
    return 0;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "mockhls: %s\n", e.what());
    return 2;
  }
}
