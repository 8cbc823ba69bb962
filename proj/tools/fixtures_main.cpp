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

// Generates the offline-run fixture trees (replay responses + mock HLS RTL)
// from the bundled solution corpus. Replay fixtures are keyed by completion
// cache key, so they must be rebuilt whenever prompts, dataset, or sampling
// parameters change.

#include <cstdio>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "rtleval/fixtures.hpp"

int main(int argc, char** argv) {
  CLI::App app{"build replay and mock-HLS fixtures for offline runs"};
  rtleval::fixtures::BuildOptions options;
  std::string dataset, prompts, solutions, out;
  std::vector<std::string> models = {"replay-a", "replay-b"};
  int n = 4;
  app.add_option("--dataset", dataset, "dataset directory")->required();
  app.add_option("--prompts", prompts, "prompt templates directory")->required();
  app.add_option("--solutions", solutions, "solution corpus directory")->required();
  app.add_option("--out", out, "output fixture root")->required();
  app.add_option("--models", models, "replay model ids");
  app.add_option("--n", n, "responses per (problem, mode)");
  CLI11_PARSE(app, argc, argv);

  options.dataset_dir = dataset;
  options.prompts_dir = prompts;
  options.solutions_dir = solutions;
  options.out_dir = out;
  options.model_ids = models;
  options.sampling.n_samples = n;

  try {
    auto summary = rtleval::fixtures::build(options);
    std::fprintf(stdout, "wrote %d replay responses and %d mock-HLS fixtures under %s\n",
                 summary.replay_files, summary.hls_fixtures, out.c_str());
    return 0;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "rtleval-fixtures: %s\n", e.what());
    return 1;
  }
}
