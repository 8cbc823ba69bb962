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

// Builds the deterministic offline-run fixtures: canned "model responses"
// for the replay backend (keyed by completion cache key, so they track the
// exact prompts and sampling parameters) and digest-addressed RTL fixtures
// for the mock synthesis backend. The response mix per problem and mode
// comes from the solution corpus plan files; different model ids get a
// rotated mix so their scores differ.

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "rtleval/llm.hpp"

namespace rtleval::fixtures {

struct BuildOptions {
  std::filesystem::path dataset_dir;
  std::filesystem::path prompts_dir;
  std::filesystem::path solutions_dir;
  std::filesystem::path out_dir;  // gets replay/<model>/ and hls/ subtrees
  std::vector<std::string> model_ids;
  llm::SamplingConfig sampling;  // n_samples responses per (problem, mode)
};

struct BuildSummary {
  int replay_files = 0;
  int hls_fixtures = 0;
};

BuildSummary build(const BuildOptions& options);

}  // namespace rtleval::fixtures
