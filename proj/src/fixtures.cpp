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

#include "rtleval/fixtures.hpp"

#include <stdexcept>

#include "json.hpp"
#include "rtleval/dataset.hpp"
#include "rtleval/util/fs.hpp"
#include "rtleval/verilog.hpp"

namespace rtleval::fixtures {

namespace fs = std::filesystem;
using nlohmann::json;
using prompt::GenerationMode;

namespace {

struct SolutionSet {
  std::string good_code;   // mode-appropriate
  std::string wrong_code;  // may be empty
  std::string top_module;  // problem top, for bad_syntax shapes
  std::string id;
};

std::string fence_for(GenerationMode mode, const std::string& code) {
  return prompt::render_fenced(code, prompt::fence_tag(mode));
}

std::string response_for_token(const std::string& token, GenerationMode mode,
                               const SolutionSet& sol) {
  if (token == "good") {
    return "Here is an implementation for " + sol.id + ".\n\n" + fence_for(mode, sol.good_code) +
           "\nThe interface matches the requested signature.\n";
  }
  if (token == "twofence") {
    return "Plan:\n```text\n1. derive every output bit from the inputs\n2. assemble the result\n```\n\n"
           "Implementation:\n\n" + fence_for(mode, sol.good_code);
  }
  if (token == "wrong" || token == "wrongv") {
    if (sol.wrong_code.empty())
      throw std::runtime_error("plan for " + sol.id + " uses '" + token +
                               "' but no wrong solution file exists");
    return "This should match the required behavior.\n\n" + fence_for(mode, sol.wrong_code);
  }
  if (token == "unknown") {
    // valid-looking code the mock synthesizer has no fixture for
    return "An alternative formulation:\n\n" +
           fence_for(mode, sol.good_code + "\n// alternate scheduling variant\n");
  }
  if (token == "nofence") {
    return "I am not able to produce code for this task right now. Outline: determine each "
           "output bit from the inputs, then assemble the result bus.\n";
  }
  if (token == "bad_syntax") {
    return "Certainly:\n\n" +
           fence_for(mode, "module " + sol.top_module + "(y;\n  output y\n  assign y = ;\nendmodule\n");
  }
  throw std::runtime_error("unknown response token '" + token + "' for " + sol.id);
}

// Model 0 samples the plan as written; model k additionally turns the first
// k tokens into "good" ones, so the replay models genuinely differ in score,
// not just in which sample index fails.
std::vector<std::string> model_mix(const std::vector<std::string>& tokens, size_t model_index) {
  std::vector<std::string> out;
  for (size_t i = 0; i < tokens.size(); i++)
    out.push_back(tokens[(i + model_index) % tokens.size()]);
  for (size_t i = 0; i < std::min(model_index, out.size()); i++) out[i] = "good";
  return out;
}

}  // namespace

BuildSummary build(const BuildOptions& options) {
  BuildSummary summary;
  auto problems = dataset::load_dataset(options.dataset_dir);
  auto templates = prompt::load_templates(options.prompts_dir);

  for (const auto& p : problems) {
    fs::path sdir = options.solutions_dir / p.id;
    if (!fs::is_directory(sdir))
      throw std::runtime_error("no solution corpus for problem '" + p.id + "' under " +
                               options.solutions_dir.string());
    auto plan = json::parse(read_file(sdir / "plan.json"));

    // mock HLS fixtures (shared across models)
    auto hls_fixture = [&](const std::string& name, const std::string& code_file,
                           const std::string& rtl_file) {
      auto code = read_file_if_exists(sdir / code_file);
      auto rtl = read_file_if_exists(sdir / rtl_file);
      if (!code || !rtl) return;
      fs::path dir = options.out_dir / "hls" / (p.id + "_" + name);
      write_file_atomic(dir / "code.cpp", *code);
      auto modules = verilog::module_names(*rtl);
      if (modules.empty())
        throw std::runtime_error(rtl_file + " for " + p.id + " declares no module");
      json meta;
      meta["top"] = modules[0];
      meta["rtl"] = {modules[0] + ".v"};
      meta["behavior"] = "ok";
      write_file_atomic(dir / (modules[0] + ".v"), *rtl);
      write_file_atomic(dir / "meta.json", meta.dump(2) + "\n");
      summary.hls_fixtures++;
    };
    hls_fixture("good", "good.cpp", "hls_rtl.v");
    hls_fixture("wrong", "wrong.cpp", "wrong_rtl.v");

    for (GenerationMode mode : {GenerationMode::hls_cpp, GenerationMode::direct_verilog}) {
      SolutionSet sol;
      sol.id = p.id;
      sol.top_module = p.top_module;
      if (mode == GenerationMode::hls_cpp) {
        sol.good_code = read_file(sdir / "good.cpp");
        if (auto w = read_file_if_exists(sdir / "wrong.cpp")) sol.wrong_code = *w;
      } else {
        sol.good_code = read_file(sdir / "good.v");
        if (auto w = read_file_if_exists(sdir / "wrong.v")) sol.wrong_code = *w;
      }

      const auto& tokens_json = plan.at(prompt::to_string(mode));
      std::vector<std::string> tokens;
      for (const auto& t : tokens_json) tokens.push_back(t.get<std::string>());
      if (tokens.empty())
        throw std::runtime_error("empty plan for " + p.id + "/" + prompt::to_string(mode));

      auto bundle = prompt::build_prompt(p, mode, templates);
      for (size_t mi = 0; mi < options.model_ids.size(); mi++) {
        const std::string& model = options.model_ids[mi];
        auto mix = model_mix(tokens, mi);
        for (int idx = 0; idx < options.sampling.n_samples; idx++) {
          const std::string& token = mix[idx % mix.size()];
          std::string response = response_for_token(token, mode, sol);
          std::string key = llm::cache_key(bundle, options.sampling, model, idx);
          write_file_atomic(options.out_dir / "replay" / model / (key + ".txt"), response);
          summary.replay_files++;
        }
      }
    }
  }
  return summary;
}

}  // namespace rtleval::fixtures
