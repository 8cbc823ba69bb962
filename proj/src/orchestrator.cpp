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

#include "rtleval/orchestrator.hpp"

#include <atomic>
#include <condition_variable>
#include <cstdio>
#include <mutex>
#include <set>
#include <thread>

#include "json.hpp"
#include "rtleval/dataset.hpp"
#include "rtleval/util/digest.hpp"
#include "rtleval/util/fs.hpp"
#include "rtleval/util/strings.hpp"

namespace rtleval::orchestrator {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr const char* kRunMetaName = "run_meta.json";
constexpr const char* kConfigCopyName = "config.json";

// top-level artifact names that model ids must not shadow
const std::set<std::string> kReservedNames = {
    "run_meta.json", "config.json", "attempts.log", "cache", "excluded",
    "report.json",   "report.csv",  "report.txt"};

class Semaphore {
 public:
  explicit Semaphore(int slots) : slots_(slots) {}
  void acquire() {
    std::unique_lock<std::mutex> lock(mu_);
    cv_.wait(lock, [&] { return slots_ > 0; });
    slots_--;
  }
  void release() {
    {
      std::lock_guard<std::mutex> lock(mu_);
      slots_++;
    }
    cv_.notify_one();
  }

 private:
  int slots_;
  std::mutex mu_;
  std::condition_variable cv_;
};

struct SlotGuard {
  Semaphore& sem;
  explicit SlotGuard(Semaphore& s) : sem(s) { sem.acquire(); }
  ~SlotGuard() { sem.release(); }
};

std::string stage_through_name(StageThrough s) {
  switch (s) {
    case StageThrough::generate: return "generate";
    case StageThrough::synthesize: return "synthesize";
    case StageThrough::simulate: return "simulate";
  }
  return "simulate";
}

StageThrough stage_through_from(const std::string& s) {
  if (s == "generate") return StageThrough::generate;
  if (s == "synthesize") return StageThrough::synthesize;
  if (s == "simulate" || s == "full") return StageThrough::simulate;
  throw ConfigError("unknown stage_through '" + s + "'");
}

fs::path resolve_path(const fs::path& base, const std::string& p) {
  fs::path path(p);
  if (path.is_absolute()) return path.lexically_normal();
  return (base / path).lexically_normal();
}

}  // namespace

RunConfig load_config(const fs::path& config_file, const ToolPaths& tools) {
  json j;
  try {
    j = json::parse(read_file(config_file));
  } catch (const std::exception& e) {
    throw ConfigError("cannot parse config " + config_file.string() + ": " + e.what());
  }
  fs::path base = fs::absolute(config_file).parent_path();

  RunConfig cfg;
  try {
    cfg.dataset_path = resolve_path(base, j.at("dataset_path").get<std::string>());
    cfg.prompts_dir = resolve_path(base, j.at("prompts_dir").get<std::string>());
    cfg.artifact_root = resolve_path(base, j.at("artifact_root").get<std::string>());

    for (const auto& mj : j.at("models")) {
      ModelProfile m;
      m.id = mj.at("id").get<std::string>();
      std::string backend = mj.at("backend").get<std::string>();
      if (backend == "replay") {
        m.backend = ModelProfile::Backend::replay;
        m.fixtures_dir = resolve_path(base, mj.at("fixtures_dir").get<std::string>());
      } else if (backend == "http") {
        m.backend = ModelProfile::Backend::http;
        m.http.model_id = m.id;
        m.http.base_url = mj.at("base_url").get<std::string>();
        m.http.path = mj.value("path", m.http.path);
        m.http.model_name = mj.value("model_name", m.id);
        m.http.api_key_env = mj.value("api_key_env", "");
        m.http.response_text_pointer =
            mj.value("response_text_pointer", m.http.response_text_pointer);
        m.http.max_attempts = mj.value("max_attempts", m.http.max_attempts);
        m.http.retry_base_ms = mj.value("retry_base_ms", m.http.retry_base_ms);
        m.http.timeout_s = mj.value("timeout_s", m.http.timeout_s);
        if (mj.contains("field_map")) {
          const auto& fm = mj.at("field_map");
          m.http.field_model = fm.value("model", m.http.field_model);
          m.http.field_messages = fm.value("messages", m.http.field_messages);
          m.http.field_temperature = fm.value("temperature", m.http.field_temperature);
          m.http.field_top_p = fm.value("top_p", m.http.field_top_p);
          m.http.field_max_tokens = fm.value("max_tokens", m.http.field_max_tokens);
        }
        if (mj.contains("extra_headers"))
          for (const auto& [k, v] : mj.at("extra_headers").items())
            m.http.extra_headers[k] = v.get<std::string>();
        if (mj.contains("api_key")) {
          throw ConfigError("model '" + m.id +
                            "': credentials belong in the environment (api_key_env), never in config files");
        }
      } else {
        throw ConfigError("model '" + m.id + "': unknown backend '" + backend + "'");
      }
      cfg.models.push_back(std::move(m));
    }

    for (const auto& mode : j.at("modes"))
      cfg.modes.push_back(prompt::mode_from_string(mode.get<std::string>()));

    if (j.contains("sampling")) {
      const auto& s = j.at("sampling");
      cfg.sampling.temperature = s.value("temperature", cfg.sampling.temperature);
      cfg.sampling.top_p = s.value("top_p", cfg.sampling.top_p);
      cfg.sampling.max_context = s.value("max_context", cfg.sampling.max_context);
      cfg.sampling.n_samples = s.value("n_samples", cfg.sampling.n_samples);
    }

    if (j.contains("hls")) {
      const auto& h = j.at("hls");
      std::string backend = h.value("backend", "mock");
      if (backend == "mock") {
        cfg.hls.backend = hls::HlsConfig::Backend::mock;
        cfg.hls.mock_tool = tools.mockhls;
        if (h.contains("fixtures_dir"))
          cfg.hls.fixtures_dir = resolve_path(base, h.at("fixtures_dir").get<std::string>());
      } else if (backend == "external") {
        cfg.hls.backend = hls::HlsConfig::Backend::external;
        for (const auto& t : h.at("tool_command")) cfg.hls.tool_command.push_back(t.get<std::string>());
        cfg.hls.script_template = resolve_path(base, h.at("script_template").get<std::string>());
        cfg.hls.rtl_dir = h.value("rtl_dir", cfg.hls.rtl_dir);
      } else {
        throw ConfigError("unknown hls backend '" + backend + "'");
      }
      cfg.hls.part_or_target = h.value("part_or_target", cfg.hls.part_or_target);
      cfg.hls.timeout_s = h.value("timeout_s", cfg.hls.timeout_s);
    } else {
      cfg.hls.backend = hls::HlsConfig::Backend::mock;
      cfg.hls.mock_tool = tools.mockhls;
    }

    std::string sim_profile = "builtin";
    if (j.contains("sim")) {
      const auto& s = j.at("sim");
      sim_profile = s.value("simulator", sim_profile);
      if (sim_profile == "builtin") {
        cfg.sim = sim::builtin_sim_config(tools.minisim);
      } else if (sim_profile == "icarus") {
        cfg.sim = sim::SimConfig{};  // iverilog/vvp defaults
      } else if (sim_profile == "custom") {
        cfg.sim.compile_command.clear();
        cfg.sim.run_command.clear();
        for (const auto& t : s.at("compile_command"))
          cfg.sim.compile_command.push_back(t.get<std::string>());
        for (const auto& t : s.at("run_command"))
          cfg.sim.run_command.push_back(t.get<std::string>());
      } else {
        throw ConfigError("unknown simulator profile '" + sim_profile + "'");
      }
      cfg.sim.timeout_s = s.value("timeout_s", cfg.sim.timeout_s);
      cfg.sim.max_output_bytes = s.value("max_output_bytes", cfg.sim.max_output_bytes);
    } else {
      cfg.sim = sim::builtin_sim_config(tools.minisim);
    }

    if (j.contains("k_values")) {
      cfg.k_values.clear();
      for (const auto& k : j.at("k_values")) cfg.k_values.push_back(k.get<int>());
    }
    cfg.parallelism = j.value("parallelism", cfg.parallelism);
    cfg.job_slots = j.value("job_slots", cfg.job_slots);
    cfg.rate_limit_rpm = j.value("rate_limit_rpm", cfg.rate_limit_rpm);
    cfg.seed = j.value("seed", cfg.seed);
    cfg.stage_through = stage_through_from(j.value("stage_through", "simulate"));
    if (j.contains("cache_dir"))
      cfg.cache_dir = resolve_path(base, j.at("cache_dir").get<std::string>());
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError("config " + config_file.string() + ": " + e.what());
  }

  // structural validation
  if (cfg.models.empty()) throw ConfigError("config: models must be nonempty");
  if (cfg.modes.empty()) throw ConfigError("config: modes must be nonempty");
  std::set<std::string> ids;
  for (const auto& m : cfg.models) {
    if (m.id.empty()) throw ConfigError("config: model id must be nonempty");
    if (!ids.insert(m.id).second) throw ConfigError("config: duplicate model id '" + m.id + "'");
    if (kReservedNames.count(m.id))
      throw ConfigError("config: model id '" + m.id + "' is a reserved artifact name");
    if (m.id.find('/') != std::string::npos || m.id.find("..") != std::string::npos)
      throw ConfigError("config: model id '" + m.id + "' is not filesystem-safe");
  }
  if (cfg.k_values.empty()) throw ConfigError("config: k_values must be nonempty");
  for (int k : cfg.k_values)
    if (k < 1 || k > cfg.sampling.n_samples)
      throw ConfigError("config: k=" + std::to_string(k) + " outside [1, n_samples=" +
                        std::to_string(cfg.sampling.n_samples) + "]");
  if (cfg.parallelism < 1) throw ConfigError("config: parallelism must be >= 1");
  try {
    llm::validate_sampling(cfg.sampling, cfg.k_values);
  } catch (const std::exception& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
  return cfg;
}

std::string config_digest(const RunConfig& cfg) {
  json d;
  d["format"] = "rtleval-run-v1";
  d["dataset_digest"] = dir_digest(cfg.dataset_path);
  d["prompts_digest"] = dir_digest(cfg.prompts_dir);
  json models = json::array();
  for (const auto& m : cfg.models) {
    json mj;
    mj["id"] = m.id;
    if (m.backend == ModelProfile::Backend::replay) {
      mj["backend"] = "replay";
      mj["fixtures_digest"] = dir_digest(m.fixtures_dir);
    } else {
      mj["backend"] = "http";
      mj["model_name"] = m.http.model_name;
      mj["path"] = m.http.path;
      mj["fields"] = {m.http.field_model, m.http.field_messages, m.http.field_temperature,
                      m.http.field_top_p, m.http.field_max_tokens};
      mj["response_text_pointer"] = m.http.response_text_pointer;
    }
    models.push_back(mj);
  }
  d["models"] = models;
  json modes = json::array();
  for (auto m : cfg.modes) modes.push_back(prompt::to_string(m));
  d["modes"] = modes;
  d["sampling"] = {{"temperature", cfg.sampling.temperature},
                   {"top_p", cfg.sampling.top_p},
                   {"max_context", cfg.sampling.max_context},
                   {"n_samples", cfg.sampling.n_samples}};
  json h;
  h["backend"] = cfg.hls.backend == hls::HlsConfig::Backend::mock ? "mock" : "external";
  h["part_or_target"] = cfg.hls.part_or_target;
  h["timeout_s"] = cfg.hls.timeout_s;
  if (cfg.hls.backend == hls::HlsConfig::Backend::mock) {
    h["fixtures_digest"] = cfg.hls.fixtures_dir.empty() ? "" : dir_digest(cfg.hls.fixtures_dir);
  } else {
    h["tool_command"] = cfg.hls.tool_command;
    h["script_digest"] = sha256_hex(read_file(cfg.hls.script_template));
    h["rtl_dir"] = cfg.hls.rtl_dir;
  }
  d["hls"] = h;
  d["sim"] = {{"timeout_s", cfg.sim.timeout_s},
              {"max_output_bytes", cfg.sim.max_output_bytes}};
  d["k_values"] = cfg.k_values;
  d["seed"] = cfg.seed;
  return sha256_hex(d.dump());
}

// ---------------------------------------------------------------- engine

namespace {

struct Cell {
  size_t problem_idx;
  size_t model_idx;
  prompt::GenerationMode mode;
  int sample_idx;
};

std::string mode_dir(prompt::GenerationMode m) { return prompt::to_string(m); }

std::string sample_dir_name(int idx) {
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%03d", idx);
  return buf;
}

json verdict_to_json(const sim::Verdict& v) {
  json j;
  j["status"] = sim::to_string(v.status);
  j["reason"] = sim::to_string(v.reason);
  j["mismatch_count"] = v.mismatch_count;
  j["log_excerpt"] = v.log_excerpt;
  return j;
}

sim::Verdict verdict_from_json(const json& j) {
  sim::Verdict v;
  v.status = j.at("status").get<std::string>() == "pass" ? sim::VerdictStatus::pass
                                                         : sim::VerdictStatus::fail;
  v.reason = sim::fail_reason_from_string(j.at("reason").get<std::string>());
  v.mismatch_count = j.at("mismatch_count").get<long>();
  v.log_excerpt = j.at("log_excerpt").get<std::string>();
  return v;
}

std::string exclusion_file_name(const std::string& model, prompt::GenerationMode mode,
                                const std::string& problem) {
  return model + "__" + mode_dir(mode) + "__" + problem + ".json";
}

struct Engine {
  const RunConfig& cfg;
  const RunHooks& hooks;
  std::vector<dataset::Problem> problems;
  prompt::Templates templates;
  std::map<std::pair<std::string, prompt::GenerationMode>, prompt::PromptBundle> bundles;
  std::map<std::string, std::unique_ptr<llm::Backend>> backends;
  std::shared_ptr<llm::RateLimiter> limiter;
  std::unique_ptr<llm::CompletionCache> cache;
  Semaphore job_slots;
  RunStats stats;
  std::mutex stats_mu;
  std::mutex exclusion_mu;
  std::set<std::string> excluded_groups;  // exclusion file names
  std::atomic<bool> stop_requested{false};
  std::exception_ptr fatal;
  std::mutex fatal_mu;

  explicit Engine(const RunConfig& c, const RunHooks& h)
      : cfg(c), hooks(h), job_slots(c.job_slots > 0 ? c.job_slots : c.parallelism) {}

  fs::path cell_dir(const Cell& cell) const {
    return cfg.artifact_root / cfg.models[cell.model_idx].id / mode_dir(cell.mode) /
           problems[cell.problem_idx].id / sample_dir_name(cell.sample_idx);
  }

  void bump(long RunStats::*field) {
    std::lock_guard<std::mutex> lock(stats_mu);
    stats.*field += 1;
  }

  bool group_excluded(const Cell& cell) {
    std::lock_guard<std::mutex> lock(exclusion_mu);
    return excluded_groups.count(exclusion_file_name(
        cfg.models[cell.model_idx].id, cell.mode, problems[cell.problem_idx].id));
  }

  void exclude_group(const Cell& cell, const std::string& reason) {
    std::string name = exclusion_file_name(cfg.models[cell.model_idx].id, cell.mode,
                                           problems[cell.problem_idx].id);
    {
      std::lock_guard<std::mutex> lock(exclusion_mu);
      if (!excluded_groups.insert(name).second) return;
    }
    json j;
    j["model"] = cfg.models[cell.model_idx].id;
    j["mode"] = mode_dir(cell.mode);
    j["problem"] = problems[cell.problem_idx].id;
    j["reason"] = reason;
    write_file_atomic(cfg.artifact_root / "excluded" / name, j.dump(2) + "\n");
    std::fprintf(stderr,
                 "[rtleval] WARNING: transport failure, excluding %s/%s/%s from the report: %s\n",
                 cfg.models[cell.model_idx].id.c_str(), mode_dir(cell.mode).c_str(),
                 problems[cell.problem_idx].id.c_str(), reason.c_str());
    bump(&RunStats::transport_excluded_groups);
  }

  void execute_cell(const Cell& cell) {
    const dataset::Problem& p = problems[cell.problem_idx];
    const ModelProfile& model = cfg.models[cell.model_idx];
    fs::path dir = cell_dir(cell);

    if (fs::exists(dir / "verdict.json")) {
      bump(&RunStats::cells_skipped);
      return;
    }
    if (group_excluded(cell)) return;

    // --- stage: generate ---
    json gen;
    fs::path gen_path = dir / "gen.json";
    if (auto existing = read_file_if_exists(gen_path)) {
      gen = json::parse(*existing);
    } else {
      const auto& bundle = bundles.at({p.id, cell.mode});
      llm::Completion completion;
      try {
        completion = llm::generate_one(p.id, bundle, cfg.sampling, *backends.at(model.id),
                                       cell.sample_idx, cache.get());
      } catch (const llm::TransportError& e) {
        exclude_group(cell, e.what());
        return;
      }
      gen["problem_id"] = completion.problem_id;
      gen["sample_index"] = completion.sample_index;
      gen["model_id"] = completion.model_id;
      gen["mode"] = mode_dir(completion.mode);
      gen["cache_key"] = llm::cache_key(bundle, cfg.sampling, model.id, cell.sample_idx);
      gen["raw_response"] = completion.raw_response;
      if (completion.extracted_code)
        gen["extracted_code"] = *completion.extracted_code;
      else
        gen["extracted_code"] = nullptr;
      write_file_atomic(gen_path, gen.dump(2) + "\n");
      bump(&RunStats::generate_executed);
    }
    if (cfg.stage_through == StageThrough::generate) return;

    if (gen.at("extracted_code").is_null()) {
      write_file_atomic(dir / "verdict.json",
                        verdict_to_json(sim::Verdict::fail_verdict(
                                            sim::FailReason::extract_error,
                                            "no code block found in the response"))
                                .dump(2) +
                            "\n");
      return;
    }
    std::string code = gen.at("extracted_code").get<std::string>();

    std::vector<sim::NamedSource> candidates;
    if (cell.mode == prompt::GenerationMode::hls_cpp) {
      // --- stage: synthesize ---
      fs::path synth_path = dir / "synth.json";
      json synth;
      if (auto existing = read_file_if_exists(synth_path)) {
        synth = json::parse(*existing);
      } else {
        hls::HlsConfig job_cfg = cfg.hls;
        job_cfg.workdir_root = dir;
        hls::SynthesisResult res;
        {
          SlotGuard guard(job_slots);
          res = hls::synthesize(code, p, job_cfg);
        }
        for (const auto& [name, text] : res.rtl_files)
          write_file_atomic(dir / "rtl" / name, text);
        synth["status"] = hls::to_string(res.status);
        synth["top_rtl_module"] = res.top_rtl_module;
        json names = json::array();
        for (const auto& [name, _] : res.rtl_files) names.push_back(name);
        synth["rtl_files"] = names;
        synth["log_excerpt"] = res.log.size() > 2000 ? res.log.substr(res.log.size() - 2000)
                                                     : res.log;
        write_file_atomic(synth_path, synth.dump(2) + "\n");
        bump(&RunStats::synthesize_executed);
      }
      if (synth.at("status").get<std::string>() != "ok") {
        write_file_atomic(
            dir / "verdict.json",
            verdict_to_json(sim::Verdict::fail_verdict(
                                sim::FailReason::hls_error,
                                "synthesis " + synth.at("status").get<std::string>() + "\n" +
                                    synth.value("log_excerpt", "")))
                    .dump(2) +
                "\n");
        return;
      }
      if (cfg.stage_through == StageThrough::synthesize) return;

      // --- wrap ---
      hls::SynthesisResult res;
      res.status = hls::SynthStatus::ok;
      res.top_rtl_module = synth.at("top_rtl_module").get<std::string>();
      for (const auto& name : synth.at("rtl_files"))
        res.rtl_files.emplace_back(name.get<std::string>(),
                                   read_file(dir / "rtl" / name.get<std::string>()));
      auto wrap = hls::wrap_interface(res, p);
      if (!wrap.ok) {
        write_file_atomic(dir / "verdict.json",
                          verdict_to_json(sim::Verdict::fail_verdict(
                                              sim::FailReason::wrapper_error, wrap.error))
                                  .dump(2) +
                              "\n");
        return;
      }
      write_file_atomic(dir / "wrapper.v", wrap.wrapper);
      candidates.push_back({"wrapper.v", wrap.wrapper});
      for (const auto& [name, text] : res.rtl_files) candidates.push_back({name, text});
    } else {
      if (cfg.stage_through == StageThrough::synthesize) return;
      write_file_atomic(dir / "candidate.v", code);
      candidates.push_back({"candidate.v", code});
    }

    // --- stage: simulate ---
    sim::Verdict verdict;
    {
      SlotGuard guard(job_slots);
      verdict = sim::run_testbench(candidates, p, cfg.sim, dir);
    }
    write_file_atomic(dir / "verdict.json", verdict_to_json(verdict).dump(2) + "\n");
    bump(&RunStats::simulate_executed);
  }

  void worker(std::atomic<size_t>& next, const std::vector<Cell>& cells) {
    while (true) {
      if (stop_requested.load()) return;
      if (hooks.should_stop && hooks.should_stop()) {
        stop_requested.store(true);
        return;
      }
      size_t idx = next.fetch_add(1);
      if (idx >= cells.size()) return;
      try {
        execute_cell(cells[idx]);
      } catch (...) {
        {
          std::lock_guard<std::mutex> lock(fatal_mu);
          if (!fatal) fatal = std::current_exception();
        }
        stop_requested.store(true);
        return;
      }
    }
  }
};

metrics::EvalReport build_report_from_root(const fs::path& artifact_root, const RunConfig& cfg,
                                           const std::vector<dataset::Problem>& problems,
                                           const std::string& digest) {
  std::set<std::string> excluded_files;
  std::vector<std::string> excluded_labels;
  if (fs::is_directory(artifact_root / "excluded")) {
    for (const auto& e : fs::directory_iterator(artifact_root / "excluded")) {
      excluded_files.insert(e.path().filename().string());
      auto j = json::parse(read_file(e.path()));
      excluded_labels.push_back(j.at("model").get<std::string>() + "/" +
                                j.at("mode").get<std::string>() + "/" +
                                j.at("problem").get<std::string>() + ": " +
                                j.at("reason").get<std::string>());
    }
  }
  std::sort(excluded_labels.begin(), excluded_labels.end());

  std::map<metrics::GroupKey, std::vector<metrics::ProblemScore>> per_problem;
  for (const auto& model : cfg.models) {
    for (auto mode : cfg.modes) {
      metrics::GroupKey key{model.id, prompt::to_string(mode)};
      for (const auto& p : problems) {
        if (excluded_files.count(exclusion_file_name(model.id, mode, p.id))) continue;
        metrics::ProblemScore score;
        score.problem_id = p.id;
        score.n = cfg.sampling.n_samples;
        score.c = 0;
        for (int idx = 0; idx < cfg.sampling.n_samples; idx++) {
          fs::path vp = artifact_root / model.id / mode_dir(mode) / p.id /
                        sample_dir_name(idx) / "verdict.json";
          auto text = read_file_if_exists(vp);
          if (!text)
            throw std::runtime_error("incomplete verdict group: missing " + vp.string() +
                                     " (run or resume first)");
          auto v = verdict_from_json(json::parse(*text));
          if (v.status == sim::VerdictStatus::pass) score.c++;
        }
        per_problem[key].push_back(score);
      }
      if (per_problem[key].empty())
        throw std::runtime_error("every problem for " + model.id + "/" +
                                 prompt::to_string(mode) +
                                 " was excluded; nothing to report");
    }
  }

  auto report = metrics::build_report(per_problem, cfg.k_values);
  report.config_digest = digest;
  report.dataset_digest = dir_digest(cfg.dataset_path);
  report.dataset_version = report.dataset_digest.substr(0, 12);
  report.excluded = excluded_labels;
  auto sampling_warnings = llm::validate_sampling(cfg.sampling, cfg.k_values);
  report.warnings.insert(report.warnings.end(), sampling_warnings.begin(),
                         sampling_warnings.end());
  std::sort(report.warnings.begin(), report.warnings.end());
  return report;
}

json config_to_json(const RunConfig& cfg) {
  json j;
  j["dataset_path"] = cfg.dataset_path.string();
  j["prompts_dir"] = cfg.prompts_dir.string();
  j["artifact_root"] = cfg.artifact_root.string();
  json models = json::array();
  for (const auto& m : cfg.models) {
    json mj;
    mj["id"] = m.id;
    if (m.backend == ModelProfile::Backend::replay) {
      mj["backend"] = "replay";
      mj["fixtures_dir"] = m.fixtures_dir.string();
    } else {
      mj["backend"] = "http";
      mj["base_url"] = m.http.base_url;
      mj["path"] = m.http.path;
      mj["model_name"] = m.http.model_name;
      if (!m.http.api_key_env.empty()) mj["api_key_env"] = m.http.api_key_env;
      mj["response_text_pointer"] = m.http.response_text_pointer;
      mj["max_attempts"] = m.http.max_attempts;
      mj["retry_base_ms"] = m.http.retry_base_ms;
      mj["timeout_s"] = m.http.timeout_s;
      mj["field_map"] = {{"model", m.http.field_model},
                         {"messages", m.http.field_messages},
                         {"temperature", m.http.field_temperature},
                         {"top_p", m.http.field_top_p},
                         {"max_tokens", m.http.field_max_tokens}};
      if (!m.http.extra_headers.empty()) mj["extra_headers"] = m.http.extra_headers;
    }
    models.push_back(mj);
  }
  j["models"] = models;
  json modes = json::array();
  for (auto m : cfg.modes) modes.push_back(prompt::to_string(m));
  j["modes"] = modes;
  j["sampling"] = {{"temperature", cfg.sampling.temperature},
                   {"top_p", cfg.sampling.top_p},
                   {"max_context", cfg.sampling.max_context},
                   {"n_samples", cfg.sampling.n_samples}};
  json h;
  if (cfg.hls.backend == hls::HlsConfig::Backend::mock) {
    h["backend"] = "mock";
    if (!cfg.hls.fixtures_dir.empty()) h["fixtures_dir"] = cfg.hls.fixtures_dir.string();
  } else {
    h["backend"] = "external";
    h["tool_command"] = cfg.hls.tool_command;
    h["script_template"] = cfg.hls.script_template.string();
    h["rtl_dir"] = cfg.hls.rtl_dir;
  }
  h["part_or_target"] = cfg.hls.part_or_target;
  h["timeout_s"] = cfg.hls.timeout_s;
  j["hls"] = h;
  // sim: persist the resolved commands as a custom profile so a resume uses
  // exactly the same simulator invocation
  j["sim"] = {{"simulator", "custom"},
              {"compile_command", cfg.sim.compile_command},
              {"run_command", cfg.sim.run_command},
              {"timeout_s", cfg.sim.timeout_s},
              {"max_output_bytes", cfg.sim.max_output_bytes}};
  j["k_values"] = cfg.k_values;
  j["parallelism"] = cfg.parallelism;
  if (cfg.job_slots) j["job_slots"] = cfg.job_slots;
  j["rate_limit_rpm"] = cfg.rate_limit_rpm;
  j["seed"] = cfg.seed;
  j["stage_through"] = stage_through_name(cfg.stage_through);
  if (!cfg.cache_dir.empty()) j["cache_dir"] = cfg.cache_dir.string();
  return j;
}

}  // namespace

RunResult run(const RunConfig& run_cfg, const RunHooks& hooks) {
  // Work on absolute paths throughout: stage subprocesses run with their job
  // directory as cwd, so relative paths would resolve against the wrong base.
  RunConfig cfg = run_cfg;
  auto absolutize = [](fs::path& p) {
    if (!p.empty()) p = fs::absolute(p).lexically_normal();
  };
  absolutize(cfg.dataset_path);
  absolutize(cfg.prompts_dir);
  absolutize(cfg.artifact_root);
  absolutize(cfg.cache_dir);
  absolutize(cfg.hls.workdir_root);
  absolutize(cfg.hls.fixtures_dir);
  absolutize(cfg.hls.mock_tool);
  absolutize(cfg.hls.script_template);
  for (auto& m : cfg.models) absolutize(m.fixtures_dir);

  // configuration and environment checks happen before any artifact write
  if (!fs::is_directory(cfg.dataset_path))
    throw ConfigError("dataset_path is not a directory: " + cfg.dataset_path.string());
  if (!fs::is_directory(cfg.prompts_dir))
    throw ConfigError("prompts_dir is not a directory: " + cfg.prompts_dir.string());

  Engine engine(cfg, hooks);
  engine.problems = dataset::load_dataset(cfg.dataset_path);
  if (engine.problems.empty()) throw ConfigError("dataset is empty");
  engine.templates = prompt::load_templates(cfg.prompts_dir);

  std::string digest = config_digest(cfg);

  for (const auto& p : engine.problems)
    for (auto mode : cfg.modes)
      engine.bundles.emplace(std::make_pair(p.id, mode),
                             prompt::build_prompt(p, mode, engine.templates));

  engine.limiter = std::make_shared<llm::RateLimiter>(cfg.rate_limit_rpm);
  for (const auto& m : cfg.models) {
    if (m.backend == ModelProfile::Backend::replay) {
      if (!fs::is_directory(m.fixtures_dir))
        throw ConfigError("model '" + m.id + "': replay fixtures dir missing: " +
                          m.fixtures_dir.string());
      engine.backends[m.id] = std::make_unique<llm::ReplayBackend>(m.fixtures_dir, m.id);
    } else {
      engine.backends[m.id] = std::make_unique<llm::HttpBackend>(m.http, engine.limiter);
    }
  }

  // artifact root: adopt an existing same-digest run (crash-safe rerun) or
  // initialize a fresh one
  fs::path meta_path = cfg.artifact_root / kRunMetaName;
  if (auto meta_text = read_file_if_exists(meta_path)) {
    auto meta = json::parse(*meta_text);
    std::string stored = meta.at("config_digest").get<std::string>();
    if (stored != digest)
      throw ConfigError("artifact root " + cfg.artifact_root.string() +
                        " holds a different run (config digest " + stored.substr(0, 12) +
                        "... != " + digest.substr(0, 12) + "...); refusing to mix runs");
  } else {
    ensure_dir(cfg.artifact_root);
    json meta;
    meta["format"] = "rtleval-run-v1";
    meta["config_digest"] = digest;
    meta["dataset_digest"] = dir_digest(cfg.dataset_path);
    meta["created_unix"] = (long)::time(nullptr);
    write_file_atomic(meta_path, meta.dump(2) + "\n");
    write_file_atomic(cfg.artifact_root / kConfigCopyName,
                      config_to_json(cfg).dump(2) + "\n");
  }

  fs::path cache_dir = cfg.cache_dir.empty() ? cfg.artifact_root / "cache" : cfg.cache_dir;
  engine.cache = std::make_unique<llm::CompletionCache>(cache_dir);

  // deterministic cell order: problem, model, mode, sample
  std::vector<Cell> cells;
  for (size_t pi = 0; pi < engine.problems.size(); pi++)
    for (size_t mi = 0; mi < cfg.models.size(); mi++)
      for (auto mode : cfg.modes)
        for (int s = 0; s < cfg.sampling.n_samples; s++)
          cells.push_back(Cell{pi, mi, mode, s});
  engine.stats.cells_total = (long)cells.size();

  // preexisting exclusions survive a resume
  if (fs::is_directory(cfg.artifact_root / "excluded"))
    for (const auto& e : fs::directory_iterator(cfg.artifact_root / "excluded"))
      engine.excluded_groups.insert(e.path().filename().string());

  {
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    int nworkers = std::max(1, cfg.parallelism);
    pool.reserve(nworkers);
    for (int w = 0; w < nworkers; w++)
      pool.emplace_back([&] { engine.worker(next, cells); });
    for (auto& t : pool) t.join();
  }
  if (engine.fatal) std::rethrow_exception(engine.fatal);

  {
    std::string line = "stats generated=" + std::to_string(engine.stats.generate_executed) +
                       " synthesized=" + std::to_string(engine.stats.synthesize_executed) +
                       " simulated=" + std::to_string(engine.stats.simulate_executed) +
                       " skipped=" + std::to_string(engine.stats.cells_skipped) + "\n";
    FILE* log = std::fopen((cfg.artifact_root / "attempts.log").string().c_str(), "a");
    if (log) {
      std::fputs(line.c_str(), log);
      std::fclose(log);
    }
  }

  RunResult result;
  result.stats = engine.stats;
  bool interrupted = engine.stop_requested.load();
  if (cfg.stage_through == StageThrough::simulate && !interrupted) {
    auto report = build_report_from_root(cfg.artifact_root, cfg, engine.problems, digest);
    write_file_atomic(cfg.artifact_root / "report.json", metrics::format_machine(report));
    write_file_atomic(cfg.artifact_root / "report.csv", metrics::format_csv(report));
    write_file_atomic(cfg.artifact_root / "report.txt", metrics::format_text(report));
    result.report = std::move(report);
  }
  return result;
}

RunResult resume(const fs::path& artifact_root_arg, const ToolPaths& tools) {
  fs::path artifact_root = fs::absolute(artifact_root_arg).lexically_normal();
  fs::path config_copy = artifact_root / kConfigCopyName;
  fs::path meta_path = artifact_root / kRunMetaName;
  if (!fs::exists(config_copy) || !fs::exists(meta_path))
    throw ConfigError("artifact root " + artifact_root.string() +
                      " has no persisted run (missing config.json/run_meta.json)");
  RunConfig cfg = load_config(config_copy, tools);
  cfg.artifact_root = artifact_root;  // resume in place even if the tree moved

  auto meta = json::parse(read_file(meta_path));
  std::string stored = meta.at("config_digest").get<std::string>();
  std::string current = config_digest(cfg);
  if (stored != current)
    throw ConfigError(
        "refusing to resume: stored config digest " + stored.substr(0, 12) +
        "... does not match the current one " + current.substr(0, 12) +
        "... (config.json, dataset, prompts, or fixtures were edited after the run started)");
  return run(cfg);
}

metrics::EvalReport report_from_artifacts(const fs::path& artifact_root_arg,
                                          const ToolPaths& tools) {
  fs::path artifact_root = fs::absolute(artifact_root_arg).lexically_normal();
  fs::path config_copy = artifact_root / kConfigCopyName;
  if (!fs::exists(config_copy))
    throw ConfigError("artifact root " + artifact_root.string() + " has no persisted config");
  RunConfig cfg = load_config(config_copy, tools);
  cfg.artifact_root = artifact_root;
  auto problems = dataset::load_dataset(cfg.dataset_path);
  auto meta = json::parse(read_file(artifact_root / kRunMetaName));
  return build_report_from_root(artifact_root, cfg, problems,
                                meta.at("config_digest").get<std::string>());
}

}  // namespace rtleval::orchestrator
