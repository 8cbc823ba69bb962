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

#include <unistd.h>

#include <atomic>
#include <filesystem>

#include "doctest.h"
#include "json.hpp"
#include "rtleval/fixtures.hpp"
#include "rtleval/util/fs.hpp"
#include "rtleval/util/strings.hpp"

using namespace rtleval;
using namespace rtleval::orchestrator;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

const fs::path kRepo = RTLEVAL_SOURCE_DIR;

ToolPaths tools() { return {MINISIM_BIN, MOCKHLS_BIN}; }

struct TestRun {
  fs::path root;      // temp root for everything
  fs::path dataset;   // subset dataset
  fs::path fixtures;  // replay + hls fixtures
  fs::path config_file;

  explicit TestRun(const std::string& tag, const std::vector<std::string>& problem_ids,
                   const std::vector<std::string>& models = {"replay-a"}, int n = 4) {
    root = fs::temp_directory_path() / ("rtleval_orc_" + tag + "_" + std::to_string(::getpid()));
    fs::remove_all(root);
    fs::create_directories(root);
    dataset = root / "dataset";
    fs::create_directories(dataset);
    for (const auto& id : problem_ids)
      fs::copy(kRepo / "data" / "dataset" / id, dataset / id, fs::copy_options::recursive);

    fixtures::BuildOptions opts;
    opts.dataset_dir = dataset;
    opts.prompts_dir = kRepo / "data" / "prompts";
    opts.solutions_dir = kRepo / "data" / "fixtures" / "solutions";
    opts.out_dir = root / "fixtures";
    opts.model_ids = models;
    opts.sampling.n_samples = n;
    fixtures::build(opts);
    fixtures = root / "fixtures";

    json cfg;
    cfg["dataset_path"] = dataset.string();
    cfg["prompts_dir"] = (kRepo / "data" / "prompts").string();
    cfg["artifact_root"] = (root / "run").string();
    json models_json = json::array();
    for (const auto& m : models)
      models_json.push_back({{"id", m},
                             {"backend", "replay"},
                             {"fixtures_dir", (fixtures / "replay" / m).string()}});
    cfg["models"] = models_json;
    cfg["modes"] = {"hls_cpp", "direct_verilog"};
    cfg["sampling"] = {{"n_samples", n}};
    cfg["hls"] = {{"backend", "mock"}, {"fixtures_dir", (fixtures / "hls").string()}};
    cfg["sim"] = {{"simulator", "builtin"}};
    cfg["k_values"] = {1, 2};
    cfg["parallelism"] = 2;
    config_file = root / "config.json";
    write_file_atomic(config_file, cfg.dump(2));
  }

  RunConfig load() const { return load_config(config_file, tools()); }
  ~TestRun() { fs::remove_all(root); }
};

long count_verdicts(const fs::path& artifact_root) {
  long n = 0;
  for (const auto& e : fs::recursive_directory_iterator(artifact_root))
    if (e.path().filename() == "verdict.json") n++;
  return n;
}

}  // namespace

TEST_CASE("run matrix: 3 problems x 1 model x 2 modes x n=4 gives 24 verdicts") {
  TestRun t("matrix", {"xnor", "fadd", "mux2"});
  auto result = run(t.load());
  REQUIRE(result.report.has_value());
  CHECK(result.stats.cells_total == 24);
  CHECK(result.stats.generate_executed == 24);
  CHECK(count_verdicts(t.root / "run") == 24);
  CHECK(result.report->mode_order.size() == 2);
  // known counts from the fixture plans
  auto& pp = result.report->per_problem;
  metrics::GroupKey hls_key{"replay-a", "hls_cpp"};
  REQUIRE(pp.count(hls_key));
  for (const auto& score : pp[hls_key]) {
    if (score.problem_id == "xnor") CHECK(score.c == 2);
    if (score.problem_id == "fadd") CHECK(score.c == 3);
    if (score.problem_id == "mux2") CHECK(score.c == 4);
    CHECK(score.n == 4);
  }
}

TEST_CASE("unknown model backend aborts before touching the artifact root") {
  TestRun t("badmodel", {"xnor"});
  std::string text = read_file(t.config_file);
  text = json::parse(text).dump();  // normalize
  auto cfg_json = json::parse(text);
  cfg_json["models"][0]["backend"] = "quantum";
  write_file_atomic(t.config_file, cfg_json.dump(2));
  CHECK_THROWS_AS(load_config(t.config_file, tools()), ConfigError);
  CHECK(!fs::exists(t.root / "run"));
}

TEST_CASE("config errors: k above n, empty modes, duplicate ids") {
  TestRun t("badcfg", {"xnor"});
  auto base = json::parse(read_file(t.config_file));

  auto variant = base;
  variant["k_values"] = {1, 9};
  write_file_atomic(t.config_file, variant.dump());
  CHECK_THROWS_WITH_AS(load_config(t.config_file, tools()), doctest::Contains("k="),
                       ConfigError);

  variant = base;
  variant["modes"] = json::array();
  write_file_atomic(t.config_file, variant.dump());
  CHECK_THROWS_AS(load_config(t.config_file, tools()), ConfigError);

  variant = base;
  variant["models"].push_back(variant["models"][0]);
  write_file_atomic(t.config_file, variant.dump());
  CHECK_THROWS_WITH_AS(load_config(t.config_file, tools()), doctest::Contains("duplicate"),
                       ConfigError);
}

TEST_CASE("rerun of a completed run re-executes nothing and reproduces the report") {
  TestRun t("rerun", {"xnor", "parity4"});
  auto first = run(t.load());
  REQUIRE(first.report.has_value());
  std::string report1 = read_file(t.root / "run" / "report.json");

  auto second = run(t.load());
  CHECK(second.stats.generate_executed == 0);
  CHECK(second.stats.synthesize_executed == 0);
  CHECK(second.stats.simulate_executed == 0);
  CHECK(second.stats.cells_skipped == second.stats.cells_total);
  CHECK(read_file(t.root / "run" / "report.json") == report1);
}

TEST_CASE("interrupted run resumes to the oracle result with zero re-execution") {
  TestRun t("resume", {"xnor", "fadd", "dec2_4"});

  // oracle: uninterrupted run in a sibling artifact root
  auto oracle_cfg = t.load();
  oracle_cfg.artifact_root = t.root / "oracle";
  auto oracle = run(oracle_cfg);
  REQUIRE(oracle.report.has_value());
  std::string oracle_report = read_file(t.root / "oracle" / "report.json");

  // interrupted: stop after ~half the cells have been claimed
  std::atomic<int> claimed{0};
  RunHooks hooks;
  hooks.should_stop = [&] { return claimed.fetch_add(1) >= 12; };
  auto cfg = t.load();
  cfg.parallelism = 1;  // deterministic claim count
  auto partial = run(cfg, hooks);
  CHECK(!partial.report.has_value());
  long partial_work = partial.stats.generate_executed;
  CHECK(partial_work > 0);
  CHECK(partial_work < partial.stats.cells_total);

  // resume: only the remaining cells execute
  auto resumed = resume(t.root / "run", tools());
  REQUIRE(resumed.report.has_value());
  CHECK(resumed.stats.generate_executed + partial_work == resumed.stats.cells_total);
  CHECK(resumed.stats.cells_skipped == partial_work);
  CHECK(read_file(t.root / "run" / "report.json") == oracle_report);

  // resuming again re-executes nothing
  auto again = resume(t.root / "run", tools());
  CHECK(again.stats.generate_executed == 0);
  CHECK(again.stats.simulate_executed == 0);
}

TEST_CASE("resume works with a relative artifact root") {
  TestRun t("relresume", {"fadd"});

  auto oracle_cfg = t.load();
  oracle_cfg.artifact_root = t.root / "oracle";
  auto oracle = run(oracle_cfg);
  REQUIRE(oracle.report.has_value());

  // partial run, then resume addressing the root by a relative path; the
  // mock-HLS stage must still resolve every file (its cwd is the job dir)
  std::atomic<int> claimed{0};
  RunHooks hooks;
  hooks.should_stop = [&] { return claimed.fetch_add(1) >= 3; };
  auto cfg = t.load();
  cfg.parallelism = 1;
  run(cfg, hooks);

  fs::path relative = fs::relative(t.root / "run", fs::current_path());
  auto resumed = resume(relative, tools());
  REQUIRE(resumed.report.has_value());
  CHECK(read_file(t.root / "run" / "report.json") ==
        read_file(t.root / "oracle" / "report.json"));
  for (const auto& score : resumed.report->per_problem[{"replay-a", "hls_cpp"}])
    CHECK(score.c == 3);  // fadd plan: good, good, unknown, twofence
}

TEST_CASE("resume refuses an edited config") {
  TestRun t("editcfg", {"xnor"});
  auto result = run(t.load());
  REQUIRE(result.report.has_value());
  auto stored = json::parse(read_file(t.root / "run" / "config.json"));
  stored["sampling"]["temperature"] = 0.7;
  write_file_atomic(t.root / "run" / "config.json", stored.dump(2));
  CHECK_THROWS_WITH_AS(resume(t.root / "run", tools()), doctest::Contains("digest"),
                       ConfigError);
}

TEST_CASE("run refuses an artifact root from a different config") {
  TestRun t("mixedroot", {"xnor"});
  auto cfg = t.load();
  auto result = run(cfg);
  REQUIRE(result.report.has_value());
  cfg.sampling.temperature = 0.5;
  CHECK_THROWS_WITH_AS(run(cfg), doctest::Contains("different run"), ConfigError);
}

TEST_CASE("transport failure excludes the problem loudly instead of scoring zero") {
  TestRun t("exclude", {"xnor", "parity4"});
  // remove one replay fixture: parity4 direct_verilog sample 2
  auto cfg = t.load();
  auto problems = dataset::load_dataset(cfg.dataset_path);
  auto templates = prompt::load_templates(cfg.prompts_dir);
  const dataset::Problem* parity = nullptr;
  for (const auto& p : problems)
    if (p.id == "parity4") parity = &p;
  REQUIRE(parity);
  auto bundle = prompt::build_prompt(*parity, prompt::GenerationMode::direct_verilog, templates);
  std::string key = llm::cache_key(bundle, cfg.sampling, "replay-a", 2);
  fs::remove(t.fixtures / "replay" / "replay-a" / (key + ".txt"));

  auto result = run(t.load());  // reload: fixtures digest changed
  REQUIRE(result.report.has_value());
  CHECK(result.stats.transport_excluded_groups == 1);
  REQUIRE(result.report->excluded.size() == 1);
  CHECK(contains(result.report->excluded[0], "parity4"));
  CHECK(contains(result.report->excluded[0], "direct_verilog"));
  // the excluded group's mean comes from the remaining problem only
  metrics::GroupKey key_direct{"replay-a", "direct_verilog"};
  REQUIRE(result.report->per_problem.count(key_direct));
  CHECK(result.report->per_problem[key_direct].size() == 1);
  CHECK(result.report->per_problem[key_direct][0].problem_id == "xnor");
  // the sibling mode is untouched
  metrics::GroupKey key_hls{"replay-a", "hls_cpp"};
  CHECK(result.report->per_problem[key_hls].size() == 2);
}

TEST_CASE("stage-through generate leaves cells pending for a later full run") {
  TestRun t("stagethrough", {"xnor"});
  auto cfg = t.load();
  cfg.stage_through = StageThrough::generate;
  auto result = run(cfg);
  CHECK(!result.report.has_value());
  CHECK(result.stats.generate_executed == 8);
  CHECK(count_verdicts(t.root / "run") == 0);
  // gen artifacts exist
  CHECK(fs::exists(t.root / "run" / "replay-a" / "hls_cpp" / "xnor" / "000" / "gen.json"));

  auto full = t.load();
  auto completed = run(full);
  REQUIRE(completed.report.has_value());
  CHECK(completed.stats.generate_executed == 0);  // generation reused
  CHECK(count_verdicts(t.root / "run") == 8);
}

TEST_CASE("report command path reproduces the stored report") {
  TestRun t("reportcmd", {"xnor", "kmap1"});
  auto result = run(t.load());
  REQUIRE(result.report.has_value());
  auto rebuilt = report_from_artifacts(t.root / "run", tools());
  CHECK(metrics::format_machine(rebuilt) == read_file(t.root / "run" / "report.json"));
}

TEST_CASE("artifact layout matches the documented per-sample contract") {
  TestRun t("layout", {"fadd"});
  auto result = run(t.load());
  REQUIRE(result.report.has_value());
  fs::path cell = t.root / "run" / "replay-a" / "hls_cpp" / "fadd" / "000";
  CHECK(fs::exists(cell / "gen.json"));
  CHECK(fs::exists(cell / "synth.json"));
  CHECK(fs::exists(cell / "wrapper.v"));
  CHECK(fs::exists(cell / "verdict.json"));
  CHECK(fs::is_directory(cell / "rtl"));
  // hls job dir preserved with input + log
  bool found_job = false;
  for (const auto& e : fs::directory_iterator(cell))
    if (e.is_directory() && starts_with(e.path().filename().string(), "hls_")) {
      found_job = true;
      CHECK(fs::exists(e.path() / "input.cpp"));
      CHECK(fs::exists(e.path() / "hls.log"));
    }
  CHECK(found_job);

  auto verdict = json::parse(read_file(cell / "verdict.json"));
  CHECK(verdict.at("status") == "pass");
  CHECK(verdict.at("reason") == "ok");
  CHECK(verdict.at("mismatch_count") == 0);
}

TEST_CASE("verdict reasons cover the stage chain") {
  TestRun t("reasons", {"parity4"});
  auto result = run(t.load());
  REQUIRE(result.report.has_value());
  // plan for parity4 hls: wrong, good, nofence, unknown
  auto reason_of = [&](const char* mode, int idx) {
    auto v = json::parse(read_file(t.root / "run" / "replay-a" / mode / "parity4" /
                                   (std::string("00") + std::to_string(idx)) / "verdict.json"));
    return v.at("reason").get<std::string>();
  };
  CHECK(reason_of("hls_cpp", 0) == "mismatch");       // wrong logic synthesized fine
  CHECK(reason_of("hls_cpp", 1) == "ok");
  CHECK(reason_of("hls_cpp", 2) == "extract_error");  // no fence
  CHECK(reason_of("hls_cpp", 3) == "hls_error");      // no mock fixture
  // plan for parity4 direct: bad_syntax, good, wrongv, nofence
  CHECK(reason_of("direct_verilog", 0) == "sim_compile_error");
  CHECK(reason_of("direct_verilog", 1) == "ok");
  CHECK(reason_of("direct_verilog", 2) == "mismatch");
  CHECK(reason_of("direct_verilog", 3) == "extract_error");
}

TEST_CASE("golden self-test and mutant sensitivity across the bundled dataset") {
  auto problems = dataset::load_dataset(kRepo / "data" / "dataset");
  REQUIRE(problems.size() >= 5);
  auto cfg = sim::builtin_sim_config(MINISIM_BIN);
  fs::path scratch = fs::temp_directory_path() / ("rtleval_goldens_" + std::to_string(::getpid()));
  fs::remove_all(scratch);
  for (const auto& p : problems) {
    CAPTURE(p.id);
    auto verdict = sim::run_testbench({{"candidate.v", p.golden_rtl}}, p, cfg, scratch);
    CHECK(verdict.status == sim::VerdictStatus::pass);
    auto mutants = dataset::load_mutants(p);
    CHECK(!mutants.empty());
    for (const auto& [name, text] : mutants) {
      CAPTURE(name);
      auto mv = sim::run_testbench({{"candidate.v", text}}, p, cfg, scratch);
      CHECK(mv.status == sim::VerdictStatus::fail);
      CHECK(mv.reason == sim::FailReason::mismatch);
      CHECK(mv.mismatch_count > 0);
    }
  }
  fs::remove_all(scratch);
}

TEST_CASE("kmap and fsm problem descriptions embed the rendered schema text") {
  auto problems = dataset::load_dataset(kRepo / "data" / "dataset");
  const dataset::Problem* kmap = nullptr;
  const dataset::Problem* fsm = nullptr;
  for (const auto& p : problems) {
    if (p.id == "kmap1") kmap = &p;
    if (p.id == "fsm_next") fsm = &p;
  }
  REQUIRE(kmap);
  REQUIRE(fsm);

  dataset::KMapSpec km;
  km.variables = {"a", "b", "c"};
  km.cells = {{"000", dataset::CellValue::one},  {"001", dataset::CellValue::zero},
              {"010", dataset::CellValue::one},  {"011", dataset::CellValue::zero},
              {"100", dataset::CellValue::zero}, {"101", dataset::CellValue::one},
              {"110", dataset::CellValue::dont_care}, {"111", dataset::CellValue::one}};
  CHECK(contains(kmap->description, dataset::render_kmap(km)));

  dataset::FsmSpec fs_spec;
  fs_spec.states = {"IDLE", "BUSY"};
  fs_spec.reset_state = "IDLE";
  fs_spec.transitions = {{"IDLE", "go=1", "BUSY"},
                         {"IDLE", "go=0", "IDLE"},
                         {"BUSY", "done=1", "IDLE"},
                         {"BUSY", "done=0", "BUSY"}};
  fs_spec.outputs = {{"IDLE", "busy=0"}, {"BUSY", "busy=1"}};
  CHECK(contains(fsm->description, dataset::render_fsm(fs_spec)));
}
