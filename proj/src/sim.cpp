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

#include "rtleval/sim.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/wait.h>
#include <unistd.h>

#include <chrono>
#include <cstring>
#include <stdexcept>

#include "rtleval/util/fs.hpp"
#include "rtleval/util/strings.hpp"
#include "rtleval/verilog.hpp"

namespace rtleval::sim {

namespace fs = std::filesystem;

ExecResult sandbox_exec(const std::vector<std::string>& argv, const fs::path& workdir,
                        const ExecOptions& options) {
  if (argv.empty()) throw std::runtime_error("sandbox_exec: empty argv");

  int pipefd[2];
  if (pipe(pipefd) != 0) throw std::runtime_error("sandbox_exec: pipe failed");

  std::vector<std::string> env_strings;
  for (const auto& name : options.env_allowlist) {
    const char* v = ::getenv(name.c_str());
    if (v) env_strings.push_back(name + "=" + v);
  }
  for (const auto& [k, v] : options.extra_env) env_strings.push_back(k + "=" + v);

  pid_t pid = fork();
  if (pid < 0) {
    close(pipefd[0]);
    close(pipefd[1]);
    throw std::runtime_error("sandbox_exec: fork failed");
  }
  if (pid == 0) {
    // child: own process group so the whole tree can be killed
    setpgid(0, 0);
    if (chdir(workdir.c_str()) != 0) _exit(126);
    dup2(pipefd[1], STDOUT_FILENO);
    dup2(pipefd[1], STDERR_FILENO);
    close(pipefd[0]);
    close(pipefd[1]);
    std::vector<char*> cargv, cenv;
    for (const auto& a : argv) cargv.push_back(const_cast<char*>(a.c_str()));
    cargv.push_back(nullptr);
    for (const auto& e : env_strings) cenv.push_back(const_cast<char*>(e.c_str()));
    cenv.push_back(nullptr);
    execvpe(argv[0].c_str(), cargv.data(), cenv.data());
    const char* msg = "sandbox_exec: exec failed\n";
    ssize_t ignored = write(STDERR_FILENO, msg, strlen(msg));
    (void)ignored;
    _exit(127);
  }

  close(pipefd[1]);
  fcntl(pipefd[0], F_SETFL, O_NONBLOCK);

  ExecResult result;
  auto start = std::chrono::steady_clock::now();
  auto deadline = start + std::chrono::duration<double>(options.timeout_s);
  const auto grace = std::chrono::seconds(5);

  bool reaped = false;
  int status = 0;
  bool pipe_open = true;
  size_t total_bytes = 0;
  char buf[4096];

  auto drain = [&]() {
    while (true) {
      ssize_t n = read(pipefd[0], buf, sizeof(buf));
      if (n > 0) {
        total_bytes += (size_t)n;
        if (result.output.size() < options.max_output_bytes) {
          size_t room = options.max_output_bytes - result.output.size();
          result.output.append(buf, std::min((size_t)n, room));
          if (total_bytes > options.max_output_bytes) result.truncated = true;
        } else {
          result.truncated = true;
        }
        continue;
      }
      if (n == 0) { pipe_open = false; }
      break;
    }
  };

  while (true) {
    auto now = std::chrono::steady_clock::now();
    if (!result.timed_out && now >= deadline) {
      result.timed_out = true;
      killpg(pid, SIGKILL);
    }
    if (result.timed_out && now >= deadline + grace) {
      // unreapable child; give up on the pipe
      break;
    }
    if (pipe_open) {
      struct pollfd pfd{pipefd[0], POLLIN, 0};
      int pr = poll(&pfd, 1, 50);
      if (pr > 0) drain();
    }
    if (!reaped) {
      pid_t w = waitpid(pid, &status, WNOHANG);
      if (w == pid) reaped = true;
    }
    if (reaped && !pipe_open) break;
    if (reaped && pipe_open) {
      // child gone; drain what remains, then stop at EOF or after grace
      drain();
      if (!pipe_open) break;
      if (std::chrono::steady_clock::now() >= deadline + grace) break;
    }
  }
  if (!reaped) {
    killpg(pid, SIGKILL);
    waitpid(pid, &status, 0);
    reaped = true;
  }
  close(pipefd[0]);

  result.elapsed_s =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (WIFEXITED(status)) result.exit_code = WEXITSTATUS(status);
  if (WIFSIGNALED(status)) result.signal = WTERMSIG(status);
  if (result.truncated) result.output += "\n[output truncated]\n";
  return result;
}

SimConfig builtin_sim_config(const fs::path& minisim_binary) {
  SimConfig cfg;
  cfg.compile_command = {minisim_binary.string(), "compile", "-o", "{snapshot}", "{sources}"};
  cfg.run_command = {minisim_binary.string(), "run", "{snapshot}"};
  return cfg;
}

std::string to_string(VerdictStatus s) {
  return s == VerdictStatus::pass ? "pass" : "fail";
}

std::string to_string(FailReason r) {
  switch (r) {
    case FailReason::ok: return "ok";
    case FailReason::extract_error: return "extract_error";
    case FailReason::hls_error: return "hls_error";
    case FailReason::wrapper_error: return "wrapper_error";
    case FailReason::sim_compile_error: return "sim_compile_error";
    case FailReason::mismatch: return "mismatch";
    case FailReason::sim_timeout: return "sim_timeout";
    case FailReason::runtime_error: return "runtime_error";
  }
  return "runtime_error";
}

FailReason fail_reason_from_string(const std::string& s) {
  for (FailReason r : {FailReason::ok, FailReason::extract_error, FailReason::hls_error,
                       FailReason::wrapper_error, FailReason::sim_compile_error,
                       FailReason::mismatch, FailReason::sim_timeout, FailReason::runtime_error})
    if (to_string(r) == s) return r;
  throw std::runtime_error("unknown verdict reason '" + s + "'");
}

Verdict Verdict::pass_verdict(long mismatches_seen) {
  Verdict v;
  v.status = VerdictStatus::pass;
  v.reason = FailReason::ok;
  v.mismatch_count = mismatches_seen;
  return v;
}

Verdict Verdict::fail_verdict(FailReason reason, std::string log_excerpt, long mismatch_count) {
  Verdict v;
  v.status = VerdictStatus::fail;
  v.reason = reason;
  v.mismatch_count = mismatch_count;
  v.log_excerpt = std::move(log_excerpt);
  return v;
}

std::optional<long> parse_mismatch_summary(const std::string& output) {
  std::optional<long> found;
  for (const auto& raw : split_lines(output)) {
    std::string line = trim(raw);
    if (!starts_with(line, "MISMATCHES=")) continue;
    std::string digits = line.substr(std::string("MISMATCHES=").size());
    if (digits.empty() || digits.find_first_not_of("0123456789") != std::string::npos) continue;
    found = std::stol(digits);
  }
  return found;
}

namespace {

std::string excerpt(const std::string& output, size_t max_bytes = 2000) {
  if (output.size() <= max_bytes) return output;
  return "..." + output.substr(output.size() - max_bytes);
}

std::vector<std::string> instantiate_command(const std::vector<std::string>& tmpl,
                                             const std::vector<std::string>& sources,
                                             const std::string& snapshot,
                                             const std::string& workdir) {
  std::vector<std::string> argv;
  for (const auto& token : tmpl) {
    if (token == "{sources}") {
      argv.insert(argv.end(), sources.begin(), sources.end());
      continue;
    }
    std::string t = token;
    auto replace_all = [&t](const std::string& from, const std::string& to) {
      size_t pos = 0;
      while ((pos = t.find(from, pos)) != std::string::npos) {
        t.replace(pos, from.size(), to);
        pos += to.size();
      }
    };
    replace_all("{snapshot}", snapshot);
    replace_all("{workdir}", workdir);
    argv.push_back(t);
  }
  return argv;
}

}  // namespace

Verdict run_testbench(const std::vector<NamedSource>& candidate_rtl, const dataset::Problem& p,
                      const SimConfig& cfg, const fs::path& scratch_root) {
  if (candidate_rtl.empty())
    return Verdict::fail_verdict(FailReason::runtime_error, "no candidate RTL supplied");

  fs::path scratch = make_scratch_dir(scratch_root, "sim_" + p.id);

  std::vector<std::string> sources;
  for (const auto& src : candidate_rtl) {
    std::string name = src.filename.empty() ? "candidate.v" : src.filename;
    if (name == "__golden.v" || name == "__tb.v")
      return Verdict::fail_verdict(FailReason::runtime_error,
                                   "candidate file name '" + name + "' is reserved");
    write_file_atomic(scratch / name, src.content);
    sources.push_back(name);
  }
  // The golden is compiled alongside the candidate under <top>_golden so a
  // candidate that IS the golden text still links cleanly.
  std::string golden_renamed =
      verilog::rename_identifier(p.golden_rtl, p.top_module, p.top_module + "_golden");
  write_file_atomic(scratch / "__golden.v", golden_renamed);
  write_file_atomic(scratch / "__tb.v", p.testbench);
  sources.push_back("__golden.v");
  sources.push_back("__tb.v");

  ExecOptions exec_opts;
  exec_opts.timeout_s = cfg.timeout_s;
  exec_opts.max_output_bytes = cfg.max_output_bytes;

  auto compile_argv =
      instantiate_command(cfg.compile_command, sources, "sim.snap", scratch.string());
  ExecResult comp = sandbox_exec(compile_argv, scratch, exec_opts);
  if (comp.timed_out)
    return Verdict::fail_verdict(FailReason::sim_timeout,
                                 "compile phase timed out\n" + excerpt(comp.output));
  if (comp.exit_code != 0 || comp.signal != 0)
    return Verdict::fail_verdict(FailReason::sim_compile_error, excerpt(comp.output));

  auto run_argv = instantiate_command(cfg.run_command, sources, "sim.snap", scratch.string());
  ExecResult run = sandbox_exec(run_argv, scratch, exec_opts);
  if (run.timed_out)
    return Verdict::fail_verdict(FailReason::sim_timeout,
                                 "simulation timed out\n" + excerpt(run.output));
  if (run.exit_code != 0 || run.signal != 0)
    return Verdict::fail_verdict(FailReason::runtime_error, excerpt(run.output));

  auto mismatches = parse_mismatch_summary(run.output);
  if (!mismatches)
    return Verdict::fail_verdict(FailReason::runtime_error,
                                 "no MISMATCHES= summary line\n" + excerpt(run.output));
  if (*mismatches > 0)
    return Verdict::fail_verdict(FailReason::mismatch, excerpt(run.output), *mismatches);
  return Verdict::pass_verdict(0);
}

}  // namespace rtleval::sim
