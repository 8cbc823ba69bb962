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

#include "rtleval/llm.hpp"

#include <cstdio>
#include <cstdlib>
#include <thread>

#include "httplib.h"
#include "json.hpp"
#include "rtleval/util/digest.hpp"
#include "rtleval/util/fs.hpp"

namespace rtleval::llm {

namespace fs = std::filesystem;
using nlohmann::json;

std::vector<std::string> validate_sampling(const SamplingConfig& cfg,
                                           const std::vector<int>& k_values) {
  if (cfg.temperature < 0)
    throw std::invalid_argument("sampling: temperature must be >= 0");
  if (!(cfg.top_p > 0 && cfg.top_p <= 1))
    throw std::invalid_argument("sampling: top_p must be in (0, 1]");
  if (cfg.n_samples < 1)
    throw std::invalid_argument("sampling: n_samples must be >= 1");
  if (cfg.max_context < 1)
    throw std::invalid_argument("sampling: max_context must be >= 1");
  std::vector<std::string> warnings;
  for (int k : k_values) {
    if (cfg.n_samples < 2 * k)
      warnings.push_back("n_samples=" + std::to_string(cfg.n_samples) + " is below 2*k for k=" +
                         std::to_string(k) + "; pass@" + std::to_string(k) +
                         " estimates will be high-variance");
  }
  return warnings;
}

static std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string cache_key(const prompt::PromptBundle& bundle, const SamplingConfig& cfg,
                      const std::string& model_id, int sample_index) {
  std::string blob = "rtleval-completion-v1\n";
  blob += "model=" + model_id + "\n";
  blob += "temperature=" + format_double(cfg.temperature) + "\n";
  blob += "top_p=" + format_double(cfg.top_p) + "\n";
  blob += "max_context=" + std::to_string(cfg.max_context) + "\n";
  blob += "sample_index=" + std::to_string(sample_index) + "\n";
  blob += "prompt:\n" + bundle.flattened();
  return sha256_hex(blob);
}

CompletionCache::CompletionCache(fs::path dir) : dir_(std::move(dir)) {}

std::optional<std::string> CompletionCache::lookup(const std::string& key) const {
  return read_file_if_exists(dir_ / (key + ".txt"));
}

void CompletionCache::store(const std::string& key, const std::string& raw) const {
  write_file_atomic(dir_ / (key + ".txt"), raw);
}

RateLimiter::RateLimiter(double rpm) : rpm_(rpm), tokens_(1.0), last_(std::chrono::steady_clock::now()) {}

void RateLimiter::acquire() {
  if (rpm_ <= 0) return;
  const double per_second = rpm_ / 60.0;
  const double capacity = std::max(1.0, per_second);
  while (true) {
    std::chrono::duration<double> wait{0};
    {
      std::lock_guard<std::mutex> lock(mu_);
      auto now = std::chrono::steady_clock::now();
      tokens_ = std::min(capacity, tokens_ + std::chrono::duration<double>(now - last_).count() * per_second);
      last_ = now;
      if (tokens_ >= 1.0) {
        tokens_ -= 1.0;
        return;
      }
      wait = std::chrono::duration<double>((1.0 - tokens_) / per_second);
    }
    std::this_thread::sleep_for(wait);
  }
}

ReplayBackend::ReplayBackend(fs::path fixtures_dir, std::string model_id)
    : dir_(std::move(fixtures_dir)), model_id_(std::move(model_id)) {}

std::string ReplayBackend::complete(const ChatRequest&, const std::string& cache_key) {
  auto fixture = read_file_if_exists(dir_ / (cache_key + ".txt"));
  if (!fixture)
    throw TransportError("replay fixture missing: " + (dir_ / (cache_key + ".txt")).string());
  served_.fetch_add(1);
  return *fixture;
}

HttpBackend::HttpBackend(HttpProfile profile, std::shared_ptr<RateLimiter> limiter)
    : profile_(std::move(profile)), limiter_(std::move(limiter)) {
  if (profile_.model_name.empty()) profile_.model_name = profile_.model_id;
}

std::string HttpBackend::complete(const ChatRequest& request, const std::string&) {
  json body;
  body[profile_.field_model] = profile_.model_name;
  json messages = json::array();
  for (const auto& m : request.messages)
    messages.push_back({{"role", m.role}, {"content", m.content}});
  body[profile_.field_messages] = messages;
  body[profile_.field_temperature] = request.temperature;
  body[profile_.field_top_p] = request.top_p;
  body[profile_.field_max_tokens] = request.max_tokens;

  httplib::Headers headers;
  // Credentials come from the environment only, never from config files.
  if (!profile_.api_key_env.empty()) {
    const char* key = std::getenv(profile_.api_key_env.c_str());
    if (key && *key) headers.emplace("Authorization", std::string("Bearer ") + key);
  }
  for (const auto& [k, v] : profile_.extra_headers) headers.emplace(k, v);

  std::string last_error;
  for (int attempt = 0; attempt < profile_.max_attempts; attempt++) {
    if (attempt > 0) {
      std::this_thread::sleep_for(
          std::chrono::milliseconds(profile_.retry_base_ms << (attempt - 1)));
    }
    if (limiter_) limiter_->acquire();
    httplib::Client client(profile_.base_url);
    client.set_connection_timeout(profile_.timeout_s);
    client.set_read_timeout(profile_.timeout_s);
    auto res = client.Post(profile_.path, headers, body.dump(), "application/json");
    if (!res) {
      last_error = "connection error: " + httplib::to_string(res.error());
      continue;
    }
    if (res->status != 200) {
      last_error = "HTTP " + std::to_string(res->status) + ": " + res->body.substr(0, 500);
      continue;
    }
    try {
      json reply = json::parse(res->body);
      return reply.at(json::json_pointer(profile_.response_text_pointer)).get<std::string>();
    } catch (const std::exception& e) {
      last_error = std::string("malformed response body: ") + e.what();
      continue;
    }
  }
  throw TransportError("backend '" + profile_.model_id + "' unreachable after " +
                       std::to_string(profile_.max_attempts) + " attempts: " + last_error);
}

Completion generate_one(const std::string& problem_id, const prompt::PromptBundle& bundle,
                        const SamplingConfig& cfg, Backend& backend, int sample_index,
                        const CompletionCache* cache) {
  ChatRequest request;
  request.messages = bundle.messages();
  request.temperature = cfg.temperature;
  request.top_p = cfg.top_p;
  request.max_tokens = cfg.max_context;
  request.model = backend.model_id();

  std::string key = cache_key(bundle, cfg, backend.model_id(), sample_index);
  std::string raw;
  if (cache) {
    if (auto hit = cache->lookup(key)) {
      raw = *hit;
    } else {
      raw = backend.complete(request, key);
      cache->store(key, raw);
    }
  } else {
    raw = backend.complete(request, key);
  }
  Completion c;
  c.problem_id = problem_id;
  c.sample_index = sample_index;
  c.raw_response = raw;
  c.extracted_code = prompt::extract_code(raw, bundle.mode);
  c.model_id = backend.model_id();
  c.mode = bundle.mode;
  return c;
}

std::vector<Completion> generate(const std::string& problem_id,
                                 const prompt::PromptBundle& bundle,
                                 const SamplingConfig& cfg, Backend& backend,
                                 const CompletionCache* cache) {
  std::vector<Completion> out;
  out.reserve(cfg.n_samples);
  for (int idx = 0; idx < cfg.n_samples; idx++)
    out.push_back(generate_one(problem_id, bundle, cfg, backend, idx, cache));
  return out;
}

}  // namespace rtleval::llm
