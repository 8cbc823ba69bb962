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

#pragma once

#include <atomic>
#include <chrono>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rtleval/prompt.hpp"

namespace rtleval::llm {

struct SamplingConfig {
  double temperature = 0.8;
  double top_p = 0.95;
  int max_context = 2048;  // token budget handed to the backend
  int n_samples = 20;
};

// Throws std::invalid_argument on hard violations; returns soft warnings
// (e.g. n_samples < 2*max(k) gives high-variance pass@k estimates).
std::vector<std::string> validate_sampling(const SamplingConfig& cfg,
                                           const std::vector<int>& k_values);

struct Completion {
  std::string problem_id;
  int sample_index = 0;
  std::string raw_response;
  std::optional<std::string> extracted_code;  // absent on extraction failure
  std::string model_id;
  prompt::GenerationMode mode = prompt::GenerationMode::hls_cpp;
};

// Backend transport failure after bounded retries. Distinct from a failing
// sample: callers abort the problem, they do not score it 0.
struct TransportError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ChatRequest {
  std::vector<prompt::ChatMessage> messages;
  double temperature = 0.8;
  double top_p = 0.95;
  int max_tokens = 2048;
  std::string model;
};

class Backend {
 public:
  virtual ~Backend() = default;
  virtual std::string model_id() const = 0;
  // Raw response text. `cache_key` identifies the sample for adapters that
  // replay recorded traffic. Throws TransportError.
  virtual std::string complete(const ChatRequest& request, const std::string& cache_key) = 0;
};

// Stable content digest over the flattened prompt, sampling parameters,
// model id, and sample index.
std::string cache_key(const prompt::PromptBundle& bundle, const SamplingConfig& cfg,
                      const std::string& model_id, int sample_index);

// Content-addressed completion store: one file per completion, written
// atomically. Never changes results, only latency.
class CompletionCache {
 public:
  explicit CompletionCache(std::filesystem::path dir);
  std::optional<std::string> lookup(const std::string& key) const;
  void store(const std::string& key, const std::string& raw_response) const;

 private:
  std::filesystem::path dir_;
};

// Token bucket limiting requests per minute across concurrent workers.
// rpm <= 0 means unlimited.
class RateLimiter {
 public:
  explicit RateLimiter(double rpm);
  void acquire();

 private:
  double rpm_;
  double tokens_;
  std::chrono::steady_clock::time_point last_;
  std::mutex mu_;
};

// Deterministic adapter for tests and demos: fixtures keyed by cache_key
// digest. Missing fixture raises TransportError.
class ReplayBackend : public Backend {
 public:
  ReplayBackend(std::filesystem::path fixtures_dir, std::string model_id);
  std::string model_id() const override { return model_id_; }
  std::string complete(const ChatRequest& request, const std::string& cache_key) override;
  int requests_served() const { return served_.load(); }

 private:
  std::filesystem::path dir_;
  std::string model_id_;
  std::atomic<int> served_{0};
};

// Chat-completions-style JSON over HTTP. Field names and the response text
// location are configurable per provider profile.
struct HttpProfile {
  std::string model_id;    // identifier used in reports and cache keys
  std::string base_url;    // e.g. "https://api.example.com" or "http://127.0.0.1:8080"
  std::string path = "/v1/chat/completions";
  std::string model_name;  // wire value of the model field; defaults to model_id
  std::string api_key_env; // environment variable holding the bearer token
  std::map<std::string, std::string> extra_headers;
  std::string field_model = "model";
  std::string field_messages = "messages";
  std::string field_temperature = "temperature";
  std::string field_top_p = "top_p";
  std::string field_max_tokens = "max_tokens";
  std::string response_text_pointer = "/choices/0/message/content";
  int max_attempts = 3;
  int retry_base_ms = 250;
  int timeout_s = 120;
};

class HttpBackend : public Backend {
 public:
  HttpBackend(HttpProfile profile, std::shared_ptr<RateLimiter> limiter);
  std::string model_id() const override { return profile_.model_id; }
  std::string complete(const ChatRequest& request, const std::string& cache_key) override;

 private:
  HttpProfile profile_;
  std::shared_ptr<RateLimiter> limiter_;
};

// One sample at `sample_index`: consults the cache, asks the backend on a
// miss, records the raw response verbatim, applies code extraction
// (extraction failure leaves extracted_code absent, it is not an error).
// Throws TransportError when the backend fails after its bounded retries.
Completion generate_one(const std::string& problem_id, const prompt::PromptBundle& bundle,
                        const SamplingConfig& cfg, Backend& backend, int sample_index,
                        const CompletionCache* cache = nullptr);

// Samples cfg.n_samples completions (one request per sample, indices
// 0..n-1) via generate_one.
std::vector<Completion> generate(const std::string& problem_id,
                                 const prompt::PromptBundle& bundle,
                                 const SamplingConfig& cfg, Backend& backend,
                                 const CompletionCache* cache = nullptr);

}  // namespace rtleval::llm
