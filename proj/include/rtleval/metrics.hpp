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

#include <map>
#include <string>
#include <vector>

namespace rtleval::metrics {

// Unbiased estimator of the probability that at least one of k samples
// drawn (without replacement) from n generated samples, of which c pass,
// is a passing sample:
//
//   1 - C(n-c, k) / C(n, k)
//
// evaluated in the numerically stable product form
// 1 - prod_{i=n-c+1..n} (1 - k/i). Returns exactly 1 when n - c < k and
// exactly c/n when k == 1 (the product telescopes).
//
// Throws std::invalid_argument unless 0 <= c <= n and 1 <= k <= n.
double pass_at_k(int n, int c, int k);

struct ProblemScore {
  std::string problem_id;
  int n = 0;  // samples generated
  int c = 0;  // samples passing
};

// Arithmetic mean of per-problem pass@k. Throws std::invalid_argument on an
// empty list or any score with n < k.
double aggregate(const std::vector<ProblemScore>& scores, int k);

struct GroupKey {
  std::string model_id;
  std::string mode;  // "hls_cpp" or "direct_verilog"
  bool operator<(const GroupKey& o) const {
    return model_id != o.model_id ? model_id < o.model_id : mode < o.mode;
  }
};

struct EvalReport {
  // (model, mode) -> k -> mean pass@k over problems.
  std::map<GroupKey, std::map<int, double>> rows;
  // (model, mode) -> per-problem raw counts.
  std::map<GroupKey, std::vector<ProblemScore>> per_problem;
  std::vector<int> k_values;
  // Row order for presentation (config order of models).
  std::vector<std::string> model_order;
  std::vector<std::string> mode_order;

  // Deterministic metadata; wall-clock timestamps live in the run ledger,
  // not here, so machine-readable reports are reproducible byte-for-byte.
  std::string config_digest;
  std::string dataset_digest;
  std::string dataset_version;
  std::vector<std::string> excluded;  // "model/mode/problem: reason"
  std::vector<std::string> warnings;
};

// Builds the report rows from per-group (problem -> (n, c)) counts.
// Every group must be complete (n >= max k). Emits a warning (not an error)
// when n < 2k for any requested k.
EvalReport build_report(
    const std::map<GroupKey, std::vector<ProblemScore>>& per_problem,
    const std::vector<int>& k_values);

// Emitters. Text mirrors the two-mode comparison table layout; cells are
// rounded to 2 decimals only here. CSV and JSON keep full precision.
std::string format_text(const EvalReport& report);
std::string format_csv(const EvalReport& report);
std::string format_machine(const EvalReport& report);  // JSON

}  // namespace rtleval::metrics
