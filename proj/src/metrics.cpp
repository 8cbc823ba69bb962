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

#include "rtleval/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <set>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace rtleval::metrics {

double pass_at_k(int n, int c, int k) {
  if (n < 1 || c < 0 || c > n || k < 1 || k > n)
    throw std::invalid_argument("pass_at_k: need 0 <= c <= n and 1 <= k <= n, got n=" +
                                std::to_string(n) + " c=" + std::to_string(c) +
                                " k=" + std::to_string(k));
  if (n - c < k) return 1.0;
  if (k == 1) return static_cast<double>(c) / n;  // telescoped product
  double prod = 1.0;
  for (int i = n - c + 1; i <= n; i++)
    prod *= static_cast<double>(i - k) / static_cast<double>(i);
  return 1.0 - prod;
}

double aggregate(const std::vector<ProblemScore>& scores, int k) {
  if (scores.empty())
    throw std::invalid_argument("aggregate: empty score list");
  double sum = 0.0;
  for (const auto& s : scores) {
    if (s.n < k)
      throw std::invalid_argument("aggregate: problem " + s.problem_id + " has n=" +
                                  std::to_string(s.n) + " < k=" + std::to_string(k));
    sum += pass_at_k(s.n, s.c, k);
  }
  return sum / static_cast<double>(scores.size());
}

EvalReport build_report(
    const std::map<GroupKey, std::vector<ProblemScore>>& per_problem,
    const std::vector<int>& k_values) {
  EvalReport report;
  report.per_problem = per_problem;
  report.k_values = k_values;
  std::set<std::string> seen_models, seen_modes;
  for (const auto& [key, scores] : per_problem) {
    if (seen_models.insert(key.model_id).second)
      report.model_order.push_back(key.model_id);
    if (seen_modes.insert(key.mode).second)
      report.mode_order.push_back(key.mode);
    for (int k : k_values) {
      report.rows[key][k] = aggregate(scores, k);
      for (const auto& s : scores) {
        if (s.n < 2 * k) {
          report.warnings.push_back(
              "high-variance estimate: problem " + s.problem_id + " (" + key.model_id +
              ", " + key.mode + ") has n=" + std::to_string(s.n) +
              " < 2k=" + std::to_string(2 * k));
        }
      }
    }
  }
  std::sort(report.model_order.begin(), report.model_order.end());
  std::sort(report.mode_order.begin(), report.mode_order.end());
  std::sort(report.warnings.begin(), report.warnings.end());
  report.warnings.erase(std::unique(report.warnings.begin(), report.warnings.end()),
                        report.warnings.end());
  return report;
}

static std::string mode_display_name(const std::string& mode) {
  if (mode == "direct_verilog") return "NL to Verilog";
  if (mode == "hls_cpp") return "NL to Verilog via HLS";
  return mode;
}

static std::string two_decimals(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

static std::string full_precision(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string format_text(const EvalReport& report) {
  // Column layout: model | per-mode group of pass@k columns.
  std::vector<std::string> modes = report.mode_order;
  // The two-mode comparison reads better with the direct route first.
  std::stable_sort(modes.begin(), modes.end(), [](const std::string& a, const std::string& b) {
    auto rank = [](const std::string& m) { return m == "direct_verilog" ? 0 : m == "hls_cpp" ? 1 : 2; };
    return rank(a) < rank(b);
  });

  size_t model_width = std::string("Model").size();
  for (const auto& m : report.model_order) model_width = std::max(model_width, m.size());

  const size_t cell_width = 9;  // "pass@10" + padding
  size_t group_width = cell_width * report.k_values.size();
  for (const auto& mode : modes)
    group_width = std::max(group_width, mode_display_name(mode).size() + 1);
  std::ostringstream out;

  auto pad = [](const std::string& s, size_t w) {
    std::string r = s;
    if (r.size() < w) r += std::string(w - r.size(), ' ');
    return r;
  };

  out << pad("Model", model_width) << " |";
  for (const auto& mode : modes)
    out << " " << pad(mode_display_name(mode), group_width) << "|";
  out << "\n";

  out << pad("", model_width) << " |";
  for (size_t mi = 0; mi < modes.size(); mi++) {
    std::string header;
    for (int k : report.k_values) header += pad("pass@" + std::to_string(k), cell_width);
    out << " " << pad(header, group_width) << "|";
  }
  out << "\n";

  out << std::string(model_width, '-') << "-+";
  for (size_t mi = 0; mi < modes.size(); mi++)
    out << std::string(group_width + 1, '-') << "+";
  out << "\n";

  for (const auto& model : report.model_order) {
    out << pad(model, model_width) << " |";
    for (const auto& mode : modes) {
      std::string cells;
      auto it = report.rows.find(GroupKey{model, mode});
      for (int k : report.k_values) {
        if (it != report.rows.end() && it->second.count(k))
          cells += pad(two_decimals(it->second.at(k)), cell_width);
        else
          cells += pad("-", cell_width);
      }
      out << " " << pad(cells, group_width) << "|";
    }
    out << "\n";
  }

  if (!report.excluded.empty()) {
    out << "\nExcluded (transport failures, not averaged):\n";
    for (const auto& e : report.excluded) out << "  " << e << "\n";
  }
  if (!report.warnings.empty()) {
    out << "\nWarnings:\n";
    for (const auto& w : report.warnings) out << "  " << w << "\n";
  }
  return out.str();
}

std::string format_csv(const EvalReport& report) {
  std::ostringstream out;
  out << "model,mode,k,pass_at_k\n";
  for (const auto& [key, ks] : report.rows)
    for (const auto& [k, v] : ks)
      out << key.model_id << "," << key.mode << "," << k << "," << full_precision(v) << "\n";
  return out.str();
}

std::string format_machine(const EvalReport& report) {
  nlohmann::json j;
  j["schema"] = "rtleval-report-v1";
  j["config_digest"] = report.config_digest;
  j["dataset_digest"] = report.dataset_digest;
  j["dataset_version"] = report.dataset_version;
  j["k_values"] = report.k_values;
  j["model_order"] = report.model_order;
  j["mode_order"] = report.mode_order;
  j["excluded"] = report.excluded;
  j["warnings"] = report.warnings;
  nlohmann::json rows = nlohmann::json::object();
  for (const auto& [key, ks] : report.rows) {
    nlohmann::json cell = nlohmann::json::object();
    for (const auto& [k, v] : ks) cell[std::to_string(k)] = v;
    rows[key.model_id][key.mode] = cell;
  }
  j["rows"] = rows;
  nlohmann::json per = nlohmann::json::object();
  for (const auto& [key, scores] : report.per_problem) {
    nlohmann::json group = nlohmann::json::object();
    for (const auto& s : scores) group[s.problem_id] = {{"n", s.n}, {"c", s.c}};
    per[key.model_id][key.mode] = group;
  }
  j["per_problem"] = per;
  return j.dump(2) + "\n";
}

}  // namespace rtleval::metrics
