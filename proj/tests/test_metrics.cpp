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

#include <cmath>
#include <stdexcept>

#include "doctest.h"
#include "json.hpp"
#include "oracles.hpp"

using rtleval::metrics::aggregate;
using rtleval::metrics::build_report;
using rtleval::metrics::EvalReport;
using rtleval::metrics::GroupKey;
using rtleval::metrics::pass_at_k;
using rtleval::metrics::ProblemScore;
namespace oracles = rtleval::test_oracles;

TEST_CASE("pass_at_k known values") {
  CHECK(pass_at_k(20, 20, 10) == 1.0);
  CHECK(pass_at_k(20, 0, 5) == 0.0);
  CHECK(pass_at_k(2, 1, 1) == 0.5);
  // Brute force over all C(5,3)=10 subsets: exactly 1 contains no passer.
  CHECK(pass_at_k(5, 2, 3) == doctest::Approx(0.9).epsilon(1e-12));
  CHECK(pass_at_k(20, 1, 1) == doctest::Approx(0.05).epsilon(1e-15));
}

TEST_CASE("pass_at_k matches brute-force enumeration for small n") {
  for (int n = 1; n <= 9; n++)
    for (int c = 0; c <= n; c++)
      for (int k = 1; k <= n; k++) {
        double expect = oracles::brute_force_pass_at_k(n, c, k);
        CHECK(std::fabs(pass_at_k(n, c, k) - expect) < 1e-12);
      }
}

TEST_CASE("pass_at_k matches exact binomial form up to n = 60") {
  for (int n = 1; n <= 60; n++)
    for (int c = 0; c <= n; c++)
      for (int k = 1; k <= n; k++) {
        double expect = oracles::binomial_pass_at_k(n, c, k);
        CHECK(std::fabs(pass_at_k(n, c, k) - expect) < 1e-12);
      }
}

TEST_CASE("pass_at_k at k = 1 is exactly c/n") {
  for (int n = 1; n <= 60; n++)
    for (int c = 0; c <= n; c++)
      CHECK(pass_at_k(n, c, 1) == static_cast<double>(c) / n);
}

TEST_CASE("pass_at_k monotonicity") {
  for (int n = 1; n <= 20; n++)
    for (int k = 1; k <= n; k++)
      for (int c = 1; c <= n; c++)
        CHECK(pass_at_k(n, c, k) >= pass_at_k(n, c - 1, k));
  for (int n = 1; n <= 20; n++)
    for (int c = 0; c <= n; c++)
      for (int k = 2; k <= n; k++)
        CHECK(pass_at_k(n, c, k) >= pass_at_k(n, c, k - 1));
}

TEST_CASE("pass_at_k rejects bad arguments") {
  CHECK_THROWS_AS(pass_at_k(5, 2, 6), std::invalid_argument);
  CHECK_THROWS_AS(pass_at_k(5, 6, 1), std::invalid_argument);
  CHECK_THROWS_AS(pass_at_k(5, -1, 1), std::invalid_argument);
  CHECK_THROWS_AS(pass_at_k(5, 2, 0), std::invalid_argument);
  CHECK_THROWS_AS(pass_at_k(0, 0, 1), std::invalid_argument);
}

TEST_CASE("aggregate means") {
  CHECK(aggregate({{"a", 20, 20}, {"b", 20, 0}}, 1) == 0.5);
  CHECK(aggregate({{"a", 20, 12}}, 1) == doctest::Approx(0.6).epsilon(1e-15));
  CHECK(aggregate({{"a", 2, 1}, {"b", 5, 2}}, 1) == doctest::Approx(0.45).epsilon(1e-12));
}

TEST_CASE("aggregate errors") {
  CHECK_THROWS_AS(aggregate({}, 1), std::invalid_argument);
  CHECK_THROWS_AS(aggregate({{"a", 3, 1}}, 4), std::invalid_argument);
}

TEST_CASE("aggregate is permutation-invariant") {
  std::vector<ProblemScore> scores = {{"a", 20, 3}, {"b", 20, 17}, {"c", 20, 0}, {"d", 20, 20}};
  std::vector<ProblemScore> shuffled = {scores[2], scores[0], scores[3], scores[1]};
  for (int k : {1, 5, 10})
    CHECK(aggregate(scores, k) == aggregate(shuffled, k));
}

TEST_CASE("build_report computes cells from counts") {
  std::map<GroupKey, std::vector<ProblemScore>> counts;
  counts[{"model-a", "direct_verilog"}] = {{"p1", 20, 10}, {"p2", 20, 20}};
  counts[{"model-a", "hls_cpp"}] = {{"p1", 20, 18}, {"p2", 20, 20}};
  EvalReport r = build_report(counts, {1, 5, 10});

  CHECK(r.rows.size() == 2);
  for (const auto& [key, ks] : r.rows) CHECK(ks.size() == 3);

  double expect_p1 = oracles::binomial_pass_at_k(20, 10, 5);
  double expect = (expect_p1 + 1.0) / 2.0;
  CHECK(r.rows[{"model-a", "direct_verilog"}][5] == doctest::Approx(expect).epsilon(1e-12));
  CHECK(r.rows[{"model-a", "direct_verilog"}][1] == doctest::Approx(0.75).epsilon(1e-12));

  // n=20 satisfies n >= 2k for k in {1,5,10}; no variance warnings.
  CHECK(r.warnings.empty());
}

TEST_CASE("build_report warns when n < 2k") {
  std::map<GroupKey, std::vector<ProblemScore>> counts;
  counts[{"m", "hls_cpp"}] = {{"p1", 12, 6}};
  EvalReport r = build_report(counts, {1, 10});
  REQUIRE(r.warnings.size() == 1);
  CHECK(r.warnings[0].find("n=12") != std::string::npos);
}

TEST_CASE("format_text rounds to two decimals and keeps table shape") {
  std::map<GroupKey, std::vector<ProblemScore>> counts;
  counts[{"model-a", "direct_verilog"}] = {{"p1", 20, 7}};
  counts[{"model-a", "hls_cpp"}] = {{"p1", 20, 13}};
  EvalReport r = build_report(counts, {1, 5, 10});
  std::string text = rtleval::metrics::format_text(r);
  CHECK(text.find("0.35") != std::string::npos);  // 7/20
  CHECK(text.find("0.65") != std::string::npos);  // 13/20
  CHECK(text.find("NL to Verilog") != std::string::npos);
  CHECK(text.find("NL to Verilog via HLS") != std::string::npos);
  CHECK(text.find("pass@10") != std::string::npos);
}

TEST_CASE("format_machine is valid JSON with full precision") {
  std::map<GroupKey, std::vector<ProblemScore>> counts;
  counts[{"m", "hls_cpp"}] = {{"p1", 3, 1}};
  EvalReport r = build_report(counts, {1});
  auto j = nlohmann::json::parse(rtleval::metrics::format_machine(r));
  CHECK(j["schema"] == "rtleval-report-v1");
  CHECK(j["rows"]["m"]["hls_cpp"]["1"].get<double>() == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(j["per_problem"]["m"]["hls_cpp"]["p1"]["n"] == 3);
  CHECK(j["per_problem"]["m"]["hls_cpp"]["p1"]["c"] == 1);
}

TEST_CASE("format_csv long format") {
  std::map<GroupKey, std::vector<ProblemScore>> counts;
  counts[{"m", "hls_cpp"}] = {{"p1", 4, 2}};
  EvalReport r = build_report(counts, {1, 2});
  std::string csv = rtleval::metrics::format_csv(r);
  CHECK(csv.find("model,mode,k,pass_at_k\n") == 0);
  CHECK(csv.find("m,hls_cpp,1,0.5\n") != std::string::npos);
}
