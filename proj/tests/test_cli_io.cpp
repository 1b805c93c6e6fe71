// Copyright 2026 The SCSR Authors
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "scsr/bundle_io.hpp"
#include "scsr/evaluator.hpp"
#include "scsr/hmmp.hpp"
#include "test_nets.hpp"

using namespace scsr;
using namespace scsr::testnets;

TEST_CASE("solution documents round-trip byte-identically") {
  Network net = triangle();
  ContingencySet cs = build_contingency_set(net, false);
  HmmpResult r = run_hmmp(net, cs, {}, {}, {});
  REQUIRE(std::isfinite(r.ub));

  const std::string a = bundle_to_json(net, r.bundle);
  SolutionBundle parsed = bundle_from_json(net, a);
  const std::string b = bundle_to_json(net, parsed);
  CHECK(a == b);
  CHECK(parsed.topology == r.bundle.topology);
  CHECK(parsed.objective == doctest::Approx(r.bundle.objective));
}

TEST_CASE("evaluating a parsed solution matches the original objective") {
  Network net = triangle();
  ContingencySet cs = build_contingency_set(net, false);
  HmmpResult r = run_hmmp(net, cs, {}, {}, {});
  SolutionBundle parsed = bundle_from_json(net, bundle_to_json(net, r.bundle));
  ModelConfig mc;
  MetricsReport rep = evaluate_solution(net, parsed, cs, mc);
  CHECK(rep.objective ==
        doctest::Approx(r.bundle.objective)
            .epsilon(1e-6)
            .scale(1.0 + std::abs(r.bundle.objective)));
}

TEST_CASE("mismatched solution and case are rejected") {
  Network net = triangle();
  ContingencySet cs = build_contingency_set(net, false);
  HmmpResult r = run_hmmp(net, cs, {}, {}, {});
  const std::string doc = bundle_to_json(net, r.bundle);

  Network other = two_sub_gen_load();
  CHECK_THROWS(bundle_from_json(other, doc));
}

TEST_CASE("reference objective populates the improvement column") {
  Network net = triangle();
  ContingencySet cs = build_contingency_set(net, false);
  HmmpResult r = run_hmmp(net, cs, {}, {}, {});
  ModelConfig mc;
  MetricsReport rep =
      evaluate_solution(net, r.bundle, cs, mc, 2.0 * r.bundle.objective);
  CHECK(std::isfinite(rep.improvement_pct));
  CHECK(rep.improvement_pct > 0.0);  // reference is worse, so we improved
  CHECK(rep.to_tsv().find("-\t") == std::string::npos);
}

TEST_CASE("trace export carries the expected schema") {
  Network net = triangle();
  ContingencySet cs = build_contingency_set(net, false);
  HmmpResult r = run_hmmp(net, cs, {}, {}, {});
  const std::string tsv = r.trace.to_tsv();
  CHECK(tsv.find("iter\tlb\tub\tbest_ub\tcuts_feas\tcuts_opt\tsplits") !=
        std::string::npos);
  CHECK(std::count(tsv.begin(), tsv.end(), '\n') >= 2);
}
