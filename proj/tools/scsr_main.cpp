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
//
// Command-line front end: solve a case with any of the implemented methods,
// evaluate a stored solution, or run the parameter studies.

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <random>
#include <fstream>
#include <iostream>
#include <thread>

#include "scsr/baselines.hpp"
#include "scsr/benders.hpp"
#include "scsr/bundle_io.hpp"
#include "scsr/evaluator.hpp"
#include "scsr/hmmp.hpp"
#include "scsr/scsr_model.hpp"

namespace fs = std::filesystem;
using namespace scsr;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in.good()) throw std::runtime_error("cannot open " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const fs::path& path, const std::string& text) {
  fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out.good()) throw std::runtime_error("cannot write " + path.string());
}

void check_backend_env() {
  if (const char* backend = std::getenv("SCSR_SOLVER")) {
    if (std::string(backend) != "internal") {
      throw std::runtime_error(
          "unknown SCSR_SOLVER backend: " + std::string(backend) +
          " (available: internal)");
    }
  }
}

struct SolveArgs {
  std::string case_path;
  std::string method = "hmmp";
  int max_split = 0;
  std::string objective = "standard";
  double alpha = 0.0;
  double prob_busbar = 1.0;
  double gap = 0.01;
  double time_limit = 600.0;
  int workers = 0;
  std::uint64_t seed = 1;
  std::string out_dir = "out";
  bool include_radial = false;
};

int run_solve(const SolveArgs& a) {
  Network net = parse_case(read_file(a.case_path));
  ModelConfig mc;
  mc.max_splits = a.max_split;
  ObjectiveConfig oc;
  if (a.objective == "standard") {
    oc.mode = ObjectiveMode::Standard;
  } else if (a.objective == "prob") {
    oc.mode = ObjectiveMode::Probabilistic;
  } else if (a.objective == "fixdisp") {
    oc.mode = ObjectiveMode::FixedDispatch;
  } else if (a.objective == "fixcost") {
    oc.mode = ObjectiveMode::FixedCostCap;
    oc.alpha = a.alpha;
  } else {
    throw CLI::ValidationError("--objective", "unknown objective " + a.objective);
  }
  KindProbabilities probs;
  probs.busbar = a.prob_busbar;
  ContingencySet cs = build_contingency_set(net, a.include_radial, probs);
  const int workers =
      a.workers > 0 ? a.workers
                    : static_cast<int>(std::thread::hardware_concurrency());

  SolutionBundle bundle;
  RunTrace trace;
  if (a.method == "org") {
    SolveOptions so;
    so.rel_gap = a.gap;
    so.time_limit = a.time_limit;
    OrgResult r = solve_org_mip(net, cs, mc, oc, so);
    bundle = std::move(r.bundle);
    trace = std::move(r.trace);
  } else if (a.method == "bd-c" || a.method == "bd-h") {
    BdOptions bo;
    bo.variant =
        a.method == "bd-c" ? BdVariant::Conventional : BdVariant::HeuristicCuts;
    bo.eps_optimality = a.gap;
    bo.time_limit = a.time_limit;
    bo.workers = workers;
    BdResult r = run_bd(net, cs, mc, oc, bo);
    bundle = std::move(r.bundle);
    trace = std::move(r.trace);
  } else if (a.method == "hmmp") {
    HmmpOptions ho;
    ho.eps_optimality = a.gap;
    ho.time_limit = a.time_limit;
    ho.workers = workers;
    HmmpResult r = run_hmmp(net, cs, mc, oc, ho);
    bundle = std::move(r.bundle);
    trace = std::move(r.trace);
  } else if (a.method == "1opt" || a.method == "seq") {
    BaselineOptions bo;
    bo.time_limit = a.time_limit;
    bo.workers = workers;
    BaselineResult r = a.method == "1opt" ? run_one_opt(net, cs, mc, oc, bo)
                                          : run_seq(net, cs, mc, oc, {}, bo);
    bundle = std::move(r.bundle);
    trace = std::move(r.trace);
  } else {
    throw CLI::ValidationError("--method", "unknown method " + a.method);
  }

  const fs::path out(a.out_dir);
  if (bundle.status == SolveStatus::Infeasible) {
    std::cout << "status: infeasible\n";
    return 2;
  }
  if (bundle.topology.coupler_closed.empty()) {
    std::cout << "status: " << to_string(bundle.status)
              << " (no incumbent)\n";
    return 3;
  }
  write_file(out / "solution.json", bundle_to_json(net, bundle));
  write_file(out / "trace.tsv", trace.to_tsv());
  MetricsReport metrics = evaluate_solution(net, bundle, cs, mc,
                                            std::numeric_limits<double>::
                                                quiet_NaN(),
                                            workers);
  write_file(out / "metrics.tsv", metrics.to_tsv());
  std::cout << "method: " << bundle.method << "\n"
            << "status: " << to_string(bundle.status) << "\n"
            << "objective: " << bundle.objective << "\n"
            << "bound: " << bundle.best_bound << "\n"
            << "splits: " << bundle.topology.num_splits() << "\n"
            << "wall_seconds: " << bundle.wall_seconds << "\n"
            << "artifacts: " << (out / "solution.json").string() << "\n";
  return 0;
}

int run_evaluate(const std::string& case_path, const std::string& solution_path,
                 const std::string& reference_path, const std::string& out_dir,
                 int workers) {
  Network net = parse_case(read_file(case_path));
  SolutionBundle bundle = bundle_from_json(net, read_file(solution_path));
  ContingencySet cs = build_contingency_set(net, false);
  double reference = std::numeric_limits<double>::quiet_NaN();
  if (!reference_path.empty()) {
    SolutionBundle ref = bundle_from_json(net, read_file(reference_path));
    reference = ref.objective;
  }
  MetricsReport rep = evaluate_solution(net, bundle, cs, {}, reference, workers);
  std::cout << rep.to_tsv();
  if (!rep.infeasible_contingencies.empty()) {
    std::cout << "infeasible contingencies:\n";
    for (const auto& id : rep.infeasible_contingencies)
      std::cout << "  " << id << "\n";
  }
  if (!out_dir.empty()) {
    write_file(fs::path(out_dir) / "metrics.tsv", rep.to_tsv());
  }
  return 0;
}

struct StudyArgs {
  std::string case_path;
  std::string study;
  int samples = 20;
  std::string profile;
  std::vector<double> prob_grid = {0.0, 0.01, 0.1, 1.0};
  std::vector<double> alpha_grid = {0.0, 0.01, 0.05};
  std::uint64_t seed = 1;
  int workers = 0;
  int max_split = 0;
  double time_limit = 600.0;
  std::string out_dir = "out";
};

int run_study(const StudyArgs& a) {
  Network net = parse_case(read_file(a.case_path));
  ModelConfig mc;
  mc.max_splits = a.max_split;
  const int workers =
      a.workers > 0 ? a.workers
                    : static_cast<int>(std::thread::hardware_concurrency());
  const fs::path out(a.out_dir);

  if (a.study == "line-removal") {
    auto scenarios = sample_loads(net, 1.6, 2.8, 0.75, a.samples, a.seed);
    std::vector<int> nonradial;
    for (int e = 0; e < static_cast<int>(net.branches.size()); ++e)
      if (!net.branches[e].is_radial) nonradial.push_back(e);
    std::mt19937_64 rng(a.seed ^ 0x9e3779b97f4a7c15ull);
    std::vector<int> removals(scenarios.size());
    for (auto& r : removals)
      r = nonradial[static_cast<size_t>(rng() % nonradial.size())];
    StudyOptions so;
    so.workers = workers;
    so.seed = a.seed;
    StudyReport rep = study_line_removal(net, scenarios, removals, mc, so);
    write_file(out / "line_removal.tsv", rep.to_tsv());
    std::cout << rep.to_tsv();
    return 0;
  }
  if (a.study == "day-ahead") {
    std::vector<double> profile;
    if (a.profile.empty()) {
      // Default daily shape peaking at hour 11.
      for (int h = 0; h < 24; ++h)
        profile.push_back(0.7 + 0.3 * std::exp(-0.5 * (h - 11.0) * (h - 11.0) /
                                               9.0));
    } else {
      std::istringstream is(a.profile);
      std::string tok;
      while (std::getline(is, tok, ',')) profile.push_back(std::stod(tok));
    }
    StudyOptions so;
    so.workers = workers;
    ScheduleReport rep = study_day_ahead(net, profile, mc, so);
    write_file(out / "day_ahead.tsv", rep.to_tsv());
    std::cout << rep.to_tsv();
    return 0;
  }
  if (a.study == "prob-sweep" || a.study == "alpha-sweep") {
    std::ostringstream os;
    const bool prob = a.study == "prob-sweep";
    os << (prob ? "p_busbar" : "alpha")
       << "\tobjective\tbound\tshedding_cost\n";
    for (double v : prob ? a.prob_grid : a.alpha_grid) {
      ObjectiveConfig oc;
      KindProbabilities probs;
      if (prob) {
        oc.mode = ObjectiveMode::Probabilistic;
        probs.busbar = v;
      } else {
        oc.mode = ObjectiveMode::FixedCostCap;
        oc.alpha = v;
      }
      ContingencySet cs = build_contingency_set(net, false, probs);
      HmmpOptions ho;
      ho.workers = workers;
      ho.time_limit = a.time_limit;
      HmmpResult r = run_hmmp(net, cs, mc, oc, ho);
      os << v << "\t" << r.bundle.objective << "\t" << r.lb << "\t"
         << r.bundle.shedding_cost << "\n";
    }
    write_file(out / (a.study + ".tsv"), os.str());
    std::cout << os.str();
    return 0;
  }
  throw CLI::ValidationError("--study", "unknown study " + a.study);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Security-constrained substation reconfiguration"};
  app.require_subcommand(1);

  SolveArgs sa;
  CLI::App* solve = app.add_subcommand("solve", "solve a case");
  solve->add_option("--case", sa.case_path, "case file")->required();
  solve->add_option("--method", sa.method, "org|bd-c|bd-h|1opt|seq|hmmp");
  solve->add_option("--max-split", sa.max_split, "splitting budget");
  solve->add_option("--objective", sa.objective,
                    "standard|prob|fixdisp|fixcost");
  solve->add_option("--alpha", sa.alpha, "fixcost headroom");
  solve->add_option("--prob-busbar", sa.prob_busbar, "busbar outage probability");
  solve->add_option("--gap", sa.gap, "relative optimality gap");
  solve->add_option("--time-limit", sa.time_limit, "seconds");
  solve->add_option("--workers", sa.workers, "worker threads (0 = cores)");
  solve->add_option("--seed", sa.seed, "random seed");
  solve->add_option("--out", sa.out_dir, "output directory");
  solve->add_flag("--include-radial", sa.include_radial,
                  "keep radial lines in the contingency list");

  std::string ev_case, ev_solution, ev_reference, ev_out;
  int ev_workers = 0;
  CLI::App* evaluate = app.add_subcommand("evaluate", "evaluate a solution");
  evaluate->add_option("--case", ev_case, "case file")->required();
  evaluate->add_option("--solution", ev_solution, "solution document")->required();
  evaluate->add_option("--reference", ev_reference, "reference solution");
  evaluate->add_option("--out", ev_out, "output directory");
  evaluate->add_option("--workers", ev_workers, "worker threads");

  StudyArgs st;
  CLI::App* study = app.add_subcommand("study", "parameter studies");
  study->add_option("--case", st.case_path, "case file")->required();
  study->add_option("--study", st.study,
                    "line-removal|day-ahead|prob-sweep|alpha-sweep")
      ->required();
  study->add_option("--samples", st.samples, "scenario count");
  study->add_option("--profile", st.profile, "24 comma-separated load factors");
  study->add_option("--prob-grid", st.prob_grid, "busbar probabilities");
  study->add_option("--alpha-grid", st.alpha_grid, "cost headrooms");
  study->add_option("--seed", st.seed, "random seed");
  study->add_option("--workers", st.workers, "worker threads");
  study->add_option("--max-split", st.max_split, "splitting budget");
  study->add_option("--time-limit", st.time_limit, "seconds per solve");
  study->add_option("--out", st.out_dir, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    check_backend_env();
    if (solve->parsed()) return run_solve(sa);
    if (evaluate->parsed())
      return run_evaluate(ev_case, ev_solution, ev_reference, ev_out, ev_workers);
    if (study->parsed()) return run_study(st);
  } catch (const CaseError& e) {
    std::cerr << "case error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
