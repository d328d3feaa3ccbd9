#pragma once

// Experiment driver: runs an attack over a budget grid and seed list,
// re-aggregates, scores the damage and emits plot-ready files.
//
// Outputs in out_dir:
//   table.csv            method,budget,kendall_tau,r_rank,p_at_k,ap_at_k,ndcg_at_k
//                        (one row per budget, medians across seeds)
//   changes_<budget>.csv slot,delta for the first seed of that budget
//   conflict_counts.csv  budget,seed,consistent,conflicting
//   timing.csv           budget,seed,attack_ms (median of 3 repetitions)
//   report.json          everything, per cell
//
// Cells are independent and run concurrently; all files are written
// single-threaded afterwards. Rerunning a spec reproduces every non-timing
// column bit for bit.

#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <future>
#include <optional>
#include <string>
#include <vector>

#include "rankpoison/aggregate.hpp"
#include "rankpoison/attack_dynamic.hpp"
#include "rankpoison/attack_random.hpp"
#include "rankpoison/attack_static.hpp"
#include "rankpoison/core.hpp"
#include "rankpoison/data_io.hpp"
#include "rankpoison/metrics.hpp"

namespace rankpoison {

struct ExperimentSpec {
  // Dataset source: synthetic config, or a comparison CSV plus a truth
  // scores CSV.
  std::optional<SyntheticConfig> synthetic;
  std::string data_path;
  std::string truth_path;

  std::string method = "static";  // static | dynamic | random | none
  std::vector<double> budgets = {1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 1e-1, 1.0};
  double kappa = 0.0;
  Rounding rounding = Rounding::nearest;
  int k = 3;
  std::vector<std::uint64_t> seeds = {0};
  int rounds = 1;
  bool robust = false;
  double lambda = 0.1;
  double s1 = 0.05, s2 = 0.05;  // random baseline knobs
  std::string out_dir = ".";

  void validate() const {
    if (budgets.empty()) throw std::invalid_argument("ExperimentSpec: empty budget grid");
    if (seeds.empty()) throw std::invalid_argument("ExperimentSpec: empty seed list");
    if (method != "static" && method != "dynamic" && method != "random" &&
        method != "none")
      throw std::invalid_argument("ExperimentSpec: unknown method " + method);
    if (!synthetic && data_path.empty())
      throw std::invalid_argument("ExperimentSpec: no dataset source");
    if (!data_path.empty() && truth_path.empty())
      throw std::invalid_argument("ExperimentSpec: file datasets need a truth file");
  }
};

struct CellOutcome {
  std::string budget_label;
  double budget = 0.0;
  std::uint64_t seed = 0;
  bool ok = false;
  std::string error;
  MetricReport metrics;
  double attack_ms = 0.0;
  std::vector<std::int64_t> delta;  // poisoned minus original weights
  std::int64_t consistent = 0;
  std::int64_t conflicting = 0;
  std::int64_t original_total = 0;
  std::int64_t poisoned_total = 0;
};

struct ExperimentOutput {
  std::vector<CellOutcome> cells;
  std::filesystem::path table_path;
};

inline nlohmann::json metric_report_to_json(const MetricReport& r) {
  return nlohmann::json{{"kendall_tau", r.kendall_tau}, {"r_rank", r.r_rank},
                        {"p_at_k", r.p_at_k},           {"ap_at_k", r.ap_at_k},
                        {"ndcg_at_k", r.ndcg_at_k},     {"k", r.k}};
}

namespace detail {

inline double median(std::vector<double> v) {
  if (v.empty()) return std::nan("");
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 == 1 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

inline std::string budget_label(double b) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", b);
  return buf;
}

struct CellInput {
  ComparisonDataset data{2};
  RankingList truth;
};

inline CellInput cell_input(const ExperimentSpec& spec, std::uint64_t seed) {
  if (spec.synthetic) {
    SyntheticConfig cfg = *spec.synthetic;
    cfg.seed = seed;
    SyntheticData s = generate_synthetic(cfg);
    return {std::move(s.data), std::move(s.ground_truth)};
  }
  CellInput in;
  in.data = read_dataset(spec.data_path);
  in.truth = rank_from_scores(read_scores(spec.truth_path));
  if (in.truth.size() != static_cast<std::size_t>(in.data.item_count()))
    throw std::invalid_argument("experiment: truth size does not match dataset");
  return in;
}

inline CellOutcome run_cell(const ExperimentSpec& spec, double budget,
                            std::uint64_t seed) {
  CellOutcome cell;
  cell.budget = budget;
  cell.budget_label = spec.method == "random"
                          ? budget_label(spec.s1) + "/" + budget_label(spec.s2)
                          : budget_label(budget);
  cell.seed = seed;
  try {
    const CellInput in = cell_input(spec, seed);
    cell.original_total = in.data.total_votes();

    ComparisonDataset poisoned = in.data;
    if (spec.method != "none") {
      // Median of 3 repeated runs; the result itself is deterministic.
      std::vector<double> times;
      for (int rep = 0; rep < 3; ++rep) {
        const auto t0 = std::chrono::steady_clock::now();
        if (spec.method == "static") {
          StaticAttackConfig cfg;
          cfg.alpha = budget;
          cfg.kappa = spec.kappa;
          cfg.rounding = spec.rounding;
          poisoned = in.data.with_weights(run_static_attack(in.data, cfg).poisoned_weights);
        } else if (spec.method == "dynamic") {
          DynamicAttackConfig cfg;
          cfg.rho = budget;
          cfg.kappa = spec.kappa;
          cfg.rounding = spec.rounding;
          cfg.max_rounds = spec.rounds;
          cfg.robust = spec.robust;
          cfg.lambda = spec.lambda;
          poisoned = run_dynamic_attack(in.data, cfg).poisoned;
        } else {
          RandomAttackConfig cfg;
          cfg.s1 = spec.s1;
          cfg.s2 = spec.s2;
          cfg.seed = seed;
          poisoned = run_random_attack(in.data, cfg).poisoned;
        }
        const auto t1 = std::chrono::steady_clock::now();
        times.push_back(std::chrono::duration<double, std::milli>(t1 - t0).count());
      }
      cell.attack_ms = median(times);
    }

    cell.poisoned_total = poisoned.total_votes();
    cell.delta.resize(poisoned.slot_count());
    for (std::size_t e = 0; e < poisoned.slot_count(); ++e)
      cell.delta[e] = poisoned.weights()[e] - in.data.weights()[e];

    const ConsistencySplit split = split_by_consistency(poisoned, in.truth);
    cell.consistent = split.consistent;
    cell.conflicting = split.conflicting;

    const RankingList ranked = rank_from_scores(aggregate(poisoned));
    cell.metrics = evaluate_ranking(in.truth, ranked, spec.k);
    cell.ok = true;
  } catch (const std::exception& err) {
    cell.ok = false;
    cell.error = err.what();
  }
  return cell;
}

}  // namespace detail

inline ExperimentOutput run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  namespace fs = std::filesystem;
  fs::create_directories(spec.out_dir);

  // Random and none ignore the budget grid.
  std::vector<double> budgets = spec.budgets;
  if (spec.method == "random" || spec.method == "none") budgets = {0.0};

  std::vector<std::future<CellOutcome>> futures;
  for (double budget : budgets)
    for (std::uint64_t seed : spec.seeds)
      futures.push_back(std::async(std::launch::async, detail::run_cell, spec,
                                   budget, seed));

  ExperimentOutput out;
  for (auto& f : futures) out.cells.push_back(f.get());

  // table.csv: medians across seeds per budget, row order follows the grid.
  out.table_path = fs::path(spec.out_dir) / "table.csv";
  {
    std::ofstream table(out.table_path);
    table << "method,budget,kendall_tau,r_rank,p_at_k,ap_at_k,ndcg_at_k\n";
    for (double budget : budgets) {
      std::vector<double> tau, rr, p, ap, ndcg;
      std::string label;
      for (const auto& cell : out.cells) {
        if (cell.budget != budget || !cell.ok) continue;
        label = cell.budget_label;
        tau.push_back(cell.metrics.kendall_tau);
        rr.push_back(cell.metrics.r_rank);
        p.push_back(cell.metrics.p_at_k);
        ap.push_back(cell.metrics.ap_at_k);
        ndcg.push_back(cell.metrics.ndcg_at_k);
      }
      table << spec.method << ',' << label << ',' << detail::median(tau) << ','
            << detail::median(rr) << ',' << detail::median(p) << ','
            << detail::median(ap) << ',' << detail::median(ndcg) << '\n';
    }
  }

  {
    std::ofstream counts(fs::path(spec.out_dir) / "conflict_counts.csv");
    counts << "budget,seed,consistent,conflicting\n";
    for (const auto& cell : out.cells)
      if (cell.ok)
        counts << cell.budget_label << ',' << cell.seed << ',' << cell.consistent
               << ',' << cell.conflicting << '\n';
  }

  {
    std::ofstream timing(fs::path(spec.out_dir) / "timing.csv");
    timing << "budget,seed,attack_ms\n";
    for (const auto& cell : out.cells)
      if (cell.ok)
        timing << cell.budget_label << ',' << cell.seed << ',' << cell.attack_ms
               << '\n';
  }

  if (spec.method != "none") {
    for (double budget : budgets) {
      for (const auto& cell : out.cells) {
        if (cell.budget != budget || cell.seed != spec.seeds.front() || !cell.ok)
          continue;
        std::ofstream changes(fs::path(spec.out_dir) /
                              ("changes_" + detail::budget_label(budget) + ".csv"));
        changes << "slot,delta\n";
        for (std::size_t e = 0; e < cell.delta.size(); ++e)
          changes << e << ',' << cell.delta[e] << '\n';
        break;
      }
    }
  }

  {
    nlohmann::json report;
    report["method"] = spec.method;
    report["kappa"] = spec.kappa;
    report["rounding"] = to_string(spec.rounding);
    report["k"] = spec.k;
    report["cells"] = nlohmann::json::array();
    for (const auto& cell : out.cells) {
      nlohmann::json c{{"budget", cell.budget_label},
                       {"seed", cell.seed},
                       {"ok", cell.ok}};
      if (cell.ok) {
        c["metrics"] = metric_report_to_json(cell.metrics);
        c["attack_ms"] = cell.attack_ms;
        c["consistent"] = cell.consistent;
        c["conflicting"] = cell.conflicting;
        c["original_total"] = cell.original_total;
        c["poisoned_total"] = cell.poisoned_total;
      } else {
        c["error"] = cell.error;
      }
      report["cells"].push_back(std::move(c));
    }
    std::ofstream json_out(fs::path(spec.out_dir) / "report.json");
    json_out << report.dump(2) << '\n';
  }

  return out;
}

}  // namespace rankpoison
