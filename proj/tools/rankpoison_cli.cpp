// Command-line front end: data generation, ballot ingestion, aggregation,
// the three attacks and the budget-sweep experiment driver.
//
// Every subcommand reads and writes the documented CSV/JSON formats and
// exits nonzero with a one-line diagnostic on error. A key = value config
// file can preload any flag; command-line values win.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "rankpoison/aggregate.hpp"
#include "rankpoison/attack_dynamic.hpp"
#include "rankpoison/attack_random.hpp"
#include "rankpoison/attack_static.hpp"
#include "rankpoison/core.hpp"
#include "rankpoison/data_io.hpp"
#include "rankpoison/experiment.hpp"
#include "rankpoison/metrics.hpp"

namespace {

using namespace rankpoison;

ComparisonDataset load_dataset(const std::string& path, int n) {
  return n > 0 ? read_dataset(path, n) : read_dataset(path);
}

ScoreVector truth_scores_from_ranking(const RankingList& truth) {
  std::vector<double> theta(truth.size());
  for (std::size_t i = 0; i < truth.size(); ++i)
    theta[i] = static_cast<double>(truth.size() - truth.rank_of[i]);
  return ScoreVector(std::move(theta));
}

int run(int argc, char** argv) {
  CLI::App app{"poisoning attacks on pairwise rank aggregation"};
  app.set_config("--config", "", "key = value config file; CLI flags override");
  app.require_subcommand(1);

  // ---- generate ----------------------------------------------------------
  auto* generate = app.add_subcommand("generate", "synthetic comparisons with a planted order");
  int gen_n = 10;
  std::int64_t gen_votes = 2000;
  double gen_noise = 0.0;
  std::uint64_t gen_seed = 0;
  std::string gen_out, gen_truth_out;
  generate->add_option("--n", gen_n, "item count");
  generate->add_option("--votes", gen_votes, "total vote count");
  generate->add_option("--noise", gen_noise, "fraction of conflicting votes");
  generate->add_option("--seed", gen_seed, "rng seed");
  generate->add_option("-o,--out", gen_out, "comparison CSV path")->required();
  generate->add_option("--truth-out", gen_truth_out, "planted order as a scores CSV");

  // ---- ingest -------------------------------------------------------------
  auto* ingest = app.add_subcommand("ingest", "ballot file to comparison CSV");
  std::string ingest_in, ingest_out;
  ingest->add_option("ballots", ingest_in, "ballot file")->required();
  ingest->add_option("-o,--out", ingest_out, "comparison CSV path")->required();

  // ---- aggregate ----------------------------------------------------------
  auto* agg = app.add_subcommand("aggregate", "estimate scores from comparisons");
  std::string agg_in, agg_out;
  int agg_n = 0;
  double agg_delta = 1e-8;
  bool agg_robust = false;
  double agg_lambda = 0.1;
  agg->add_option("data", agg_in, "comparison CSV")->required();
  agg->add_option("-o,--out", agg_out, "scores CSV path")->required();
  agg->add_option("--n", agg_n, "item count (default: inferred)");
  agg->add_option("--delta", agg_delta, "ridge parameter");
  agg->add_flag("--robust", agg_robust, "outlier-aware fit");
  agg->add_option("--lambda", agg_lambda, "outlier sparsity weight");

  // ---- attack -------------------------------------------------------------
  auto* attack = app.add_subcommand("attack", "poison a comparison dataset");
  std::string atk_in, atk_out, atk_json, atk_method = "static";
  int atk_n = 0, atk_rounds = 1;
  double atk_budget = 1e-3, atk_kappa = 0.0, atk_epsilon = 1e-10;
  double atk_s1 = 0.05, atk_s2 = 0.05, atk_lambda = 0.1;
  std::uint64_t atk_seed = 0;
  std::string atk_rounding = "nearest";
  bool atk_robust = false;
  attack->add_option("data", atk_in, "comparison CSV")->required();
  attack->add_option("-o,--out", atk_out, "poisoned CSV path")->required();
  attack->add_option("--method", atk_method, "static | dynamic | random")
      ->check(CLI::IsMember({"static", "dynamic", "random"}));
  attack->add_option("--n", atk_n, "item count (default: inferred)");
  attack->add_option("--budget", atk_budget, "uncertainty budget (alpha or rho)");
  attack->add_option("--kappa", atk_kappa, "maximum toxic dosage");
  attack->add_option("--rounding", atk_rounding, "nearest | floor | ceil | largest-remainder");
  attack->add_option("--epsilon", atk_epsilon, "bisection accuracy (dynamic)");
  attack->add_option("--rounds", atk_rounds, "leader-follower rounds (dynamic)");
  attack->add_flag("--robust", atk_robust, "score with the outlier-aware ranker (dynamic)");
  attack->add_option("--lambda", atk_lambda, "outlier sparsity weight (dynamic robust)");
  attack->add_option("--s1", atk_s1, "inject fraction (random)");
  attack->add_option("--s2", atk_s2, "delete fraction (random)");
  attack->add_option("--seed", atk_seed, "rng seed (random)");
  attack->add_option("--json", atk_json, "write attack diagnostics JSON");

  // ---- evaluate -----------------------------------------------------------
  auto* evaluate = app.add_subcommand("evaluate", "score a ranking against the truth");
  std::string eval_truth, eval_scores, eval_out;
  int eval_k = 3;
  evaluate->add_option("--truth", eval_truth, "truth scores CSV")->required();
  evaluate->add_option("--scores", eval_scores, "estimated scores CSV")->required();
  evaluate->add_option("--k", eval_k, "cutoff for the top-k metrics");
  evaluate->add_option("-o,--out", eval_out, "metrics report JSON path");

  // ---- experiment ----------------------------------------------------------
  auto* experiment = app.add_subcommand("experiment", "budget sweep with table output");
  int exp_n = 10, exp_k = 3, exp_rounds = 1;
  std::int64_t exp_votes = 2000;
  double exp_noise = 0.0, exp_kappa = 0.0, exp_lambda = 0.1;
  double exp_s1 = 0.05, exp_s2 = 0.05;
  std::string exp_method = "static", exp_rounding = "nearest", exp_out_dir = "out";
  std::string exp_data, exp_truth;
  bool exp_robust = false;
  std::vector<double> exp_budgets{1e-6, 1e-5, 1e-4, 1e-3, 1e-2, 1e-1, 1.0};
  std::vector<std::uint64_t> exp_seeds{0};
  experiment->add_option("--n", exp_n, "item count (synthetic)");
  experiment->add_option("--votes", exp_votes, "total votes (synthetic)");
  experiment->add_option("--noise", exp_noise, "noise fraction (synthetic)");
  experiment->add_option("--seeds", exp_seeds, "seed list")->expected(-1);
  experiment->add_option("--method", exp_method, "static | dynamic | random | none")
      ->check(CLI::IsMember({"static", "dynamic", "random", "none"}));
  experiment->add_option("--budgets", exp_budgets, "budget grid")->expected(-1);
  experiment->add_option("--kappa", exp_kappa, "maximum toxic dosage");
  experiment->add_option("--rounding", exp_rounding, "rounding mode");
  experiment->add_option("--k", exp_k, "metrics cutoff");
  experiment->add_option("--rounds", exp_rounds, "leader-follower rounds");
  experiment->add_flag("--robust", exp_robust, "robust ranker inside the dynamic loop");
  experiment->add_option("--lambda", exp_lambda, "outlier sparsity weight");
  experiment->add_option("--s1", exp_s1, "inject fraction (random)");
  experiment->add_option("--s2", exp_s2, "delete fraction (random)");
  experiment->add_option("--out-dir", exp_out_dir, "output directory");
  experiment->add_option("--data", exp_data, "comparison CSV instead of synthetic data");
  experiment->add_option("--truth", exp_truth, "truth scores CSV for --data");

  CLI11_PARSE(app, argc, argv);

  if (generate->parsed()) {
    SyntheticConfig cfg;
    cfg.n = gen_n;
    cfg.total_votes = gen_votes;
    cfg.noise_fraction = gen_noise;
    cfg.seed = gen_seed;
    const SyntheticData s = generate_synthetic(cfg);
    write_dataset(s.data, gen_out);
    if (!gen_truth_out.empty())
      write_scores(truth_scores_from_ranking(s.ground_truth), gen_truth_out);
    return 0;
  }

  if (ingest->parsed()) {
    const BallotFile file = read_ballot_file(ingest_in);
    write_dataset(ingest_ballots(file, file.n), ingest_out);
    return 0;
  }

  if (agg->parsed()) {
    const ComparisonDataset data = load_dataset(agg_in, agg_n);
    ScoreVector scores;
    if (agg_robust) {
      RobustConfig rc;
      rc.lambda = agg_lambda;
      scores = aggregate_robust(data, rc, RidgeConfig{agg_delta}).scores;
    } else {
      scores = aggregate(data, RidgeConfig{agg_delta});
    }
    write_scores(scores, agg_out);
    return 0;
  }

  if (attack->parsed()) {
    const ComparisonDataset data = load_dataset(atk_in, atk_n);
    nlohmann::json diag;
    diag["method"] = atk_method;
    if (atk_method == "static") {
      StaticAttackConfig cfg;
      cfg.alpha = atk_budget;
      cfg.kappa = atk_kappa;
      cfg.rounding = rounding_from_string(atk_rounding);
      const StaticAttackResult res = run_static_attack(data, cfg);
      write_dataset(data.with_weights(res.poisoned_weights), atk_out);
      diag["theta_star"] = res.theta_star.theta;
      diag["lambda_star"] = res.lambda_star;
      diag["q_star"] = res.q_star.values();
      diag["objective"] = res.objective;
      diag["degenerate"] = res.degenerate;
    } else if (atk_method == "dynamic") {
      DynamicAttackConfig cfg;
      cfg.rho = atk_budget;
      cfg.kappa = atk_kappa;
      cfg.epsilon = atk_epsilon;
      cfg.max_rounds = atk_rounds;
      cfg.rounding = rounding_from_string(atk_rounding);
      cfg.robust = atk_robust;
      cfg.lambda = atk_lambda;
      const DynamicAttackResult res = run_dynamic_attack(data, cfg);
      write_dataset(res.poisoned, atk_out);
      diag["mu"] = res.last_worst_case.mu;
      diag["eta"] = res.last_worst_case.eta;
      diag["support"] = res.last_worst_case.support;
      diag["rounds"] = res.rounds;
      diag["objective"] = res.last_worst_case.objective;
    } else {
      RandomAttackConfig cfg;
      cfg.s1 = atk_s1;
      cfg.s2 = atk_s2;
      cfg.seed = atk_seed;
      const RandomAttackResult res = run_random_attack(data, cfg);
      write_dataset(res.poisoned, atk_out);
      diag["injected"] = res.injected;
      diag["deleted"] = res.deleted;
      diag["truncated"] = res.truncated;
    }
    diag["poisoned_weights_path"] = atk_out;
    if (!atk_json.empty()) {
      std::ofstream out(atk_json);
      out << diag.dump(2) << '\n';
    }
    return 0;
  }

  if (evaluate->parsed()) {
    const RankingList truth = rank_from_scores(read_scores(eval_truth));
    const RankingList estimate = rank_from_scores(read_scores(eval_scores));
    const MetricReport report = evaluate_ranking(truth, estimate, eval_k);
    const nlohmann::json json = metric_report_to_json(report);
    std::cout << json.dump(2) << '\n';
    if (!eval_out.empty()) {
      std::ofstream out(eval_out);
      out << json.dump(2) << '\n';
    }
    return 0;
  }

  if (experiment->parsed()) {
    ExperimentSpec spec;
    if (exp_data.empty()) {
      SyntheticConfig synth;
      synth.n = exp_n;
      synth.total_votes = exp_votes;
      synth.noise_fraction = exp_noise;
      spec.synthetic = synth;
    } else {
      spec.data_path = exp_data;
      spec.truth_path = exp_truth;
    }
    spec.method = exp_method;
    spec.budgets = exp_budgets;
    spec.kappa = exp_kappa;
    spec.rounding = rounding_from_string(exp_rounding);
    spec.k = exp_k;
    spec.seeds = exp_seeds;
    spec.rounds = exp_rounds;
    spec.robust = exp_robust;
    spec.lambda = exp_lambda;
    spec.s1 = exp_s1;
    spec.s2 = exp_s2;
    spec.out_dir = exp_out_dir;
    const ExperimentOutput out = run_experiment(spec);
    std::size_t failures = 0;
    for (const auto& cell : out.cells)
      if (!cell.ok) ++failures;
    std::cout << "wrote " << out.table_path.string() << " (" << out.cells.size()
              << " cells, " << failures << " failed)\n";
    return failures == 0 ? 0 : 1;
  }

  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const std::exception& err) {
    std::fprintf(stderr, "error: %s\n", err.what());
    return 1;
  }
}
