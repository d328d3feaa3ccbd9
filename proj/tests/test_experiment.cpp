#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <fstream>

#include "rankpoison/experiment.hpp"

using namespace rankpoison;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name)
      : path(fs::temp_directory_path() /
             ("rankpoison_exp_" + std::to_string(::getpid()) + "_" + name)) {}
  ~TempDir() { fs::remove_all(path); }
};

ExperimentSpec small_spec(const fs::path& out) {
  ExperimentSpec spec;
  SyntheticConfig synth;
  synth.n = 6;
  synth.total_votes = 400;
  synth.noise_fraction = 0.0;
  spec.synthetic = synth;
  spec.method = "static";
  spec.budgets = {1e-6, 1e-2};
  spec.seeds = {1, 2};
  spec.k = 3;
  spec.out_dir = out.string();
  return spec;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  REQUIRE(in.good());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

TEST_CASE("experiment emits the full file set") {
  TempDir dir("files");
  const ExperimentOutput out = run_experiment(small_spec(dir.path));
  REQUIRE(out.cells.size() == 4);
  for (const auto& cell : out.cells) CHECK(cell.ok);

  CHECK(fs::exists(dir.path / "table.csv"));
  CHECK(fs::exists(dir.path / "conflict_counts.csv"));
  CHECK(fs::exists(dir.path / "timing.csv"));
  CHECK(fs::exists(dir.path / "report.json"));
  CHECK(fs::exists(dir.path / "changes_1e-06.csv"));
  CHECK(fs::exists(dir.path / "changes_0.01.csv"));

  const std::string table = slurp(dir.path / "table.csv");
  CHECK(table.rfind("method,budget,kendall_tau,r_rank,p_at_k,ap_at_k,ndcg_at_k", 0) == 0);

  const auto json = nlohmann::json::parse(slurp(dir.path / "report.json"));
  REQUIRE(json["cells"].size() == 4);
  CHECK(json["cells"][0]["metrics"].contains("kendall_tau"));
  CHECK(json["cells"][0]["metrics"].contains("ndcg_at_k"));
}

TEST_CASE("non-timing outputs are reproducible") {
  TempDir a("rep_a"), b("rep_b");
  run_experiment(small_spec(a.path));
  run_experiment(small_spec(b.path));
  CHECK(slurp(a.path / "table.csv") == slurp(b.path / "table.csv"));
  CHECK(slurp(a.path / "conflict_counts.csv") == slurp(b.path / "conflict_counts.csv"));
  CHECK(slurp(a.path / "changes_0.01.csv") == slurp(b.path / "changes_0.01.csv"));
}

TEST_CASE("emitted change files re-parse as slot deltas") {
  TempDir dir("reparse");
  const ExperimentOutput out = run_experiment(small_spec(dir.path));
  std::ifstream in(dir.path / "changes_0.01.csv");
  std::string header;
  std::getline(in, header);
  CHECK(header == "slot,delta");
  std::size_t rows = 0;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) ++rows;
  CHECK(rows == num_slots(6));
}

TEST_CASE("method none reports the original aggregation") {
  TempDir dir("none");
  ExperimentSpec spec = small_spec(dir.path);
  spec.method = "none";
  const ExperimentOutput out = run_experiment(spec);
  REQUIRE(out.cells.size() == 2);  // one per seed
  for (const auto& cell : out.cells) {
    CHECK(cell.ok);
    CHECK(cell.metrics.kendall_tau == 1.0);  // noiseless synthetic
    CHECK(cell.poisoned_total == cell.original_total);
  }
}

TEST_CASE("random method uses the fraction pair as its budget label") {
  TempDir dir("random");
  ExperimentSpec spec = small_spec(dir.path);
  spec.method = "random";
  spec.s1 = 0.05;
  spec.s2 = 0.05;
  const ExperimentOutput out = run_experiment(spec);
  REQUIRE_FALSE(out.cells.empty());
  CHECK(out.cells.front().budget_label == "0.05/0.05");
}

TEST_CASE("file-backed datasets require a truth file") {
  ExperimentSpec spec;
  spec.data_path = "somewhere.csv";
  CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
}

TEST_CASE("dynamic cells satisfy the dosage bound with exact rounding") {
  TempDir dir("dyn");
  ExperimentSpec spec = small_spec(dir.path);
  spec.method = "dynamic";
  spec.budgets = {1e-3, 1e-1};
  spec.rounding = Rounding::largest_remainder;
  const ExperimentOutput out = run_experiment(spec);
  for (const auto& cell : out.cells) {
    REQUIRE(cell.ok);
    CHECK(cell.poisoned_total <= cell.original_total);
  }
}
