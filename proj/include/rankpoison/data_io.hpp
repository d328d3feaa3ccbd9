#pragma once

// Data plumbing: synthetic comparison data with a planted ground truth,
// ballot ingestion in a small strict-order format, and CSV persistence for
// datasets and score vectors.
//
// File formats
//   comparison CSV : header "i,j,weight", one row per slot with weight > 0,
//                    0-based item indices, nonnegative integer weights.
//   ballot file    : header "n=<int>", then lines "count: a > b > c".
//   scores CSV     : header "item,theta".
//
// Synthetic vote placement: consistent votes land uniformly at random (with
// replacement) on slots agreeing with the planted order, noisy votes
// likewise on conflicting slots. The noisy count is round-half-even of
// noise_fraction * total_votes. Same seed, same bytes.

#include <cctype>
#include <charconv>
#include <cstdint>
#include <fstream>
#include <random>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "rankpoison/core.hpp"

namespace rankpoison {

class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& path, int line, const std::string& what)
      : std::runtime_error(path + ":" + std::to_string(line) + ": " + what),
        line_(line) {}

  int line() const { return line_; }

 private:
  int line_;
};

struct SyntheticConfig {
  int n = 10;
  std::int64_t total_votes = 2000;
  double noise_fraction = 0.0;  // in [0, 1)
  std::uint64_t seed = 0;

  void validate() const {
    if (n < 2) throw std::invalid_argument("SyntheticConfig: n >= 2 required");
    if (total_votes < 1)
      throw std::invalid_argument("SyntheticConfig: total_votes >= 1 required");
    if (!(noise_fraction >= 0.0 && noise_fraction < 1.0))
      throw std::invalid_argument("SyntheticConfig: noise_fraction in [0,1) required");
  }
};

struct SyntheticData {
  ComparisonDataset data;
  RankingList ground_truth;
};

// Plants a uniformly random total order and spreads total_votes over the
// pair slots; exactly round-half-even(noise_fraction * total_votes) of them
// land on slots conflicting with the planted order.
inline SyntheticData generate_synthetic(const SyntheticConfig& cfg) {
  cfg.validate();
  std::mt19937_64 rng(cfg.seed);

  // Fisher-Yates for the planted order.
  std::vector<int> order(cfg.n);
  std::iota(order.begin(), order.end(), 0);
  for (int i = cfg.n - 1; i > 0; --i) {
    const auto j = draw_below(rng, i + 1);
    std::swap(order[i], order[j]);
  }
  RankingList truth = RankingList::from_order(std::move(order));

  std::vector<std::size_t> consistent, conflicting;
  for (std::size_t e = 0; e < num_slots(cfg.n); ++e) {
    const auto [i, j] = slot_pair(cfg.n, e);
    (truth.rank_of[i] < truth.rank_of[j] ? consistent : conflicting).push_back(e);
  }

  const std::int64_t noisy = round_half_even(cfg.noise_fraction *
                                             static_cast<double>(cfg.total_votes));
  Weights w(num_slots(cfg.n), 0);
  for (std::int64_t v = 0; v < cfg.total_votes - noisy; ++v)
    ++w[consistent[draw_below(rng, static_cast<std::int64_t>(consistent.size()))]];
  for (std::int64_t v = 0; v < noisy; ++v)
    ++w[conflicting[draw_below(rng, static_cast<std::int64_t>(conflicting.size()))]];

  return SyntheticData{ComparisonDataset(cfg.n, std::move(w)), std::move(truth)};
}

struct Ballot {
  std::vector<int> order;  // strict order over a subset, best first
  std::int64_t count = 1;
};

struct BallotFile {
  int n = 0;
  std::vector<Ballot> orders;
};

namespace detail {
inline std::string strip(const std::string& s) {
  std::size_t a = 0, b = s.size();
  while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
  while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
  return s.substr(a, b - a);
}

inline bool parse_int(const std::string& s, std::int64_t& out) {
  const std::string t = strip(s);
  if (t.empty()) return false;
  const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
  return ec == std::errc{} && ptr == t.data() + t.size();
}
}  // namespace detail

// Reads the "n=<int>" / "count: a > b > c" ballot format. Ties or
// indifference are not representable and malformed lines are rejected with
// their line number. Full PrefLib files need a one-line converter first,
// see the README.
inline BallotFile read_ballot_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open ballot file: " + path);
  BallotFile out;
  std::string line;
  int lineno = 0;
  bool have_header = false;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = detail::strip(line);
    if (t.empty() || t[0] == '#') continue;
    if (!have_header) {
      if (t.rfind("n=", 0) != 0)
        throw ParseError(path, lineno, "expected header line n=<int>");
      std::int64_t n = 0;
      if (!detail::parse_int(t.substr(2), n) || n < 2)
        throw ParseError(path, lineno, "bad item count in header");
      out.n = static_cast<int>(n);
      have_header = true;
      continue;
    }
    const auto colon = t.find(':');
    if (colon == std::string::npos)
      throw ParseError(path, lineno, "expected 'count: a > b > ...'");
    Ballot ballot;
    if (!detail::parse_int(t.substr(0, colon), ballot.count) || ballot.count < 1)
      throw ParseError(path, lineno, "bad multiplicity count");
    std::string items = t.substr(colon + 1);
    std::size_t pos = 0;
    while (pos <= items.size()) {
      const auto next = items.find('>', pos);
      const std::string tok =
          items.substr(pos, next == std::string::npos ? std::string::npos : next - pos);
      std::int64_t item = 0;
      if (!detail::parse_int(tok, item) || item < 0)
        throw ParseError(path, lineno, "bad item id '" + detail::strip(tok) + "'");
      ballot.order.push_back(static_cast<int>(item));
      if (next == std::string::npos) break;
      pos = next + 1;
    }
    if (ballot.order.empty())
      throw ParseError(path, lineno, "empty ballot");
    for (std::size_t a = 0; a < ballot.order.size(); ++a)
      for (std::size_t b = a + 1; b < ballot.order.size(); ++b)
        if (ballot.order[a] == ballot.order[b])
          throw ParseError(path, lineno, "duplicate item in ballot");
    out.orders.push_back(std::move(ballot));
  }
  if (!have_header) throw ParseError(path, lineno, "missing n=<int> header");
  return out;
}

// Each ballot of length k contributes count votes to each of its
// k(k-1)/2 implied ordered pairs; weights accumulate across ballots.
inline ComparisonDataset ingest_ballots(const BallotFile& file, int n) {
  Weights w(num_slots(n), 0);
  for (const auto& ballot : file.orders) {
    for (int item : ballot.order)
      if (item >= n)
        throw std::invalid_argument("ingest_ballots: item id " +
                                    std::to_string(item) + " >= n");
    for (std::size_t a = 0; a < ballot.order.size(); ++a)
      for (std::size_t b = a + 1; b < ballot.order.size(); ++b)
        w[slot_index(n, ballot.order[a], ballot.order[b])] += ballot.count;
  }
  return ComparisonDataset(n, std::move(w));
}

inline void write_dataset(const ComparisonDataset& data, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write dataset: " + path);
  out << "i,j,weight\n";
  for (std::size_t e = 0; e < data.slot_count(); ++e) {
    if (data.weights()[e] == 0) continue;
    const auto [i, j] = slot_pair(data.item_count(), e);
    out << i << ',' << j << ',' << data.weights()[e] << '\n';
  }
}

namespace detail {
struct CsvRow {
  int i, j;
  std::int64_t w;
};

inline std::vector<CsvRow> read_dataset_rows(const std::string& path, int& max_index) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open dataset: " + path);
  std::string line;
  int lineno = 0;
  if (!std::getline(in, line) || strip(line) != "i,j,weight")
    throw ParseError(path, 1, "missing i,j,weight header");
  lineno = 1;
  std::vector<CsvRow> rows;
  max_index = -1;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = strip(line);
    if (t.empty()) continue;
    std::istringstream ss(t);
    std::string fi, fj, fw;
    if (!std::getline(ss, fi, ',') || !std::getline(ss, fj, ',') ||
        !std::getline(ss, fw))
      throw ParseError(path, lineno, "expected i,j,weight row");
    std::int64_t i = 0, j = 0, w = 0;
    if (!parse_int(fi, i) || !parse_int(fj, j) || !parse_int(fw, w))
      throw ParseError(path, lineno, "non-integer field");
    if (i < 0 || j < 0) throw ParseError(path, lineno, "negative item index");
    if (i == j) throw ParseError(path, lineno, "self-pair (i == j) forbidden");
    if (w < 0) throw ParseError(path, lineno, "negative weight");
    rows.push_back({static_cast<int>(i), static_cast<int>(j), w});
    max_index = std::max({max_index, static_cast<int>(i), static_cast<int>(j)});
  }
  return rows;
}
}  // namespace detail

// Reads a comparison CSV for a known item count; absent slots are zero.
inline ComparisonDataset read_dataset(const std::string& path, int n) {
  int max_index = -1;
  const auto rows = detail::read_dataset_rows(path, max_index);
  if (max_index >= n)
    throw std::invalid_argument("read_dataset: item index " +
                                std::to_string(max_index) + " >= n");
  Weights w(num_slots(n), 0);
  for (const auto& row : rows) w[slot_index(n, row.i, row.j)] += row.w;
  return ComparisonDataset(n, std::move(w));
}

// As above with n inferred as max index + 1.
inline ComparisonDataset read_dataset(const std::string& path) {
  int max_index = -1;
  const auto rows = detail::read_dataset_rows(path, max_index);
  const int n = std::max(2, max_index + 1);
  Weights w(num_slots(n), 0);
  for (const auto& row : rows) w[slot_index(n, row.i, row.j)] += row.w;
  return ComparisonDataset(n, std::move(w));
}

inline void write_scores(const ScoreVector& scores, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write scores: " + path);
  out.precision(17);
  out << "item,theta\n";
  for (std::size_t i = 0; i < scores.size(); ++i)
    out << i << ',' << scores.theta[i] << '\n';
}

inline ScoreVector read_scores(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scores: " + path);
  std::string line;
  if (!std::getline(in, line) || detail::strip(line) != "item,theta")
    throw ParseError(path, 1, "missing item,theta header");
  std::vector<std::pair<int, double>> entries;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = detail::strip(line);
    if (t.empty()) continue;
    std::istringstream ss(t);
    std::string fi, ft;
    if (!std::getline(ss, fi, ',') || !std::getline(ss, ft))
      throw ParseError(path, lineno, "expected item,theta row");
    std::int64_t item = 0;
    if (!detail::parse_int(fi, item) || item < 0)
      throw ParseError(path, lineno, "bad item id");
    try {
      entries.emplace_back(static_cast<int>(item), std::stod(detail::strip(ft)));
    } catch (const std::exception&) {
      throw ParseError(path, lineno, "bad theta value");
    }
  }
  std::vector<double> theta(entries.size(), 0.0);
  for (const auto& [item, value] : entries) {
    if (item >= static_cast<int>(theta.size()))
      throw std::invalid_argument("read_scores: item ids must be 0..n-1");
    theta[item] = value;
  }
  return ScoreVector(std::move(theta));
}

// Keeps a uniform sample of the individual votes (without replacement);
// used to emulate the observed-subset protocol of the recommendation
// experiments.
inline ComparisonDataset subsample_votes(const ComparisonDataset& data,
                                         double fraction, std::uint64_t seed) {
  if (!(fraction >= 0.0 && fraction <= 1.0))
    throw std::invalid_argument("subsample_votes: fraction in [0,1]");
  const std::int64_t total = data.total_votes();
  std::int64_t keep = round_half_even(fraction * static_cast<double>(total));
  std::mt19937_64 rng(seed);
  Weights remaining = data.weights();
  Weights out(data.slot_count(), 0);
  std::int64_t pool = total;
  // Draw `keep` votes one by one from the shrinking pool.
  for (; keep > 0 && pool > 0; --keep, --pool) {
    std::int64_t r = draw_below(rng, pool);
    for (std::size_t e = 0; e < remaining.size(); ++e) {
      if (r < remaining[e]) {
        --remaining[e];
        ++out[e];
        break;
      }
      r -= remaining[e];
    }
  }
  return ComparisonDataset(data.item_count(), std::move(out));
}

}  // namespace rankpoison
