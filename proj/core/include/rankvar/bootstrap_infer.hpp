#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rankvar/dataset.hpp"
#include "rankvar/sim_engine.hpp"

namespace rankvar {

enum class StatKind { mean, median, proportion, mann_whitney };

std::string_view to_string(StatKind k) noexcept;
StatKind parse_stat_kind(std::string_view text);

// max{ #(x_i < y_j), #(x_i > y_j) } over all pairs; tied pairs count toward neither.
// Throws ArgumentError if either sample is empty.
double mann_whitney(std::span<const double> x, std::span<const double> y);

// mean, or median with the lower-middle convention for even sizes. Other kinds need
// dataset context and throw ArgumentError here.
double location_stat(StatKind kind, std::span<const double> data);
double proportion(std::uint64_t successes, std::uint64_t trials);

// One statistic per item. mean/median need Replicates, proportion needs Binomial,
// mann_whitney needs TwoClass (class 0 as x, class 1 as y); anything else throws.
std::vector<double> item_statistics(const ItemDataset& ds, StatKind kind);

struct ItemRanking {
  std::vector<std::size_t> order;  // item indices, rank 1 first
  std::vector<std::size_t> ranks;  // ranks[item] in 1..p
};

// Dense ranks 1..p; ties broken by ascending item index.
ItemRanking rank_items(std::span<const double> stats, Direction direction);

struct RankPredictionInterval {
  std::string item_id;
  std::size_t point_rank = 0;
  std::size_t lower = 0;
  std::size_t upper = 0;
  double level = 0.9;
  std::size_t B = 0;
  // Resample size used for this item.
  std::size_t m = 0;
  friend bool operator==(const RankPredictionInterval&, const RankPredictionInterval&) = default;
};

struct BootstrapOptions {
  StatKind stat = StatKind::mean;
  std::size_t B = 1000;
  double level = 0.9;
  // Resample size per item; defaults to each item's own n_j (or trials, or m rows).
  std::optional<std::size_t> m;
  Direction direction = Direction::ascending;
  std::uint64_t seed = 0;
  // Replicates only: enumerate every equally likely resample instead of drawing B.
  bool exhaustive = false;
  unsigned workers = 0;
};

struct BootstrapResult {
  std::vector<RankPredictionInterval> intervals;  // dataset item order
  std::vector<std::string> warnings;
  // Number of resamples behind each interval (B, or the enumeration size).
  std::size_t resamples = 0;
};

inline constexpr std::size_t kMaxResampleSize = 10'000'000;
inline constexpr std::size_t kMaxExhaustiveResamples = 1'000'000;

// Percentile prediction intervals for ranks. Every item is resampled independently
// with replacement, conditional on the data (Binomial items redraw successes from
// Binomial(m, successes/trials); TwoClass redraws observation rows within each class).
// Interval endpoints are the ceil((1-level)/2 * B)-th and ceil((1+level)/2 * B)-th
// order statistics of the item's bootstrap ranks.
BootstrapResult bootstrap_rank_intervals(const ItemDataset& ds, const BootstrapOptions& opts);

struct TopSetOptions {
  StatKind stat = StatKind::mann_whitney;
  std::vector<std::size_t> j_list{1};
  std::size_t B = 1000;
  std::size_t n_prime = 0;
  Direction direction = Direction::descending;
  std::uint64_t seed = 0;
  unsigned workers = 0;
};

struct TopSetRow {
  std::size_t j = 0;
  std::size_t hits = 0;
  double probability = 0.0;
};

struct TopSetResult {
  std::vector<TopSetRow> rows;  // in j_list order
  std::size_t class0_size = 0, class1_size = 0;
};

// Fraction of bootstrap datasets of n_prime rows whose top-j item set equals the top-j
// set of the full original data. Rows are drawn with replacement within each class;
// class sizes follow the original proportions by largest remainder, each at least 1.
TopSetResult top_set_probability(const TwoClass& ds, const TopSetOptions& opts);

// Largest-remainder split of total into two classes in proportion m0:m1, each >= 1.
std::pair<std::size_t, std::size_t> split_class_sizes(std::size_t total, std::size_t m0,
                                                      std::size_t m1);

}  // namespace rankvar
