#include "rankvar/bootstrap_infer.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "rankvar/error.hpp"
#include "rankvar/parallel.hpp"
#include "rankvar/random.hpp"

namespace rankvar {
namespace {

struct RankBefore {
  const double* values;
  Direction direction;
  bool operator()(std::size_t a, std::size_t b) const noexcept {
    const double va = values[a], vb = values[b];
    if (va != vb) return direction == Direction::ascending ? va < vb : va > vb;
    return a < b;
  }
};

// Writes ranks[item] (1-based) for the given statistics.
void fill_ranks(std::span<const double> stats, Direction direction, std::vector<std::size_t>& order,
                std::uint32_t* ranks) {
  order.resize(stats.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), RankBefore{stats.data(), direction});
  for (std::size_t pos = 0; pos < order.size(); ++pos)
    ranks[order[pos]] = static_cast<std::uint32_t>(pos + 1);
}

double median_in_place(std::vector<double>& v) {
  const auto mid = v.begin() + static_cast<std::ptrdiff_t>((v.size() - 1) / 2);
  std::nth_element(v.begin(), mid, v.end());
  return *mid;
}

double mean_of(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

// Mann-Whitney with y already sorted.
double mann_whitney_sorted(std::span<const double> x, std::span<const double> y_sorted) {
  double less = 0.0, greater = 0.0;  // #(x < y), #(x > y)
  const auto n2 = static_cast<double>(y_sorted.size());
  for (double xi : x) {
    const auto lo = std::lower_bound(y_sorted.begin(), y_sorted.end(), xi);
    const auto hi = std::upper_bound(lo, y_sorted.end(), xi);
    greater += static_cast<double>(lo - y_sorted.begin());
    less += n2 - static_cast<double>(hi - y_sorted.begin());
  }
  return std::max(less, greater);
}

// Index of the ceil(q * B)-th order statistic, 1-based and clamped to [1, B]. The small
// offset absorbs rounding in q * B when it should be an exact integer.
std::size_t order_stat_index(double q, std::size_t B) {
  const double k = std::ceil(q * static_cast<double>(B) - 1e-9);
  return static_cast<std::size_t>(std::clamp(k, 1.0, static_cast<double>(B)));
}

void check_kind(const ItemDataset& ds, StatKind kind) {
  const bool ok = std::visit(
      [kind](const auto& d) {
        using T = std::decay_t<decltype(d)>;
        if constexpr (std::is_same_v<T, Replicates>) {
          return kind == StatKind::mean || kind == StatKind::median;
        } else if constexpr (std::is_same_v<T, TwoClass>) {
          return kind == StatKind::mann_whitney;
        } else {
          return kind == StatKind::proportion;
        }
      },
      ds);
  if (!ok)
    throw ArgumentError("statistic '" + std::string(to_string(kind)) +
                        "' does not apply to this dataset format");
}

// Row indices of each class.
std::pair<std::vector<std::size_t>, std::vector<std::size_t>> class_rows(const TwoClass& ds) {
  std::pair<std::vector<std::size_t>, std::vector<std::size_t>> rows;
  for (std::size_t i = 0; i < ds.labels.size(); ++i)
    (ds.labels[i] ? rows.second : rows.first).push_back(i);
  return rows;
}

struct TwoClassScratch {
  std::vector<std::size_t> pick0, pick1;
  std::vector<double> x, y;
};

// Mann-Whitney for every item on the rows pick0 (class 0) and pick1 (class 1).
void two_class_stats(const TwoClass& ds, TwoClassScratch& s, std::span<double> out) {
  for (std::size_t j = 0; j < ds.items(); ++j) {
    const auto col = ds.column(j);
    s.x.clear();
    s.y.clear();
    for (auto r : s.pick0) s.x.push_back(col[r]);
    for (auto r : s.pick1) s.y.push_back(col[r]);
    std::sort(s.y.begin(), s.y.end());
    out[j] = mann_whitney_sorted(s.x, s.y);
  }
}

void draw_rows(RandomStream& stream, const std::vector<std::size_t>& pool, std::size_t count,
               std::vector<std::size_t>& out) {
  out.resize(count);
  for (auto& r : out) r = pool[stream.below(pool.size())];
}

std::vector<RankPredictionInterval> intervals_from_ranks(
    const std::vector<std::uint32_t>& ranks, std::size_t resamples,
    const std::vector<std::string>& ids, const std::vector<std::size_t>& point_ranks,
    const std::vector<std::size_t>& sizes, const BootstrapOptions& opts) {
  const std::size_t p = ids.size();
  const double alpha = 1.0 - opts.level;
  const std::size_t k_lo = order_stat_index(alpha / 2.0, resamples);
  const std::size_t k_hi = order_stat_index(1.0 - alpha / 2.0, resamples);
  std::vector<RankPredictionInterval> out(p);
  std::vector<std::uint32_t> column(resamples);
  for (std::size_t j = 0; j < p; ++j) {
    for (std::size_t b = 0; b < resamples; ++b) column[b] = ranks[b * p + j];
    std::sort(column.begin(), column.end());
    auto& iv = out[j];
    iv.item_id = ids[j];
    iv.point_rank = point_ranks[j];
    iv.lower = column[k_lo - 1];
    iv.upper = column[k_hi - 1];
    iv.level = opts.level;
    iv.B = resamples;
    iv.m = sizes[j];
  }
  return out;
}

BootstrapResult exhaustive_intervals(const Replicates& ds, const BootstrapOptions& opts,
                                     const std::vector<std::size_t>& point_ranks,
                                     const std::vector<std::size_t>& sizes) {
  const std::size_t p = ds.items.size();
  // Every ordered resample of each item, with its statistic.
  std::vector<std::vector<double>> item_stats(p);
  double total = 1.0;
  for (std::size_t j = 0; j < p; ++j) {
    const std::size_t nj = ds.items[j].samples.size();
    const double count = std::pow(static_cast<double>(nj), static_cast<double>(sizes[j]));
    total *= count;
    if (total > static_cast<double>(kMaxExhaustiveResamples))
      throw ResourceError("exhaustive bootstrap would enumerate more than " +
                          std::to_string(kMaxExhaustiveResamples) + " resamples");
    const auto cj = static_cast<std::size_t>(count);
    item_stats[j].reserve(cj);
    std::vector<std::size_t> digits(sizes[j], 0);
    std::vector<double> draw(sizes[j]);
    for (std::size_t c = 0; c < cj; ++c) {
      for (std::size_t d = 0; d < sizes[j]; ++d) draw[d] = ds.items[j].samples[digits[d]];
      item_stats[j].push_back(location_stat(opts.stat, draw));
      for (std::size_t d = 0; d < sizes[j] && ++digits[d] == nj; ++d) digits[d] = 0;
    }
  }
  const auto resamples = static_cast<std::size_t>(total);
  std::vector<std::uint32_t> ranks(resamples * p);
  std::vector<std::size_t> counter(p, 0), order;
  std::vector<double> stats(p);
  for (std::size_t c = 0; c < resamples; ++c) {
    for (std::size_t j = 0; j < p; ++j) stats[j] = item_stats[j][counter[j]];
    fill_ranks(stats, opts.direction, order, ranks.data() + c * p);
    for (std::size_t j = 0; j < p && ++counter[j] == item_stats[j].size(); ++j) counter[j] = 0;
  }
  BootstrapResult result;
  result.resamples = resamples;
  std::vector<std::string> ids;
  for (const auto& it : ds.items) ids.push_back(it.id);
  result.intervals = intervals_from_ranks(ranks, resamples, ids, point_ranks, sizes, opts);
  return result;
}

}  // namespace

std::string_view to_string(StatKind k) noexcept {
  switch (k) {
    case StatKind::mean: return "mean";
    case StatKind::median: return "median";
    case StatKind::proportion: return "proportion";
    case StatKind::mann_whitney: return "mann_whitney";
  }
  return "?";
}

StatKind parse_stat_kind(std::string_view text) {
  if (text == "mean") return StatKind::mean;
  if (text == "median") return StatKind::median;
  if (text == "proportion") return StatKind::proportion;
  if (text == "mann_whitney" || text == "mann-whitney" || text == "mw")
    return StatKind::mann_whitney;
  throw ArgumentError("unknown statistic '" + std::string(text) +
                      "' (expected mean|median|proportion|mann_whitney)");
}

double mann_whitney(std::span<const double> x, std::span<const double> y) {
  if (x.empty() || y.empty()) throw ArgumentError("mann_whitney needs two nonempty samples");
  std::vector<double> ys(y.begin(), y.end());
  std::sort(ys.begin(), ys.end());
  return mann_whitney_sorted(x, ys);
}

double location_stat(StatKind kind, std::span<const double> data) {
  if (data.empty()) throw ArgumentError("location statistic of an empty sample");
  switch (kind) {
    case StatKind::mean: return mean_of(data);
    case StatKind::median: {
      std::vector<double> copy(data.begin(), data.end());
      return median_in_place(copy);
    }
    default:
      throw ArgumentError("statistic '" + std::string(to_string(kind)) +
                          "' is not a location statistic of a single sample");
  }
}

double proportion(std::uint64_t successes, std::uint64_t trials) {
  if (trials == 0) throw ArgumentError("proportion with zero trials");
  if (successes > trials) throw ArgumentError("proportion with successes > trials");
  return static_cast<double>(successes) / static_cast<double>(trials);
}

std::vector<double> item_statistics(const ItemDataset& ds, StatKind kind) {
  check_kind(ds, kind);
  return std::visit(
      [kind](const auto& d) {
        using T = std::decay_t<decltype(d)>;
        std::vector<double> stats;
        if constexpr (std::is_same_v<T, Replicates>) {
          for (const auto& it : d.items) stats.push_back(location_stat(kind, it.samples));
        } else if constexpr (std::is_same_v<T, TwoClass>) {
          TwoClassScratch s;
          std::tie(s.pick0, s.pick1) = class_rows(d);
          if (s.pick0.empty() || s.pick1.empty())
            throw ArgumentError("mann_whitney needs both classes present");
          stats.resize(d.items());
          two_class_stats(d, s, stats);
        } else {
          for (const auto& it : d.items) stats.push_back(proportion(it.successes, it.trials));
        }
        return stats;
      },
      ds);
}

ItemRanking rank_items(std::span<const double> stats, Direction direction) {
  if (stats.empty()) throw ArgumentError("rank_items needs at least one statistic");
  ItemRanking r;
  std::vector<std::uint32_t> ranks(stats.size());
  fill_ranks(stats, direction, r.order, ranks.data());
  r.ranks.assign(ranks.begin(), ranks.end());
  return r;
}

std::pair<std::size_t, std::size_t> split_class_sizes(std::size_t total, std::size_t m0,
                                                      std::size_t m1) {
  if (total < 2) throw ArgumentError("resample size must be >= 2 to hold both classes");
  if (m0 == 0 || m1 == 0) throw ArgumentError("both classes must be present");
  const double share0 = static_cast<double>(total) * static_cast<double>(m0) /
                        static_cast<double>(m0 + m1);
  std::size_t n0 = static_cast<std::size_t>(std::floor(share0));
  std::size_t n1 = total - n0;
  // Largest remainder: the floor above hands class 1 the leftover unit; give it to
  // class 0 instead when class 0's fractional part is the larger one.
  const double frac0 = share0 - std::floor(share0);
  const double frac1 = 1.0 - frac0;
  if (frac0 > 0.0 && frac0 > frac1) {
    ++n0;
    --n1;
  }
  if (n0 == 0) {
    n0 = 1;
    --n1;
  }
  if (n1 == 0) {
    n1 = 1;
    --n0;
  }
  return {n0, n1};
}

BootstrapResult bootstrap_rank_intervals(const ItemDataset& ds, const BootstrapOptions& opts) {
  validate(ds);
  check_kind(ds, opts.stat);
  if (!(opts.level > 0.0 && opts.level < 1.0))
    throw ArgumentError("level must lie in (0,1)");
  if (opts.m) {
    if (*opts.m == 0) throw ArgumentError("resample size m must be >= 1");
    if (*opts.m > kMaxResampleSize)
      throw ResourceError("resample size m=" + std::to_string(*opts.m) + " exceeds cap " +
                          std::to_string(kMaxResampleSize));
  }

  const std::size_t p = item_count(ds);
  const std::vector<std::string> ids = item_ids(ds);
  const std::vector<double> point_stats = item_statistics(ds, opts.stat);
  const ItemRanking point = rank_items(point_stats, opts.direction);

  std::vector<std::size_t> sizes(p);
  std::visit(
      [&](const auto& d) {
        using T = std::decay_t<decltype(d)>;
        for (std::size_t j = 0; j < p; ++j) {
          if constexpr (std::is_same_v<T, Replicates>) {
            sizes[j] = opts.m.value_or(d.items[j].samples.size());
          } else if constexpr (std::is_same_v<T, TwoClass>) {
            sizes[j] = opts.m.value_or(d.observations());
          } else {
            sizes[j] = opts.m.value_or(d.items[j].trials);
          }
        }
      },
      ds);
  for (std::size_t s : sizes)
    if (s > kMaxResampleSize)
      throw ResourceError("resample size " + std::to_string(s) + " exceeds cap " +
                          std::to_string(kMaxResampleSize));

  if (opts.exhaustive) {
    const auto* reps = std::get_if<Replicates>(&ds);
    if (!reps) throw ArgumentError("exhaustive resampling is available for replicate data only");
    return exhaustive_intervals(*reps, opts, point.ranks, sizes);
  }

  if (opts.B < 1) throw ArgumentError("B must be >= 1");
  BootstrapResult result;
  if (opts.B < 100)
    result.warnings.push_back("B=" + std::to_string(opts.B) +
                              " is below 100; interval endpoints will be coarse");
  if (p > 0 && opts.B > (std::size_t{1} << 31) / p)
    throw ResourceError("B x p exceeds the bootstrap rank buffer");

  std::vector<std::uint32_t> ranks(opts.B * p);
  const unsigned workers = opts.workers ? opts.workers : default_workers();

  std::visit(
      [&](const auto& d) {
        using T = std::decay_t<decltype(d)>;
        std::pair<std::size_t, std::size_t> class_sizes{};
        std::pair<std::vector<std::size_t>, std::vector<std::size_t>> rows;
        if constexpr (std::is_same_v<T, TwoClass>) {
          rows = class_rows(d);
          class_sizes = opts.m ? split_class_sizes(*opts.m, rows.first.size(), rows.second.size())
                               : std::pair{rows.first.size(), rows.second.size()};
        }
        parallel_chunks(
            opts.B, workers,
            [&](std::size_t begin, std::size_t end, unsigned) {
              std::vector<double> stats(p), draw;
              std::vector<std::size_t> order;
              TwoClassScratch scratch;
              for (std::size_t b = begin; b < end; ++b) {
                if constexpr (std::is_same_v<T, Replicates>) {
                  for (std::size_t j = 0; j < p; ++j) {
                    RandomStream stream = RandomStream::derive(opts.seed, {b, j});
                    const auto& src = d.items[j].samples;
                    draw.resize(sizes[j]);
                    for (auto& v : draw) v = src[stream.below(src.size())];
                    stats[j] = opts.stat == StatKind::mean ? mean_of(draw) : median_in_place(draw);
                  }
                } else if constexpr (std::is_same_v<T, TwoClass>) {
                  RandomStream stream = RandomStream::derive(opts.seed, {b});
                  draw_rows(stream, rows.first, class_sizes.first, scratch.pick0);
                  draw_rows(stream, rows.second, class_sizes.second, scratch.pick1);
                  two_class_stats(d, scratch, stats);
                } else {
                  for (std::size_t j = 0; j < p; ++j) {
                    RandomStream stream = RandomStream::derive(opts.seed, {b, j});
                    const double rate = proportion(d.items[j].successes, d.items[j].trials);
                    std::uint64_t hits = 0;
                    for (std::size_t t = 0; t < sizes[j]; ++t) hits += stream.uniform() < rate;
                    stats[j] = static_cast<double>(hits) / static_cast<double>(sizes[j]);
                  }
                }
                fill_ranks(stats, opts.direction, order, ranks.data() + b * p);
              }
            },
            8);
      },
      ds);

  result.resamples = opts.B;
  result.intervals = intervals_from_ranks(ranks, opts.B, ids, point.ranks, sizes, opts);
  return result;
}

TopSetResult top_set_probability(const TwoClass& ds, const TopSetOptions& opts) {
  validate(ds);
  if (opts.stat != StatKind::mann_whitney)
    throw ArgumentError("top-set probabilities on two-class data use the mann_whitney statistic");
  if (opts.n_prime < 2) throw ArgumentError("n_prime must be >= 2");
  if (opts.n_prime > kMaxResampleSize)
    throw ResourceError("n_prime exceeds cap " + std::to_string(kMaxResampleSize));
  if (opts.B < 1) throw ArgumentError("B must be >= 1");
  if (opts.j_list.empty()) throw ArgumentError("at least one j is required");
  const std::size_t p = ds.items();
  for (std::size_t j : opts.j_list)
    if (j == 0 || j > p)
      throw ArgumentError("j=" + std::to_string(j) + " outside [1, " + std::to_string(p) + "]");

  const auto rows = class_rows(ds);
  const auto [n0, n1] = split_class_sizes(opts.n_prime, rows.first.size(), rows.second.size());
  const std::vector<double> reference_stats = item_statistics(ds, opts.stat);
  const ItemRanking reference = rank_items(reference_stats, opts.direction);
  const std::size_t depth = *std::max_element(opts.j_list.begin(), opts.j_list.end());

  const unsigned workers = opts.workers ? opts.workers : default_workers();
  std::vector<std::vector<std::size_t>> hits(workers,
                                             std::vector<std::size_t>(opts.j_list.size(), 0));
  parallel_chunks(
      opts.B, workers,
      [&](std::size_t begin, std::size_t end, unsigned w) {
        TwoClassScratch scratch;
        std::vector<double> stats(p);
        std::vector<std::size_t> order(p);
        for (std::size_t b = begin; b < end; ++b) {
          RandomStream stream = RandomStream::derive(opts.seed, {b});
          draw_rows(stream, rows.first, n0, scratch.pick0);
          draw_rows(stream, rows.second, n1, scratch.pick1);
          two_class_stats(ds, scratch, stats);
          std::iota(order.begin(), order.end(), std::size_t{0});
          std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(depth),
                            order.end(), RankBefore{stats.data(), opts.direction});
          // Top-j sets agree iff the worst reference rank among the top j is j.
          std::vector<std::size_t> worst(depth + 1, 0);
          for (std::size_t j = 1; j <= depth; ++j)
            worst[j] = std::max(worst[j - 1], reference.ranks[order[j - 1]]);
          for (std::size_t l = 0; l < opts.j_list.size(); ++l)
            if (worst[opts.j_list[l]] == opts.j_list[l]) ++hits[w][l];
        }
      },
      4);

  TopSetResult result;
  result.class0_size = n0;
  result.class1_size = n1;
  for (std::size_t l = 0; l < opts.j_list.size(); ++l) {
    TopSetRow row;
    row.j = opts.j_list[l];
    for (const auto& h : hits) row.hits += h[l];
    row.probability = static_cast<double>(row.hits) / static_cast<double>(opts.B);
    result.rows.push_back(row);
  }
  return result;
}

}  // namespace rankvar
