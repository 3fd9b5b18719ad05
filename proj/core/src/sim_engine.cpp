#include "rankvar/sim_engine.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

#include "rankvar/error.hpp"
#include "rankvar/parallel.hpp"
#include "rankvar/random.hpp"

namespace rankvar {
namespace {

constexpr std::size_t kUnranked = std::numeric_limits<std::size_t>::max();

// Strict weak order over item indices: better-ranked first, ties by index.
struct RankBefore {
  const double* values;
  Direction direction;
  bool operator()(std::size_t a, std::size_t b) const noexcept {
    const double va = values[a], vb = values[b];
    if (va != vb) return direction == Direction::ascending ? va < vb : va > vb;
    return a < b;
  }
};

void leading_order(std::vector<std::size_t>& idx, const std::vector<double>& values,
                   std::size_t depth, Direction direction) {
  idx.resize(values.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  const RankBefore before{values.data(), direction};
  if (depth >= idx.size()) {
    std::sort(idx.begin(), idx.end(), before);
  } else {
    std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(depth), idx.end(),
                      before);
  }
}

// Per-worker tallies and scratch space.
struct Tally {
  std::vector<std::size_t> prefix_hits;
  std::vector<std::size_t> set_hits;
  std::vector<double> theta, xbar;
  std::vector<std::size_t> true_idx, obs_idx, true_rank;
};

}  // namespace

std::string_view to_string(Direction d) noexcept {
  return d == Direction::ascending ? "ascending" : "descending";
}

std::string_view to_string(CorrectnessMode m) noexcept {
  return m == CorrectnessMode::prefix ? "prefix" : "set";
}

Direction parse_direction(std::string_view text) {
  if (text == "ascending") return Direction::ascending;
  if (text == "descending") return Direction::descending;
  throw ArgumentError("unknown direction '" + std::string(text) +
                      "' (expected ascending|descending)");
}

CorrectnessMode parse_mode(std::string_view text) {
  if (text == "prefix") return CorrectnessMode::prefix;
  if (text == "set") return CorrectnessMode::set;
  throw ArgumentError("unknown mode '" + std::string(text) + "' (expected prefix|set)");
}

ResolvedExperiment resolve_experiment(const ExperimentConfig& cfg) {
  if (cfg.n < 1) throw ConfigError("n must be >= 1");
  if (cfg.reps < 1) throw ConfigError("reps must be >= 1");
  if (!(cfg.noise_sd >= 0.0) || !std::isfinite(cfg.noise_sd))
    throw ConfigError("noise_sd must be finite and >= 0");
  if (cfg.j0_list.empty()) throw ConfigError("at least one j0 is required");
  if (cfg.modes.empty()) throw ConfigError("at least one correctness mode is required");

  ResolvedExperiment out;
  if (cfg.theta && cfg.n_j && cfg.theta->size() != cfg.n_j->size())
    throw ConfigError("fixed theta and per-item sample sizes disagree on p");
  if (cfg.theta) {
    out.p = cfg.theta->size();
    for (double v : *cfg.theta)
      if (!std::isfinite(v)) throw ConfigError("fixed theta values must be finite");
  } else if (cfg.n_j) {
    out.p = cfg.n_j->size();
  } else {
    out.p = cfg.p.resolve(cfg.n, cfg.rounding);
  }
  if (out.p < 1) throw ConfigError("p must be >= 1");
  if (cfg.n_j) {
    const auto [lo, hi] = std::minmax_element(cfg.n_j->begin(), cfg.n_j->end());
    if (*lo < 1) throw ConfigError("every per-item sample size must be >= 1");
    out.sample_size_ratio = static_cast<double>(*hi) / static_cast<double>(*lo);
  }
  for (const auto& rule : cfg.j0_list) {
    const std::size_t j0 = rule.resolve(cfg.n, cfg.rounding);
    if (j0 > out.p) {
      std::ostringstream os;
      os << "j0 '" << rule.text() << "' resolves to " << j0 << " at n=" << cfg.n
         << ", exceeding p=" << out.p;
      throw ConfigError(os.str());
    }
    out.j0.push_back(j0);
  }
  return out;
}

RankRealization make_realization(std::vector<double> theta, std::vector<double> xbar,
                                 Direction direction) {
  if (theta.size() != xbar.size())
    throw ArgumentError("theta and xbar must have the same length");
  RankRealization r;
  r.theta = std::move(theta);
  r.xbar = std::move(xbar);
  leading_order(r.true_order, r.theta, r.theta.size(), direction);
  leading_order(r.observed_order, r.xbar, r.xbar.size(), direction);
  return r;
}

std::size_t prefix_correct_depth(const RankRealization& r) {
  const auto mismatch =
      std::mismatch(r.true_order.begin(), r.true_order.end(), r.observed_order.begin());
  return static_cast<std::size_t>(mismatch.first - r.true_order.begin());
}

std::vector<bool> set_correct_flags(const RankRealization& r,
                                    std::span<const std::size_t> j_list) {
  const std::size_t p = r.true_order.size();
  std::vector<std::size_t> true_rank(p);
  for (std::size_t pos = 0; pos < p; ++pos) true_rank[r.true_order[pos]] = pos + 1;
  // The observed top-j set equals the true top-j set iff the worst true rank among
  // the observed top-j is exactly j.
  std::vector<std::size_t> worst(p + 1, 0);
  for (std::size_t j = 1; j <= p; ++j)
    worst[j] = std::max(worst[j - 1], true_rank[r.observed_order[j - 1]]);
  std::vector<bool> flags;
  flags.reserve(j_list.size());
  for (std::size_t j : j_list) {
    if (j == 0 || j > p)
      throw ArgumentError("set depth " + std::to_string(j) + " outside [1, " +
                          std::to_string(p) + "]");
    flags.push_back(worst[j] == j);
  }
  return flags;
}

const CorrectnessRow& RankCorrectnessReport::row(std::size_t j0, CorrectnessMode mode) const {
  for (const auto& r : rows)
    if (r.j0 == j0 && r.mode == mode) return r;
  throw ArgumentError("report has no row for j0=" + std::to_string(j0));
}

RankCorrectnessReport run_rank_experiment(const ExperimentConfig& cfg) {
  const auto started = std::chrono::steady_clock::now();
  const ResolvedExperiment resolved = resolve_experiment(cfg);
  const std::size_t p = resolved.p;
  const std::size_t depth = *std::max_element(resolved.j0.begin(), resolved.j0.end());
  const std::size_t n_levels = resolved.j0.size();

  std::vector<double> mean_sd(p, cfg.noise_sd / std::sqrt(static_cast<double>(cfg.n)));
  if (cfg.n_j)
    for (std::size_t i = 0; i < p; ++i)
      mean_sd[i] = cfg.noise_sd / std::sqrt(static_cast<double>((*cfg.n_j)[i]));

  std::vector<std::pair<std::size_t, std::size_t>> order;  // (j0, level) by depth
  for (std::size_t l = 0; l < n_levels; ++l) order.emplace_back(resolved.j0[l], l);
  std::sort(order.begin(), order.end());

  const unsigned workers = cfg.workers ? cfg.workers : default_workers();
  std::vector<Tally> tallies(workers);
  for (auto& t : tallies) {
    t.prefix_hits.assign(n_levels, 0);
    t.set_hits.assign(n_levels, 0);
    t.true_rank.assign(p, kUnranked);
  }

  parallel_chunks(cfg.reps, workers, [&](std::size_t begin, std::size_t end, unsigned w) {
    Tally& t = tallies[w];
    for (std::size_t rep = begin; rep < end; ++rep) {
      RandomStream stream = RandomStream::derive(cfg.seed, {rep});
      if (cfg.theta) {
        t.theta = *cfg.theta;
      } else {
        t.theta.resize(p);
        for (auto& v : t.theta) v = cfg.tail.quantile(stream.uniform());
      }
      t.xbar.resize(p);
      if (cfg.noise_sd == 0.0) {
        t.xbar = t.theta;
      } else {
        for (std::size_t i = 0; i < p; ++i) t.xbar[i] = t.theta[i] + mean_sd[i] * stream.normal();
      }
      leading_order(t.true_idx, t.theta, depth, cfg.direction);
      leading_order(t.obs_idx, t.xbar, depth, cfg.direction);

      for (std::size_t pos = 0; pos < depth; ++pos) t.true_rank[t.true_idx[pos]] = pos + 1;
      std::size_t prefix = 0;
      while (prefix < depth && t.true_idx[prefix] == t.obs_idx[prefix]) ++prefix;
      // worst true rank among the observed top-j; kUnranked once an outsider appears.
      std::size_t worst = 0;
      std::size_t next_level = 0;
      for (std::size_t j = 1; j <= depth && next_level < n_levels; ++j) {
        worst = std::max(worst, t.true_rank[t.obs_idx[j - 1]]);
        while (next_level < n_levels && order[next_level].first == j) {
          const std::size_t level = order[next_level].second;
          if (prefix >= j) ++t.prefix_hits[level];
          if (worst == j) ++t.set_hits[level];
          ++next_level;
        }
      }
      for (std::size_t pos = 0; pos < depth; ++pos) t.true_rank[t.true_idx[pos]] = kUnranked;
    }
  });

  RankCorrectnessReport report;
  report.config = cfg;
  report.p = p;
  report.sample_size_ratio = resolved.sample_size_ratio;
  report.rounding_rule = std::string(to_string(cfg.rounding)) + " integer, minimum 1";
  for (std::size_t l = 0; l < n_levels; ++l) {
    for (CorrectnessMode mode : cfg.modes) {
      std::size_t hits = 0;
      for (const auto& t : tallies)
        hits += mode == CorrectnessMode::prefix ? t.prefix_hits[l] : t.set_hits[l];
      CorrectnessRow row;
      row.j0_expr = cfg.j0_list[l].text();
      row.j0 = resolved.j0[l];
      row.mode = mode;
      row.successes = hits;
      row.reps = cfg.reps;
      row.probability = static_cast<double>(hits) / static_cast<double>(cfg.reps);
      row.standard_error =
          std::sqrt(row.probability * (1.0 - row.probability) / static_cast<double>(cfg.reps));
      report.rows.push_back(std::move(row));
    }
  }
  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - started).count();
  return report;
}

double two_item_oracle(double delta, double sigma, std::size_t n) {
  if (!(delta > 0.0) || !(sigma > 0.0) || n < 1)
    throw DomainError("two_item_oracle requires delta > 0, sigma > 0, n >= 1");
  if (std::isinf(delta)) return 1.0;
  const double z = delta * std::sqrt(static_cast<double>(n)) / (sigma * std::sqrt(2.0));
  return 0.5 * std::erfc(-z / std::sqrt(2.0));
}

CalibrationResult calibrate_noise(const ExperimentConfig& cfg, const CalibrationOptions& opts) {
  if (!(opts.target > 0.0 && opts.target <= 1.0))
    throw ArgumentError("calibration target must lie in (0,1]");
  if (!(opts.tol >= 0.0)) throw ArgumentError("calibration tolerance must be >= 0");
  if (!(opts.sd_low >= 0.0) || !(opts.sd_high > opts.sd_low))
    throw ArgumentError("calibration bounds must satisfy 0 <= low < high");

  auto probe = [&cfg](double sd) {
    ExperimentConfig c = cfg;
    c.noise_sd = sd;
    return run_rank_experiment(c).rows.front().probability;
  };

  CalibrationResult result;
  double lo = opts.sd_low, hi = opts.sd_high;
  const double p_lo = probe(lo);
  if (std::abs(p_lo - opts.target) <= opts.tol) return {lo, p_lo, 0, true};
  const double p_hi = probe(hi);
  if (std::abs(p_hi - opts.target) <= opts.tol) return {hi, p_hi, 0, true};
  if (p_lo < opts.target || p_hi > opts.target) {
    std::ostringstream os;
    os << "target " << opts.target << " not bracketed: probability " << p_lo << " at sd=" << lo
       << ", " << p_hi << " at sd=" << hi;
    throw CalibrationError(os.str(), lo, hi, p_lo, p_hi);
  }

  double best_gap = std::numeric_limits<double>::infinity();
  for (std::size_t it = 1; it <= opts.max_iterations; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double p_mid = probe(mid);
    const double gap = std::abs(p_mid - opts.target);
    if (gap < best_gap) {
      best_gap = gap;
      result = {mid, p_mid, it, false};
    }
    result.iterations = it;
    if (gap <= opts.tol) {
      result.converged = true;
      return result;
    }
    (p_mid > opts.target ? lo : hi) = mid;
  }
  return result;
}

RequiredNResult required_n(const ExperimentConfig& cfg_template, std::size_t j0, double target,
                           std::span<const std::size_t> n_grid) {
  if (n_grid.empty()) throw ArgumentError("n grid must be nonempty");
  if (!std::is_sorted(n_grid.begin(), n_grid.end()))
    throw ArgumentError("n grid must be increasing");
  RequiredNResult result;
  for (std::size_t n : n_grid) {
    ExperimentConfig c = cfg_template;
    c.n = n;
    c.j0_list = {ScaleRule::literal(j0)};
    c.modes = {CorrectnessMode::prefix};
    const double prob = run_rank_experiment(c).rows.front().probability;
    result.trace.emplace_back(n, prob);
    if (prob >= target) {
      result.n = n;
      break;
    }
  }
  return result;
}

}  // namespace rankvar
