#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rankvar/scale_rule.hpp"
#include "rankvar/tail_models.hpp"

namespace rankvar {

// Ascending ranks the smallest values first; descending ranks the largest first.
// Exact ties are broken by ascending item index in both directions.
enum class Direction { ascending, descending };

// prefix: observed order equals true order in every position up to j0.
// set:    the observed top-j0 items are the true top-j0 items, in any order.
enum class CorrectnessMode { prefix, set };

std::string_view to_string(Direction d) noexcept;
std::string_view to_string(CorrectnessMode m) noexcept;
Direction parse_direction(std::string_view text);
CorrectnessMode parse_mode(std::string_view text);

struct ExperimentConfig {
  TailModel tail{Exponential{1.0}};
  std::size_t n = 100;
  ScaleRule p = ScaleRule::literal(2);
  // Standard deviation of one raw observation; the item mean carries noise_sd / sqrt(n_j).
  double noise_sd = 1.0;
  std::size_t reps = 1000;
  std::vector<ScaleRule> j0_list{ScaleRule::literal(1)};
  // Applied to p and j0 expressions that are not whole numbers; the result is at least 1.
  Rounding rounding = Rounding::nearest;
  std::vector<CorrectnessMode> modes{CorrectnessMode::prefix};
  Direction direction = Direction::ascending;
  std::uint64_t seed = 0;
  // Per-item sample sizes; when present their count fixes p.
  std::optional<std::vector<std::size_t>> n_j;
  // Fixed attributes replacing the tail draw (degenerate tail); their count fixes p.
  std::optional<std::vector<double>> theta;
  // 0 selects default_workers(). Never affects results.
  unsigned workers = 0;
};

struct ResolvedExperiment {
  std::size_t p = 0;
  std::vector<std::size_t> j0;
  // max(n_j) / min(n_j) when per-item sizes are given.
  std::optional<double> sample_size_ratio;
};

// Validates cfg and resolves p and every j0 at cfg.n. Throws ConfigError.
ResolvedExperiment resolve_experiment(const ExperimentConfig& cfg);

// One draw of the model. Orders hold 0-based item indices, best-ranked first.
struct RankRealization {
  std::vector<double> theta;
  std::vector<double> xbar;
  std::vector<std::size_t> true_order;
  std::vector<std::size_t> observed_order;
};

RankRealization make_realization(std::vector<double> theta, std::vector<double> xbar,
                                 Direction direction = Direction::ascending);

// Largest d with observed_order[i] == true_order[i] for all i < d.
std::size_t prefix_correct_depth(const RankRealization& r);

// flag[i] is true iff the observed top-j_list[i] set equals the true top-j_list[i] set.
// Throws ArgumentError for j = 0 or j > p.
std::vector<bool> set_correct_flags(const RankRealization& r, std::span<const std::size_t> j_list);

struct CorrectnessRow {
  std::string j0_expr;
  std::size_t j0 = 0;
  CorrectnessMode mode = CorrectnessMode::prefix;
  std::size_t successes = 0;
  std::size_t reps = 0;
  double probability = 0.0;
  // sqrt(p(1-p)/reps)
  double standard_error = 0.0;
};

struct RankCorrectnessReport {
  ExperimentConfig config;
  std::size_t p = 0;
  std::optional<double> sample_size_ratio;
  // e.g. "nearest integer, minimum 1"
  std::string rounding_rule;
  // Ordered by j0_list, then by modes.
  std::vector<CorrectnessRow> rows;
  double wall_seconds = 0.0;

  const CorrectnessRow& row(std::size_t j0, CorrectnessMode mode) const;
};

// Monte Carlo estimate of rank-correctness probabilities. Each replication draws
// theta from the tail (or uses cfg.theta) and X_j = theta_j + N(0, noise_sd^2 / n_j).
// Replication r uses the substream (seed, r), so results are independent of workers.
RankCorrectnessReport run_rank_experiment(const ExperimentConfig& cfg);

// Exact probability that two observed means keep the order of attributes delta apart:
// Phi(delta sqrt(n) / (sigma sqrt(2))).
double two_item_oracle(double delta, double sigma, std::size_t n);

struct CalibrationOptions {
  double target = 0.5;
  double tol = 0.02;
  double sd_low = 0.0;
  double sd_high = 100.0;
  std::size_t max_iterations = 40;
};

struct CalibrationResult {
  double noise_sd = 0.0;
  double achieved = 0.0;
  std::size_t iterations = 0;
  bool converged = false;
};

// Bisection on noise_sd so that the first (j0, mode) row of the experiment hits the
// target. Every probe reuses cfg.seed. Throws CalibrationError when the target lies
// outside the probabilities at the bracket endpoints.
CalibrationResult calibrate_noise(const ExperimentConfig& cfg, const CalibrationOptions& opts);

struct RequiredNResult {
  std::optional<std::size_t> n;
  // (n, estimated prefix probability) for every grid point evaluated.
  std::vector<std::pair<std::size_t, double>> trace;
};

// Smallest n in the increasing grid whose prefix-correctness at depth j0 reaches target.
RequiredNResult required_n(const ExperimentConfig& cfg_template, std::size_t j0, double target,
                           std::span<const std::size_t> n_grid);

}  // namespace rankvar
