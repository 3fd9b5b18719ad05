// Acceptance run: one PASS/FAIL line per criterion. Exit status is nonzero if any fail.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "cli.hpp"
#include "rankvar/bootstrap_infer.hpp"
#include "rankvar/rates.hpp"
#include "rankvar/sim_engine.hpp"
#include "rankvar/tail_diagnostics.hpp"
#include "rankvar/tail_models.hpp"
#include "support.hpp"

using namespace rankvar;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void check(bool ok, const std::string& what) {
    if (!ok) pass = false;
    if (!detail.empty()) detail += "; ";
    detail += what + (ok ? "" : " [fail]");
  }
};

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1e", v);
  return buf;
}

std::string fmt(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

ExperimentConfig quadratic_p(TailModel tail, std::size_t n, std::size_t reps, std::uint64_t seed) {
  ExperimentConfig cfg;
  cfg.tail = tail;
  cfg.n = n;
  cfg.p = ScaleRule::parse("0.0005*n^2");
  cfg.noise_sd = 3.5;
  cfg.reps = reps;
  cfg.direction = Direction::descending;
  cfg.seed = seed;
  return cfg;
}

Outcome exponential_cells() {
  Outcome o;
  const auto t0 = std::chrono::steady_clock::now();
  const std::size_t ns[] = {500, 1000, 2000};
  const double top[] = {0.909, 0.9365, 0.959};
  const double deep[] = {0.056, 0.030, 0.021};
  for (int i = 0; i < 3; ++i) {
    auto cfg = quadratic_p(Exponential{1}, ns[i], 1000, 7);
    cfg.j0_list = {ScaleRule::literal(1), ScaleRule::parse("n^0.35")};
    const auto rep = run_rank_experiment(cfg);
    const double a = rep.rows[0].probability, b = rep.rows[1].probability;
    o.check(std::abs(a - top[i]) <= 0.035, "n=" + std::to_string(ns[i]) + " j0=1 " + fmt(a, 3));
    o.check(std::abs(b - deep[i]) <= 0.03,
            "j0=" + std::to_string(rep.rows[1].j0) + " " + fmt(b, 3));
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  o.check(secs <= 60.0, "runtime " + fmt(secs, 2) + "s");
  return o;
}

Outcome pareto_trend() {
  Outcome o;
  for (std::size_t n : {500u, 2000u}) {
    auto cfg = quadratic_p(Pareto{4}, n, 2000, 3);
    cfg.j0_list = {ScaleRule::parse("(1/5)*n^(4/9)"), ScaleRule::parse("(1/5)*n^0.55")};
    const auto rep = run_rank_experiment(cfg);
    const double mid = rep.rows[0].probability;
    o.check(mid >= 0.40 && mid <= 0.65,
            "n=" + std::to_string(n) + " j0=" + std::to_string(rep.rows[0].j0) + " " + fmt(mid, 3));
    if (n == 2000) {
      const double deep = rep.rows[1].probability;
      o.check(deep <= 0.08, "j0=" + std::to_string(rep.rows[1].j0) + " " + fmt(deep, 3));
    }
  }
  return o;
}

Outcome exponential_boundary() {
  Outcome o;
  std::vector<double> deep;
  for (std::size_t n : {500u, 2000u, 10000u}) {
    auto cfg = quadratic_p(Exponential{1}, n, 1000, 11);
    cfg.rounding = Rounding::floor;
    cfg.j0_list = {ScaleRule::parse("n^0.15"), ScaleRule::parse("n^0.35")};
    const auto rep = run_rank_experiment(cfg);
    const double shallow = rep.rows[0].probability;
    deep.push_back(rep.rows[1].probability);
    o.check(shallow >= 0.70, "n=" + std::to_string(n) + " j0=" + std::to_string(rep.rows[0].j0) +
                                 " " + fmt(shallow, 3));
    o.detail += ", j0=" + std::to_string(rep.rows[1].j0) + " " + fmt(deep.back(), 3);
  }
  int inversions = 0;
  for (std::size_t i = 1; i < deep.size(); ++i) inversions += deep[i] > deep[i - 1];
  o.check(inversions <= 1 && deep.back() < deep.front(), "deep row decreasing");
  return o;
}

Outcome bounded_boundary() {
  Outcome o;
  const struct {
    const char* rule;
    bool upper;
    double bound;
  } cases[] = {{"2*n^(1/6)", false, 0.55}, {"2*n^(1/2)", true, 0.10}};
  for (const auto& c : cases) {
    ExperimentConfig cfg;
    cfg.tail = BoundedPower{1};
    cfg.n = 500;
    cfg.p = ScaleRule::parse(c.rule);
    cfg.j0_list = {ScaleRule::parse(c.rule)};
    cfg.reps = 10000;
    cfg.seed = 5;
    const auto cal = calibrate_noise(cfg, {.target = 0.5, .tol = 0.02, .sd_low = 0, .sd_high = 50});
    o.check(cal.converged, std::string("k=") + (c.upper ? "1/2" : "1/6") + " sd=" +
                               fmt(cal.noise_sd, 5) + " at n=500 gives " + fmt(cal.achieved, 3));
    cfg.noise_sd = cal.noise_sd;
    cfg.n = 20000;
    cfg.seed = 9;
    const double prob = run_rank_experiment(cfg).rows.front().probability;
    o.check(c.upper ? prob <= c.bound : prob >= c.bound, "n=20000 " + fmt(prob, 3));
  }
  return o;
}

Outcome two_item_oracle_check() {
  Outcome o;
  int agree = 0;
  double worst = 0;
  for (int t = 0; t < 20; ++t) {
    const double delta = 0.05 + 0.1 * (t % 5);
    const double sigma = 0.5 + 0.75 * (t / 5);
    const std::size_t n = 1 + 7 * static_cast<std::size_t>(t);
    ExperimentConfig cfg;
    cfg.theta = std::vector<double>{0.0, delta};
    cfg.n = n;
    cfg.noise_sd = sigma;
    cfg.reps = 10000;
    cfg.seed = 100 + t;
    const double est = run_rank_experiment(cfg).rows.front().probability;
    const double truth = two_item_oracle(delta, sigma, n);
    const double se = std::sqrt(truth * (1 - truth) / 10000.0);
    const double z = std::abs(est - truth) / se;
    worst = std::max(worst, z);
    agree += z <= 3.0;
  }
  o.check(agree == 20, std::to_string(agree) + "/20 within 3 SE, worst " + fmt(worst, 2) + " SE");
  return o;
}

Outcome rate_formulas() {
  Outcome o;
  auto near = [&o](double got, double want, const std::string& what) {
    o.check(std::abs(got - want) <= 1e-9, what + "=" + fmt(got, 6));
  };
  near(nu_exp(10000, 1), 10.0, "nu_exp(1e4,1)");
  near(nu_exp(std::exp(4.0), 2), std::exp(1.0) * std::pow(4.0, -0.25), "nu_exp(e^4,2)");
  near(nu_exp(500, 1), std::pow(500.0, 0.25), "nu_exp(500,1)");
  near(nu_pol(1e4, 1e4, 2), std::pow(1e8, 0.2), "nu_pol(1e4,1e4,2)");
  o.check(std::abs(nu_pol(1e4, 1e4, 1e6) / 10.0 - 1.0) <= 0.01, "alpha->inf limit");
  const double n3 = std::cbrt(75.0 * std::pow(4.0, 11));
  near(*classify_bounded(n3, 75, 6).bounded_threshold, 4.0, "threshold");
  o.check(classify_bounded(1000, 1000, 1).degenerate, "p=n degenerate");
  double s5 = 0, s6 = 0, e5 = 0, e6 = 0;
  for (double n = 1e3; n < 1e6; n *= 10) {
    s5 = std::log(nu_pol(10 * n, 0.0005 * 100 * n * n, 4) / nu_pol(n, 0.0005 * n * n, 4)) /
         std::log(10.0);
    s6 = std::log(bounded_threshold(10 * n, 5e-6 * 100 * n * n, 6) /
                  bounded_threshold(n, 5e-6 * n * n, 6)) /
         std::log(10.0);
    e5 = std::max(e5, std::abs(s5 - 4.0 / 9.0));
    e6 = std::max(e6, std::abs(s6 - 1.0 / 11.0));
  }
  o.check(e5 <= 1e-9, "slope 4/9 err " + sci(e5));
  o.check(e6 <= 1e-9, "slope 1/11 err " + sci(e6));
  return o;
}

Outcome renyi_equivalence() {
  Outcome o;
  constexpr std::size_t p = 1000, k = 50, reps = 20000;
  const TailModel m(BoundedPower{1});
  RandomStream fast = RandomStream::derive(2718, {0});
  RandomStream slow = RandomStream::derive(2718, {1});
  std::vector<std::vector<double>> a(k), b(k);
  std::vector<double> full;
  for (std::size_t r = 0; r < reps; ++r) {
    const auto e = sample_extreme_order_stats(m, p, k, TailSide::lower, fast);
    full = sample_iid(m, p, slow);
    std::partial_sort(full.begin(), full.begin() + k, full.end());
    for (std::size_t j = 0; j < k; ++j) {
      a[j].push_back(e[j]);
      b[j].push_back(full[j]);
    }
  }
  double min_p = 1, max_d = 0;
  for (std::size_t j = 0; j < k; ++j) {
    const double d = testkit::ks_distance(a[j], b[j]);
    max_d = std::max(max_d, d);
    min_p = std::min(min_p, testkit::ks_pvalue(d, reps, reps));
  }
  o.check(min_p > 0.001, "min KS p-value " + fmt(min_p, 4) + ", max distance " + fmt(max_d, 4));
  o.check(max_d < 0.02, "distance < 0.02");
  return o;
}

Outcome enumeration_case() {
  Outcome o;
  Replicates ds{{{"A", {0, 2}}, {"B", {1, 1}}}};
  BootstrapOptions opts;
  opts.level = 0.9;
  opts.exhaustive = true;
  const auto res = bootstrap_rank_intervals(ds, opts);
  const auto& a = res.intervals[0];
  // The joint enumeration covers A's 4 resamples times B's 4 identical ones.
  o.check(a.lower == 1 && a.upper == 2,
          "A: [" + std::to_string(a.lower) + "," + std::to_string(a.upper) + "] over " +
              std::to_string(res.resamples) + " equally likely joint resamples");
  return o;
}

Outcome bootstrap_coverage() {
  Outcome o;
  double covered = 0;
  constexpr std::size_t items = 100, n = 20;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    RandomStream rng = RandomStream::derive(seed, {31337});
    Replicates ds;
    for (std::size_t i = 0; i < items; ++i) {
      // True means are i * 0.1, so the true ascending rank of item i is i + 1.
      ReplicateItem it{"i" + std::to_string(i), {}};
      for (std::size_t r = 0; r < n; ++r) it.samples.push_back(0.1 * double(i) + rng.normal());
      ds.items.push_back(std::move(it));
    }
    BootstrapOptions opts;
    opts.B = 500;
    opts.level = 0.9;
    opts.seed = seed;
    const auto res = bootstrap_rank_intervals(ds, opts);
    for (std::size_t i = 0; i < items; ++i)
      covered += res.intervals[i].lower <= i + 1 && i + 1 <= res.intervals[i].upper;
  }
  const double rate = covered / (20.0 * items);
  o.check(rate >= 0.85, "coverage " + fmt(rate, 4));
  return o;
}

Outcome hill_checks() {
  Outcome o;
  int inside = 0;
  const TailModel m(Pareto{4});
  for (std::uint64_t run = 0; run < 100; ++run) {
    RandomStream rng = RandomStream::derive(4242, {run});
    const auto v = sample_iid(m, 100000, rng);
    const double a = hill_estimator(v, 1000).alpha_hat;
    inside += a >= 3.6 && a <= 4.4;
  }
  o.check(inside >= 95, std::to_string(inside) + "/100 runs in [3.6,4.4]");
  const std::vector<double> fixture{8, 4, 2, 1};
  const double h = hill_estimator(fixture, 3).alpha_hat;
  o.check(std::abs(h - 1.0 / (2.0 * std::log(2.0))) <= 1e-12, "fixture " + fmt(h, 12));
  return o;
}

Outcome stretched_fit() {
  Outcome o;
  const TailModel m(StretchedExp{0.85, 0.5, 0.0});
  std::vector<double> data;
  const std::size_t n = 500;
  for (std::size_t i = 1; i <= n; ++i) data.push_back(m.quantile(double(i) / double(n + 1)));
  const auto fit = fit_stretched_exp(data, 0.0);
  o.check(std::abs(fit.lambda - 0.85) <= 1e-6 && std::abs(fit.gamma - 0.5) <= 1e-6,
          "lambda=" + fmt(fit.lambda, 9) + " gamma=" + fmt(fit.gamma, 9));
  return o;
}

Outcome determinism() {
  Outcome o;
  const fs::path dir = testkit::scratch_dir("acceptance");
  {
    std::ofstream f(dir / "items.csv");
    f << "item,value\n";
    RandomStream rng(1);
    for (int i = 0; i < 30; ++i)
      for (int r = 0; r < 3 + i % 4; ++r) f << "it" << i << ',' << 0.05 * i + rng.normal() << '\n';
    std::ofstream b(dir / "bin.csv");
    b << "item,successes,trials\n";
    for (int i = 0; i < 25; ++i) b << "s" << i << ',' << (i * 7) % 40 << ",40\n";
    std::ofstream t(dir / "tc.csv");
    t << "label";
    for (int j = 0; j < 40; ++j) t << ",g" << j;
    t << '\n';
    for (int r = 0; r < 30; ++r) {
      t << r % 2;
      for (int j = 0; j < 40; ++j) t << ',' << rng.normal() + (r % 2) * (j < 4 ? 1.5 : 0.0);
      t << '\n';
    }
  }
  const std::string d = dir.string() + "/";
  const std::vector<std::vector<std::string>> commands{
      {"simulate", "--tail", "exponential", "--n", "1000", "--p-rule", "0.0005*n^2", "--noise-sd",
       "3.5", "--reps", "1000", "--j0", "1", "--j0", "n^0.25", "--mode", "both", "--seed", "7"},
      {"bootstrap", "--input", d + "items.csv", "--B", "1000", "--seed", "1"},
      {"bootstrap", "--input", d + "bin.csv", "--format", "binomial", "--B", "1000", "--seed", "1"},
      {"bootstrap", "--input", d + "tc.csv", "--format", "twoclass", "--B", "300", "--seed", "1"},
      {"topset", "--input", d + "tc.csv", "--j", "1", "--j", "4", "--B", "500", "--nprime", "60",
       "--seed", "2"},
      {"calibrate", "--tail", "bounded", "--alpha", "1", "--n", "500", "--p-rule", "2*n^(1/4)",
       "--j0", "2*n^(1/4)", "--reps", "1000", "--target", "0.5", "--seed", "3"},
      {"required-n", "--tail", "exponential", "--p", "20", "--noise-sd", "3.5", "--reps", "300",
       "--j0", "3", "--n", "100", "--n-grid", "100,400,1600,6400,25600", "--seed", "4"},
  };
  int identical = 0;
  for (const auto& cmd : commands) {
    std::vector<std::string> seen;
    for (const char* workers : {"1", "8", "8", "1"}) {
      auto args = cmd;
      args.insert(args.end(), {"--out", d + "run.json", "--workers", workers});
      std::ostringstream out, err;
      if (cli::cli_dispatch(args, out, err) != 0) {
        seen.push_back("error: " + err.str());
        continue;
      }
      const auto doc = nlohmann::json::parse(testkit::slurp(dir / "run.json"));
      std::string all = doc["config"].dump() + doc["payload"].dump();
      for (const char* suffix : {"run.table.csv", "run.plot.csv"})
        if (fs::exists(dir / suffix)) {
          all += testkit::slurp(dir / suffix);
          fs::remove(dir / suffix);
        }
      seen.push_back(all);
    }
    const bool same = std::all_of(seen.begin(), seen.end(),
                                  [&](const std::string& s) { return s == seen[0]; }) &&
                      seen[0].rfind("error", 0) != 0;
    identical += same;
    if (!same) o.check(false, cmd[0] + " differs");
  }
  o.check(identical == static_cast<int>(commands.size()),
          std::to_string(identical) + "/" + std::to_string(commands.size()) +
              " commands byte-identical over workers 1/8 and reruns");
  fs::remove_all(dir);
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"exponential reference cells", exponential_cells},
      {"Pareto(4) depth trend", pareto_trend},
      {"exponential boundary trend", exponential_boundary},
      {"bounded boundary (calibrated uniform)", bounded_boundary},
      {"two-item oracle", two_item_oracle_check},
      {"rate formulas", rate_formulas},
      {"Renyi sampler vs full sort", renyi_equivalence},
      {"bootstrap enumeration case", enumeration_case},
      {"bootstrap coverage", bootstrap_coverage},
      {"Hill estimator", hill_checks},
      {"stretched-exponential fit", stretched_fit},
      {"determinism", determinism},
  };
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = criteria[i].second();
    } catch (const std::exception& e) {
      o.pass = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    failed += !o.pass;
    std::printf("criterion %2zu %s  %s: %s (%.1fs)\n", i + 1, o.pass ? "PASS" : "FAIL",
                criteria[i].first.c_str(), o.detail.c_str(), secs);
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria failed\n", failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
