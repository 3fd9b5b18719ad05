#include "cli.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <numeric>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "rankvar/bootstrap_infer.hpp"
#include "rankvar/error.hpp"
#include "rankvar/io.hpp"
#include "rankvar/parallel.hpp"
#include "rankvar/rates.hpp"
#include "rankvar/sim_engine.hpp"
#include "rankvar/tail_diagnostics.hpp"
#include "rankvar/tail_models.hpp"

#ifndef RANKVAR_VERSION
#define RANKVAR_VERSION "0.0.0"
#endif

namespace rankvar::cli {
namespace {

using nlohmann::ordered_json;
namespace fs = std::filesystem;

constexpr double kUnset = std::numeric_limits<double>::quiet_NaN();

struct TailFlags {
  std::string family = "exponential";
  double alpha = kUnset;
  double rate = 1.0;
  double mu = 0.0;
  double sigma = 1.0;
  double lambda = kUnset;
  double gamma = kUnset;
  double shift = 0.0;
};

struct SimFlags {
  TailFlags tail;
  std::size_t n = 0;
  std::optional<std::size_t> p;
  std::string p_rule;
  double noise_sd = kUnset;
  std::size_t reps = 1000;
  std::vector<std::string> j0;
  std::string mode = "prefix";
  std::string direction = "ascending";
  std::string rounding = "nearest";
  std::uint64_t seed = 0;
};

struct CommonFlags {
  std::string out;
  unsigned workers = 0;
};

double need(double v, const char* flag) {
  if (std::isnan(v)) throw ArgumentError(std::string(flag) + " is required for this tail family");
  return v;
}

TailModel build_tail(const TailFlags& f) {
  if (f.family == "exponential") return TailModel(Exponential{f.rate});
  if (f.family == "pareto") return TailModel(Pareto{need(f.alpha, "--alpha")});
  if (f.family == "bounded" || f.family == "uniform")
    return TailModel(BoundedPower{std::isnan(f.alpha) ? 1.0 : f.alpha});
  if (f.family == "normal") return TailModel(Normal{f.mu, f.sigma});
  if (f.family == "stretchedexp")
    return TailModel(StretchedExp{need(f.lambda, "--lambda"), need(f.gamma, "--gamma"), f.shift});
  throw ArgumentError("--tail: unknown family '" + f.family +
                      "' (expected exponential|pareto|bounded|normal|stretchedexp)");
}

void add_tail_flags(CLI::App* app, TailFlags& f) {
  app->add_option("--tail", f.family, "exponential|pareto|bounded|normal|stretchedexp")
      ->capture_default_str();
  app->add_option("--alpha", f.alpha, "Shape for pareto / bounded");
  app->add_option("--rate", f.rate, "Rate for exponential")->capture_default_str();
  app->add_option("--mu", f.mu, "Mean for normal")->capture_default_str();
  app->add_option("--sigma", f.sigma, "Sd for normal")->capture_default_str();
  app->add_option("--lambda", f.lambda, "Scale for stretchedexp");
  app->add_option("--gamma", f.gamma, "Shape for stretchedexp");
  app->add_option("--shift", f.shift, "Location for stretchedexp")->capture_default_str();
}

void add_sim_flags(CLI::App* app, SimFlags& f, bool need_noise, bool need_j0) {
  add_tail_flags(app, f.tail);
  app->add_option("--n", f.n, "Observations per item")->required();
  auto* p = app->add_option("--p", f.p, "Item count");
  auto* rule = app->add_option("--p-rule", f.p_rule, "Item count as c*n^k");
  p->excludes(rule);
  auto* sd = app->add_option("--noise-sd", f.noise_sd, "Sd of one raw observation");
  if (need_noise) sd->required();
  app->add_option("--reps", f.reps, "Monte Carlo replications")->capture_default_str();
  auto* j0 = app->add_option("--j0", f.j0, "Depth: integer or c*n^k (repeatable)");
  if (need_j0) j0->required();
  app->add_option("--mode", f.mode, "prefix|set|both")->capture_default_str();
  app->add_option("--direction", f.direction, "ascending|descending")->capture_default_str();
  app->add_option("--rounding", f.rounding, "Rounding of fractional p / j0: nearest|floor|ceil")
      ->capture_default_str();
  app->add_option("--seed", f.seed, "Random seed")->required();
}

ExperimentConfig build_experiment(const SimFlags& f, unsigned workers) {
  ExperimentConfig cfg;
  cfg.tail = build_tail(f.tail);
  cfg.n = f.n;
  if (f.p) {
    cfg.p = ScaleRule::literal(*f.p);
  } else if (!f.p_rule.empty()) {
    cfg.p = ScaleRule::parse(f.p_rule);
  } else {
    throw ArgumentError("one of --p or --p-rule is required");
  }
  cfg.noise_sd = std::isnan(f.noise_sd) ? 1.0 : f.noise_sd;
  cfg.reps = f.reps;
  cfg.j0_list.clear();
  for (const auto& s : f.j0) cfg.j0_list.push_back(ScaleRule::parse(s));
  if (cfg.j0_list.empty()) cfg.j0_list.push_back(ScaleRule::literal(1));
  if (f.mode == "both") {
    cfg.modes = {CorrectnessMode::prefix, CorrectnessMode::set};
  } else {
    cfg.modes = {parse_mode(f.mode)};
  }
  cfg.direction = parse_direction(f.direction);
  cfg.rounding = parse_rounding(f.rounding);
  cfg.seed = f.seed;
  cfg.workers = workers;
  return cfg;
}

ordered_json tail_json(const TailModel& m) {
  ordered_json j;
  j["family"] = m.name();
  j["description"] = m.describe();
  return j;
}

ordered_json experiment_json(const ExperimentConfig& cfg, const SimFlags& f) {
  ordered_json j;
  j["tail"] = tail_json(cfg.tail);
  j["n"] = cfg.n;
  j["p"] = cfg.p.text();
  j["noise_sd"] = cfg.noise_sd;
  j["reps"] = cfg.reps;
  ordered_json j0 = ordered_json::array();
  for (const auto& r : cfg.j0_list) j0.push_back(r.text());
  j["j0"] = j0;
  j["mode"] = f.mode;
  j["direction"] = to_string(cfg.direction);
  j["rounding"] = to_string(cfg.rounding);
  j["seed"] = cfg.seed;
  return j;
}

std::string real(double v) { return format_real(v); }

// Writes the structured report and, when an output path is given, the flat tables.
class Emitter {
 public:
  Emitter(std::string command, const std::vector<std::string>& args, const CommonFlags& common,
          std::ostream& out)
      : common_(common), out_(out), started_(std::chrono::steady_clock::now()) {
    doc_["command"] = std::move(command);
    doc_["argv"] = args;
  }

  ordered_json& config() { return doc_["config"]; }
  ordered_json& payload() { return doc_["payload"]; }
  void warn(const std::string& w) { warnings_.push_back(w); }
  void table(CsvTable t) { table_ = std::move(t); }
  void plot(CsvTable t) { plot_ = std::move(t); }

  void finish(unsigned workers) {
    ordered_json meta;
    meta["version"] = RANKVAR_VERSION;
    meta["workers"] = workers;
    meta["wall_clock_seconds"] =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - started_).count();
    meta["warnings"] = warnings_;
    doc_["metadata"] = meta;

    const std::string text = doc_.dump(2) + "\n";
    if (common_.out.empty()) {
      out_ << text;
      return;
    }
    write_file(common_.out, text);
    const fs::path base = stem_path();
    if (table_) write_table(base.string() + ".table.csv", *table_);
    if (plot_) write_table(base.string() + ".plot.csv", *plot_);
  }

 private:
  fs::path stem_path() const {
    fs::path p(common_.out);
    if (p.extension() == ".json") p.replace_extension();
    return p;
  }

  static void write_file(const fs::path& path, const std::string& text) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw ResourceError("--out: cannot write '" + path.string() + "'");
    f << text;
  }

  static void write_table(const fs::path& path, const CsvTable& t) {
    std::ostringstream os;
    t.write(os);
    write_file(path, os.str());
  }

  ordered_json doc_;
  CommonFlags common_;
  std::ostream& out_;
  std::chrono::steady_clock::time_point started_;
  std::vector<std::string> warnings_;
  std::optional<CsvTable> table_, plot_;
};

// Item values for tailfit / qq: a one-column "value" file, or per-item statistics.
std::vector<double> load_values(const std::string& path, const std::string& format,
                                const std::string& stat) {
  if (format == "values") {
    std::ifstream in(path);
    if (!in) throw ParseError(path, 0, "cannot open file");
    const CsvTable t = CsvTable::read(in, path);
    if (t.header.size() != 1 || t.header[0] != "value")
      throw ParseError(path, 1, "missing or malformed header (expected 'value')");
    std::vector<double> v;
    for (std::size_t i = 0; i < t.rows.size(); ++i) {
      char* end = nullptr;
      const std::string& cell = t.rows[i][0];
      const double x = std::strtod(cell.c_str(), &end);
      if (cell.empty() || end != cell.c_str() + cell.size() || !std::isfinite(x))
        throw ParseError(path, i + 2, "non-numeric value '" + cell + "'");
      v.push_back(x);
    }
    if (v.empty()) throw ParseError(path, 1, "no data rows");
    return v;
  }
  if (format == "replicates") {
    return item_statistics(ItemDataset(parse_replicates(fs::path(path))),
                           parse_stat_kind(stat.empty() ? "mean" : stat));
  }
  if (format == "binomial")
    return item_statistics(ItemDataset(parse_binomial(fs::path(path))), StatKind::proportion);
  throw ArgumentError("--format: expected values|replicates|binomial, got '" + format + "'");
}

CsvTable simulate_table(const RankCorrectnessReport& r) {
  CsvTable t;
  t.header = {"j0_expr", "j0", "mode", "successes", "reps", "probability", "standard_error"};
  for (const auto& row : r.rows)
    t.rows.push_back({row.j0_expr, std::to_string(row.j0), std::string(to_string(row.mode)),
                      std::to_string(row.successes), std::to_string(row.reps),
                      real(row.probability), real(row.standard_error)});
  return t;
}

ordered_json simulate_payload(const RankCorrectnessReport& r) {
  ordered_json j;
  j["p"] = r.p;
  j["rounding_rule"] = r.rounding_rule;
  if (r.sample_size_ratio) j["sample_size_ratio"] = *r.sample_size_ratio;
  ordered_json rows = ordered_json::array();
  for (const auto& row : r.rows) {
    ordered_json x;
    x["j0_expr"] = row.j0_expr;
    x["j0"] = row.j0;
    x["mode"] = to_string(row.mode);
    x["successes"] = row.successes;
    x["reps"] = row.reps;
    x["probability"] = row.probability;
    x["standard_error"] = row.standard_error;
    rows.push_back(x);
  }
  j["rows"] = rows;
  return j;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"rankvar: accuracy of rankings from noisy data"};
  app.require_subcommand(1);
  CommonFlags common;
  auto add_common = [&common](CLI::App* sub, bool workers = true) {
    sub->add_option("--out", common.out, "Report path; tables are written next to it");
    if (workers) sub->add_option("--workers", common.workers, "Worker threads (default: all)");
  };

  // simulate
  SimFlags sim;
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo rank-correctness probabilities");
  add_sim_flags(simulate, sim, true, false);
  add_common(simulate);

  // rates
  std::string family;
  double rn = 0, rp = 0, ralpha = 0;
  std::optional<double> rj0;
  auto* rates = app.add_subcommand("rates", "Critical-rate formulas and regime diagnostics");
  rates->add_option("--family", family, "exponential|polynomial|bounded")->required();
  rates->add_option("--n", rn, "Sample size")->required();
  rates->add_option("--p", rp, "Item count")->required();
  rates->add_option("--alpha", ralpha, "Tail index")->required();
  rates->add_option("--j0", rj0, "Depth (for the alpha = 1/2 diagnostic)");
  add_common(rates, false);

  // bootstrap
  std::string b_input, b_format = "replicates", b_stat, b_direction = "ascending",
                       b_sort = "item";
  std::size_t b_B = 1000;
  double b_level = 0.9;
  std::optional<std::size_t> b_m;
  std::uint64_t b_seed = 0;
  bool b_exhaustive = false;
  auto* boot = app.add_subcommand("bootstrap", "Bootstrap prediction intervals for ranks");
  boot->add_option("--input", b_input, "Dataset CSV")->required();
  boot->add_option("--format", b_format, "replicates|twoclass|binomial")->capture_default_str();
  boot->add_option("--stat", b_stat, "mean|median|proportion|mann_whitney");
  boot->add_option("--B", b_B, "Bootstrap resamples")->capture_default_str();
  boot->add_option("--level", b_level, "Interval level")->capture_default_str();
  boot->add_option("--m", b_m, "Resample size per item (default: own n_j)");
  boot->add_option("--direction", b_direction, "ascending|descending")->capture_default_str();
  boot->add_option("--seed", b_seed, "Random seed")->required();
  boot->add_option("--sort", b_sort, "Table order: item|lower|point")->capture_default_str();
  boot->add_flag("--exhaustive", b_exhaustive, "Enumerate every resample (small data only)");
  add_common(boot);

  // topset
  std::string t_input, t_stat = "mann_whitney", t_direction = "descending";
  std::vector<std::size_t> t_j;
  std::size_t t_B = 1000, t_nprime = 0;
  std::uint64_t t_seed = 0;
  auto* topset = app.add_subcommand("topset", "Probability that the top-j set is recovered");
  topset->add_option("--input", t_input, "Two-class CSV")->required();
  topset->add_option("--stat", t_stat, "mann_whitney")->capture_default_str();
  topset->add_option("--j", t_j, "Set size (repeatable)")->required();
  topset->add_option("--B", t_B, "Bootstrap datasets")->capture_default_str();
  topset->add_option("--nprime", t_nprime, "Observations per bootstrap dataset")->required();
  topset->add_option("--direction", t_direction, "ascending|descending")->capture_default_str();
  topset->add_option("--seed", t_seed, "Random seed")->required();
  add_common(topset);

  // calibrate
  SimFlags cal;
  double c_target = 0.5, c_tol = 0.02, c_low = 0.0, c_high = 100.0;
  std::size_t c_iter = 40;
  auto* calibrate = app.add_subcommand("calibrate", "Find the noise sd that hits a target");
  add_sim_flags(calibrate, cal, false, false);
  calibrate->add_option("--target", c_target, "Target probability")->required();
  calibrate->add_option("--tol", c_tol, "Tolerance")->capture_default_str();
  calibrate->add_option("--sd-low", c_low, "Lower sd bound")->capture_default_str();
  calibrate->add_option("--sd-high", c_high, "Upper sd bound")->capture_default_str();
  calibrate->add_option("--max-iter", c_iter, "Bisection steps")->capture_default_str();
  add_common(calibrate);

  // required-n
  SimFlags req;
  double q_target = 0.9;
  std::vector<std::size_t> q_grid;
  auto* required = app.add_subcommand("required-n", "Smallest n reaching a target probability");
  add_sim_flags(required, req, true, true);
  required->add_option("--target", q_target, "Target probability")->capture_default_str();
  required->add_option("--n-grid", q_grid, "Increasing n values")->required()->delimiter(',');
  add_common(required);

  // tailfit
  std::string f_input, f_format = "values", f_stat, f_method;
  std::optional<std::size_t> f_k;
  double f_shift = 0.0;
  auto* tailfit = app.add_subcommand("tailfit", "Hill or stretched-exponential tail fit");
  tailfit->add_option("--input", f_input, "Data CSV")->required();
  tailfit->add_option("--format", f_format, "values|replicates|binomial")->capture_default_str();
  tailfit->add_option("--stat", f_stat, "Statistic for replicate data");
  tailfit->add_option("--method", f_method, "hill|stretchedexp")->required();
  tailfit->add_option("--k", f_k, "Order statistics for hill");
  tailfit->add_option("--shift", f_shift, "Location for stretchedexp")->capture_default_str();
  add_common(tailfit, false);

  // qq
  std::string g_input, g_format = "values", g_stat;
  TailFlags g_tail;
  auto* qq = app.add_subcommand("qq", "QQ pairs of data against a tail model");
  qq->add_option("--input", g_input, "Data CSV")->required();
  qq->add_option("--format", g_format, "values|replicates|binomial")->capture_default_str();
  qq->add_option("--stat", g_stat, "Statistic for replicate data");
  add_tail_flags(qq, g_tail);
  add_common(qq, false);

  std::vector<const char*> argv{"rankvar"};
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "rankvar: " << e.what() << "\n";
    return kUsage;
  }

  const unsigned workers = common.workers ? common.workers : default_workers();

  if (*simulate) {
    Emitter em("simulate", args, common, out);
    const ExperimentConfig cfg = build_experiment(sim, workers);
    em.config() = experiment_json(cfg, sim);
    const RankCorrectnessReport report = run_rank_experiment(cfg);
    em.payload() = simulate_payload(report);
    em.table(simulate_table(report));
    em.finish(workers);
    return kOk;
  }

  if (*rates) {
    Emitter em("rates", args, common, out);
    const RegimeReport r = evaluate_regime(parse_tail_family(family), rn, rp, ralpha, rj0);
    em.config() = {{"family", family}, {"n", rn}, {"p", rp}, {"alpha", ralpha}};
    if (rj0) em.config()["j0"] = *rj0;
    ordered_json& pl = em.payload();
    pl["family"] = to_string(r.family);
    pl["nu"] = r.nu;
    if (r.family == TailFamily::exponential) pl["nu_exp"] = r.nu;
    if (r.family == TailFamily::polynomial) pl["nu_pol"] = r.nu;
    pl["ratio_p2_over_n_alpha"] = r.ratio;
    pl["bounded_threshold"] = r.bounded_threshold ? ordered_json(*r.bounded_threshold) : nullptr;
    pl["log_term"] = r.log_term ? ordered_json(*r.log_term) : nullptr;
    pl["degenerate"] = r.degenerate;
    pl["regime"] = r.regime;
    pl["notes"] = r.notes;
    CsvTable t;
    t.header = {"family", "n", "p", "alpha", "nu", "ratio", "bounded_threshold", "log_term",
                "degenerate", "regime"};
    t.rows.push_back({std::string(to_string(r.family)), real(r.n), real(r.p), real(r.alpha),
                      real(r.nu), real(r.ratio),
                      r.bounded_threshold ? real(*r.bounded_threshold) : "",
                      r.log_term ? real(*r.log_term) : "", r.degenerate ? "true" : "false",
                      r.regime});
    em.table(std::move(t));
    em.finish(1);
    return kOk;
  }

  if (*boot) {
    Emitter em("bootstrap", args, common, out);
    ItemDataset ds;
    std::string stat = b_stat;
    if (b_format == "replicates") {
      ds = parse_replicates(fs::path(b_input));
      if (stat.empty()) stat = "mean";
    } else if (b_format == "twoclass") {
      ds = parse_twoclass(fs::path(b_input));
      if (stat.empty()) stat = "mann_whitney";
    } else if (b_format == "binomial") {
      ds = parse_binomial(fs::path(b_input));
      if (stat.empty()) stat = "proportion";
    } else {
      throw ArgumentError("--format: expected replicates|twoclass|binomial, got '" + b_format +
                          "'");
    }
    if (b_sort != "item" && b_sort != "lower" && b_sort != "point")
      throw ArgumentError("--sort: expected item|lower|point, got '" + b_sort + "'");
    BootstrapOptions opts;
    opts.stat = parse_stat_kind(stat);
    opts.B = b_B;
    opts.level = b_level;
    opts.m = b_m;
    opts.direction = parse_direction(b_direction);
    opts.seed = b_seed;
    opts.exhaustive = b_exhaustive;
    opts.workers = workers;
    em.config() = {{"input", b_input}, {"format", b_format}, {"stat", stat}, {"B", b_B},
                   {"level", b_level}, {"direction", b_direction}, {"seed", b_seed},
                   {"exhaustive", b_exhaustive}, {"sort", b_sort}};
    em.config()["m"] = b_m ? ordered_json(*b_m) : nullptr;
    if (const auto* reps = std::get_if<Replicates>(&ds))
      if (auto ratio = reps->size_ratio()) em.payload()["sample_size_ratio"] = *ratio;

    const BootstrapResult res = bootstrap_rank_intervals(ds, opts);
    for (const auto& w : res.warnings) {
      em.warn(w);
      err << "rankvar: warning: " << w << "\n";
    }
    std::vector<std::size_t> order(res.intervals.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    const auto& iv = res.intervals;
    if (b_sort == "lower") {
      std::stable_sort(order.begin(), order.end(), [&iv](std::size_t a, std::size_t b) {
        if (iv[a].lower != iv[b].lower) return iv[a].lower < iv[b].lower;
        return iv[a].point_rank < iv[b].point_rank;
      });
    } else if (b_sort == "point") {
      std::stable_sort(order.begin(), order.end(), [&iv](std::size_t a, std::size_t b) {
        return iv[a].point_rank < iv[b].point_rank;
      });
    }
    CsvTable t;
    t.header = {"item", "point_rank", "lower", "upper", "level", "B", "m"};
    ordered_json rows = ordered_json::array();
    for (std::size_t i : order) {
      const auto& x = iv[i];
      t.rows.push_back({x.item_id, std::to_string(x.point_rank), std::to_string(x.lower),
                        std::to_string(x.upper), real(x.level), std::to_string(x.B),
                        std::to_string(x.m)});
      rows.push_back({{"item", x.item_id}, {"point_rank", x.point_rank}, {"lower", x.lower},
                      {"upper", x.upper}, {"level", x.level}, {"B", x.B}, {"m", x.m}});
    }
    em.payload()["resamples"] = res.resamples;
    em.payload()["intervals"] = rows;
    // Plot series: rank position against interval endpoints, ordered by point rank.
    CsvTable plot;
    plot.header = {"point_rank", "item", "lower", "upper"};
    std::vector<std::size_t> by_rank(iv.size());
    std::iota(by_rank.begin(), by_rank.end(), std::size_t{0});
    std::sort(by_rank.begin(), by_rank.end(),
              [&iv](std::size_t a, std::size_t b) { return iv[a].point_rank < iv[b].point_rank; });
    for (std::size_t i : by_rank)
      plot.rows.push_back({std::to_string(iv[i].point_rank), iv[i].item_id,
                           std::to_string(iv[i].lower), std::to_string(iv[i].upper)});
    em.table(std::move(t));
    em.plot(std::move(plot));
    em.finish(workers);
    return kOk;
  }

  if (*topset) {
    Emitter em("topset", args, common, out);
    const TwoClass ds = parse_twoclass(fs::path(t_input));
    TopSetOptions opts;
    opts.stat = parse_stat_kind(t_stat);
    opts.j_list = t_j;
    opts.B = t_B;
    opts.n_prime = t_nprime;
    opts.direction = parse_direction(t_direction);
    opts.seed = t_seed;
    opts.workers = workers;
    em.config() = {{"input", t_input}, {"stat", t_stat}, {"j", t_j},      {"B", t_B},
                   {"nprime", t_nprime}, {"direction", t_direction}, {"seed", t_seed}};
    const TopSetResult res = top_set_probability(ds, opts);
    em.payload()["class_sizes"] = {res.class0_size, res.class1_size};
    ordered_json rows = ordered_json::array();
    CsvTable t;
    t.header = {"j", "hits", "B", "nprime", "probability"};
    for (const auto& r : res.rows) {
      rows.push_back({{"j", r.j}, {"hits", r.hits}, {"probability", r.probability}});
      t.rows.push_back({std::to_string(r.j), std::to_string(r.hits), std::to_string(t_B),
                        std::to_string(t_nprime), real(r.probability)});
    }
    em.payload()["rows"] = rows;
    em.table(std::move(t));
    em.finish(workers);
    return kOk;
  }

  if (*calibrate) {
    Emitter em("calibrate", args, common, out);
    const ExperimentConfig cfg = build_experiment(cal, workers);
    em.config() = experiment_json(cfg, cal);
    em.config()["target"] = c_target;
    em.config()["tol"] = c_tol;
    em.config()["sd_bounds"] = {c_low, c_high};
    CalibrationOptions opts{c_target, c_tol, c_low, c_high, c_iter};
    const CalibrationResult res = calibrate_noise(cfg, opts);
    if (!res.converged) em.warn("calibration stopped after the iteration limit");
    em.payload() = {{"noise_sd", res.noise_sd},
                    {"achieved", res.achieved},
                    {"iterations", res.iterations},
                    {"converged", res.converged}};
    CsvTable t;
    t.header = {"noise_sd", "achieved", "iterations", "converged"};
    t.rows.push_back({real(res.noise_sd), real(res.achieved), std::to_string(res.iterations),
                      res.converged ? "true" : "false"});
    em.table(std::move(t));
    em.finish(workers);
    return kOk;
  }

  if (*required) {
    Emitter em("required-n", args, common, out);
    ExperimentConfig cfg = build_experiment(req, workers);
    em.config() = experiment_json(cfg, req);
    em.config()["target"] = q_target;
    em.config()["n_grid"] = q_grid;
    CsvTable table, plot;
    table.header = {"j0", "n", "probability", "reached"};
    plot.header = {"j0", "required_n", "n_quarter_log_half"};
    ordered_json rows = ordered_json::array();
    for (const auto& j0_text : req.j0) {
      const ScaleRule rule = ScaleRule::parse(j0_text);
      if (rule.depends_on_n())
        throw ArgumentError("--j0: required-n needs literal depths, got '" + j0_text + "'");
      const std::size_t j0 = rule.resolve(1);
      const RequiredNResult res = required_n(cfg, j0, q_target, q_grid);
      for (const auto& [n, prob] : res.trace)
        table.rows.push_back({std::to_string(j0), std::to_string(n), real(prob),
                              prob >= q_target ? "true" : "false"});
      ordered_json row = {{"j0", j0}};
      row["required_n"] = res.n ? ordered_json(*res.n) : nullptr;
      if (res.n) {
        const double nn = static_cast<double>(*res.n);
        const double scale = std::pow(nn, 0.25) * std::sqrt(std::log(nn));
        row["n_quarter_log_half"] = scale;
        plot.rows.push_back({std::to_string(j0), std::to_string(*res.n), real(scale)});
      } else {
        plot.rows.push_back({std::to_string(j0), "", ""});
      }
      rows.push_back(row);
    }
    em.payload()["rows"] = rows;
    em.table(std::move(table));
    em.plot(std::move(plot));
    em.finish(workers);
    return kOk;
  }

  if (*tailfit) {
    Emitter em("tailfit", args, common, out);
    const std::vector<double> values = load_values(f_input, f_format, f_stat);
    em.config() = {{"input", f_input}, {"format", f_format}, {"method", f_method}};
    if (f_method == "hill") {
      const std::size_t k = f_k.value_or(std::max<std::size_t>(1, values.size() / 10));
      em.config()["k"] = k;
      const HillEstimate h = hill_estimator(values, k);
      em.payload() = {{"method", "hill"},
                      {"alpha_hat", h.alpha_hat},
                      {"k", h.k},
                      {"threshold", h.threshold}};
      CsvTable t;
      t.header = {"k", "alpha_hat"};
      for (std::size_t i = 0; i < h.stability.size(); ++i)
        t.rows.push_back({std::to_string(i + 1), real(h.stability[i])});
      em.table(t);
      em.plot(t);
    } else if (f_method == "stretchedexp") {
      em.config()["shift"] = f_shift;
      const StretchedExpFit fit = fit_stretched_exp(values, f_shift);
      em.payload() = {{"method", "stretchedexp"},
                      {"lambda", fit.lambda},
                      {"gamma", fit.gamma},
                      {"shift", fit.shift},
                      {"residual_sum_squares", fit.residual_sum_squares},
                      {"points", fit.points}};
      CsvTable t;
      t.header = {"lambda", "gamma", "shift", "residual_sum_squares", "points"};
      t.rows.push_back({real(fit.lambda), real(fit.gamma), real(fit.shift),
                        real(fit.residual_sum_squares), std::to_string(fit.points)});
      em.table(std::move(t));
      // Empirical vs fitted survival at the plotting positions.
      std::vector<double> sorted = values;
      std::sort(sorted.begin(), sorted.end());
      const TailModel model(StretchedExp{fit.lambda, fit.gamma, fit.shift});
      CsvTable plot;
      plot.header = {"x", "empirical_survival", "fitted_survival"};
      for (std::size_t i = 0; i < sorted.size(); ++i)
        plot.rows.push_back(
            {real(sorted[i]),
             real(1.0 - static_cast<double>(i + 1) / static_cast<double>(sorted.size() + 1)),
             real(model.survival(sorted[i]))});
      em.plot(std::move(plot));
    } else {
      throw ArgumentError("--method: expected hill|stretchedexp, got '" + f_method + "'");
    }
    em.finish(1);
    return kOk;
  }

  if (*qq) {
    Emitter em("qq", args, common, out);
    const std::vector<double> values = load_values(g_input, g_format, g_stat);
    const TailModel model = build_tail(g_tail);
    em.config() = {{"input", g_input}, {"format", g_format}, {"tail", tail_json(model)}};
    const auto pts = qq_points(values, model);
    em.payload() = {{"points", pts.size()}, {"squared_deviation", qq_deviation(pts)}};
    CsvTable t;
    t.header = {"empirical", "theoretical"};
    for (const auto& q : pts) t.rows.push_back({real(q.empirical), real(q.theoretical)});
    em.table(t);
    em.plot(t);
    em.finish(1);
    return kOk;
  }
  return kUsage;
}

}  // namespace

int cli_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    return run(args, out, err);
  } catch (const CalibrationError& e) {
    err << "rankvar: calibration failed: " << e.what() << "\n";
    return kResource;
  } catch (const Error& e) {
    err << "rankvar: " << e.what() << "\n";
    switch (e.category()) {
      case ErrorCategory::usage: return kUsage;
      case ErrorCategory::data: return kData;
      case ErrorCategory::resource: return kResource;
    }
    return kUsage;
  } catch (const std::bad_alloc&) {
    err << "rankvar: out of memory\n";
    return kResource;
  } catch (const std::exception& e) {
    err << "rankvar: " << e.what() << "\n";
    return kData;
  }
}

}  // namespace rankvar::cli
