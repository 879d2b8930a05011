#include "knnrex/cli.hpp"

#include "knnrex/asymptotics.hpp"
#include "knnrex/data.hpp"
#include "knnrex/errors.hpp"
#include "knnrex/estimators.hpp"
#include "knnrex/evaluation.hpp"
#include "knnrex/io.hpp"
#include "knnrex/knn_index.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <ostream>

namespace knnrex {

namespace {

using Clock = std::chrono::steady_clock;

struct Options {
  // estimator
  std::string method = "knn-rex";
  Index k = 30;
  Index m = 3;
  double h = 0.1;
  Index L = 10;
  Index l = 0;
  double ridge = 0.0;
  bool round_integers = false;
  Index stall_limit = 10000;
  std::string km_move = "redraw";
  std::uint64_t seed = 1;
  unsigned threads = 1;
  // io
  std::string in;
  std::string out;
  std::string marginals;
  Index total = -1;
  std::string a;
  std::string b;
  // evaluation
  Index bins = 10;
  Index folds = 100;
  // gen-data
  std::string dataset = "swiss-roll";
  Index n = 1000;
  std::string spec;
  // sweep
  std::vector<Index> k_list;
  std::vector<Index> m_list;
  std::vector<double> h_list;
  std::vector<Index> L_list;
  // validate-asymptotics
  std::string density = "uniform";
  double slope = 5.0;
  Index dim = 2;
  std::vector<double> deltas{0.2, 0.1};
  Index samples = 1000000;
  // bench-knn
  std::vector<Index> n_list{2000, 4000};
  Index reps = 3;
};

// Wall-clock phases of one run; the phases partition the total.
class PhaseTimer {
 public:
  PhaseTimer() : start_(Clock::now()), last_(start_) {}

  void mark(const std::string& phase) {
    const auto now = Clock::now();
    add(phase, std::chrono::duration<double>(now - last_).count());
    last_ = now;
  }

  void add(const std::string& phase, double seconds) {
    for (auto& [name, value] : phases_) {
      if (name == phase) {
        value += seconds;
        return;
      }
    }
    phases_.emplace_back(phase, seconds);
  }

  void reset_lap() { last_ = Clock::now(); }

  void emit(Report& report) const {
    report.section("timing");
    for (const auto& [name, value] : phases_) report.set(name + "_seconds", value);
    report.set("total_seconds", std::chrono::duration<double>(Clock::now() - start_).count());
  }

 private:
  Clock::time_point start_;
  Clock::time_point last_;
  std::vector<std::pair<std::string, double>> phases_;
};

KmMove parse_km_move(const std::string& text) {
  if (text == "redraw") return KmMove::Redraw;
  if (text == "replace-one") return KmMove::ReplaceOne;
  throw Error(Errc::BadParams, "unknown KM move '" + text + "'");
}

EstimatorConfig estimator_config(const Options& o) {
  EstimatorConfig cfg;
  cfg.method = parse_method(o.method);
  cfg.k = o.k;
  cfg.m = o.m;
  cfg.h = o.h;
  cfg.L = o.L;
  cfg.seed = o.seed;
  cfg.stall_limit = o.stall_limit;
  cfg.round_integers = o.round_integers;
  cfg.ridge = o.ridge;
  cfg.km_move = parse_km_move(o.km_move);
  cfg.threads = o.threads;
  return cfg;
}

void config_entries(Report& r, const EstimatorConfig& cfg) {
  r.set("method", std::string(method_name(cfg.method)));
  switch (cfg.method) {
    case Method::KnnRex:
    case Method::KnnRexCorrected:
      r.set("k", cfg.k).set("m", cfg.m);
      break;
    case Method::FixedGaussian:
      r.set("h", cfg.h);
      break;
    case Method::Bmp:
      r.set("k", cfg.k).set("h", cfg.h);
      break;
    case Method::KmRex:
      r.set("L", cfg.L).set("m", cfg.m).set("stall_limit", cfg.stall_limit);
      r.set("km_move", std::string(cfg.km_move == KmMove::Redraw ? "redraw" : "replace-one"));
      r.set("ridge", cfg.ridge);
      break;
  }
  r.set("round_integers", std::string(cfg.round_integers ? "true" : "false"));
  r.set("seed", std::to_string(cfg.seed));
}

Report manifest_header(const std::string& subcommand) {
  Report r;
  r.section("manifest").set("subcommand", subcommand);
  return r;
}

void add_estimator_options(CLI::App* sub, Options& o) {
  sub->add_option("--method", o.method, "knn-rex | fixed | bmp | km")
      ->check(CLI::IsMember({"knn-rex", "fixed", "bmp", "km"}));
  sub->add_option("--k", o.k, "neighborhood size");
  sub->add_option("--m", o.m, "KCS size");
  sub->add_option("--h", o.h, "bandwidth (fixed) or multiplier (bmp)");
  sub->add_option("--L", o.L, "number of KCSs (km)");
  sub->add_option("--ridge", o.ridge, "ridge added to KCS covariances (km)");
  sub->add_option("--stall-limit", o.stall_limit, "non-improving iterations before km stops");
  sub->add_option("--km-move", o.km_move, "redraw | replace-one")
      ->check(CLI::IsMember({"redraw", "replace-one"}));
  sub->add_flag("--round-integers", o.round_integers, "round outputs to integers");
}

void add_common_options(CLI::App* sub, Options& o) {
  sub->add_option("--seed", o.seed, "master random seed");
  sub->add_option("--threads", o.threads, "worker threads (1 = reference execution)")
      ->check(CLI::Range(1u, 1024u));
}

int cmd_gen_data(const Options& o, std::ostream& out) {
  PhaseTimer timer;
  Rng rng(o.seed);
  Dataset data;
  if (o.dataset == "swiss-roll") {
    data.points = gen_swiss_roll(o.n, rng);
    data.columns = {"x", "y", "z"};
  } else if (o.dataset == "ring") {
    data.points = gen_ring(o.n, rng);
    data.columns = {"x", "y"};
  } else {
    if (o.spec.empty()) throw Error(Errc::BadSpec, "gmm needs --spec <file.json>");
    const GmmSpec spec = read_gmm_json(o.spec);
    data.points = gen_gmm(spec, o.n, rng);
    for (Index j = 0; j < spec.dims(); ++j) data.columns.push_back("x" + std::to_string(j));
  }
  timer.mark("generate");
  write_csv(o.out, data);
  timer.mark("write");
  Report manifest = manifest_header("gen-data");
  manifest.set("dataset", o.dataset).set("n", o.n).set("seed", std::to_string(o.seed));
  if (!o.spec.empty()) manifest.set("spec", o.spec);
  manifest.set("out", o.out);
  timer.emit(manifest);
  manifest.write(o.out + ".manifest");
  out << "wrote " << o.n << " rows to " << o.out << '\n';
  return 0;
}

int cmd_synthesize(const Options& o, std::ostream& out) {
  PhaseTimer timer;
  const EstimatorConfig cfg = estimator_config(o);
  if (o.l < 0) throw Error(Errc::BadParams, "--l must be non-negative");
  Dataset data = read_csv(o.in);
  timer.mark("read");
  SynthesisResult result = synthesize(data.points, cfg, o.l);
  timer.add("whiten", result.timings.whiten);
  timer.add("index", result.timings.index);
  timer.add("fit", result.timings.fit);
  timer.add("sample", result.timings.sample);
  timer.reset_lap();
  Dataset pop{std::move(result.points), data.columns};
  write_csv(o.out, pop);
  timer.mark("write");

  Report manifest = manifest_header("synthesize");
  config_entries(manifest, cfg);
  manifest.set("threads", static_cast<Index>(cfg.threads));
  manifest.set("l", o.l).set("in", o.in).set("out", o.out);
  timer.emit(manifest);
  manifest.write(o.out + ".manifest");
  out << "wrote " << o.l << " rows to " << o.out << '\n';
  return 0;
}

int cmd_synthesize_corrected(const Options& o, std::ostream& out, std::ostream& err) {
  PhaseTimer timer;
  Dataset data = read_csv(o.in);
  if (o.total < 0) throw Error(Errc::BadParams, "--total is required");
  const MarginalSpec spec = read_marginals(o.marginals, data.columns, o.total);
  timer.mark("read");

  Report manifest = manifest_header("synthesize-corrected");
  manifest.set("method", std::string("knn-rex-corrected")).set("k", o.k).set("m", o.m);
  manifest.set("round_integers", std::string(o.round_integers ? "true" : "false"));
  manifest.set("seed", std::to_string(o.seed)).set("total", o.total);
  manifest.set("in", o.in).set("marginals", o.marginals).set("out", o.out);

  Rng rng(o.seed);
  auto finish = [&](const PointSetd& points, const CorrectedStats& stats, const std::string& status) {
    timer.mark("synthesis");
    write_csv(o.out, Dataset{points, data.columns});
    timer.mark("write");
    manifest.section("diagnostics");
    manifest.set("status", status).set("rows", points.rows());
    manifest.set("iterations", stats.iterations).set("uniform_seeds", stats.uniform_seeds);
    manifest.set("removals", stats.removals).set("out_of_range", stats.out_of_range);
    timer.emit(manifest);
    manifest.write(o.out + ".manifest");
  };
  try {
    const CorrectedResult result =
        synth_bias_corrected(data.points, spec, o.k, o.m, rng, CorrectedOptions{o.round_integers});
    finish(result.points, result.stats, "complete");
    out << "wrote " << result.points.rows() << " rows to " << o.out << '\n';
    return 0;
  } catch (const StallLimitError& e) {
    finish(e.partial(), e.stats(), "stalled");
    err << "error: " << e.what() << " (partial result written to " << o.out << ")\n";
    return 1;
  }
}

int cmd_evaluate(const Options& o, std::ostream& out) {
  const Dataset a = read_csv(o.a);
  const Dataset b = read_csv(o.b);
  if (a.dims() != b.dims()) throw Error(Errc::DimensionMismatch, "inputs have different column counts");
  const double h = hellinger(a.points, b.points, make_binning(a.points, b.points, o.bins));
  Report report = manifest_header("evaluate");
  report.set("a", o.a).set("b", o.b).set("bins", o.bins);
  report.section("result").set("hellinger", h);
  if (!o.out.empty()) report.write(o.out);
  out << "hellinger = " << format_double(h) << '\n';
  return 0;
}

void icv_entries(Report& report, const IcvReport& r) {
  report.section("summary");
  report.set("n_total", r.n_total).set("n_used", r.n_used);
  report.set("train_size", r.train_size).set("synth_size", r.synth_size);
  report.set("hellinger_mean", r.mean).set("hellinger_stddev", r.stddev);
  report.set("baseline_mean", r.baseline_mean).set("baseline_stddev", r.baseline_stddev);
  if (r.folds >= 2 && (r.stddev > 0 || r.baseline_stddev > 0)) {
    const WelchResult w = welch_t(r.mean, r.stddev, r.folds, r.baseline_mean, r.baseline_stddev, r.folds);
    report.set("welch_t_vs_baseline", w.t).set("welch_dof_vs_baseline", w.dof);
    report.set("welch_p_vs_baseline", w.p);
  }
  report.section("folds");
  std::vector<std::vector<std::string>> rows;
  for (std::size_t f = 0; f < r.hellinger.size(); ++f) {
    rows.push_back({std::to_string(f), format_double(r.hellinger[f]), format_double(r.baseline[f])});
  }
  report.table({"fold", "hellinger", "baseline"}, std::move(rows));
}

int cmd_icv(const Options& o, std::ostream& out) {
  PhaseTimer timer;
  const EstimatorConfig cfg = estimator_config(o);
  const Dataset data = read_csv(o.in);
  timer.mark("read");
  const IcvReport r = icv_run(data.points, cfg, o.folds, o.bins);
  timer.mark("icv");

  Report report = manifest_header("icv");
  config_entries(report, cfg);
  report.set("folds", o.folds).set("bins", o.bins).set("in", o.in);
  icv_entries(report, r);
  if (o.out.empty()) {
    out << report.str();
    return 0;
  }
  report.write(o.out);
  Report manifest = manifest_header("icv");
  config_entries(manifest, cfg);
  manifest.set("threads", static_cast<Index>(cfg.threads));
  manifest.set("folds", o.folds).set("bins", o.bins).set("in", o.in).set("out", o.out);
  timer.emit(manifest);
  manifest.section("fold_seconds");
  std::vector<std::vector<std::string>> rows;
  for (std::size_t f = 0; f < r.seconds.size(); ++f) {
    rows.push_back({std::to_string(f), format_double(r.seconds[f])});
  }
  manifest.table({"fold", "seconds"}, std::move(rows));
  manifest.write(o.out + ".manifest");
  out << "hellinger_mean = " << format_double(r.mean) << '\n';
  return 0;
}

int cmd_sweep(const Options& o, std::ostream& out) {
  const EstimatorConfig base = estimator_config(o);
  const Dataset data = read_csv(o.in);
  auto or_default = [](auto list, auto value) {
    if (list.empty()) list.push_back(value);
    return list;
  };
  const auto ks = or_default(o.k_list, o.k);
  const auto ms = or_default(o.m_list, o.m);
  const auto hs = or_default(o.h_list, o.h);
  const auto Ls = or_default(o.L_list, o.L);

  std::vector<EstimatorConfig> grid;
  switch (base.method) {
    case Method::KnnRex:
      for (Index k : ks)
        for (Index m : ms)
          if (m >= 1 && m <= k + 1) {
            EstimatorConfig c = base;
            c.k = k;
            c.m = m;
            grid.push_back(c);
          }
      break;
    case Method::FixedGaussian:
      for (double h : hs) {
        EstimatorConfig c = base;
        c.h = h;
        grid.push_back(c);
      }
      break;
    case Method::Bmp:
      for (Index k : ks)
        for (double h : hs) {
          EstimatorConfig c = base;
          c.k = k;
          c.h = h;
          grid.push_back(c);
        }
      break;
    case Method::KmRex:
      for (Index L : Ls)
        for (Index m : ms) {
          EstimatorConfig c = base;
          c.L = L;
          c.m = m;
          grid.push_back(c);
        }
      break;
    case Method::KnnRexCorrected:
      break;
  }

  std::vector<std::vector<std::string>> rows;
  double best = std::numeric_limits<double>::infinity();
  for (const auto& c : grid) {
    const IcvReport r = icv_run(data.points, c, o.folds, o.bins);
    best = std::min(best, r.mean);
    rows.push_back({std::string(method_name(c.method)), std::to_string(c.k), std::to_string(c.m),
                    format_double(c.h), std::to_string(c.L), format_double(r.mean),
                    format_double(r.stddev), format_double(r.baseline_mean),
                    format_double(r.baseline_stddev)});
  }
  Report table;
  table.table({"method", "k", "m", "h", "L", "hellinger_mean", "hellinger_stddev", "baseline_mean",
               "baseline_stddev"},
              std::move(rows));
  if (o.out.empty()) {
    out << table.str();
  } else {
    table.write(o.out);
    out << "wrote " << grid.size() << " settings to " << o.out << "; best mean = "
        << format_double(best) << '\n';
  }
  return 0;
}

std::string matrix_text(const Matrixd& m) {
  std::string s;
  for (Index i = 0; i < m.rows(); ++i) {
    if (i) s += "; ";
    for (Index j = 0; j < m.cols(); ++j) s += (j ? " " : "") + format_double(m(i, j));
  }
  return s;
}

int cmd_validate_asymptotics(const Options& o, std::ostream& out) {
  const DensityModel model =
      o.density == "uniform" ? uniform_density(o.dim) : linear_density(o.dim, o.slope);
  Rng rng(o.seed);
  const AsymptoticsReport r =
      asymptotics_report(model, Vectord::Zero(o.dim), o.deltas, o.samples, rng, o.threads);
  Report report = manifest_header("validate-asymptotics");
  report.set("density", o.density).set("d", o.dim);
  if (o.density == "linear") report.set("slope", o.slope);
  report.set("samples", o.samples).set("seed", std::to_string(o.seed));
  for (const auto& row : r.rows) {
    report.section("delta " + format_double(row.delta));
    report.set("theory", matrix_text(row.theory)).set("monte_carlo", matrix_text(row.mc));
    report.set("max_abs_deviation", row.max_deviation).set("max_stderr", row.max_stderr);
    report.set("max_zscore", row.max_zscore);
    report.set("first_term", row.first_norm);
    report.set("second_term_theory", row.second_theory).set("second_term_mc", row.second_mc);
    report.set("second_over_first_theory", row.second_theory / row.first_norm);
    report.set("second_over_first_mc", row.second_mc / row.first_norm);
  }
  if (!r.second_scaling.empty()) {
    report.section("scaling");
    for (std::size_t i = 0; i < r.second_scaling.size(); ++i) {
      report.set("second_term_ratio_" + std::to_string(i), r.second_scaling[i]);
    }
  }
  if (o.out.empty()) {
    out << report.str();
  } else {
    report.write(o.out);
    out << "wrote " << o.out << '\n';
  }
  return 0;
}

int cmd_bench_knn(const Options& o, std::ostream& out) {
  Report report = manifest_header("bench-knn");
  report.set("d", o.dim).set("k", o.k).set("m", o.m).set("reps", o.reps).set("l", o.l);
  report.set("seed", std::to_string(o.seed));
  std::vector<std::vector<std::string>> rows;
  double previous = 0;
  for (Index n : o.n_list) {
    Rng rng(o.seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    PointSetd x(n, o.dim);
    for (Index i = 0; i < x.size(); ++i) x.data()[i] = unit(rng);
    double build = std::numeric_limits<double>::infinity();
    double sample = std::numeric_limits<double>::infinity();
    for (Index rep = 0; rep < std::max<Index>(1, o.reps); ++rep) {
      auto t0 = Clock::now();
      const KnnIndex<double> index = build_knn(x, o.k, o.threads);
      build = std::min(build, std::chrono::duration<double>(Clock::now() - t0).count());
      if (o.l > 0) {
        t0 = Clock::now();
        const PointSetd y = synth_knn_rex(x, index, o.m, o.l, rng, o.threads);
        sample = std::min(sample, std::chrono::duration<double>(Clock::now() - t0).count());
      }
    }
    std::vector<std::string> row{std::to_string(n), format_double(build),
                                 previous > 0 ? format_double(build / previous) : std::string("")};
    if (o.l > 0) {
      row.push_back(format_double(sample));
      row.push_back(format_double(build / (build + sample)));
    }
    rows.push_back(std::move(row));
    previous = build;
  }
  report.section("results");
  std::vector<std::string> header{"n", "build_seconds", "build_ratio"};
  if (o.l > 0) {
    header.push_back("sample_seconds");
    header.push_back("build_fraction");
  }
  report.table(std::move(header), std::move(rows));
  if (o.out.empty()) {
    out << report.str();
  } else {
    report.write(o.out);
    out << "wrote " << o.out << '\n';
  }
  return 0;
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Population synthesis with the k-nearest-neighbor REX crossover kernel"};
  app.name("knnrex");
  // -h is not a help alias: --h is the bandwidth option.
  app.set_help_flag("--help", "print this help message and exit");
  app.require_subcommand(1, 1);
  Options o;

  auto* gen = app.add_subcommand("gen-data", "generate a synthetic dataset");
  gen->add_option("--dataset", o.dataset, "swiss-roll | ring | gmm")
      ->check(CLI::IsMember({"swiss-roll", "ring", "gmm"}));
  gen->add_option("--n", o.n, "number of points")->check(CLI::NonNegativeNumber);
  gen->add_option("--spec", o.spec, "mixture spec (JSON) for gmm")->check(CLI::ExistingFile);
  gen->add_option("--out", o.out, "output CSV")->required();
  add_common_options(gen, o);

  auto* synth = app.add_subcommand("synthesize", "synthesize a population from a sample");
  add_estimator_options(synth, o);
  synth->add_option("--l", o.l, "population size")->required();
  synth->add_option("--in", o.in, "sample CSV")->required()->check(CLI::ExistingFile);
  synth->add_option("--out", o.out, "output CSV")->required();
  add_common_options(synth, o);

  auto* corrected =
      app.add_subcommand("synthesize-corrected", "synthesize matching marginal frequencies");
  corrected->add_option("--k", o.k, "neighborhood size");
  corrected->add_option("--m", o.m, "KCS size");
  corrected->add_flag("--round-integers", o.round_integers, "round outputs to integers");
  corrected->add_option("--in", o.in, "sample CSV")->required()->check(CLI::ExistingFile);
  corrected->add_option("--marginals", o.marginals, "marginal spec CSV")
      ->required()
      ->check(CLI::ExistingFile);
  corrected->add_option("--total", o.total, "population size l")->required();
  corrected->add_option("--out", o.out, "output CSV")->required();
  add_common_options(corrected, o);

  auto* evaluate = app.add_subcommand("evaluate", "binned Hellinger distance of two CSVs");
  evaluate->add_option("--a", o.a, "first CSV")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--b", o.b, "second CSV")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--bins", o.bins, "bins per dimension")->check(CLI::PositiveNumber);
  evaluate->add_option("--out", o.out, "optional report file");

  auto* icv = app.add_subcommand("icv", "inverted cross-validation of one setting");
  add_estimator_options(icv, o);
  icv->add_option("--folds", o.folds, "number of folds")->check(CLI::Range(Index(2), Index(1) << 40));
  icv->add_option("--bins", o.bins, "bins per dimension")->check(CLI::PositiveNumber);
  icv->add_option("--in", o.in, "dataset CSV")->required()->check(CLI::ExistingFile);
  icv->add_option("--out", o.out, "report file (stdout when omitted)");
  add_common_options(icv, o);

  auto* sweep = app.add_subcommand("sweep", "ICV over a parameter grid");
  add_estimator_options(sweep, o);
  sweep->add_option("--k-list", o.k_list, "k values")->delimiter(',');
  sweep->add_option("--m-list", o.m_list, "m values")->delimiter(',');
  sweep->add_option("--h-list", o.h_list, "h values")->delimiter(',');
  sweep->add_option("--L-list", o.L_list, "L values")->delimiter(',');
  sweep->add_option("--folds", o.folds, "number of folds")->check(CLI::Range(Index(2), Index(1) << 40));
  sweep->add_option("--bins", o.bins, "bins per dimension")->check(CLI::PositiveNumber);
  sweep->add_option("--in", o.in, "dataset CSV")->required()->check(CLI::ExistingFile);
  sweep->add_option("--out", o.out, "table file (stdout when omitted)");
  add_common_options(sweep, o);

  auto* asym = app.add_subcommand("validate-asymptotics",
                                  "small-ball covariance expansion vs Monte Carlo");
  asym->add_option("--density", o.density, "uniform | linear")
      ->check(CLI::IsMember({"uniform", "linear"}));
  asym->add_option("--slope", o.slope, "gradient of the linear density");
  asym->add_option("--d", o.dim, "dimension")->check(CLI::PositiveNumber);
  asym->add_option("--deltas", o.deltas, "decreasing ball radii")->delimiter(',');
  asym->add_option("--samples", o.samples, "Monte-Carlo samples per radius")
      ->check(CLI::Range(Index(10000), Index(1) << 40));
  asym->add_option("--out", o.out, "report file (stdout when omitted)");
  add_common_options(asym, o);

  auto* bench = app.add_subcommand("bench-knn", "time index construction and sampling");
  bench->add_option("--n-list", o.n_list, "sample sizes")->delimiter(',');
  bench->add_option("--d", o.dim, "dimension")->check(CLI::PositiveNumber);
  bench->add_option("--k", o.k, "neighborhood size");
  bench->add_option("--m", o.m, "KCS size for the sampling phase");
  bench->add_option("--l", o.l, "points to synthesize per run (0 skips sampling)");
  bench->add_option("--reps", o.reps, "repetitions; the minimum time is reported");
  bench->add_option("--out", o.out, "report file (stdout when omitted)");
  add_common_options(bench, o);

  std::vector<std::string> argv_store{"knnrex"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : argv_store) argv.push_back(s.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }

  try {
    if (gen->parsed()) return cmd_gen_data(o, out);
    if (synth->parsed()) return cmd_synthesize(o, out);
    if (corrected->parsed()) return cmd_synthesize_corrected(o, out, err);
    if (evaluate->parsed()) return cmd_evaluate(o, out);
    if (icv->parsed()) return cmd_icv(o, out);
    if (sweep->parsed()) return cmd_sweep(o, out);
    if (asym->parsed()) return cmd_validate_asymptotics(o, out);
    if (bench->parsed()) return cmd_bench_knn(o, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace knnrex
