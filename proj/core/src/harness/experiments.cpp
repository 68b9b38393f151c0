#include "isotropy/harness/experiments.hpp"

#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>

#include "isotropy/bernoulli.hpp"
#include "isotropy/harness/checks.hpp"
#include "isotropy/john_sparsify.hpp"
#include "isotropy/moments.hpp"

namespace isotropy::harness {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string point_label(const ExperimentConfig& cfg, std::size_t m, std::uint64_t seed) {
  return to_string(cfg.kind) + " (source=" + cfg.source + ", n=" + std::to_string(cfg.n) +
         (m ? ", M=" + std::to_string(m) : std::string()) + ", seed=" + std::to_string(seed) + ")";
}

// Runs fn with the config point attached to any error message.
template <class F>
auto with_context(const ExperimentConfig& cfg, std::size_t m, std::uint64_t seed, F&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const std::exception& e) {
    throw ExperimentError(point_label(cfg, m, seed) + ": " + e.what());
  }
}

// Grid of (M index, seed index) pairs, M-major.
struct GridPoint {
  std::size_t m_index;
  std::size_t seed_index;
};

std::vector<GridPoint> grid(const ExperimentConfig& cfg) {
  std::vector<GridPoint> out;
  for (std::size_t i = 0; i < cfg.m_grid.size(); ++i)
    for (std::size_t s = 0; s < cfg.seeds.size(); ++s) out.push_back({i, s});
  return out;
}

std::vector<std::string> with_timing(std::vector<std::string> columns, const RunOptions& options) {
  if (options.timing) columns.push_back("wall_seconds");
  return columns;
}

void finish_row(std::vector<Cell>& row, const RunOptions& options, Clock::time_point start) {
  if (options.timing) row.emplace_back(seconds_since(start));
}

Cell u64(std::uint64_t v) { return Cell(v); }

std::pair<double, double> extreme_eigenvalues(const SymMatrix& t) {
  const Vector ev = eigenvalues(t);
  return {ev.back(), ev.front()};
}

}  // namespace

Body make_body(const std::string& source, std::size_t n) {
  if (source == "cube" || source == "ball" || source == "simplex")
    return isotropic_normalization(parse_body_family(source), n);
  if (source.rfind("hit-and-run:", 0) == 0)
    return isotropic_normalization(parse_body_family(source.substr(12)), n);
  if (source.rfind("hpolytope:", 0) == 0) {
    Body body = load_hpolytope_file(source.substr(10));
    if (body.dim() != n)
      throw ConfigError("source '" + source + "' has dimension " + std::to_string(body.dim()) + ", config n=" +
                        std::to_string(n));
    return body;
  }
  throw ConfigError("source '" + source + "' does not name a body");
}

Sampler make_source(const std::string& source, std::size_t n) {
  if (source.rfind("john:", 0) == 0) {
    const JohnFixture fixture = parse_john_fixture(source.substr(5));
    return john_sampler(canonical_john(fixture, n), source);
  }
  if (source.rfind("hit-and-run:", 0) == 0 || source.rfind("hpolytope:", 0) == 0)
    return hit_and_run_sampler(make_body(source, n));
  if (source == "cube" || source == "ball" || source == "simplex") return direct_sampler(make_body(source, n));
  throw ConfigError("unknown source '" + source + "'");
}

std::size_t truncated_sample_size(std::size_t n, double r, double eps, double c0) {
  if (n == 0 || !(r > 0.0) || !(eps > 0.0 && eps < 1.0) || !(c0 > 0.0))
    throw std::invalid_argument("truncated_sample_size: need n >= 1, R > 0, eps in (0,1), C0 > 0");
  const double q = r * r * static_cast<double>(n) / (eps * eps);
  const double m = std::ceil(c0 * q * std::log(q));
  if (!(m >= 3.0)) return 3;
  return static_cast<std::size_t>(m);
}

RandomStream point_stream(const ExperimentConfig& cfg, std::size_t point_index, std::uint64_t seed) {
  std::uint64_t key = hash_string(to_string(cfg.kind));
  key = hash_combine(key, point_index);
  key = hash_combine(key, seed);
  return RandomStream(cfg.rng_seed, key);
}

Table run_sweep(const ExperimentConfig& cfg, RunOptions options) {
  if (cfg.kind != ExperimentKind::Sweep) throw ConfigError("run_sweep: kind must be sweep");
  cfg.validate();
  struct Run {
    DeviationReport report;
    double wall = 0.0;
  };
  const auto points = grid(cfg);
  const auto runs = parallel_map<Run>(points.size(), cfg.threads, [&](std::size_t k) {
    const auto [mi, si] = points[k];
    const std::size_t m = cfg.m_grid[mi];
    const std::uint64_t seed = cfg.seeds[si];
    return with_context(cfg, m, seed, [&] {
      const auto start = Clock::now();
      RandomStream rng = point_stream(cfg, mi, seed);
      Sampler sampler = make_source(cfg.source, cfg.n);
      Run run{theorem1_report(draw_batch(sampler, m, rng)), 0.0};
      run.report.seed = seed;
      run.wall = seconds_since(start);
      return run;
    });
  });

  Table table;
  table.columns = with_timing({"record", "n", "M", "seed", "sampler", "deviation", "log_moment", "rhs_shape", "ratio",
                               "normalized_deviation", "in_regime"},
                              options);
  const std::size_t per_m = cfg.seeds.size();
  for (std::size_t mi = 0; mi < cfg.m_grid.size(); ++mi) {
    const double m = static_cast<double>(cfg.m_grid[mi]);
    const double scale = std::sqrt(m) / std::sqrt(std::log(m));
    double dev = 0.0, lm = 0.0, rhs = 0.0, ratio = 0.0, wall = 0.0;
    for (std::size_t si = 0; si < per_m; ++si) {
      const Run& run = runs[mi * per_m + si];
      const DeviationReport& r = run.report;
      std::vector<Cell> row{std::string("run"), u64(r.n), u64(r.m), u64(r.seed), r.sampler, r.deviation,
                            r.log_moment, r.rhs_shape, r.ratio, r.deviation * scale, r.in_regime};
      if (options.timing) row.emplace_back(run.wall);
      table.add_row(std::move(row));
      dev += r.deviation;
      lm += r.log_moment;
      rhs += r.rhs_shape;
      ratio += r.ratio;
      wall += run.wall;
    }
    const double k = static_cast<double>(per_m);
    const DeviationReport& first = runs[mi * per_m].report;
    std::vector<Cell> row{std::string("mean"), u64(first.n), u64(first.m), Cell{}, first.sampler, dev / k, lm / k,
                          rhs / k, ratio / k, dev / k * scale, Cell{}};
    if (options.timing) row.emplace_back(wall);
    table.add_row(std::move(row));
  }
  return table;
}

Table run_whiten(const ExperimentConfig& cfg, RunOptions options) {
  if (cfg.kind != ExperimentKind::Whiten) throw ConfigError("run_whiten: kind must be whiten");
  cfg.validate();
  const auto points = grid(cfg);
  const auto rows = parallel_map<std::vector<Cell>>(points.size(), cfg.threads, [&](std::size_t k) {
    const auto [mi, si] = points[k];
    const std::size_t m = cfg.m_grid[mi];
    const std::uint64_t seed = cfg.seeds[si];
    return with_context(cfg, m, seed, [&] {
      const auto start = Clock::now();
      RandomStream rng = point_stream(cfg, mi, seed);
      Sampler sampler = make_source(cfg.source, cfg.n);
      if (!cfg.distortion.empty()) {
        DenseMatrix a(cfg.n);
        for (std::size_t i = 0; i < cfg.n; ++i) a(i, i) = cfg.distortion[i];
        sampler = linear_image_sampler(std::move(sampler), std::move(a));
      }
      const SampleBatch train = draw_batch(sampler, m, rng);
      const SymMatrix t = empirical_second_moment(train);
      const Whitening w(t);
      const double train_dev = deviation(t);
      const double self_dev = deviation(empirical_second_moment(w.apply(train)));
      const SymMatrix fresh = empirical_second_moment(w.apply(draw_batch(sampler, m, rng)));
      const auto [lo, hi] = extreme_eigenvalues(fresh);
      std::vector<Cell> row{u64(cfg.n), u64(m), u64(seed), sampler.id(), cfg.eps, train_dev, self_dev,
                            deviation(fresh), lo, hi, epsilon_isotropy_check(fresh, cfg.eps)};
      finish_row(row, options, start);
      return row;
    });
  });
  Table table;
  table.columns = with_timing({"n", "M", "seed", "sampler", "eps", "train_deviation", "self_whitened_deviation",
                               "fresh_deviation", "fresh_min_eig", "fresh_max_eig", "isotropic"},
                              options);
  for (const auto& row : rows) table.add_row(row);
  return table;
}

Table run_truncated(const ExperimentConfig& cfg, RunOptions options) {
  if (cfg.kind != ExperimentKind::Truncated) throw ConfigError("run_truncated: kind must be truncated");
  cfg.validate();
  const std::size_t m = truncated_sample_size(cfg.n, cfg.r, cfg.eps, cfg.c0);
  const auto rows = parallel_map<std::vector<Cell>>(cfg.seeds.size(), cfg.threads, [&](std::size_t si) {
    const std::uint64_t seed = cfg.seeds[si];
    return with_context(cfg, m, seed, [&] {
      const auto start = Clock::now();
      RandomStream rng = point_stream(cfg, 0, seed);
      RandomStream pilot = rng.split(1);
      TruncatedSampler sampler(make_body(cfg.source, cfg.n), cfg.r, pilot);
      SampleBatch batch(cfg.n);
      batch.reserve(m);
      for (std::size_t i = 0; i < m; ++i) batch.push_back(sampler.draw(rng));
      const SymMatrix t = empirical_second_moment(batch);
      const auto [lo, hi] = extreme_eigenvalues(t);
      std::vector<Cell> row{u64(cfg.n), u64(m), u64(seed), sampler.truncated_body().describe(), cfg.r, cfg.eps,
                            cfg.c0, sampler.acceptance(), to_string(sampler.mode()), deviation(t), lo, hi,
                            epsilon_isotropy_check(t, cfg.eps)};
      finish_row(row, options, start);
      return row;
    });
  });
  Table table;
  table.columns = with_timing({"n", "M", "seed", "sampler", "R", "eps", "C0", "acceptance", "mode", "deviation",
                               "min_eig", "max_eig", "isotropic"},
                              options);
  for (const auto& row : rows) table.add_row(row);
  return table;
}

ExperimentResult run_john(const ExperimentConfig& cfg, RunOptions options) {
  if (cfg.kind != ExperimentKind::JohnSparsify) throw ConfigError("run_john: kind must be john-sparsify");
  cfg.validate();
  if (cfg.source.rfind("john:", 0) != 0) throw ConfigError("john-sparsify: source must be john:<fixture>");
  const JohnFixture fixture = parse_john_fixture(cfg.source.substr(5));
  const JohnDecomposition jd = canonical_john(fixture, cfg.n);
  const std::size_t m = choose_m(cfg.n, cfg.eps, cfg.c);
  if (!cfg.save_dir.empty()) std::filesystem::create_directories(cfg.save_dir);

  struct Outcome {
    std::vector<Cell> row;
    bool ok = false;
  };
  const auto outcomes = parallel_map<Outcome>(cfg.seeds.size(), cfg.threads, [&](std::size_t si) {
    const std::uint64_t seed = cfg.seeds[si];
    return with_context(cfg, m, seed, [&] {
      const auto start = Clock::now();
      RandomStream rng = point_stream(cfg, 0, seed);
      Outcome out;
      std::vector<Cell> tail;
      try {
        const ApproxJohn a = sparsify(jd, cfg.eps, rng, {cfg.c, cfg.max_attempts});
        const JohnVerification v = verify(a);
        out.ok = true;
        tail = {std::string("ok"), Cell(std::int64_t{a.attempts}), Cell(std::int64_t{a.deviation_failures}),
                Cell(std::int64_t{a.sum_failures}),
                v.residual_norm, v.centroid_norm, v.shift_sqrt_m};
        if (!cfg.save_dir.empty()) {
          const auto path = std::filesystem::path(cfg.save_dir) /
                            ("approx_john_" + to_string(fixture) + "_n" + std::to_string(cfg.n) + "_seed" +
                             std::to_string(seed) + ".txt");
          std::ofstream file(path);
          if (!file) throw ExperimentError("cannot write " + path.string());
          write_approx_john(file, a);
        }
      } catch (const SparsifyError& e) {
        tail = {std::string("failed"), Cell(std::int64_t{e.attempts()}), Cell(std::int64_t{e.deviation_failures()}),
                Cell(std::int64_t{e.sum_failures()}), Cell{}, Cell{}, Cell{}};
      }
      out.row = {u64(cfg.n), u64(m), u64(seed), to_string(fixture), cfg.eps, cfg.c};
      out.row.insert(out.row.end(), tail.begin(), tail.end());
      finish_row(out.row, options, start);
      return out;
    });
  });

  ExperimentResult result;
  result.table.columns = with_timing({"n", "M", "seed", "fixture", "eps", "C", "status", "attempts",
                                      "deviation_failures", "sum_failures", "residual_norm", "centroid_norm",
                                      "u_sqrt_M"},
                                     options);
  std::size_t successes = 0;
  for (const auto& o : outcomes) {
    result.table.add_row(o.row);
    successes += o.ok ? 1 : 0;
  }
  if (successes == 0) {
    result.exit_code = 1;
    result.message = "john-sparsify: all " + std::to_string(outcomes.size()) + " seeds failed within " +
                     std::to_string(cfg.max_attempts) + " attempts";
  } else {
    result.message = "john-sparsify: " + std::to_string(successes) + " of " + std::to_string(outcomes.size()) +
                     " seeds succeeded";
  }
  return result;
}

Table run_bernoulli(const ExperimentConfig& cfg, RunOptions options) {
  if (cfg.kind != ExperimentKind::Bernoulli) throw ConfigError("run_bernoulli: kind must be bernoulli");
  cfg.validate();
  const auto points = grid(cfg);
  const auto rows = parallel_map<std::vector<Cell>>(points.size(), cfg.threads, [&](std::size_t k) {
    const auto [mi, si] = points[k];
    const std::size_t m = cfg.m_grid[mi];
    const std::uint64_t seed = cfg.seeds[si];
    return with_context(cfg, m, seed, [&] {
      const auto start = Clock::now();
      RandomStream rng = point_stream(cfg, mi, seed);
      Sampler sampler = make_source(cfg.source, cfg.n);
      const auto ys = draw_batch(sampler, m, rng).to_vectors();
      const LemmaReport r = lemma_ratio(ys, cfg.trials, rng);
      std::vector<Cell> row{u64(r.m), u64(r.n), u64(r.trials), u64(seed), r.estimate, r.q, r.base_norm,
                            r.bound_shape, r.ratio, r.estimate_se};
      finish_row(row, options, start);
      return row;
    });
  });
  Table table;
  table.columns = with_timing(
      {"M", "n", "trials", "seed", "estimate", "Q", "base_norm", "bound_shape", "ratio", "estimate_se"}, options);
  for (const auto& row : rows) table.add_row(row);
  return table;
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, RunOptions options) {
  ExperimentResult result;
  switch (cfg.kind) {
    case ExperimentKind::Sweep: result.table = run_sweep(cfg, options); break;
    case ExperimentKind::Whiten: result.table = run_whiten(cfg, options); break;
    case ExperimentKind::Truncated: result.table = run_truncated(cfg, options); break;
    case ExperimentKind::JohnSparsify: return run_john(cfg, options);
    case ExperimentKind::Bernoulli: result.table = run_bernoulli(cfg, options); break;
    case ExperimentKind::Check: {
      const auto checks = run_checks(cfg.rng_seed);
      result.table.columns = {"check", "passed", "detail"};
      std::size_t failed = 0;
      for (const auto& c : checks) {
        result.table.add_row({c.name, c.passed, c.detail});
        failed += c.passed ? 0 : 1;
      }
      result.exit_code = failed ? 1 : 0;
      result.message = "check: " + std::to_string(checks.size() - failed) + " of " + std::to_string(checks.size()) +
                       " passed";
      break;
    }
  }
  return result;
}

}  // namespace isotropy::harness
