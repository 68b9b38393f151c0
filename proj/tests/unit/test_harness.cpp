#include <doctest.h>

#include <cmath>
#include <sstream>

#include "isotropy/harness/checks.hpp"
#include "isotropy/harness/config.hpp"
#include "isotropy/harness/experiments.hpp"
#include "isotropy/harness/table.hpp"

using namespace isotropy;
using namespace isotropy::harness;

namespace {

ExperimentConfig parse(const std::string& text, ExperimentKind kind = ExperimentKind::Sweep) {
  std::istringstream in(text);
  return parse_config(in, default_config(kind));
}

std::string header(const Table& t) {
  std::string out;
  for (const auto& c : t.columns) out += (out.empty() ? "" : ",") + c;
  return out;
}

double real(const Cell& c) { return std::get<double>(c); }

}  // namespace

TEST_CASE("config parsing") {
  const ExperimentConfig c = parse("# comment\nkind=sweep\nn = 5\nM=10,20\nseeds=3..6\nsource=ball  # trailing\n");
  CHECK(c.n == 5);
  CHECK(c.m_grid == std::vector<std::size_t>{10, 20});
  CHECK(c.seeds == std::vector<std::uint64_t>{3, 4, 5, 6});
  CHECK(c.source == "ball");

  CHECK_THROWS_WITH_AS(parse("n=8\nbogus=1\n"), doctest::Contains("line 2"), ConfigError);
  CHECK_THROWS_AS(parse("n=8\nn=9\n"), ConfigError);
  CHECK_THROWS_AS(parse("kind=whiten\n"), ConfigError);
  CHECK_THROWS_AS(parse("n\n"), ConfigError);
  CHECK_THROWS_AS(parse("n=-1\n"), ConfigError);
  CHECK_THROWS_AS(parse("n=0\n"), ConfigError);
  CHECK_THROWS_AS(parse("eps=1\n"), ConfigError);
  CHECK_THROWS_AS(parse("eps=nan\n"), ConfigError);
  CHECK_THROWS_AS(parse("seeds=1,1\n"), ConfigError);
  CHECK_THROWS_AS(parse("seeds=5..2\n"), ConfigError);
  CHECK_THROWS_AS(parse("M=0\n"), ConfigError);
  CHECK_THROWS_AS(parse("distortion=1,2\n", ExperimentKind::Whiten), ConfigError);
  CHECK_THROWS_AS(load_config_file("/nonexistent/x.cfg", default_config(ExperimentKind::Sweep)), ConfigError);
}

TEST_CASE("render_config round trip") {
  for (auto kind : {ExperimentKind::Sweep, ExperimentKind::Whiten, ExperimentKind::Truncated,
                    ExperimentKind::JohnSparsify, ExperimentKind::Bernoulli}) {
    const ExperimentConfig d = default_config(kind);
    const ExperimentConfig back = parse(render_config(d), kind);
    CHECK(render_config(back) == render_config(d));
  }
}

TEST_CASE("shipped configs match the built-in defaults") {
  for (auto kind : {ExperimentKind::Sweep, ExperimentKind::Whiten, ExperimentKind::Truncated,
                    ExperimentKind::JohnSparsify, ExperimentKind::Bernoulli}) {
    const std::string path = std::string(ISOTROPY_CONFIG_DIR) + "/" + to_string(kind) + ".cfg";
    CAPTURE(path);
    const ExperimentConfig shipped = load_config_file(path, default_config(kind));
    CHECK(render_config(shipped) == render_config(default_config(kind)));
    // also when read on top of an unrelated base
    ExperimentConfig blank;
    blank.kind = kind;
    blank.seeds = {0};
    blank.m_grid = {3};
    CHECK(load_config_file(path, blank).seeds == default_config(kind).seeds);
  }
}

TEST_CASE("table output") {
  Table t;
  t.columns = {"a", "b", "c", "d"};
  t.add_row({std::string("x,y"), 0.1, Cell{}, true});
  t.add_row({std::int64_t{-3}, std::uint64_t{7}, std::string("say \"hi\""), false});
  CHECK(to_csv(t) == "a,b,c,d\n\"x,y\",0.10000000000000001,,true\n-3,7,\"say \"\"hi\"\"\",false\n");
  std::ostringstream js;
  write_json(js, t);
  CHECK(js.str().find("\"a\": \"x,y\"") != std::string::npos);
  CHECK(js.str().find("\"c\": null") != std::string::npos);
  CHECK_THROWS_AS(t.add_row({1.0}), std::logic_error);
  CHECK(t.column_index("c") == 2);
}

TEST_CASE("parallel_map keeps index order and rethrows the lowest failure") {
  const auto out = parallel_map<int>(10, 4, [](std::size_t i) { return int(i * i); });
  for (std::size_t i = 0; i < 10; ++i) CHECK(out[i] == int(i * i));
  CHECK_THROWS_WITH(parallel_map<int>(10, 3,
                                      [](std::size_t i) -> int {
                                        if (i == 4 || i == 8) throw std::runtime_error("bad " + std::to_string(i));
                                        return 0;
                                      }),
                    "bad 4");
}

TEST_CASE("sweep") {
  ExperimentConfig cfg = default_config(ExperimentKind::Sweep);
  cfg.n = 3;
  cfg.m_grid = {8, 16, 32, 64, 128, 256, 512};
  const Table t = run_sweep(cfg);
  CHECK(header(t) == "record,n,M,seed,sampler,deviation,log_moment,rhs_shape,ratio,normalized_deviation,in_regime");
  CHECK(t.rows.size() == 7 * 10 + 7);

  const std::size_t dev = t.column_index("deviation"), rec = t.column_index("record");
  for (std::size_t mi = 0; mi < 7; ++mi) {
    double sum = 0;
    for (std::size_t s = 0; s < 10; ++s) {
      const auto& row = t.rows[mi * 11 + s];
      CHECK(std::get<std::string>(row[rec]) == "run");
      sum += real(row[dev]);
    }
    const auto& mean = t.rows[mi * 11 + 10];
    CHECK(std::get<std::string>(mean[rec]) == "mean");
    CHECK(std::abs(real(mean[dev]) - sum / 10) <= 1e-12);
  }

  SUBCASE("John source has log_moment sqrt(n)") {
    cfg.source = "john:crosspolytope";
    const Table j = run_sweep(cfg);
    for (const auto& row : j.rows) CHECK(real(row[j.column_index("log_moment")]) == doctest::Approx(std::sqrt(3.0)));
  }
  SUBCASE("timing column") {
    cfg.m_grid = {8};
    cfg.seeds = {0};
    CHECK(run_sweep(cfg, {true}).columns.back() == "wall_seconds");
  }
  SUBCASE("threads do not change results") {
    cfg.threads = 3;
    CHECK(to_csv(run_sweep(cfg)) == to_csv(t));
  }
}

TEST_CASE("unknown source fails with the config point attached") {
  ExperimentConfig cfg = default_config(ExperimentKind::Sweep);
  cfg.source = "dodecahedron";
  cfg.m_grid = {16};
  cfg.seeds = {0};
  CHECK_THROWS_WITH_AS(run_sweep(cfg), doctest::Contains("M=16, seed=0"), ExperimentError);
}

TEST_CASE("whiten") {
  ExperimentConfig cfg = default_config(ExperimentKind::Whiten);
  cfg.m_grid = {20000};
  cfg.seeds = {0, 1};
  const Table t = run_whiten(cfg);
  CHECK(header(t) ==
        "n,M,seed,sampler,eps,train_deviation,self_whitened_deviation,fresh_deviation,fresh_min_eig,fresh_max_eig,"
        "isotropic");
  for (const auto& row : t.rows) {
    CHECK(real(row[t.column_index("train_deviation")]) > 1.0);
    CHECK(real(row[t.column_index("self_whitened_deviation")]) <= 1e-10);
    CHECK(std::get<bool>(row[t.column_index("isotropic")]));
  }
}

TEST_CASE("truncated") {
  ExperimentConfig cfg = default_config(ExperimentKind::Truncated);
  cfg.n = 4;
  cfg.c0 = 5;
  cfg.seeds = {0, 1};
  SUBCASE("schema") {
    const Table t = run_truncated(cfg);
    CHECK(header(t) == "n,M,seed,sampler,R,eps,C0,acceptance,mode,deviation,min_eig,max_eig,isotropic");
    CHECK(std::get<std::uint64_t>(t.rows[0][1]) == truncated_sample_size(4, 1.0, 0.2, 5));
  }
  SUBCASE("vacuous truncation matches the plain sweep in distribution") {
    cfg.r = 2.0;
    cfg.eps = 0.25;
    cfg.seeds = {0, 1, 2, 3};
    const Table t = run_truncated(cfg);
    for (const auto& row : t.rows) {
      CHECK(real(row[t.column_index("acceptance")]) == 1.0);
      CHECK(real(row[t.column_index("deviation")]) < 0.1);
    }
  }
  SUBCASE("infeasible radius") {
    cfg.n = 40;
    cfg.r = 0.3;
    cfg.c0 = 1;
    cfg.eps = 0.5;
    CHECK_THROWS_WITH_AS(run_truncated(cfg), doctest::Contains("too aggressive"), ExperimentError);
  }
}

TEST_CASE("truncated_sample_size") {
  // q = 16 / 0.04 = 400
  CHECK(truncated_sample_size(16, 1.0, 0.2, 1.0) == std::size_t(std::ceil(400 * std::log(400.0))));
  CHECK(truncated_sample_size(1, 0.1, 0.9, 1.0) == 3);
  CHECK_THROWS(truncated_sample_size(4, 0.0, 0.2, 1.0));
}

TEST_CASE("john-sparsify") {
  ExperimentConfig cfg = default_config(ExperimentKind::JohnSparsify);
  cfg.seeds = {0, 1, 2, 3, 4};
  const ExperimentResult r = run_john(cfg);
  CHECK(r.exit_code == 0);
  CHECK(header(r.table) ==
        "n,M,seed,fixture,eps,C,status,attempts,deviation_failures,sum_failures,residual_norm,centroid_norm,u_sqrt_M");
  for (const auto& row : r.table.rows) {
    CHECK(std::get<std::int64_t>(row[r.table.column_index("attempts")]) <= cfg.max_attempts);
    CHECK(std::get<std::uint64_t>(row[1]) == 355);
  }
  cfg.source = "john:crosspolytope";
  cfg.n = 8;
  cfg.c = 0.001;
  cfg.max_attempts = 2;
  const ExperimentResult failed = run_john(cfg);
  CHECK(failed.exit_code == 1);
  CHECK(failed.message.find("all 5 seeds failed") != std::string::npos);
  for (const auto& row : failed.table.rows) CHECK(std::get<std::int64_t>(row[7]) == 2);
  cfg.source = "cube";
  CHECK_THROWS_AS(run_john(cfg), ConfigError);
}

TEST_CASE("bernoulli") {
  ExperimentConfig cfg = default_config(ExperimentKind::Bernoulli);
  cfg.m_grid = {8, 64};
  cfg.trials = 100;
  const Table t = run_bernoulli(cfg);
  CHECK(header(t) == "M,n,trials,seed,estimate,Q,base_norm,bound_shape,ratio,estimate_se");
  CHECK(t.rows.size() == 2);
}

TEST_CASE("sources") {
  CHECK(make_source("cube", 3).id().rfind("cube", 0) == 0);
  CHECK(make_source("hit-and-run:ball", 3).dim() == 3);
  CHECK(make_source("john:cubevertices", 3).dim() == 3);
  CHECK(make_source("hpolytope:" + std::string(ISOTROPY_TEST_DATA_DIR) + "/square.txt", 2).dim() == 2);
  CHECK_THROWS_AS(make_source("hpolytope:" + std::string(ISOTROPY_TEST_DATA_DIR) + "/square.txt", 3), ConfigError);
  CHECK_THROWS(make_source("torus", 3));
  CHECK_THROWS(make_source("john:dodecahedron", 3));
}

TEST_CASE("point streams") {
  ExperimentConfig cfg = default_config(ExperimentKind::Sweep);
  RandomStream a = point_stream(cfg, 0, 1), b = point_stream(cfg, 1, 0), c = point_stream(cfg, 0, 1);
  const auto x = a.next_u64();
  CHECK(x != b.next_u64());
  CHECK(x == c.next_u64());
  cfg.kind = ExperimentKind::Bernoulli;
  CHECK(point_stream(cfg, 0, 1).next_u64() != x);
}

TEST_CASE("check suite passes") {
  for (const auto& c : run_checks(0)) {
    CAPTURE(c.detail);
    CHECK_MESSAGE(c.passed, c.name);
  }
}
