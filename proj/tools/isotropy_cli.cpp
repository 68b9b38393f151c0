// isotropy: run experiments and the invariant suite.
//
//   isotropy <sweep|whiten|truncated|john-sparsify|bernoulli|check>
//            [--config PATH] [--seed N] [--out PATH] [--format csv|json]
//            [--threads N] [--timing]
//
// Exit codes: 0 success, 1 experiment failure, 2 usage or config error.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "isotropy/harness/config.hpp"
#include "isotropy/harness/experiments.hpp"
#include "isotropy/harness/table.hpp"
#include "isotropy/random_stream.hpp"

namespace {

using namespace isotropy;
using namespace isotropy::harness;

constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct Options {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string out;
  std::string format = "csv";
  std::optional<std::size_t> threads;
  bool timing = false;
};

void add_common(CLI::App& sub, Options& o) {
  sub.add_option("--config", o.config, "key=value config file");
  sub.add_option("--seed", o.seed, "run seed (ISOTROPY_SEED overrides)");
  sub.add_option("--out", o.out, "output path (default stdout)");
  sub.add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
  sub.add_option("--threads", o.threads, "worker threads")->check(CLI::PositiveNumber);
  sub.add_flag("--timing", o.timing, "append a wall_seconds column");
}

ExperimentConfig build_config(ExperimentKind kind, const Options& o) {
  ExperimentConfig cfg = default_config(kind);
  if (!o.config.empty()) cfg = load_config_file(o.config, cfg);
  if (o.seed) cfg.rng_seed = *o.seed;
  cfg.rng_seed = resolve_seed(cfg.rng_seed);
  if (o.threads) cfg.threads = *o.threads;
  cfg.validate();
  // Resolve the source now so a bad name is a config error, not a run failure.
  switch (kind) {
    case ExperimentKind::Truncated: make_body(cfg.source, cfg.n); break;
    case ExperimentKind::Check: break;
    default: make_source(cfg.source, cfg.n); break;
  }
  return cfg;
}

void write_table(const Table& table, const Options& o) {
  auto emit = [&](std::ostream& out) {
    if (o.format == "json") {
      write_json(out, table);
    } else {
      write_csv(out, table);
    }
  };
  if (o.out.empty()) {
    emit(std::cout);
    return;
  }
  std::ofstream file(o.out, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open output file '" + o.out + "'");
  emit(file);
  if (!file) throw std::runtime_error("failed writing '" + o.out + "'");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Random sampling experiments for isotropic position", "isotropy"};
  app.require_subcommand(1);
  Options options;
  const std::pair<const char*, const char*> commands[] = {
      {"sweep", "deviation |T - id| over an M grid"},
      {"whiten", "whitening round trip on a distorted body"},
      {"truncated", "sampling from K intersected with R sqrt(n) B"},
      {"john-sparsify", "sparsify a John decomposition"},
      {"bernoulli", "Rademacher process against its bound"},
      {"check", "fast invariant suite"},
  };
  for (const auto& [name, help] : commands) add_common(*app.add_subcommand(name, help), options);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    std::cerr << app.help();
    return kExitUsage;
  }

  const CLI::App* sub = app.get_subcommands().front();
  ExperimentConfig cfg;
  try {
    cfg = build_config(parse_kind(sub->get_name()), options);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n\n" << sub->help();
    return kExitUsage;
  }

  try {
    const ExperimentResult result = run_experiment(cfg, {options.timing});
    write_table(result.table, options);
    if (!result.message.empty()) std::cerr << result.message << '\n';
    return result.exit_code == 0 ? EXIT_SUCCESS : kExitFailure;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}
