#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "isotropy/symlin.hpp"

namespace isotropy::harness {

class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

enum class ExperimentKind { Sweep, Whiten, Truncated, JohnSparsify, Bernoulli, Check };

std::string to_string(ExperimentKind kind);
ExperimentKind parse_kind(const std::string& name);

/// Flat key=value configuration. Lists are comma-separated; integer lists
/// also accept inclusive ranges "lo..hi". '#' starts a comment.
///
/// Keys: kind, source, n, M, seeds, eps, R, C, C0, trials, max_attempts,
/// distortion, seed, threads, save_dir.
struct ExperimentConfig {
  ExperimentKind kind = ExperimentKind::Sweep;
  /// cube | ball | simplex | hit-and-run:<family> | john:<fixture> | hpolytope:<path>
  std::string source = "cube";
  std::size_t n = 8;
  std::vector<std::size_t> m_grid;
  std::vector<std::uint64_t> seeds;
  double eps = 0.1;
  double r = 1.0;
  double c = 2.0;
  double c0 = 100.0;
  std::size_t trials = 1000;
  int max_attempts = 16;
  Vector distortion;
  std::uint64_t rng_seed = 0;
  std::size_t threads = 1;
  std::string save_dir;

  /// Nonempty grids, eps in (0,1), distinct seeds, positive constants.
  void validate() const;
};

/// Built-in defaults; the shipped configs/ files carry the same values.
ExperimentConfig default_config(ExperimentKind kind);

/// Applies key=value lines on top of `base`.
ExperimentConfig parse_config(std::istream& in, ExperimentConfig base);
ExperimentConfig load_config_file(const std::string& path, ExperimentConfig base);

/// Renders a config in the same key=value format.
std::string render_config(const ExperimentConfig& cfg);

}  // namespace isotropy::harness
